"""Subcommand handlers, one module per group of operations."""

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field


class CommandResult(BaseModel):
    """Output of a handler: a JSON document or a CSV table."""

    format: str = Field("json", description="json or csv")
    payload: Optional[Dict[str, Any]] = None
    header: List[str] = Field(default_factory=list)
    rows: List[List[Any]] = Field(default_factory=list)


def register_all(subparsers) -> None:
    """Attach every subcommand parser."""
    from app.commands import fields, reflections, scans, tables

    for module in (tables, fields, reflections, scans):
        module.register(subparsers)
