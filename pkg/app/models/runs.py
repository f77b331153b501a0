"""Run configuration and reproducibility manifest of a command-line invocation."""

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field


class OutputFile(BaseModel):
    """A file written by a run, with its content hash."""

    path: str
    sha256: str
    format: str = Field(..., description="json or csv")


class RunConfig(BaseModel):
    """Everything that determines the outputs of one run."""

    command: str = Field(..., description="Subcommand name")
    argv: List[str] = Field(default_factory=list, description="Arguments after the program name")
    options: Dict[str, Any] = Field(default_factory=dict, description="Parsed numeric flags")
    threads: int = Field(1, ge=1)
    output: Optional[str] = Field(None, description="Result path")
    tolerances: Dict[str, float] = Field(default_factory=dict)


class Manifest(BaseModel):
    """Written beside the results; replaying its argv reproduces them."""

    run: RunConfig
    settings: Dict[str, Any] = Field(default_factory=dict, description="Effective configuration")
    versions: Dict[str, str] = Field(default_factory=dict, description="Package versions")
    outputs: List[OutputFile] = Field(default_factory=list)
