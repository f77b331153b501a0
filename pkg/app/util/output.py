"""Deterministic JSON and CSV writers for command results and manifests."""

import csv
import hashlib
import io
import json
import math
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from app.util.logging import get_logger

logger = get_logger("output")

FLOAT_FORMAT = ".17g"


def format_float(value: float) -> str:
    """17 significant digits, '.' as decimal point; non-finite values become null."""
    if not math.isfinite(value):
        return "null"
    text = format(value, FLOAT_FORMAT)
    if text in ("-0", "0"):
        return "0"
    return text


def _normalize(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    return value


def dumps_json(value: Any, indent: int = 2, _level: int = 0) -> str:
    """JSON text with fixed key order and 17-digit floats."""
    value = _normalize(value)
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format_float(value)
    if isinstance(value, complex):
        return dumps_json({"re": value.real, "im": value.imag}, indent, _level)
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps_json(v, indent, _level + 1)}" for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        if all(isinstance(_normalize(v), (int, float)) and not isinstance(v, bool) for v in value):
            return "[" + ", ".join(dumps_json(v, indent, _level + 1) for v in value) + "]"
        items = [pad + dumps_json(v, indent, _level + 1) for v in value]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"Cannot serialize {type(value).__name__}")


def _cell(value: Any) -> str:
    value = _normalize(value)
    if isinstance(value, float):
        text = format_float(value)
        return "" if text == "null" else text
    return str(value)


def dumps_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buffer.getvalue()


def write_text(path: Path, text: str) -> str:
    """Write UTF-8 text, creating parent directories; returns the sha256 of the bytes."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = text.encode("utf-8")
    path.write_bytes(data)
    logger.debug(f"Wrote {len(data)} bytes to {path}")
    return hashlib.sha256(data).hexdigest()


def sha256_file(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()

