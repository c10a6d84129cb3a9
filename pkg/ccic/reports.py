"""JSON and CSV report writers."""

from __future__ import annotations

import csv
import io
import json
import logging
import sys
from pathlib import Path
from typing import Iterable

logger = logging.getLogger(__name__)

# Sweep CSV layout; one row per (function, check).
SWEEP_COLUMNS = [
    "function",
    "n",
    "check",
    "lhs_bits",
    "rhs_bits",
    "gap",
    "tolerance",
    "pass",
    "detail",
]


def to_json(payload) -> str:
    return json.dumps(payload, ensure_ascii=False, indent=2) + "\n"


def to_csv(rows: Iterable[dict], columns: list[str] = SWEEP_COLUMNS) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _cell(row.get(k)) for k in columns})
    return buf.getvalue()


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def emit(text: str, out: str | Path | None = None) -> None:
    """Write a rendered report to ``out``, or to stdout when no path is given."""
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    logger.info("wrote report to %s", path)


def render(payload, fmt: str = "json") -> str:
    if fmt == "json":
        return to_json(payload)
    if fmt == "csv":
        rows = payload if isinstance(payload, list) else payload.get("rows", [payload])
        columns = SWEEP_COLUMNS if rows and "check" in rows[0] else list(rows[0].keys()) if rows else SWEEP_COLUMNS
        return to_csv(rows, columns)
    raise ValueError(f"unknown report format {fmt!r}; choose json or csv")
