"""Text and structured serialization of logical matrices.

The text form mirrors the column-index notation used throughout the package:
``D<rows>[i1,i2,...,in]``.  Function patterns use the same shape with ``*``
for unconstrained entries.  The structured form is a plain dict
``{"rows": r, "cols": [...]}`` suitable for JSON documents.
"""

from __future__ import annotations

import re
from typing import Optional, Sequence

from .stp import LogicalMatrix

__all__ = [
    "format_matrix",
    "parse_matrix",
    "format_pattern",
    "parse_pattern",
    "matrix_to_structured",
    "matrix_from_structured",
]

_DFORM = re.compile(r"^\s*D\s*(\d+)\s*\[(.*)\]\s*$", re.DOTALL)


def format_matrix(m: LogicalMatrix) -> str:
    return f"D{m.rows}[{','.join(str(c) for c in m.cols)}]"


def _split_body(body: str) -> list[str]:
    items = [part.strip() for part in body.split(",")]
    if items == [""]:
        return []
    return items


def parse_matrix(text: str) -> LogicalMatrix:
    """Parse ``D<rows>[i1,...,in]``; whitespace and newlines are ignored."""
    match = _DFORM.match(text)
    if not match:
        raise ValueError(f"not a D-notation matrix: {text[:40]!r}")
    rows = int(match.group(1))
    items = _split_body(match.group(2))
    if not items:
        raise ValueError("D-notation matrix needs at least one column")
    cols = []
    for item in items:
        if not item.isdigit():
            raise ValueError(f"bad column index {item!r}")
        cols.append(int(item))
    return LogicalMatrix(rows, cols)


def format_pattern(rows: int, entries: Sequence[Optional[int]]) -> str:
    body = ",".join("*" if e is None else str(e) for e in entries)
    return f"D{rows}[{body}]"


def parse_pattern(text: str) -> tuple[int, tuple[Optional[int], ...]]:
    """Parse a pattern with ``*`` wildcards; returns (rows, entries)."""
    match = _DFORM.match(text)
    if not match:
        raise ValueError(f"not a D-notation pattern: {text[:40]!r}")
    rows = int(match.group(1))
    entries: list[Optional[int]] = []
    for item in _split_body(match.group(2)):
        if item == "*":
            entries.append(None)
        elif item.isdigit():
            value = int(item)
            if not 1 <= value <= rows:
                raise ValueError(f"pattern entry {value} out of range [1, {rows}]")
            entries.append(value)
        else:
            raise ValueError(f"bad pattern entry {item!r}")
    if not entries:
        raise ValueError("pattern needs at least one entry")
    return rows, tuple(entries)


def matrix_to_structured(m: LogicalMatrix) -> dict:
    return {"rows": m.rows, "cols": list(m.cols)}


def matrix_from_structured(doc: dict) -> LogicalMatrix:
    return LogicalMatrix(int(doc["rows"]), [int(c) for c in doc["cols"]])
