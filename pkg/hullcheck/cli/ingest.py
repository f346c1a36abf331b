"""Read and write the CSV point formats.

A points file holds one point per row as comma-separated decimals, optionally
preceded by a ``# dim=m`` header; other ``#`` lines and blank lines are ignored.
Row numbers in error messages count data rows from 1.
"""

from __future__ import annotations

import csv
import math
import re
from collections.abc import Iterable, Sequence
from pathlib import Path

import numpy as np

from hullcheck.core.errors import DimensionMismatchError, InputFormatError
from hullcheck.core.geometry import PointSet, QueryPoint, Vector

_DIM_HEADER = re.compile(r"^#\s*dim\s*=\s*(\d+)\s*$")


def _parse_field(text: str, row: int) -> float:
    try:
        value = float(text.strip())
    except ValueError:
        msg = f"Row {row}: cannot parse {text.strip()!r} as a number"
        raise InputFormatError(msg, row=row) from None
    if not math.isfinite(value):
        msg = f"Row {row}: non-finite value {text.strip()!r}"
        raise InputFormatError(msg, row=row)
    return value


def read_rows(path: Path) -> tuple[list[list[float]], int | None]:
    """Parse a CSV file of decimal rows.

    Args:
        path: File to read.

    Returns:
        ``(rows, declared_dim)``; ``declared_dim`` is None without a header.

    Raises:
        InputFormatError: If a row is malformed, ragged or contradicts the header.
    """
    rows: list[list[float]] = []
    declared: int | None = None
    width: int | None = None
    with path.open(newline="", encoding="utf-8") as handle:
        for record in csv.reader(handle):
            if not record or all(not cell.strip() for cell in record):
                continue
            first = record[0].strip()
            if first.startswith("#"):
                match = _DIM_HEADER.match(",".join(record).strip())
                if match and not rows:
                    declared = int(match.group(1))
                continue
            row = len(rows) + 1
            values = [_parse_field(cell, row) for cell in record]
            expected = declared if declared is not None else width
            if expected is not None and len(values) != expected:
                msg = f"Row {row}: expected {expected} fields, got {len(values)}"
                raise InputFormatError(msg, row=row)
            width = len(values)
            rows.append(values)
    return rows, declared


def ingest_points(points_path: Path, query_path: Path) -> tuple[PointSet, QueryPoint]:
    """Load ``S`` and ``p`` from their CSV files.

    Args:
        points_path: One point per row.
        query_path: A single row holding the query point.

    Returns:
        ``(points, query)``.

    Raises:
        InputFormatError: If either file is malformed or empty.
        DimensionMismatchError: If the query dimension differs from the points.
    """
    rows, _ = read_rows(points_path)
    if not rows:
        msg = f"{points_path}: no points"
        raise InputFormatError(msg)
    query_rows, _ = read_rows(query_path)
    if len(query_rows) != 1:
        msg = f"{query_path}: expected exactly one row, got {len(query_rows)}"
        raise InputFormatError(msg, row=2 if query_rows else None)
    points = PointSet.from_rows(rows)
    query = QueryPoint(np.array(query_rows[0]))
    query.check_against(points)
    return points, query


def ingest_lp(a_path: Path, b_path: Path) -> tuple[Vector, Vector]:
    """Load ``A`` (one matrix row per CSV row) and ``b`` (one row).

    Raises:
        InputFormatError: If either file is malformed or empty.
        DimensionMismatchError: If ``b`` does not match the row count of ``A``.
    """
    a_rows, _ = read_rows(a_path)
    if not a_rows:
        msg = f"{a_path}: empty matrix"
        raise InputFormatError(msg)
    b_rows, _ = read_rows(b_path)
    if len(b_rows) != 1:
        msg = f"{b_path}: expected exactly one row, got {len(b_rows)}"
        raise InputFormatError(msg)
    a = np.array(a_rows, dtype=np.float64)
    b = np.array(b_rows[0], dtype=np.float64)
    if b.shape[0] != a.shape[0]:
        msg = f"b has {b.shape[0]} entries but A has {a.shape[0]} rows"
        raise DimensionMismatchError(msg)
    return a, b


def format_row(values: Iterable[float]) -> str:
    """Join values with shortest round-trip decimal formatting."""
    return ",".join(repr(float(v)) for v in values)


def write_rows(path: Path, rows: Sequence[Sequence[float]], *, header: bool = True) -> None:
    """Write rows in the format :func:`read_rows` accepts.

    Args:
        path: Destination file.
        rows: Rows of equal length.
        header: Emit a ``# dim=m`` header.
    """
    lines = []
    if header and rows:
        lines.append(f"# dim={len(rows[0])}")
    lines.extend(format_row(r) for r in rows)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_instance(directory: Path, points: PointSet, query: QueryPoint) -> tuple[Path, Path]:
    """Write ``points.csv`` and ``query.csv`` into ``directory``."""
    directory.mkdir(parents=True, exist_ok=True)
    points_path = directory / "points.csv"
    query_path = directory / "query.csv"
    write_rows(points_path, points.columns.T.tolist())
    write_rows(query_path, [query.coords.tolist()])
    return points_path, query_path
