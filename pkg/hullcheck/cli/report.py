"""JSON reports and gap-trace CSV files."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from hullcheck.core.certificate import RunStats
from hullcheck.utils.constant import REPORT_SCHEMA, TRACE_COLUMNS


def json_safe(value: object) -> object:
    """Convert numpy scalars/arrays to plain Python and non-finite floats to None."""
    if isinstance(value, dict):
        return {str(k): json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_safe(v) for v in value]
    if isinstance(value, np.ndarray):
        return [json_safe(v) for v in value.tolist()]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def build_report(
    *,
    verdict: str,
    outcome: dict[str, Any],
    stats: RunStats,
    config: dict[str, Any],
    inputs: dict[str, str],
    visibility: dict[str, Any] | None = None,
    timings: dict[str, Any] | None = None,
) -> dict[str, Any]:
    """Assemble a ``hullcheck/1`` report.

    Args:
        verdict: Human-readable verdict.
        outcome: Serialized certificate or LP result.
        stats: Run statistics.
        config: Serialized run configuration.
        inputs: Input file names by role.
        visibility: Optional visibility diagnostics.
        timings: Counters, plus wall-clock seconds when requested.

    Returns:
        The report as a JSON-ready dictionary.
    """
    report = {
        "schema": REPORT_SCHEMA,
        "verdict": verdict,
        "certificate": outcome,
        "stats": stats.to_dict(),
        "visibility": visibility,
        "timings": timings or {},
        "config": config,
        "inputs": inputs,
    }
    return {key: json_safe(value) for key, value in report.items()}


def dumps(report: dict[str, Any]) -> str:
    """Serialize a report; floats use the shortest round-trip representation."""
    return json.dumps(json_safe(report), indent=2, allow_nan=False) + "\n"


def trace_rows(stats: RunStats) -> list[tuple[int, float, int | None, float | None]]:
    """Flatten a run's gap series into ``(iter, gap, pivot_index, pivot_angle)`` rows.

    Round starts carry no pivot.
    """
    starts = set(stats.round_starts)
    rows: list[tuple[int, float, int | None, float | None]] = []
    step = 0
    for i, gap in enumerate(stats.gap_series):
        if i in starts or step >= len(stats.pivot_index_series):
            rows.append((i, gap, None, None))
            continue
        rows.append((i, gap, stats.pivot_index_series[step], stats.pivot_angle_series[step]))
        step += 1
    return rows


def render_trace(stats: RunStats) -> str:
    """Render the trace CSV as text."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(TRACE_COLUMNS)
    for it, gap, index, angle in trace_rows(stats):
        writer.writerow([
            it,
            repr(float(gap)),
            "" if index is None else index,
            "" if angle is None else repr(float(angle)),
        ])
    return buffer.getvalue()


def write_trace(path: Path, stats: RunStats) -> None:
    """Write the trace CSV for a run."""
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_trace(stats), encoding="utf-8")
