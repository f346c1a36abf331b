"""Benchmark runner: every variant on every instance, one table row per pair.

Cases may run in parallel; a semaphore caps concurrent solves at
``HULLCHECK_THREADS`` and rows are sorted by ``(instance id, variant)`` before
they are emitted, so output does not depend on scheduling.
"""

from __future__ import annotations

import csv
import io
import logging
import threading
import time
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from hullcheck.cli.config import Variant
from hullcheck.cli.driver import solve_variant
from hullcheck.cli.generators import Instance
from hullcheck.cli.report import write_trace
from hullcheck.core.certificate import RunStats
from hullcheck.core.geometry import Tolerances
from hullcheck.core.solver import halving_iterations, iteration_bound, visibility_envelope
from hullcheck.utils.constant import HULLCHECK_THREADS

BENCH_COLUMNS: tuple[str, ...] = (
    "instance",
    "family",
    "variant",
    "pivot_rule",
    "outcome",
    "iterations",
    "pivot_scans",
    "initial_gap",
    "final_gap",
    "observed_nu",
    "observed_c",
    "iteration_bound",
    "envelope",
    "wall_seconds",
)


@dataclass
class BenchRow:
    """One ``(instance, variant)`` result.

    Attributes:
        instance: Instance id.
        family: Instance family.
        variant: Solver variant.
        pivot_rule: Pivot rule used.
        outcome: Outcome kind.
        iterations: Executed steps.
        pivot_scans: Pivot-predicate evaluations.
        initial_gap: Starting gap.
        final_gap: Last gap.
        observed_nu: Observed visibility constant.
        observed_c: Observed visibility factor.
        iteration_bound: ``ceil(48 / eps^2)``.
        envelope: Interior-ball step envelope, for instances with a known ``rho``.
        wall_seconds: Wall-clock time, only when requested.
        stats: The full run statistics.
    """

    instance: str
    family: str
    variant: str
    pivot_rule: str
    outcome: str
    iterations: int
    pivot_scans: int
    initial_gap: float | None
    final_gap: float | None
    observed_nu: float
    observed_c: float
    iteration_bound: int
    envelope: float | None = None
    wall_seconds: float | None = None
    stats: RunStats = field(default_factory=RunStats, repr=False)

    def as_record(self) -> list[Any]:
        """Return the CSV cells in :data:`BENCH_COLUMNS` order."""
        values = [getattr(self, column) for column in BENCH_COLUMNS]
        return ["" if v is None else repr(v) if isinstance(v, float) else v for v in values]


class BenchRunner:
    """Run solver variants over instance families with bounded concurrency."""

    def __init__(
        self,
        *,
        threads: int = HULLCHECK_THREADS,
        semaphore: threading.Semaphore | None = None,
        wall_clock: bool = False,
    ) -> None:
        """Initialize the runner.

        Args:
            threads: Worker threads.
            semaphore: Optional semaphore shared across runners; defaults to
                one sized to ``threads``.
            wall_clock: Record wall-clock seconds per case.
        """
        self._threads = max(1, threads)
        self._semaphore = semaphore or threading.Semaphore(self._threads)
        self._wall_clock = wall_clock

    def run_case(self, instance: Instance, variant: Variant, tol: Tolerances) -> BenchRow:
        """Solve one instance with one variant.

        Args:
            instance: The instance.
            variant: Solver variant.
            tol: Tolerances.

        Returns:
            The table row.
        """
        with self._semaphore:
            started = time.perf_counter()
            outcome, stats = solve_variant(variant, instance.points, instance.query, tol)
            elapsed = time.perf_counter() - started
        logging.info(
            "Bench %s/%s: %s after %d steps",
            instance.instance_id,
            variant,
            outcome.kind,
            stats.iterations,
        )
        envelope = None
        initial = stats.gap_series[0] if stats.gap_series else None
        if instance.rho is not None and initial is not None and stats.radius > 0.0:
            envelope = visibility_envelope(stats.radius, instance.rho, initial, tol.eps)
        return BenchRow(
            instance=instance.instance_id,
            family=str(instance.family),
            variant=str(variant),
            pivot_rule=str(tol.pivot_rule),
            outcome=outcome.kind,
            iterations=stats.iterations,
            pivot_scans=stats.pivot_scans,
            initial_gap=initial,
            final_gap=stats.final_gap,
            observed_nu=stats.observed_nu,
            observed_c=stats.observed_c,
            iteration_bound=iteration_bound(tol.eps),
            envelope=envelope,
            wall_seconds=elapsed if self._wall_clock else None,
            stats=stats,
        )

    def run(
        self, instances: Sequence[Instance], variants: Sequence[Variant], tol: Tolerances
    ) -> list[BenchRow]:
        """Run every ``(instance, variant)`` pair.

        Args:
            instances: Instances to solve.
            variants: Variants to compare.
            tol: Shared tolerances.

        Returns:
            Rows sorted by ``(instance, variant)``.
        """
        cases = [(inst, Variant(v)) for inst in instances for v in variants]
        if self._threads == 1:
            rows = [self.run_case(inst, v, tol) for inst, v in cases]
        else:
            with ThreadPoolExecutor(max_workers=self._threads) as pool:
                rows = list(pool.map(lambda case: self.run_case(case[0], case[1], tol), cases))
        return sorted(rows, key=lambda r: (r.instance, r.variant))


def render_table(rows: Sequence[BenchRow], *, wall_clock: bool = False) -> str:
    """Render bench rows as CSV text; the wall-clock column only with ``wall_clock``."""
    columns = BENCH_COLUMNS if wall_clock else BENCH_COLUMNS[:-1]
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow(row.as_record()[: len(columns)])
    return buffer.getvalue()


def write_traces(directory: Path, rows: Sequence[BenchRow]) -> list[Path]:
    """Write one gap-trace CSV per row into ``directory``."""
    paths = []
    for row in rows:
        path = directory / f"{row.instance}__{row.variant}.csv"
        write_trace(path, row.stats)
        paths.append(path)
    return paths


def halving_table(nus: Sequence[float], halvings: Sequence[int]) -> list[list[Any]]:
    """Iterations that guarantee ``2^-L`` gap reduction, per visibility constant.

    Args:
        nus: Visibility constants in ``(0, 1)``.
        halvings: Values of ``L``.

    Returns:
        Rows ``[nu, c, k_L1, k_L2, ...]`` with ``c = 1/nu^2 - 1``.
    """
    rows: list[list[Any]] = []
    for nu in nus:
        c = 1.0 / (nu * nu) - 1.0
        rows.append([nu, c, *(halving_iterations(nu, h) for h in halvings)])
    return rows


def halving_violations(rows: Sequence[BenchRow], halvings: int, *, nu_max: float = 0.9) -> int:
    """Count runs with observed ``nu <= nu_max`` that miss ``2^-L`` within ``7 L`` steps.

    Args:
        rows: Bench rows.
        halvings: ``L``.
        nu_max: Only runs at least this visible are checked.

    Returns:
        Number of violating runs.
    """
    violations = 0
    for row in rows:
        series = row.stats.gap_series
        if row.observed_nu > nu_max or not series or len(row.stats.round_starts) != 1:
            continue
        limit = 7 * halvings
        if len(series) <= limit:
            # finished before the checkpoint
            continue
        if min(series[: limit + 1]) > series[0] * 2.0**-halvings:
            violations += 1
    return violations
