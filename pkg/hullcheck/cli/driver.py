"""Solver dispatch for the command-line layer.

Maps a :class:`RunConfig` onto the core solvers, runs the eps-halving driver
and translates outcomes into verdicts and exit codes.
"""

from __future__ import annotations

import logging
from collections.abc import Callable

from hullcheck.cli.config import Mode, RunConfig, Variant
from hullcheck.core.baseline import greedy_solve
from hullcheck.core.certificate import ApproxSolution, Certificate, RunStats
from hullcheck.core.geometry import Iterate, PointSet, QueryPoint, Tolerances, Vector
from hullcheck.core.lp import LpResult, bounded_m_solve, doubling_solve, two_phase_solve
from hullcheck.core.solver import BallResult, BallSystem, solve, solve_intersecting_balls
from hullcheck.core.variants import VirtualOutcome, avta_solve, delta_k_solve, solve_virtual

Outcome = Certificate | VirtualOutcome | LpResult | BallResult
Solver = Callable[[PointSet, QueryPoint, Tolerances], tuple[Outcome, RunStats]]

EXIT_POSITIVE = 0
EXIT_NEGATIVE = 1
EXIT_INCONCLUSIVE = 2
EXIT_INPUT_ERROR = 3

_EXIT_CODES: dict[str, int] = {
    "approx": EXIT_POSITIVE,
    "coord-approx": EXIT_POSITIVE,
    "approx-feasible": EXIT_POSITIVE,
    "empty-intersection": EXIT_POSITIVE,
    "witness": EXIT_NEGATIVE,
    "general-witness": EXIT_NEGATIVE,
    "infeasible": EXIT_NEGATIVE,
    "intersection-point": EXIT_NEGATIVE,
    "inconclusive": EXIT_INCONCLUSIVE,
}

_VERDICTS: dict[str, str] = {
    "approx": "inside",
    "coord-approx": "inside",
    "approx-feasible": "feasible",
    "empty-intersection": "empty",
    "witness": "outside",
    "general-witness": "outside",
    "infeasible": "infeasible",
    "intersection-point": "nonempty",
    "inconclusive": "inconclusive",
}

_SOLVERS: dict[Variant, Solver] = {
    Variant.TRIANGLE: solve,
    Variant.VIRTUAL: solve_virtual,
    Variant.AVTA: avta_solve,
    Variant.DELTA_K: delta_k_solve,
    Variant.GREEDY: greedy_solve,
}


def exit_code_for(outcome: Outcome) -> int:
    """Return the process exit code for an outcome."""
    return _EXIT_CODES[outcome.kind]


def verdict_for(outcome: Outcome) -> str:
    """Return the report verdict for an outcome."""
    return _VERDICTS[outcome.kind]


def solve_with_halving(
    points: PointSet, p: QueryPoint, tol: Tolerances, *, start_eps: float = 0.5
) -> tuple[Certificate, RunStats]:
    """Run the Triangle Algorithm with eps = 0.5, 0.25, ... down to ``tol.eps``.

    Each round warm-starts from the previous approximate solution; the first
    witness or inconclusive outcome ends the run.

    Args:
        points: The point set ``S``.
        p: Query point.
        tol: Target tolerances; ``tol.eps`` is the floor.
        start_eps: Accuracy of the first round.

    Returns:
        ``(certificate, stats)`` with one stats round per accuracy tried.
    """
    stats = RunStats(radius=points.radius(p))
    eps = start_eps
    warm: Iterate | None = None
    while True:
        round_eps = max(eps, tol.eps)
        certificate, round_stats = solve(points, p, tol.with_eps(round_eps), initial=warm)
        stats.absorb(round_stats)
        if not isinstance(certificate, ApproxSolution) or round_eps <= tol.eps:
            logging.info(
                "Halving driver: %s at eps=%.3e after %d rounds",
                certificate.kind,
                round_eps,
                len(stats.round_starts),
            )
            return certificate, stats
        warm = Iterate.from_coeffs(points, certificate.coeffs, p)
        eps /= 2.0


def solve_variant(
    variant: Variant, points: PointSet, p: QueryPoint, tol: Tolerances
) -> tuple[Outcome, RunStats]:
    """Dispatch a membership problem to the solver for ``variant``."""
    return _SOLVERS[Variant(variant)](points, p, tol)


def run_membership(
    config: RunConfig, points: PointSet, p: QueryPoint
) -> tuple[Outcome, RunStats]:
    """Solve a membership (or intersecting-balls) instance under ``config``.

    Args:
        config: Run configuration.
        points: The point set ``S`` (ball centres in ``balls`` mode).
        p: Query point (the common boundary point in ``balls`` mode).

    Returns:
        ``(outcome, stats)``.
    """
    tol = config.tolerances()
    if config.mode is Mode.BALLS:
        if config.variant is not Variant.TRIANGLE:
            logging.warning("balls mode always uses the triangle variant")
        return solve_intersecting_balls(BallSystem.through(points, p.coords), tol)
    if config.halving:
        if config.variant is Variant.TRIANGLE:
            return solve_with_halving(points, p, tol)
        logging.warning("--halving only applies to the triangle variant; ignored")
    return solve_variant(config.variant, points, p, tol)


def run_lp(config: RunConfig, a: Vector, b: Vector) -> tuple[Outcome, RunStats]:
    """Solve an LP feasibility instance under ``config``.

    Args:
        config: Run configuration with an LP mode.
        a: Constraint matrix.
        b: Right-hand side.

    Returns:
        ``(outcome, stats)``.
    """
    if config.mode is Mode.LP_NORECESSION:
        return two_phase_solve(a, b, config.eps0, max_iters=config.max_iters)
    if config.mode is Mode.LP_BOUNDED_M:
        assert config.big_m is not None
        return bounded_m_solve(a, b, config.big_m, config.eps0, max_iters=config.max_iters)
    return doubling_solve(a, b, config.eps0, config.mu_cap, max_iters=config.max_iters)
