"""The Triangle Algorithm main loop and the intersecting-balls adapter.

``solve`` starts at the vertex nearest to ``p`` and repeatedly pulls the
iterate toward a pivot until either the stop test ``d(p, p') < eps * d(p, v)``
passes (approximate solution), no pivot exists (witness), or the iteration
budget runs out (inconclusive).
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import ArrayLike

from hullcheck.core.auxiliary import auxiliary_rule_wrap
from hullcheck.core.certificate import (
    ApproxSolution,
    Certificate,
    Inconclusive,
    RunStats,
    Witness,
    make_approx,
    make_inconclusive,
    witness_or_inconclusive,
)
from hullcheck.core.errors import DegenerateSegmentError, InvalidInputError
from hullcheck.core.geometry import Iterate, PointSet, QueryPoint, Tolerances, Vector
from hullcheck.core.pivots import (
    PivotChoice,
    PivotSelector,
    pivot_angle,
    pull_towards,
    vertex_choice,
)
from hullcheck.utils.constant import HULLCHECK_REFRESH_PERIOD, POINT_DRIFT_TOL

AcceptCallback = Callable[[Iterate], bool]


def triangle_step(
    iterate: Iterate,
    pivot_index: int,
    p: QueryPoint,
    points: PointSet,
    *,
    refresh_period: int = HULLCHECK_REFRESH_PERIOD,
) -> Iterate:
    """Project ``p`` onto the segment from the iterate to pivot ``v_j``.

    Args:
        iterate: Current iterate ``p'``.
        pivot_index: Index ``j`` of a pivot for ``p'``.
        p: Query point.
        points: The point set ``S``.
        refresh_period: Recompute the cached point from coefficients this often.

    Returns:
        The new iterate ``p''``.

    Raises:
        DegenerateSegmentError: If ``v_j`` coincides with ``p'``.
    """
    new, _ = pull_towards(
        iterate, vertex_choice(points, p, pivot_index), p, points, refresh_period=refresh_period
    )
    return new


def nearest_vertex(points: PointSet, p: QueryPoint) -> tuple[int, float]:
    """Return ``(index, distance)`` of the vertex closest to ``p`` (lowest index on ties)."""
    radii = points.distances_to(p)
    index = int(np.argmin(radii))
    return index, float(radii[index])


def solve(
    points: PointSet,
    p: QueryPoint,
    tol: Tolerances,
    *,
    initial: Iterate | None = None,
    accept: AcceptCallback | None = None,
) -> tuple[Certificate, RunStats]:
    """Run the Triangle Algorithm on ``(S, p)``.

    Args:
        points: The point set ``S``.
        p: Query point.
        tol: Accuracy, budget and pivot rule.
        initial: Optional warm-start iterate; defaults to the nearest vertex.
        accept: Optional early-exit test evaluated on every iterate; when it
            returns True the iterate is reported as an approximate solution
            with ``eps_used`` widened to cover its gap. It is not consulted
            while ``gap >= R``, where no ``eps < 1`` covers the gap.

    Returns:
        ``(certificate, stats)``.
    """
    p.check_against(points)
    radius = points.radius(p)
    stats = RunStats(radius=radius)
    start_index, current_radius = nearest_vertex(points, p)
    iterate = initial if initial is not None else Iterate.at_vertex(points, start_index, p)
    stats.record_start(iterate.gap)

    policy = auxiliary_rule_wrap(
        tol.pivot_rule, stats, points, p, refresh_period=tol.refresh_period
    )
    selector = PivotSelector(
        points, p, tol.pivot_rule, pool=policy.pool if policy is not None else None
    )

    try:
        while True:
            if iterate.gap == 0.0 or iterate.gap < tol.eps * current_radius:
                return _finish(make_approx(iterate, radius, tol.eps), stats)
            if accept is not None:
                eps_used = _covering_eps(iterate, radius)
                if eps_used is not None and accept(iterate):
                    stats.events.append(f"accepted early at step {stats.iterations}")
                    return _finish(make_approx(iterate, radius, eps_used), stats)
            if stats.iterations >= tol.max_iters:
                return _finish(make_inconclusive(iterate), stats)

            choice = selector.select(iterate.point)
            if choice is None:
                return _finish(witness_or_inconclusive(iterate, p, points), stats)
            try:
                new, _ = pull_towards(
                    iterate, choice, p, points, refresh_period=tol.refresh_period
                )
            except DegenerateSegmentError:
                selector.skip(choice.index)
                continue
            if policy is not None:
                new = policy.revise(iterate, choice, new)
            _record(stats, iterate, choice, new, p)
            if policy is not None:
                policy.observe(stats)
            selector.clear_skips()
            iterate = new
            current_radius = choice.radius
            if stats.iterations % tol.refresh_period == 0:
                logging.debug("Step %d: gap %.6e", stats.iterations, iterate.gap)
    finally:
        stats.pivot_scans += selector.scans


def _record(
    stats: RunStats, before: Iterate, choice: PivotChoice, after: Iterate, p: QueryPoint
) -> None:
    angle = pivot_angle(before.point, p.coords, choice.point)
    stats.record_step(after.gap, angle, choice.index, choice.radius)


def _covering_eps(iterate: Iterate, radius: float) -> float | None:
    """Smallest float ``eps`` with ``gap < eps * R``, or None when it is not below 1."""
    if radius <= 0.0:
        return None
    eps = math.nextafter(iterate.gap / radius, math.inf)
    while not iterate.gap < eps * radius:
        eps = math.nextafter(eps, math.inf)
    return eps if eps < 1.0 else None


def _finish(certificate: Certificate, stats: RunStats) -> tuple[Certificate, RunStats]:
    logging.debug(
        "Triangle run finished: %s after %d steps (gap %.3e)",
        certificate.kind,
        stats.iterations,
        stats.final_gap if stats.final_gap is not None else float("nan"),
    )
    return certificate, stats


# --- Complexity bookkeeping ---


def iteration_bound(eps: float) -> int:
    """Worst-case step count ``ceil(48 / eps^2)`` to reach gap ``< eps * R``."""
    if not 0.0 < eps < 1.0:
        msg = f"eps must lie in (0, 1), got {eps!r}"
        raise InvalidInputError(msg)
    return math.ceil(48.0 / (eps * eps))


def halving_iterations(nu: float, halvings: int) -> int:
    """Steps that guarantee ``delta_k <= 2^-L delta_0`` when ``delta_k <= nu^k delta_0``.

    Args:
        nu: Visibility constant in ``(0, 1)``.
        halvings: ``L``, the number of halvings of the starting gap.

    Returns:
        ``ceil(L * ln 2 / -ln nu)``.

    Raises:
        InvalidInputError: If ``nu`` is outside ``(0, 1)`` or ``L`` is negative.
    """
    if not 0.0 < nu < 1.0 or halvings < 0:
        msg = f"Need 0 < nu < 1 and L >= 0, got nu={nu!r}, L={halvings!r}"
        raise InvalidInputError(msg)
    return math.ceil(halvings * math.log(2.0) / -math.log(nu) - 1e-12)


def visibility_envelope(radius: float, rho: float, delta0: float, eps: float) -> float:
    """Step envelope ``(4 R^2 / rho^2) ln(delta_0 / (eps R))`` for an interior ball ``B(p, rho)``.

    Raises:
        InvalidInputError: If ``radius`` or ``rho`` is not positive.
    """
    if rho <= 0.0 or radius <= 0.0:
        msg = "radius and rho must be positive"
        raise InvalidInputError(msg)
    return 4.0 * radius * radius / (rho * rho) * max(0.0, math.log(delta0 / (eps * radius)))


# --- Intersecting balls ---


@dataclass(frozen=True, eq=False)
class BallSystem:
    """Open balls ``B(v_i, r_i)`` whose boundaries all pass through ``p``.

    Attributes:
        centers: Ball centres ``S``.
        radii: Radii ``r_i``.
        common_point: The shared boundary point ``p``.
    """

    centers: PointSet
    radii: Vector
    common_point: Vector

    def __post_init__(self) -> None:
        """Validate that ``p`` lies on every sphere.

        Raises:
            InvalidInputError: If a radius is non-positive or inconsistent with ``p``.
        """
        radii = np.array(self.radii, dtype=np.float64)
        point = QueryPoint(self.common_point)
        point.check_against(self.centers)
        if radii.shape != (self.centers.count,) or np.any(radii <= 0.0):
            msg = "Need one positive radius per centre"
            raise InvalidInputError(msg)
        dists = self.centers.distances_to(point)
        if np.any(np.abs(dists - radii) > POINT_DRIFT_TOL * (1.0 + radii)):
            msg = "Common point does not lie on every ball boundary"
            raise InvalidInputError(msg)
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "common_point", point.coords)

    @classmethod
    def through(cls, centers: PointSet, common_point: ArrayLike) -> BallSystem:
        """Build the ball system whose radii are the distances to ``common_point``."""
        point = QueryPoint(common_point)
        return cls(centers, centers.distances_to(point), point.coords)


@dataclass
class EmptyIntersection:
    """``conv(S)`` meets no point of the ball intersection; ``p`` is in the hull.

    Attributes:
        certificate: Approximate convex combination for ``p``.
    """

    certificate: ApproxSolution
    kind: str = "empty-intersection"

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary for JSON serialization.

        Returns:
            Dictionary representation of the result.
        """
        return {"kind": self.kind, "certificate": self.certificate.to_dict()}


@dataclass
class IntersectionPoint:
    """A point of ``conv(S)`` strictly inside every ball.

    Attributes:
        point: The intersection point.
        coeffs: Its convex coefficients over the centres.
        certificate: The underlying witness.
    """

    point: Vector
    coeffs: Vector
    certificate: Witness
    kind: str = "intersection-point"

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary for JSON serialization.

        Returns:
            Dictionary representation of the result.
        """
        return {
            "kind": self.kind,
            "point": [float(x) for x in self.point],
            "coeffs": [float(x) for x in self.coeffs],
            "certificate": self.certificate.to_dict(),
        }


BallResult = EmptyIntersection | IntersectionPoint | Inconclusive


def solve_intersecting_balls(balls: BallSystem, tol: Tolerances) -> tuple[BallResult, RunStats]:
    """Decide whether the balls meet inside ``conv(centers)``.

    Args:
        balls: The ball system.
        tol: Solver tolerances.

    Returns:
        ``(result, stats)``; a witness of the membership problem is itself the
        intersection point.
    """
    certificate, stats = solve(balls.centers, QueryPoint(balls.common_point), tol)
    if isinstance(certificate, Witness):
        return IntersectionPoint(certificate.point, certificate.coeffs, certificate), stats
    if isinstance(certificate, ApproxSolution):
        return EmptyIntersection(certificate), stats
    return certificate, stats
