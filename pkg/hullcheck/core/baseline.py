"""Frank-Wolfe (sparse greedy) baseline for ``min f(x) = d(Ax, p)^2`` over the simplex.

The greedy step moves toward the vertex with the smallest gradient coordinate
and uses exact line search, which is closed-form for this quadratic.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from hullcheck.core.certificate import (
    Certificate,
    RunStats,
    make_approx,
    make_inconclusive,
    witness_or_inconclusive,
)
from hullcheck.core.geometry import (
    Iterate,
    PointSet,
    QueryPoint,
    Tolerances,
    Vector,
    pivot_mask,
)
from hullcheck.core.pivots import pivot_angle
from hullcheck.core.solver import nearest_vertex


@dataclass(frozen=True, eq=False)
class GreedyState:
    """A simplex vector with its image and objective.

    Attributes:
        x: Simplex vector of length ``n``.
        point: ``A x``.
        objective: ``f(x) = ||A x - p||^2``.
        last_index: Vertex chosen by the step that produced this state.
        last_alpha: Line-search step that produced this state.
    """

    x: Vector
    point: Vector
    objective: float
    last_index: int | None = None
    last_alpha: float | None = None

    @classmethod
    def at_vertex(cls, points: PointSet, index: int, p: QueryPoint) -> GreedyState:
        """Start at vertex ``e_index``."""
        x = np.zeros(points.count)
        x[index] = 1.0
        point = points.point(index).copy()
        residual = point - p.coords
        return cls(x, point, float(residual @ residual))

    @classmethod
    def from_x(cls, points: PointSet, x: ArrayLike, p: QueryPoint) -> GreedyState:
        """Build a state from an explicit simplex vector."""
        xx = np.array(x, dtype=np.float64)
        point = points.combine(xx)
        residual = point - p.coords
        return cls(xx, point, float(residual @ residual))

    @property
    def gap(self) -> float:
        """``d(Ax, p)``."""
        return math.sqrt(self.objective)

    def as_iterate(self) -> Iterate:
        """View the state as a Triangle Algorithm iterate."""
        return Iterate(self.x, self.point, self.gap)


def greedy_gradient(state: GreedyState, points: PointSet, p: QueryPoint) -> Vector:
    """Return ``grad f(x) = 2 A^T (A x - p)``."""
    return 2.0 * (points.columns.T @ (state.point - p.coords))


def greedy_objective(x: ArrayLike, points: PointSet, p: QueryPoint) -> float:
    """Evaluate ``f(x) = ||A x - p||^2`` for any coefficient vector."""
    residual = points.columns @ np.asarray(x, dtype=np.float64) - p.coords
    return float(residual @ residual)


def greedy_step(state: GreedyState, points: PointSet, p: QueryPoint) -> GreedyState:
    """Take one Frank-Wolfe step with exact line search.

    Args:
        state: Current state.
        points: The point set ``S`` (columns of ``A``).
        p: Query point.

    Returns:
        The next state; its objective never exceeds the current one.
    """
    grad = greedy_gradient(state, points, p)
    j = int(np.argmin(grad))
    direction = points.point(j) - state.point
    residual = state.point - p.coords
    denom = float(direction @ direction)
    alpha = 0.0 if denom == 0.0 else min(1.0, max(0.0, -float(residual @ direction) / denom))

    x = (1.0 - alpha) * state.x
    x[j] += alpha
    point = state.point + alpha * direction
    moved = point - p.coords
    objective = float(moved @ moved)
    if objective > state.objective:
        # rounding only; keep the old state
        return GreedyState(state.x, state.point, state.objective, j, 0.0)
    return GreedyState(x, point, objective, j, alpha)


def greedy_solve(
    points: PointSet, p: QueryPoint, tol: Tolerances
) -> tuple[Certificate, RunStats]:
    """Run the greedy baseline with the Triangle Algorithm's outcome shapes.

    The run starts at the vertex nearest to ``p``, stops with an approximate
    solution once ``d(Ax, p) < eps * R``, and reports a witness as soon as the
    iterate is strictly closer than ``p`` to every point of ``S``.

    Args:
        points: The point set ``S``.
        p: Query point.
        tol: Accuracy and budget; the pivot rule is ignored.

    Returns:
        ``(certificate, stats)``.
    """
    p.check_against(points)
    radius = points.radius(p)
    radii = points.distances_to(p)
    stats = RunStats(radius=radius)
    start, _ = nearest_vertex(points, p)
    state = GreedyState.at_vertex(points, start, p)
    stats.record_start(state.gap)

    while True:
        iterate = state.as_iterate()
        if state.objective == 0.0 or state.gap < tol.eps * radius:
            certificate: Certificate = make_approx(iterate, radius, tol.eps)
            break
        stats.pivot_scans += points.count
        if not np.any(pivot_mask(points.columns, state.point, p.coords)):
            certificate = witness_or_inconclusive(iterate, p, points)
            break
        if stats.iterations >= tol.max_iters:
            certificate = make_inconclusive(iterate)
            break
        new = greedy_step(state, points, p)
        j = int(new.last_index) if new.last_index is not None else 0
        angle = pivot_angle(state.point, p.coords, points.point(j))
        stats.record_step(new.gap, angle, j, float(radii[j]))
        state = new

    logging.debug(
        "Greedy run finished: %s after %d steps (gap %.3e)",
        certificate.kind,
        stats.iterations,
        state.gap,
    )
    return certificate, stats
