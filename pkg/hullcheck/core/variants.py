"""Virtual, approximated-virtual and Delta_k variants of the Triangle Algorithm."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np
from numpy.typing import ArrayLike

from hullcheck.core.certificate import (
    Certificate,
    Inconclusive,
    RunStats,
    Witness,
    make_approx,
    make_inconclusive,
    witness_or_inconclusive,
)
from hullcheck.core.errors import DegenerateSegmentError, InvalidInputError
from hullcheck.core.geometry import (
    Iterate,
    PivotRule,
    PointSet,
    QueryPoint,
    Tolerances,
    Vector,
    pivot_mask,
    project_to_segment,
    project_to_triangle,
    strict_pivot_mask,
)
from hullcheck.core.pivots import PivotChoice, PivotSelector, pivot_angle, pull_towards
from hullcheck.core.solver import nearest_vertex, solve

VIRTUAL_CONTRACTION: float = math.sqrt(3.0) / 2.0
DELTA_K_INNER_MAX_ITERS: int = 10_000


def _plain_rule(rule: PivotRule) -> PivotRule:
    # auxiliary strategies only steer the plain solver
    if rule in {PivotRule.STRATEGY_I, PivotRule.STRATEGY_IV}:
        return PivotRule.FIRST_INDEX
    return rule


# --- Virtual Triangle Algorithm ---


@dataclass
class CoordApprox:
    """Approximate solution known by coordinates only (no convex coefficients)."""

    point: Vector
    gap: float
    kind: str = field(default="coord-approx", init=False)

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary for JSON serialization.

        Returns:
            Dictionary representation of the outcome.
        """
        return {
            "kind": self.kind,
            "point": [float(x) for x in self.point],
            "gap": self.gap,
            "coordinates_only": True,
        }


@dataclass
class GeneralWitness:
    """A point of ``R^m`` strictly closer than ``p`` to every ``v_i``."""

    point: Vector
    kind: str = field(default="general-witness", init=False)

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary for JSON serialization.

        Returns:
            Dictionary representation of the outcome.
        """
        return {"kind": self.kind, "point": [float(x) for x in self.point]}


VirtualOutcome = CoordApprox | GeneralWitness | Inconclusive


def virtual_pivot(p_prime: ArrayLike, p: ArrayLike, v_j: ArrayLike) -> Vector:
    """Return ``p + (d(p, p') / d(p, v_j)) (v_j - p)``, the pivot rescaled to radius ``d(p, p')``.

    Raises:
        InvalidInputError: If ``p`` coincides with ``v_j``.
    """
    x = np.asarray(p_prime, dtype=np.float64)
    q = np.asarray(p, dtype=np.float64)
    v = np.asarray(v_j, dtype=np.float64)
    r = float(np.linalg.norm(v - q))
    if r == 0.0:
        msg = "Query point coincides with the pivot"
        raise InvalidInputError(msg)
    return q + (float(np.linalg.norm(x - q)) / r) * (v - q)


def virtual_step(p_prime: ArrayLike, p: ArrayLike, v_j: ArrayLike) -> Vector:
    """Return the midpoint of ``p'`` and the virtual pivot.

    The gap contracts by ``cos(phi / 2)`` where ``phi`` is the angle ``p' p v_j``;
    this is at most ``sqrt(3) / 2`` once ``phi >= pi / 3`` and at most
    ``1 / sqrt(2)`` for strict pivots.

    Args:
        p_prime: Current iterate.
        p: Query point.
        v_j: Pivot.

    Returns:
        The next virtual iterate.
    """
    x = np.asarray(p_prime, dtype=np.float64)
    return 0.5 * x + 0.5 * virtual_pivot(x, p, v_j)


def virtual_iteration_ceiling(delta0: float, radius: float, eps: float) -> int:
    """Step ceiling ``ceil(ln(eps R / delta_0) / ln(sqrt(3)/2)) + 2`` for :func:`solve_virtual`."""
    if delta0 <= eps * radius:
        return 2
    return math.ceil(math.log(eps * radius / delta0) / math.log(VIRTUAL_CONTRACTION)) + 2


def _separating_point(x: Vector, q: Vector, columns: Vector) -> Vector:
    # every v_i lies strictly on the far side of the hyperplane through p normal to p' - p
    u = x - q
    s = float(np.min((columns - q[:, None]).T @ u)) / float(u @ u)
    return q + s * u


def solve_virtual(
    points: PointSet, p: QueryPoint, tol: Tolerances
) -> tuple[VirtualOutcome, RunStats]:
    """Run the Virtual Triangle Algorithm.

    Iterates are tracked by coordinates only. Each step uses the strict pivot
    with the largest angle at ``p``. When pivots exist but none is strict, the
    hyperplane through ``p`` orthogonal to ``p' - p`` separates ``p`` from
    ``S`` and a general witness on the segment toward ``p'`` is returned.

    Args:
        points: The point set ``S``.
        p: Query point.
        tol: Accuracy and budget; the pivot rule is ignored.

    Returns:
        ``(outcome, stats)``.
    """
    p.check_against(points)
    q = p.coords
    columns = points.columns
    radii = points.distances_to(p)
    stats = RunStats(radius=float(radii.max()))
    start, current_radius = nearest_vertex(points, p)
    x = points.point(start).copy()
    gap = float(np.linalg.norm(x - q))
    stats.record_start(gap)

    while True:
        if gap == 0.0 or gap < tol.eps * current_radius:
            outcome: VirtualOutcome = CoordApprox(x, gap)
            break
        if stats.iterations >= tol.max_iters:
            outcome = Inconclusive(gap=gap)
            break
        stats.pivot_scans += points.count
        mask = pivot_mask(columns, x, q)
        if not mask.any():
            outcome = GeneralWitness(x)
            break
        strict = mask & strict_pivot_mask(columns, x, q)
        if not strict.any():
            outcome = GeneralWitness(_separating_point(x, q, columns))
            break
        cos_at_p = ((columns - q[:, None]).T @ (x - q)) / (radii * gap)
        j = int(np.argmin(np.where(strict, cos_at_p, np.inf)))
        v = columns[:, j]
        angle = pivot_angle(x, q, v)
        x = virtual_step(x, q, v)
        gap = float(np.linalg.norm(x - q))
        stats.record_step(gap, angle, j, float(radii[j]))
        current_radius = float(radii[j])

    logging.debug("Virtual run finished: %s after %d steps", outcome.kind, stats.iterations)
    return outcome, stats


# --- Approximated Virtual Triangle Algorithm ---


@dataclass
class AvtaCycle:
    """One outer AVTA cycle, exposed for diagnostics.

    Attributes:
        plain: Iterate after an ordinary triangle step.
        virtual_point: The virtual target ``p''``-bar.
        inner: Inner iterate approximating the virtual target.
        chosen: Iterate the outer loop continues from.
        separated: Whether the inner run produced a witness for the virtual target.
        inner_stats: Stats of the inner run.
    """

    plain: Iterate
    virtual_point: Vector
    inner: Iterate | None
    chosen: Iterate
    separated: bool
    inner_stats: RunStats


def avta_cycle(
    points: PointSet,
    p: QueryPoint,
    iterate: Iterate,
    choice: PivotChoice,
    tol: Tolerances,
) -> AvtaCycle:
    """Run one AVTA cycle from ``iterate`` with pivot ``choice``.

    The inner run targets the virtual point, starts at its projection onto
    ``[p', v_j]`` and takes at most ``tol.t_inner`` steps. The outer iterate
    becomes the closest to ``p`` among the inner iterate, the projection of
    ``p`` onto ``[p', inner]`` and the ordinary step.

    Args:
        points: The point set ``S``.
        p: Query point.
        iterate: Current iterate ``p'``.
        choice: Pivot for ``p'`` (a vertex of ``S``).
        tol: Outer tolerances.

    Returns:
        The cycle record.

    Raises:
        DegenerateSegmentError: If the pivot coincides with the iterate.
    """
    plain, _ = pull_towards(iterate, choice, p, points, refresh_period=tol.refresh_period)
    target = virtual_step(iterate.point, p.coords, choice.point)
    seg_point, beta = project_to_segment(target, iterate.point, choice.point)
    coeffs = (1.0 - beta) * iterate.coeffs
    coeffs[choice.index] += beta
    target_query = QueryPoint(target)
    inner_start = Iterate(coeffs, seg_point, float(np.linalg.norm(seg_point - target)))
    inner_tol = replace(tol, max_iters=tol.t_inner, pivot_rule=_plain_rule(tol.pivot_rule))
    inner_cert, inner_stats = solve(points, target_query, inner_tol, initial=inner_start)

    if isinstance(inner_cert, Witness):
        return AvtaCycle(plain, target, None, plain, True, inner_stats)

    assert inner_cert.coeffs is not None
    inner = Iterate.from_coeffs(points, inner_cert.coeffs, p)
    candidates = [inner]
    inner_pivot = PivotChoice(points.count, inner.point, inner.coeffs, inner.gap, False)
    try:
        toward, _ = pull_towards(iterate, inner_pivot, p, points, refresh_period=tol.refresh_period)
        candidates.append(toward)
    except DegenerateSegmentError:
        pass
    candidates.append(plain)
    chosen = min(candidates, key=lambda it: it.gap)
    return AvtaCycle(plain, target, inner, chosen, False, inner_stats)


def avta_solve(
    points: PointSet, p: QueryPoint, tol: Tolerances
) -> tuple[Certificate, RunStats]:
    """Run the Approximated Virtual Triangle Algorithm.

    All iterates carry coefficients over ``S``, so outcomes are ordinary
    certificates. An inner witness for the virtual point proves ``p`` outside
    the hull whenever ``d(p, p') <= d(p, v_j)``; the run then finishes with
    plain triangle steps so the returned witness certifies ``p`` itself.

    Args:
        points: The point set ``S``.
        p: Query point.
        tol: Accuracy, budget, pivot rule and ``t_inner``.

    Returns:
        ``(certificate, stats)``.
    """
    p.check_against(points)
    radius = points.radius(p)
    stats = RunStats(radius=radius)
    start, current_radius = nearest_vertex(points, p)
    iterate = Iterate.at_vertex(points, start, p)
    stats.record_start(iterate.gap)
    rule = _plain_rule(tol.pivot_rule)
    selector = PivotSelector(points, p, rule)

    while True:
        if iterate.gap == 0.0 or iterate.gap < tol.eps * current_radius:
            certificate: Certificate = make_approx(iterate, radius, tol.eps)
            break
        if stats.iterations >= tol.max_iters:
            certificate = make_inconclusive(iterate)
            break
        choice = selector.select(iterate.point)
        if choice is None:
            certificate = witness_or_inconclusive(iterate, p, points)
            break
        try:
            cycle = avta_cycle(points, p, iterate, choice, tol)
        except DegenerateSegmentError:
            selector.skip(choice.index)
            continue
        selector.clear_skips()
        stats.pivot_scans += cycle.inner_stats.pivot_scans
        angle = pivot_angle(iterate.point, p.coords, choice.point)
        stats.record_step(cycle.chosen.gap, angle, choice.index, choice.radius)
        previous_gap = iterate.gap
        iterate = cycle.chosen
        current_radius = choice.radius

        if cycle.separated and previous_gap <= choice.radius:
            stats.events.append(f"virtual point separated at step {stats.iterations}")
            logging.debug("AVTA: virtual point separated from S; finishing with plain steps")
            remaining = max(1, tol.max_iters - stats.iterations)
            certificate, tail = solve(
                points, p, replace(tol, max_iters=remaining, pivot_rule=rule), initial=iterate
            )
            stats.continue_with(tail)
            break

    stats.pivot_scans += selector.scans
    logging.debug("AVTA run finished: %s after %d steps", certificate.kind, stats.iterations)
    return certificate, stats


# --- Delta_k algorithm ---


@dataclass
class FaceSet:
    """The carried hull ``P' = conv{anchor, v_j1, ..., v_jt}``.

    Attributes:
        anchor: Iterate at the last reset.
        vertex_indices: Pivots added since the reset.
        weights: Barycentric weights of the current iterate over
            ``[anchor, v_j1, ...]``.
    """

    anchor: Iterate
    vertex_indices: list[int] = field(default_factory=list)
    weights: Vector = field(default_factory=lambda: np.ones(1))

    @classmethod
    def start(cls, iterate: Iterate) -> FaceSet:
        """Reset to the singleton ``{p'}``."""
        return cls(iterate)

    @property
    def t_count(self) -> int:
        """Number of points spanning ``P'``."""
        return 1 + len(self.vertex_indices)

    def columns(self, points: PointSet, extra: int) -> Vector:
        """Anchor, carried vertices and ``v_extra`` as an ``(m, t + 1)`` array."""
        cols = [self.anchor.point, *(points.point(j) for j in self.vertex_indices)]
        cols.append(points.point(extra))
        return np.column_stack(cols)

    def expand(self, points: PointSet, weights: Vector, indices: list[int]) -> Vector:
        """Expand weights over ``[anchor, v_indices...]`` into coefficients over ``S``."""
        coeffs = weights[0] * self.anchor.coeffs
        for w, j in zip(weights[1:], indices, strict=True):
            coeffs[j] += w
        np.maximum(coeffs, 0.0, out=coeffs)
        return coeffs / coeffs.sum()


def delta_k_solve(
    points: PointSet,
    p: QueryPoint,
    tol: Tolerances,
    *,
    initial: Iterate | None = None,
) -> tuple[Certificate, RunStats]:
    """Run the Delta_k algorithm with ``k = tol.k_faces``.

    Each growth step adds a pivot of the current iterate to ``P'`` and moves to
    the point of ``P'`` nearest to ``p``: exactly for ``t <= 3`` points and by an
    inner warm-started run at ``eps / 4`` beyond that. ``P'`` resets to the
    current iterate once it holds ``k`` points, so ``k = 2`` reproduces
    :func:`~hullcheck.core.solver.solve` step for step.

    Args:
        points: The point set ``S``.
        p: Query point.
        tol: Accuracy, budget, pivot rule and ``k_faces``.
        initial: Optional warm-start iterate.

    Returns:
        ``(certificate, stats)``.
    """
    p.check_against(points)
    tol.check_against(points)
    radius = points.radius(p)
    stats = RunStats(radius=radius)
    start, current_radius = nearest_vertex(points, p)
    iterate = initial if initial is not None else Iterate.at_vertex(points, start, p)
    stats.record_start(iterate.gap)
    rule = _plain_rule(tol.pivot_rule)
    selector = PivotSelector(points, p, rule)
    face = FaceSet.start(iterate)

    while True:
        if face.t_count >= tol.k_faces:
            face = FaceSet.start(iterate)
        if iterate.gap == 0.0 or iterate.gap < tol.eps * current_radius:
            certificate: Certificate = make_approx(iterate, radius, tol.eps)
            break
        if stats.iterations >= tol.max_iters:
            certificate = make_inconclusive(iterate)
            break
        choice = selector.select(iterate.point)
        if choice is None:
            certificate = witness_or_inconclusive(iterate, p, points)
            break
        if choice.index in face.vertex_indices:
            face = FaceSet.start(iterate)

        try:
            new, face = _grow(points, p, tol, iterate, face, choice, stats)
        except DegenerateSegmentError:
            selector.skip(choice.index)
            continue
        selector.clear_skips()
        angle = pivot_angle(iterate.point, p.coords, choice.point)
        stats.record_step(new.gap, angle, choice.index, choice.radius)
        iterate = new
        current_radius = choice.radius

    stats.pivot_scans += selector.scans
    logging.debug(
        "Delta_%d run finished: %s after %d steps",
        tol.k_faces,
        certificate.kind,
        stats.iterations,
    )
    return certificate, stats


def _grow(
    points: PointSet,
    p: QueryPoint,
    tol: Tolerances,
    iterate: Iterate,
    face: FaceSet,
    choice: PivotChoice,
    stats: RunStats,
) -> tuple[Iterate, FaceSet]:
    """Add ``choice`` to ``face`` and return the nearest point of the grown hull."""
    indices = [*face.vertex_indices, choice.index]
    if face.t_count == 1:
        new, alpha = pull_towards(iterate, choice, p, points, refresh_period=tol.refresh_period)
        return new, FaceSet(face.anchor, indices, np.array([1.0 - alpha, alpha]))

    if face.t_count == 2:
        point, weights = project_to_triangle(
            p.coords, face.anchor.point, points.point(face.vertex_indices[0]), choice.point
        )
    else:
        anchors = PointSet(face.columns(points, choice.index))
        warm = Iterate.from_coeffs(anchors, np.append(face.weights, 0.0), p)
        inner_tol = Tolerances(
            eps=tol.eps / 4.0,
            max_iters=min(tol.max_iters, DELTA_K_INNER_MAX_ITERS),
            refresh_period=tol.refresh_period,
        )
        inner_cert, inner_stats = solve(anchors, p, inner_tol, initial=warm)
        stats.pivot_scans += inner_stats.pivot_scans
        assert inner_cert.coeffs is not None
        weights = np.asarray(inner_cert.coeffs, dtype=np.float64)
        point = anchors.combine(weights)

    coeffs = face.expand(points, weights, indices)
    steps = iterate.steps_since_refresh + 1
    if steps >= tol.refresh_period:
        point = points.combine(coeffs)
        steps = 0
    point = np.asarray(point, dtype=np.float64)
    new = Iterate(coeffs, point, float(np.linalg.norm(point - p.coords)), steps)
    if new.gap >= iterate.gap:
        # no measurable progress on the face; fall back to the segment step
        fallback, alpha = pull_towards(
            iterate, choice, p, points, refresh_period=tol.refresh_period
        )
        return fallback, FaceSet(iterate, [choice.index], np.array([1.0 - alpha, alpha]))
    return new, FaceSet(face.anchor, indices, weights)
