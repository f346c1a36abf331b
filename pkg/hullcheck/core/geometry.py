"""Geometric primitives and the domain types shared by all solvers.

Point sets are stored column-wise (``m x n``) as read-only float64 arrays so
they can be shared between threads without copying.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import StrEnum
from functools import cached_property

import numpy as np
from numpy.typing import ArrayLike, NDArray

from hullcheck.core.errors import DimensionMismatchError, InvalidInputError
from hullcheck.utils.constant import HULLCHECK_MAX_ITERS, HULLCHECK_REFRESH_PERIOD

Vector = NDArray[np.float64]


class PivotRule(StrEnum):
    """Pivot selection rules understood by the solvers."""

    FIRST_INDEX = "first"
    BEST_ANGLE = "best"
    STRICT_FIRST = "strict-first"
    STRICT_BEST = "strict-best"
    STRATEGY_I = "strategy-i"
    STRATEGY_IV = "strategy-iv"

    @property
    def is_strict(self) -> bool:
        """Whether the rule prefers strict pivots."""
        return self in {PivotRule.STRICT_FIRST, PivotRule.STRICT_BEST}

    @property
    def is_best(self) -> bool:
        """Whether the rule ranks pivots by angle instead of index."""
        return self in {PivotRule.BEST_ANGLE, PivotRule.STRICT_BEST}


def _as_vector(values: ArrayLike, name: str) -> Vector:
    arr = np.array(values, dtype=np.float64)
    if arr.ndim != 1:
        msg = f"{name} must be a 1-D vector, got shape {arr.shape}"
        raise InvalidInputError(msg)
    if not np.all(np.isfinite(arr)):
        msg = f"{name} contains non-finite entries"
        raise InvalidInputError(msg)
    arr.setflags(write=False)
    return arr


def _check_same_dim(u: Vector, v: Vector) -> None:
    if u.shape != v.shape:
        msg = f"Dimension mismatch: {u.shape[0]} vs {v.shape[0]}"
        raise DimensionMismatchError(msg)


@dataclass(frozen=True, eq=False)
class PointSet:
    """The input set ``S`` stored as ``n`` columns of dimension ``m``.

    Attributes:
        columns: Read-only ``(m, n)`` float64 array; column ``i`` is ``v_i``.
    """

    columns: Vector

    def __post_init__(self) -> None:
        """Validate and freeze the column array.

        Raises:
            InvalidInputError: If the array is not 2-D, empty or non-finite.
        """
        arr = np.array(self.columns, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            msg = f"PointSet needs a non-empty (m, n) array, got shape {arr.shape}"
            raise InvalidInputError(msg)
        if not np.all(np.isfinite(arr)):
            msg = "PointSet contains non-finite coordinates"
            raise InvalidInputError(msg)
        arr.setflags(write=False)
        object.__setattr__(self, "columns", arr)

    @classmethod
    def from_rows(cls, rows: ArrayLike) -> PointSet:
        """Build a point set from one point per row.

        Args:
            rows: Array-like of shape ``(n, m)``.

        Returns:
            The point set with the rows as columns.
        """
        arr = np.array(rows, dtype=np.float64)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        return cls(np.ascontiguousarray(arr.T))

    @property
    def dim(self) -> int:
        """Ambient dimension ``m``."""
        return int(self.columns.shape[0])

    @property
    def count(self) -> int:
        """Number of points ``n``."""
        return int(self.columns.shape[1])

    @cached_property
    def sq_norms(self) -> Vector:
        """Squared Euclidean norms of the columns."""
        norms = np.einsum("ij,ij->j", self.columns, self.columns)
        norms.setflags(write=False)
        return norms

    def point(self, index: int) -> Vector:
        """Return column ``index`` (read-only view)."""
        return self.columns[:, index]

    def distances_to(self, p: QueryPoint) -> Vector:
        """Return ``d(p, v_i)`` for every column."""
        diff = self.columns - p.coords[:, None]
        return np.sqrt(np.einsum("ij,ij->j", diff, diff))

    def radius(self, p: QueryPoint) -> float:
        """Return ``R = max_i d(p, v_i)``."""
        return float(self.distances_to(p).max())

    def combine(self, coeffs: Vector) -> Vector:
        """Return ``sum_i coeffs_i v_i``."""
        return self.columns @ coeffs


@dataclass(frozen=True, eq=False)
class QueryPoint:
    """The distinguished point ``p``."""

    coords: Vector

    def __post_init__(self) -> None:
        """Validate and freeze the coordinates."""
        object.__setattr__(self, "coords", _as_vector(self.coords, "QueryPoint"))

    @property
    def dim(self) -> int:
        """Dimension of the point."""
        return int(self.coords.shape[0])

    def check_against(self, points: PointSet) -> None:
        """Ensure the query lives in the same space as ``points``.

        Args:
            points: The point set the query is paired with.

        Raises:
            DimensionMismatchError: If the dimensions differ.
        """
        if self.dim != points.dim:
            msg = f"Query has dimension {self.dim}, point set has {points.dim}"
            raise DimensionMismatchError(msg)


@dataclass(frozen=True, eq=False)
class Iterate:
    """A point of ``conv(S)`` carried together with its convex coefficients.

    Attributes:
        coeffs: Nonnegative coefficients summing to one.
        point: Cached ``sum_i coeffs_i v_i``.
        gap: Distance from ``point`` to the query.
        steps_since_refresh: Updates applied since ``point`` was recomputed.
    """

    coeffs: Vector
    point: Vector
    gap: float
    steps_since_refresh: int = 0

    @classmethod
    def at_vertex(cls, points: PointSet, index: int, p: QueryPoint) -> Iterate:
        """Start an iterate at vertex ``index``."""
        coeffs = np.zeros(points.count)
        coeffs[index] = 1.0
        point = points.point(index).copy()
        return cls(coeffs, point, math.sqrt(squared_distance(point, p.coords)))

    @classmethod
    def from_coeffs(cls, points: PointSet, coeffs: ArrayLike, p: QueryPoint) -> Iterate:
        """Build an iterate from (possibly slightly off) convex coefficients.

        Args:
            points: The point set the coefficients refer to.
            coeffs: Coefficient vector of length ``n``.
            p: Query point used to compute the gap.

        Returns:
            Iterate with clamped, renormalised coefficients.

        Raises:
            InvalidInputError: If the coefficients have the wrong length or no mass.
        """
        alpha = np.maximum(np.array(coeffs, dtype=np.float64), 0.0)
        if alpha.shape != (points.count,):
            msg = f"Expected {points.count} coefficients, got shape {alpha.shape}"
            raise InvalidInputError(msg)
        total = float(alpha.sum())
        if total <= 0.0:
            msg = "Coefficient vector has no positive mass"
            raise InvalidInputError(msg)
        alpha /= total
        point = points.combine(alpha)
        return cls(alpha, point, float(np.linalg.norm(point - p.coords)))

    def refreshed(self, points: PointSet, p: QueryPoint) -> Iterate:
        """Recompute the cached point from the coefficients."""
        return Iterate.from_coeffs(points, self.coeffs, p)

    def at_vertex_index(self) -> int | None:
        """Return ``i`` when the iterate is exactly vertex ``v_i``, else None."""
        support = np.flatnonzero(self.coeffs)
        if support.size == 1:
            return int(support[0])
        return None


@dataclass(frozen=True)
class Tolerances:
    """Solver tolerances and budgets.

    Attributes:
        eps: Relative accuracy in ``(0, 1)``.
        max_iters: Iteration ceiling before reporting ``Inconclusive``.
        pivot_rule: Pivot selection rule.
        refresh_period: Steps between recomputations of the cached iterate.
        t_inner: Inner Triangle iterations per AVTA cycle.
        k_faces: Maximum number of carried points in the Delta_k algorithm.
    """

    eps: float
    max_iters: int = HULLCHECK_MAX_ITERS
    pivot_rule: PivotRule = PivotRule.FIRST_INDEX
    refresh_period: int = HULLCHECK_REFRESH_PERIOD
    t_inner: int = 2
    k_faces: int = 3

    def __post_init__(self) -> None:
        """Validate ranges.

        Raises:
            InvalidInputError: If any field is out of range.
        """
        if not 0.0 < self.eps < 1.0:
            msg = f"eps must lie in (0, 1), got {self.eps!r}"
            raise InvalidInputError(msg)
        if self.max_iters < 1:
            msg = f"max_iters must be positive, got {self.max_iters}"
            raise InvalidInputError(msg)
        if self.refresh_period < 1:
            msg = f"refresh_period must be positive, got {self.refresh_period}"
            raise InvalidInputError(msg)
        if self.t_inner < 1:
            msg = f"t_inner must be positive, got {self.t_inner}"
            raise InvalidInputError(msg)
        if self.k_faces < 2:
            msg = f"k_faces must be at least 2, got {self.k_faces}"
            raise InvalidInputError(msg)
        object.__setattr__(self, "pivot_rule", PivotRule(self.pivot_rule))

    def check_against(self, points: PointSet) -> None:
        """Validate the budgets that depend on the point count.

        Args:
            points: The point set about to be solved.

        Raises:
            InvalidInputError: If ``k_faces`` exceeds ``n``.
        """
        if self.k_faces > points.count:
            msg = f"k_faces={self.k_faces} exceeds the number of points {points.count}"
            raise InvalidInputError(msg)

    def with_eps(self, eps: float) -> Tolerances:
        """Return a copy with a different accuracy."""
        return replace(self, eps=eps)

    def with_rule(self, rule: PivotRule) -> Tolerances:
        """Return a copy with a different pivot rule."""
        return replace(self, pivot_rule=rule)


# --- Primitives ---


def squared_distance(u: ArrayLike, v: ArrayLike) -> float:
    """Return ``sum_i (u_i - v_i)^2`` with left-to-right accumulation.

    Args:
        u: First vector.
        v: Second vector.

    Returns:
        The squared Euclidean distance.

    Raises:
        DimensionMismatchError: If the vectors differ in length.
    """
    uu = np.asarray(u, dtype=np.float64)
    vv = np.asarray(v, dtype=np.float64)
    _check_same_dim(uu, vv)
    total = 0.0
    for a, b in zip(uu.tolist(), vv.tolist(), strict=True):
        diff = a - b
        total += diff * diff
    return total


def pivot_predicate(iterate_point: ArrayLike, p: ArrayLike, v: ArrayLike) -> bool:
    """Test ``d(p', v) >= d(p, v)`` without square roots.

    Evaluated as ``(p' - p)^T (p' + p - 2 v) >= 0`` through :func:`pivot_margins`
    so a single vector and a whole scan always agree.

    Args:
        iterate_point: Current iterate ``p'``.
        p: Query point.
        v: Candidate pivot.

    Returns:
        True when ``v`` is a pivot for ``p'``.
    """
    x = np.asarray(iterate_point, dtype=np.float64)
    q = np.asarray(p, dtype=np.float64)
    w = np.asarray(v, dtype=np.float64)
    _check_same_dim(x, q)
    _check_same_dim(x, w)
    return bool(pivot_margins(w[:, None], x, q)[0] >= 0.0)


def pivot_margins(columns: Vector, iterate_point: Vector, p: Vector) -> Vector:
    """Return ``d(p', v)^2 - d(p, v)^2 = (p' - p)^T (p' + p - 2 v)`` per column.

    The difference form keeps the rounding error proportional to ``d(p', p)``
    instead of ``||p'||^2``. Each column is reduced on its own, so the value for
    a column does not depend on which other columns are scanned with it.
    """
    shifted = (iterate_point + p)[:, None] - 2.0 * columns
    return np.einsum("ij,i->j", shifted, iterate_point - p)


def strict_pivot_predicate(iterate_point: ArrayLike, p: ArrayLike, v: ArrayLike) -> bool:
    """Test ``(p' - p)^T (v - p) <= 0``, i.e. a non-acute angle at ``p``."""
    x = np.asarray(iterate_point, dtype=np.float64)
    q = np.asarray(p, dtype=np.float64)
    w = np.asarray(v, dtype=np.float64)
    _check_same_dim(x, q)
    _check_same_dim(x, w)
    return float((x - q) @ (w - q)) <= 0.0


def pivot_mask(columns: Vector, iterate_point: Vector, p: Vector) -> NDArray[np.bool_]:
    """Vectorised :func:`pivot_predicate` over the columns of ``columns``."""
    return pivot_margins(columns, iterate_point, p) >= 0.0


def strict_pivot_mask(columns: Vector, iterate_point: Vector, p: Vector) -> NDArray[np.bool_]:
    """Vectorised :func:`strict_pivot_predicate`."""
    return (columns - p[:, None]).T @ (iterate_point - p) <= 0.0


def pivot_cosines(columns: Vector, iterate_point: Vector, p: Vector) -> Vector:
    """Cosine of the angle ``p p' v`` at the iterate for every column.

    Columns coinciding with the iterate get ``-inf`` so they never rank first.
    """
    to_p = p - iterate_point
    to_v = columns - iterate_point[:, None]
    norms_v = np.sqrt(np.einsum("ij,ij->j", to_v, to_v))
    norm_p = float(np.linalg.norm(to_p))
    with np.errstate(divide="ignore", invalid="ignore"):
        cos = (to_v.T @ to_p) / (norms_v * norm_p)
    return np.where(norms_v > 0.0, cos, -np.inf)


def project_to_segment(p: ArrayLike, a: ArrayLike, b: ArrayLike) -> tuple[Vector, float]:
    """Project ``p`` onto the segment ``[a, b]``.

    Args:
        p: Point to project.
        a: Segment start.
        b: Segment end.

    Returns:
        ``(point, alpha)`` with ``point = (1 - alpha) a + alpha b`` and ``alpha``
        clamped to ``[0, 1]``. A degenerate segment returns ``(a, 0)``.
    """
    q = np.asarray(p, dtype=np.float64)
    start = np.asarray(a, dtype=np.float64)
    end = np.asarray(b, dtype=np.float64)
    _check_same_dim(q, start)
    _check_same_dim(q, end)
    direction = end - start
    length_sq = float(direction @ direction)
    if length_sq == 0.0:
        return start.copy(), 0.0
    alpha = min(1.0, max(0.0, float((q - start) @ direction) / length_sq))
    return (1.0 - alpha) * start + alpha * end, alpha


def project_to_triangle(
    p: ArrayLike, a: ArrayLike, b: ArrayLike, c: ArrayLike
) -> tuple[Vector, Vector]:
    """Project ``p`` onto the triangle ``conv{a, b, c}``.

    The unconstrained minimiser over the affine hull is used when it lies in the
    triangle; otherwise the best of the three edge projections wins.

    Args:
        p: Point to project.
        a: First corner.
        b: Second corner.
        c: Third corner.

    Returns:
        ``(point, barycentric)`` where the barycentric weights are nonnegative
        and sum to one.
    """
    q = np.asarray(p, dtype=np.float64)
    corners = [np.asarray(x, dtype=np.float64) for x in (a, b, c)]
    for corner in corners:
        _check_same_dim(q, corner)
    a0, b0, c0 = corners
    e1 = b0 - a0
    e2 = c0 - a0
    g11 = float(e1 @ e1)
    g12 = float(e1 @ e2)
    g22 = float(e2 @ e2)
    det = g11 * g22 - g12 * g12
    if det > 1e-14 * max(g11 * g22, 1e-300):
        r1 = float((q - a0) @ e1)
        r2 = float((q - a0) @ e2)
        s = (r1 * g22 - r2 * g12) / det
        t = (r2 * g11 - r1 * g12) / det
        if s >= 0.0 and t >= 0.0 and s + t <= 1.0:
            bary = np.array([1.0 - s - t, s, t])
            return a0 + s * e1 + t * e2, bary

    best_point: Vector | None = None
    best_bary = np.zeros(3)
    best_dist = math.inf
    for i, j in ((0, 1), (1, 2), (0, 2)):
        point, alpha = project_to_segment(q, corners[i], corners[j])
        dist = squared_distance(point, q)
        if dist < best_dist:
            best_dist = dist
            best_point = point
            best_bary = np.zeros(3)
            best_bary[i] = 1.0 - alpha
            best_bary[j] = alpha
    assert best_point is not None
    return best_point, best_bary
