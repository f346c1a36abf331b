"""Pivot selection and the generic pull-toward-pivot step.

A pivot for the iterate ``p'`` is a point ``v`` with ``d(p', v) >= d(p, v)``.
Selection scans the columns of ``S`` and, when auxiliary strategies are
active, the auxiliary pool; all scans are vectorised and deterministic.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from hullcheck.core.errors import DegenerateSegmentError
from hullcheck.core.geometry import (
    Iterate,
    PivotRule,
    PointSet,
    QueryPoint,
    Vector,
    pivot_cosines,
    pivot_mask,
    strict_pivot_mask,
)
from hullcheck.utils.constant import HULLCHECK_REFRESH_PERIOD


@dataclass(frozen=True, eq=False)
class PivotChoice:
    """A selected pivot.

    Attributes:
        index: Column index in ``S``; ``n + id`` for the auxiliary point with that id.
        point: Coordinates of the pivot.
        coeffs: Expansion over ``S`` for auxiliary pivots, None for vertices.
        radius: ``d(p, v)``.
        strict: Whether the pivot is strict at the iterate it was chosen for.
    """

    index: int
    point: Vector
    coeffs: Vector | None
    radius: float
    strict: bool

    @property
    def is_auxiliary(self) -> bool:
        """Whether the pivot comes from the auxiliary pool."""
        return self.coeffs is not None


@dataclass
class AuxiliaryPool:
    """Auxiliary pivots, each stored with its convex expansion over ``S``.

    Every point gets an id from a counter that never repeats, so ``n + id``
    keeps naming the same point in traces after older points are evicted.
    Lists are kept oldest first.
    """

    dim: int
    max_size: int = 64
    points: list[Vector] = field(default_factory=list)
    coeffs: list[Vector] = field(default_factory=list)
    ids: list[int] = field(default_factory=list)
    next_id: int = 0

    def add(self, point: Vector, coeffs: Vector) -> int:
        """Append an auxiliary point and return its id.

        The oldest point is evicted once the pool holds ``max_size`` points.
        """
        if len(self.points) >= self.max_size:
            evicted = self.ids.pop(0)
            self.points.pop(0)
            self.coeffs.pop(0)
            logging.debug("Evicted auxiliary point %d", evicted)
        aux_id = self.next_id
        self.next_id += 1
        self.points.append(np.array(point, dtype=np.float64))
        self.coeffs.append(np.array(coeffs, dtype=np.float64))
        self.ids.append(aux_id)
        return aux_id

    def position(self, aux_id: int) -> int | None:
        """Return the current list position of ``aux_id``, or None once evicted."""
        try:
            return self.ids.index(aux_id)
        except ValueError:
            return None

    def __len__(self) -> int:
        """Number of auxiliary points."""
        return len(self.points)

    @property
    def columns(self) -> Vector:
        """Auxiliary points as an ``(m, k)`` array."""
        if not self.points:
            return np.zeros((self.dim, 0))
        return np.column_stack(self.points)


class PivotSelector:
    """Select pivots for a fixed ``(S, p)`` pair under one rule.

    First-type rules return the lowest qualifying index; best-type rules the
    pivot with the smallest angle ``p p' v`` (largest cosine, ties to the lowest
    index). Strict rules restrict to strict pivots when any exist and fall back
    to plain pivots otherwise, so ``None`` always means "witness".
    """

    def __init__(
        self,
        points: PointSet,
        p: QueryPoint,
        rule: PivotRule,
        *,
        pool: AuxiliaryPool | None = None,
    ) -> None:
        """Initialize the selector.

        Args:
            points: The point set ``S``.
            p: Query point.
            rule: Pivot rule; auxiliary strategies scan like ``FIRST_INDEX``.
            pool: Optional auxiliary pivots, scanned ahead of ``S``.
        """
        self._points = points
        self._p = p
        self._rule = rule
        self._pool = pool
        self._radii = points.distances_to(p)
        self._skip: set[int] = set()
        self.scans = 0

    @property
    def radii(self) -> Vector:
        """``d(p, v_i)`` for every column of ``S``."""
        return self._radii

    def skip(self, index: int) -> None:
        """Exclude ``index`` until the next successful step."""
        logging.debug("Skipping degenerate pivot %d", index)
        self._skip.add(index)

    def clear_skips(self) -> None:
        """Forget skipped pivots after the iterate has moved."""
        self._skip.clear()

    def select(self, iterate_point: Vector) -> PivotChoice | None:
        """Return a pivot for ``iterate_point`` or None when it is a witness.

        Args:
            iterate_point: The current iterate ``p'``.

        Returns:
            The chosen pivot, or None when no pivot exists.
        """
        n = self._points.count
        aux = self._pool.columns if self._pool is not None else np.zeros((self._points.dim, 0))
        k = aux.shape[1]
        # auxiliary points first, then S; index n + id names auxiliary point id
        columns = self._points.columns
        if k:
            columns = np.concatenate([aux, columns], axis=1)
        q = self._p.coords
        self.scans += n + k

        mask = pivot_mask(columns, iterate_point, q)
        for index in self._skip:
            if index < n:
                mask[index + k] = False
            elif self._pool is not None:
                slot = self._pool.position(index - n)
                if slot is not None:
                    mask[slot] = False
        if self._rule.is_strict:
            strict = mask & strict_pivot_mask(columns, iterate_point, q)
            if strict.any():
                mask = strict
        if not mask.any():
            return None

        if self._rule.is_best:
            cos = pivot_cosines(columns, iterate_point, q)
            cos = np.where(mask, cos, -np.inf)
            # ties go to the lowest index of S, then to the oldest auxiliary point
            order = np.concatenate([np.arange(k, k + n), np.arange(k)])
            position = int(order[np.argmax(cos[order])])
        else:
            position = int(np.flatnonzero(mask)[0])

        point = columns[:, position]
        strict_flag = float((iterate_point - q) @ (point - q)) <= 0.0
        if position < k:
            assert self._pool is not None
            radius = float(np.linalg.norm(point - q))
            expansion = self._pool.coeffs[position]
            return PivotChoice(
                n + self._pool.ids[position], point, expansion, radius, strict_flag
            )
        index = position - k
        return PivotChoice(index, point, None, float(self._radii[index]), strict_flag)


def find_pivot(
    iterate: Iterate, p: QueryPoint, points: PointSet, rule: PivotRule
) -> int | None:
    """Return the index of a pivot for ``iterate`` under ``rule``, or None.

    Auxiliary strategies select like ``FIRST_INDEX`` at this level; their extra
    behaviour lives in :mod:`hullcheck.core.auxiliary`.

    Args:
        iterate: Current iterate.
        p: Query point.
        points: The point set ``S``.
        rule: Pivot rule.

    Returns:
        Pivot index, or None exactly when ``iterate`` is a witness.
    """
    choice = PivotSelector(points, p, rule).select(iterate.point)
    return None if choice is None else choice.index


def pivot_angle(iterate_point: Vector, p: Vector, v: Vector) -> float:
    """Angle ``p p' v`` at the iterate, in radians."""
    to_p = p - iterate_point
    to_v = v - iterate_point
    denom = float(np.linalg.norm(to_p)) * float(np.linalg.norm(to_v))
    if denom == 0.0:
        return 0.0
    return math.acos(max(-1.0, min(1.0, float(to_p @ to_v) / denom)))


def pull_towards(
    iterate: Iterate,
    choice: PivotChoice,
    p: QueryPoint,
    points: PointSet,
    *,
    refresh_period: int = HULLCHECK_REFRESH_PERIOD,
) -> tuple[Iterate, float]:
    """Move ``iterate`` to the point of ``[p', v]`` nearest to ``p``.

    Args:
        iterate: Current iterate ``p'``.
        choice: Pivot ``v`` (vertex of ``S`` or auxiliary point).
        p: Query point.
        points: The point set ``S``.
        refresh_period: Recompute the cached point from coefficients this often.

    Returns:
        ``(new_iterate, alpha)`` with ``alpha`` the clamped step size.

    Raises:
        DegenerateSegmentError: If the pivot coincides with the iterate.
    """
    x = iterate.point
    direction = choice.point - x
    length_sq = float(direction @ direction)
    if length_sq == 0.0:
        msg = f"Pivot {choice.index} coincides with the iterate"
        raise DegenerateSegmentError(msg)
    alpha = min(1.0, max(0.0, float((p.coords - x) @ direction) / length_sq))

    coeffs = (1.0 - alpha) * iterate.coeffs
    if choice.coeffs is None:
        coeffs[choice.index] += alpha
    else:
        coeffs += alpha * choice.coeffs
    np.maximum(coeffs, 0.0, out=coeffs)
    coeffs /= coeffs.sum()

    steps = iterate.steps_since_refresh + 1
    if steps >= refresh_period:
        point = points.combine(coeffs)
        steps = 0
        logging.debug("Refreshed iterate from coefficients")
    else:
        point = (1.0 - alpha) * x + alpha * choice.point
    gap = float(np.linalg.norm(point - p.coords))
    return Iterate(coeffs, point, gap, steps), alpha


def vertex_choice(points: PointSet, p: QueryPoint, index: int) -> PivotChoice:
    """Wrap vertex ``index`` of ``S`` as a pivot choice."""
    point = points.point(index)
    return PivotChoice(index, point, None, float(np.linalg.norm(point - p.coords)), False)
