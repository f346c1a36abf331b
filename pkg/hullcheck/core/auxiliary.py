"""Auxiliary-pivot strategies layered on top of plain pivot selection.

Both strategies watch the run history and add points of ``conv(S)`` to an
auxiliary pool; every auxiliary point keeps its expansion over ``S`` so the
final certificates remain plain simplex vectors over the input.
"""

from __future__ import annotations

import logging
from collections import Counter
from typing import Protocol

import numpy as np

from hullcheck.core.certificate import RunStats
from hullcheck.core.errors import DegenerateSegmentError
from hullcheck.core.geometry import Iterate, PivotRule, PointSet, QueryPoint
from hullcheck.core.pivots import AuxiliaryPool, PivotChoice, PivotSelector, pull_towards
from hullcheck.utils.constant import (
    HULLCHECK_REFRESH_PERIOD,
    STRATEGY_I_MIN_REDUCTION,
    STRATEGY_IV_MIN_HITS,
    STRATEGY_IV_MIN_REDUCTION,
    STRATEGY_IV_WINDOW,
)


class AuxiliaryPolicy(Protocol):
    """Hooks an auxiliary strategy exposes to the solver loop."""

    pool: AuxiliaryPool

    def revise(self, before: Iterate, choice: PivotChoice, after: Iterate) -> Iterate:
        """Optionally replace the plain step result ``after``."""
        ...

    def observe(self, stats: RunStats) -> None:
        """Inspect the history after a recorded step."""
        ...


class StrategyOnePolicy:
    """Swap the roles of the iterate and its pivot when progress stalls.

    When a step reduces the gap by less than ``min_reduction`` (relative) while
    ``d(p, p') <= d(p, v)``, the old iterate joins the auxiliary pool and a
    candidate step is taken from ``v`` toward its best-angle pivot over
    ``S`` and the pool. The candidate replaces the plain step only if it is
    closer to ``p``.
    """

    def __init__(
        self,
        points: PointSet,
        p: QueryPoint,
        history: RunStats,
        *,
        pool: AuxiliaryPool | None = None,
        refresh_period: int = HULLCHECK_REFRESH_PERIOD,
        min_reduction: float = STRATEGY_I_MIN_REDUCTION,
    ) -> None:
        """Initialize the policy.

        Args:
            points: The point set ``S``.
            p: Query point.
            history: Stats of the run being steered.
            pool: Auxiliary pool shared with the solver's selector.
            refresh_period: Passed through to candidate steps.
            min_reduction: Relative gap reduction below which a step stalls.
        """
        self._points = points
        self._p = p
        self._history = history
        self.pool = pool if pool is not None else AuxiliaryPool(points.dim)
        self._refresh_period = refresh_period
        self._min_reduction = min_reduction

    def revise(self, before: Iterate, choice: PivotChoice, after: Iterate) -> Iterate:
        """Return the swapped candidate when it beats the plain step.

        Args:
            before: Iterate the step started from.
            choice: Pivot the plain step used.
            after: Result of the plain step.

        Returns:
            The iterate the solver should continue from.
        """
        if before.gap <= 0.0 or choice.is_auxiliary:
            return after
        reduction = (before.gap - after.gap) / before.gap
        if reduction >= self._min_reduction or before.gap > choice.radius:
            return after

        self.pool.add(before.point, before.coeffs)
        start = Iterate.at_vertex(self._points, choice.index, self._p)
        selector = PivotSelector(self._points, self._p, PivotRule.BEST_ANGLE, pool=self.pool)
        swap = selector.select(start.point)
        self._history.pivot_scans += selector.scans
        if swap is None:
            return after
        try:
            candidate, _ = pull_towards(
                start, swap, self._p, self._points, refresh_period=self._refresh_period
            )
        except DegenerateSegmentError:
            return after
        if candidate.gap < after.gap:
            step = self._history.iterations + 1
            logging.debug(
                "Strategy I: swapped iterate and pivot %d at step %d (gap %.3e -> %.3e)",
                choice.index,
                step,
                after.gap,
                candidate.gap,
            )
            self._history.events.append(f"strategy-i swap at step {step}")
            return candidate
        return after

    def observe(self, stats: RunStats) -> None:
        """Strategy I acts in :meth:`revise` only."""


class StrategyFourPolicy:
    """Add the centroid of cycling pivots as an auxiliary pivot.

    Cycling means one vertex was chosen at least ``min_hits`` times within the
    last ``window`` steps while the gap fell by less than ``min_reduction``
    (relative) over that window. The centroid of every vertex picked at least
    twice in the window is added; the window then restarts.
    """

    def __init__(
        self,
        points: PointSet,
        *,
        pool: AuxiliaryPool | None = None,
        window: int = STRATEGY_IV_WINDOW,
        min_hits: int = STRATEGY_IV_MIN_HITS,
        min_reduction: float = STRATEGY_IV_MIN_REDUCTION,
    ) -> None:
        """Initialize the policy.

        Args:
            points: The point set ``S``.
            pool: Auxiliary pool shared with the solver's selector.
            window: Number of recent steps inspected.
            min_hits: Pivot repetitions that count as cycling.
            min_reduction: Relative gap reduction over the window that counts as stalled.
        """
        self._points = points
        self.pool = pool if pool is not None else AuxiliaryPool(points.dim)
        self._window = window
        self._min_hits = min_hits
        self._min_reduction = min_reduction
        self._last_insert = 0

    def revise(self, before: Iterate, choice: PivotChoice, after: Iterate) -> Iterate:
        """Strategy IV never alters a step."""
        return after

    def observe(self, stats: RunStats) -> None:
        """Insert a centroid pivot when the recent history shows cycling.

        Args:
            stats: Stats of the run, including the step just recorded.
        """
        w = self._window
        if stats.iterations < w or stats.iterations - self._last_insert < w:
            return
        n = self._points.count
        counts = Counter(i for i in stats.pivot_index_series[-w:] if i < n)
        if not counts or max(counts.values()) < self._min_hits:
            return
        start_gap = stats.gap_series[-w - 1]
        if start_gap <= 0.0:
            return
        if (start_gap - stats.gap_series[-1]) / start_gap >= self._min_reduction:
            return
        cycling = sorted(i for i, hits in counts.items() if hits >= 2)
        if len(cycling) < 2:
            return

        coeffs = np.zeros(n)
        coeffs[cycling] = 1.0 / len(cycling)
        self.pool.add(self._points.combine(coeffs), coeffs)
        self._last_insert = stats.iterations
        logging.debug("Strategy IV: added centroid of pivots %s", cycling)
        stats.events.append(f"strategy-iv centroid {cycling} at step {stats.iterations}")


def auxiliary_rule_wrap(
    rule: PivotRule,
    history: RunStats,
    points: PointSet,
    p: QueryPoint,
    *,
    refresh_period: int = HULLCHECK_REFRESH_PERIOD,
) -> AuxiliaryPolicy | None:
    """Return the auxiliary policy for ``rule``, or None for plain rules.

    Args:
        rule: Pivot rule of the run.
        history: Stats of the run the policy will watch.
        points: The point set ``S``.
        p: Query point.
        refresh_period: Passed through to candidate steps.

    Returns:
        A policy sharing a fresh auxiliary pool, or None.
    """
    if rule is PivotRule.STRATEGY_I:
        return StrategyOnePolicy(points, p, history, refresh_period=refresh_period)
    if rule is PivotRule.STRATEGY_IV:
        return StrategyFourPolicy(points)
    return None
