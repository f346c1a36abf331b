"""Tests for the auxiliary-pivot strategies."""

from __future__ import annotations

import math

import numpy as np
import pytest

from hullcheck.cli.generators import SplitMix64, feasible_instance
from hullcheck.core.auxiliary import StrategyFourPolicy, StrategyOnePolicy, auxiliary_rule_wrap
from hullcheck.core.certificate import ApproxSolution, RunStats
from hullcheck.core.geometry import Iterate, PivotRule, PointSet, QueryPoint, Tolerances
from hullcheck.core.pivots import AuxiliaryPool, PivotSelector, vertex_choice
from hullcheck.core.solver import solve


def _cycling_stats(indices: list[int]) -> RunStats:
    stats = RunStats()
    stats.record_start(1.0)
    gap = 1.0
    for index in indices:
        gap -= 1e-5
        stats.record_step(gap, 0.1, index, 1.0)
    return stats


# --- AuxiliaryPool tests ---


def test_auxiliary_pool__evicts_oldest() -> None:
    """Drop the oldest point once the pool is full."""
    pool = AuxiliaryPool(dim=2, max_size=2)
    for k in range(3):
        pool.add(np.array([float(k), 0.0]), np.array([1.0]))
    assert len(pool) == 2
    assert pool.columns[0].tolist() == [1.0, 2.0]


def test_pivot_selector__scans_pool_first() -> None:
    """Name auxiliary pivots n + k and prefer them under first-index order."""
    points = PointSet.from_rows([[2.0, 0.0], [-1.0, 1.0], [-1.0, -1.0]])
    p = QueryPoint([0.0, 0.0])
    pool = AuxiliaryPool(dim=2)
    pool.add(np.array([-1.0, 0.0]), np.array([0.0, 0.5, 0.5]))
    choice = PivotSelector(points, p, PivotRule.FIRST_INDEX, pool=pool).select(points.point(0))

    assert choice is not None
    assert choice.index == 3
    assert choice.is_auxiliary
    assert choice.coeffs is not None
    assert choice.coeffs.tolist() == [0.0, 0.5, 0.5]


def test_pivot_selector__auxiliary_ids_survive_eviction() -> None:
    """Keep n + id bound to the same point after the oldest one is dropped."""
    points = PointSet.from_rows([[2.0, 0.0], [-1.0, 1.0], [-1.0, -1.0]])
    p = QueryPoint([0.0, 0.0])
    pool = AuxiliaryPool(dim=2, max_size=2)
    ids = [
        pool.add(np.array(point), np.array(coeffs))
        for point, coeffs in (
            ([-1.0, 0.0], [0.0, 0.5, 0.5]),
            ([-1.0, 0.5], [0.0, 0.75, 0.25]),
            ([-1.0, -0.5], [0.0, 0.25, 0.75]),
        )
    ]
    assert ids == [0, 1, 2]
    assert pool.ids == [1, 2]
    assert pool.position(0) is None
    selector = PivotSelector(points, p, PivotRule.FIRST_INDEX, pool=pool)

    choice = selector.select(points.point(0))
    assert choice is not None
    assert choice.index == 4
    assert choice.point.tolist() == [-1.0, 0.5]

    selector.skip(4)
    selector.skip(3)
    choice = selector.select(points.point(0))
    assert choice is not None
    assert choice.index == 5
    assert choice.point.tolist() == [-1.0, -0.5]


# --- Strategy IV tests ---


def test_strategy_four__adds_centroid_of_cycling_pivots() -> None:
    """Insert the centroid of two alternating pivots once per window."""
    points = PointSet.from_rows([[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]])
    policy = StrategyFourPolicy(points, window=4, min_hits=2)
    stats = _cycling_stats([0, 1, 0, 1])

    policy.observe(stats)
    assert len(policy.pool) == 1
    assert policy.pool.coeffs[0].tolist() == [0.5, 0.5, 0.0]
    assert policy.pool.points[0].tolist() == [0.5, 0.5]
    assert any("strategy-iv" in event for event in stats.events)

    policy.observe(stats)
    assert len(policy.pool) == 1


def test_strategy_four__ignores_progressing_runs() -> None:
    """Stay inactive while the gap keeps falling."""
    points = PointSet.from_rows([[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]])
    policy = StrategyFourPolicy(points, window=4, min_hits=2)
    stats = RunStats()
    stats.record_start(1.0)
    for k, index in enumerate([0, 1, 0, 1]):
        stats.record_step(0.5**(k + 1), 0.1, index, 1.0)

    policy.observe(stats)
    assert len(policy.pool) == 0


def test_strategy_four__revise_is_identity() -> None:
    """Never alter the plain step."""
    points = PointSet.from_rows([[1.0, 0.0], [0.0, 1.0]])
    p = QueryPoint([0.5, 0.5])
    before = Iterate.at_vertex(points, 0, p)
    after = Iterate.from_coeffs(points, [0.5, 0.5], p)
    policy = StrategyFourPolicy(points)
    assert policy.revise(before, vertex_choice(points, p, 1), after) is after


# --- Strategy I tests ---


def test_strategy_one__swaps_on_stalled_step() -> None:
    """Pool the old iterate and continue from the better swapped candidate."""
    points = PointSet.from_rows([[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]])
    p = QueryPoint([0.0, 0.0])
    history = RunStats()
    policy = StrategyOnePolicy(points, p, history)
    before = Iterate.at_vertex(points, 0, p)
    stalled = Iterate(before.coeffs.copy(), before.point.copy(), 0.9995)

    revised = policy.revise(before, vertex_choice(points, p, 2), stalled)

    assert len(policy.pool) == 1
    assert revised.gap == pytest.approx(math.sqrt(0.2))
    assert revised.coeffs.sum() == pytest.approx(1.0)
    assert any("strategy-i" in event for event in history.events)


def test_strategy_one__keeps_progressing_step() -> None:
    """Return the plain step when it reduced the gap enough."""
    points = PointSet.from_rows([[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]])
    p = QueryPoint([0.0, 0.0])
    policy = StrategyOnePolicy(points, p, RunStats())
    before = Iterate.at_vertex(points, 0, p)
    after = Iterate.from_coeffs(points, [0.5, 0.5, 0.0], p)

    assert policy.revise(before, vertex_choice(points, p, 1), after) is after
    assert len(policy.pool) == 0


def test_auxiliary_rule_wrap__plain_rules_get_none() -> None:
    """Wrap only the auxiliary strategies."""
    points = PointSet.from_rows([[1.0, 0.0], [0.0, 1.0]])
    p = QueryPoint([0.5, 0.5])
    assert auxiliary_rule_wrap(PivotRule.BEST_ANGLE, RunStats(), points, p) is None
    assert isinstance(
        auxiliary_rule_wrap(PivotRule.STRATEGY_I, RunStats(), points, p), StrategyOnePolicy
    )
    assert isinstance(
        auxiliary_rule_wrap(PivotRule.STRATEGY_IV, RunStats(), points, p), StrategyFourPolicy
    )


# --- Strategies inside solve ---


def test_strategy_one__square_edge_midpoint_is_inside() -> None:
    """Detect the edge midpoint as a member of the square."""
    points = PointSet.from_rows([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    tol = Tolerances(eps=1e-3, pivot_rule=PivotRule.STRATEGY_I)
    cert, _ = solve(points, QueryPoint([0.5, 0.0]), tol)
    assert isinstance(cert, ApproxSolution)


@pytest.mark.parametrize("rule", [PivotRule.STRATEGY_I, PivotRule.STRATEGY_IV])
def test_strategies__certificates_expand_over_s(rule: PivotRule) -> None:
    """Keep approximate solutions as simplex vectors over the input points."""
    for seed in range(10):
        inst = feasible_instance(SplitMix64(800 + seed), 3, 15)
        cert, _ = solve(inst.points, inst.query, Tolerances(eps=1e-4, pivot_rule=rule))
        assert isinstance(cert, ApproxSolution)
        assert cert.coeffs.shape == (15,)
        assert cert.coeffs.min() >= 0.0
        assert cert.coeffs.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.linalg.norm(inst.points.combine(cert.coeffs) - cert.point) < 1e-9


def test_strategy_four__inactive_matches_first_index() -> None:
    """Follow the first-index trajectory when no cycling occurs."""
    for seed in range(10):
        inst = feasible_instance(SplitMix64(900 + seed), 2, 5)
        _, plain = solve(inst.points, inst.query, Tolerances(eps=0.1))
        _, wrapped = solve(
            inst.points, inst.query, Tolerances(eps=0.1, pivot_rule=PivotRule.STRATEGY_IV)
        )
        if not any("strategy-iv" in event for event in wrapped.events):
            assert wrapped.gap_series == plain.gap_series
