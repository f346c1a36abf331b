"""Tests for geometric primitives, iterates and certificates."""

from __future__ import annotations

import math

import numpy as np
import pytest

from hullcheck.core.certificate import (
    Inconclusive,
    RunStats,
    distance_bracket,
    separating_hyperplane,
    witness_or_inconclusive,
)
from hullcheck.core.errors import (
    DimensionMismatchError,
    InvalidInputError,
    WitnessCheckError,
)
from hullcheck.core.geometry import (
    Iterate,
    PivotRule,
    PointSet,
    QueryPoint,
    Tolerances,
    pivot_margins,
    pivot_mask,
    pivot_predicate,
    project_to_segment,
    project_to_triangle,
    squared_distance,
    strict_pivot_predicate,
)
from hullcheck.core.oracle import oracle_nearest

# --- PointSet / QueryPoint tests ---


def test_point_set__from_rows_transposes() -> None:
    """Store one point per column."""
    points = PointSet.from_rows([[1.0, 0.0], [0.0, 1.0], [2.0, 3.0]])
    assert points.dim == 2
    assert points.count == 3
    assert points.point(2).tolist() == [2.0, 3.0]


def test_point_set__rejects_non_finite() -> None:
    """Reject NaN and infinite coordinates."""
    with pytest.raises(InvalidInputError):
        PointSet.from_rows([[1.0, float("nan")]])
    with pytest.raises(InvalidInputError):
        PointSet.from_rows([[float("inf"), 0.0]])


def test_point_set__columns_are_read_only() -> None:
    """Freeze the column array."""
    points = PointSet.from_rows([[1.0, 0.0]])
    with pytest.raises(ValueError):
        points.columns[0, 0] = 5.0


def test_query_point__dimension_mismatch() -> None:
    """Raise when query and point set dimensions differ."""
    points = PointSet.from_rows([[1.0, 0.0]])
    with pytest.raises(DimensionMismatchError):
        QueryPoint([0.0, 0.0, 0.0]).check_against(points)


# --- Tolerances tests ---


def test_tolerances__validates_eps_range() -> None:
    """Reject eps outside (0, 1)."""
    for eps in (0.0, 1.0, -0.1, 2.0):
        with pytest.raises(InvalidInputError):
            Tolerances(eps=eps)


def test_tolerances__coerces_rule_and_checks_k() -> None:
    """Accept rule strings and reject k_faces above n."""
    tol = Tolerances(eps=0.1, pivot_rule="strict-best", k_faces=3)
    assert tol.pivot_rule is PivotRule.STRICT_BEST
    with pytest.raises(InvalidInputError):
        tol.check_against(PointSet.from_rows([[0.0], [1.0]]))


# --- Primitive tests ---


def test_squared_distance__examples() -> None:
    """Match the identity and 3-4-5 cases."""
    assert squared_distance([0.0, 0.0], [0.0, 0.0]) == 0.0
    assert squared_distance([0.0, 0.0], [3.0, 4.0]) == 25.0


def test_squared_distance__matches_naive_loop_bit_for_bit() -> None:
    """Accumulate left to right exactly like a plain loop."""
    rng = np.random.default_rng(3)
    for _ in range(100):
        u = rng.normal(size=5)
        v = rng.normal(size=5)
        naive = 0.0
        for a, b in zip(u.tolist(), v.tolist(), strict=True):
            naive += (a - b) * (a - b)
        assert squared_distance(u, v) == naive


def test_squared_distance__rejects_mismatch() -> None:
    """Raise on different lengths."""
    with pytest.raises(DimensionMismatchError):
        squared_distance([0.0], [0.0, 1.0])


def test_pivot_predicate__examples() -> None:
    """Match the collinear and right-triangle cases."""
    assert pivot_predicate([0.0, 0.0], [0.5, 0.0], [1.0, 0.0]) is True
    assert pivot_predicate([0.5, 0.5], [0.0, 0.0], [1.0, 0.0]) is False


def test_pivot_predicate__agrees_with_square_roots() -> None:
    """Agree with the direct distance comparison on random triples."""
    rng = np.random.default_rng(5)
    for _ in range(1000):
        x, p, v = rng.normal(size=(3, 3))
        direct = np.linalg.norm(x - v) >= np.linalg.norm(p - v)
        gap = abs(np.linalg.norm(x - v) - np.linalg.norm(p - v))
        if gap > 1e-9:
            assert pivot_predicate(x, p, v) == bool(direct)


def test_strict_pivot_predicate__examples_and_implication() -> None:
    """Handle orthogonal and parallel cases; strict implies plain."""
    assert strict_pivot_predicate([0.0, -1.0], [0.0, 0.0], [1.0, 0.0]) is True
    assert strict_pivot_predicate([0.0, -1.0], [0.0, 0.0], [0.0, -2.0]) is False
    rng = np.random.default_rng(7)
    for _ in range(10_000):
        x, p, v = rng.normal(size=(3, 2))
        if strict_pivot_predicate(x, p, v):
            assert pivot_predicate(x, p, v)


def test_pivot_mask__matches_predicate() -> None:
    """Vectorised mask agrees with the scalar predicate."""
    rng = np.random.default_rng(11)
    cols = rng.normal(size=(3, 20))
    x, p = rng.normal(size=(2, 3))
    mask = pivot_mask(cols, x, p)
    assert mask.tolist() == [pivot_predicate(x, p, cols[:, i]) for i in range(20)]


def test_pivot_predicate__iterate_is_never_its_own_pivot_near_p() -> None:
    """Reject v = p' when p sits a hair away at coordinate scale 1e3."""
    rng = np.random.default_rng(13)
    for _ in range(1000):
        v = rng.uniform(-1e3, 1e3, size=3)
        u = rng.normal(size=3)
        p = v + 1e-9 * u / np.linalg.norm(u)
        assert pivot_predicate(v, p, v) is False
        assert pivot_margins(v[:, None], v, p)[0] < 0.0


def test_project_to_segment__midpoint_and_clamp() -> None:
    """Project to the midpoint and clamp past the endpoint."""
    point, alpha = project_to_segment([0.5, 0.0], [0.0, 0.0], [1.0, 0.0])
    assert point.tolist() == [0.5, 0.0]
    assert alpha == 0.5
    point, alpha = project_to_segment([2.0, 0.0], [0.0, 0.0], [1.0, 0.0])
    assert point.tolist() == [1.0, 0.0]
    assert alpha == 1.0


def test_project_to_segment__beats_dense_sampling() -> None:
    """Return a point no farther than any sampled point of the segment."""
    rng = np.random.default_rng(13)
    ts = np.linspace(0.0, 1.0, 10_001)
    for _ in range(20):
        p, a, b = rng.normal(size=(3, 3))
        point, _ = project_to_segment(p, a, b)
        samples = a[None, :] + ts[:, None] * (b - a)[None, :]
        best = np.min(np.linalg.norm(samples - p, axis=1))
        assert np.linalg.norm(point - p) <= best + 1e-12


def test_project_to_triangle__centroid() -> None:
    """Return the centroid with equal weights."""
    a, b, c = np.array([0.0, 0.0]), np.array([3.0, 0.0]), np.array([0.0, 3.0])
    point, bary = project_to_triangle((a + b + c) / 3.0, a, b, c)
    assert point == pytest.approx([1.0, 1.0])
    assert bary == pytest.approx([1 / 3, 1 / 3, 1 / 3])


def test_project_to_triangle__edge_active_matches_segment() -> None:
    """Reduce to the edge projection when the nearest point lies on ab."""
    a, b, c = np.array([0.0, 0.0]), np.array([2.0, 0.0]), np.array([1.0, 2.0])
    p = np.array([1.0, -1.0])
    point, bary = project_to_triangle(p, a, b, c)
    expected, _ = project_to_segment(p, a, b)
    assert point == pytest.approx(expected)
    assert bary[2] == 0.0


def test_project_to_triangle__matches_oracle_in_r4() -> None:
    """Agree with the exhaustive face oracle on random triangles in R^4."""
    rng = np.random.default_rng(17)
    for _ in range(50):
        a, b, c, p = rng.normal(size=(4, 4))
        point, bary = project_to_triangle(p, a, b, c)
        oracle = oracle_nearest(PointSet(np.column_stack([a, b, c])), QueryPoint(p))
        assert np.linalg.norm(point - p) == pytest.approx(oracle.distance, abs=1e-9)
        assert bary.min() >= 0.0
        assert bary.sum() == pytest.approx(1.0)


# --- Iterate tests ---


def test_iterate__from_coeffs_clamps_and_renormalises() -> None:
    """Clamp negatives and rescale to a simplex vector."""
    points = PointSet.from_rows([[0.0, 0.0], [2.0, 0.0]])
    it = Iterate.from_coeffs(points, [-1e-18, 2.0], QueryPoint([0.0, 0.0]))
    assert it.coeffs.tolist() == [0.0, 1.0]
    assert it.gap == 2.0


def test_iterate__from_coeffs_rejects_bad_vectors() -> None:
    """Raise for wrong length or zero mass."""
    points = PointSet.from_rows([[0.0], [1.0]])
    p = QueryPoint([0.5])
    with pytest.raises(InvalidInputError):
        Iterate.from_coeffs(points, [1.0], p)
    with pytest.raises(InvalidInputError):
        Iterate.from_coeffs(points, [0.0, 0.0], p)


# --- Certificate tests ---


def test_separating_hyperplane__canonical_example() -> None:
    """Produce c = (-0.5, -0.5), gamma = -0.25 for the two-point witness."""
    points = PointSet.from_rows([[1.0, 0.0], [0.0, 1.0]])
    p = QueryPoint([0.0, 0.0])
    normal, gamma = separating_hyperplane([0.5, 0.5], p, points)
    assert normal.tolist() == [-0.5, -0.5]
    assert gamma == -0.25
    assert float(normal @ np.array([0.25, 0.25])) == pytest.approx(gamma, abs=1e-9)


def test_separating_hyperplane__rejects_non_witness() -> None:
    """Raise when some point is not strictly closer to the candidate."""
    points = PointSet.from_rows([[1.0, 0.0], [0.0, 1.0]])
    with pytest.raises(WitnessCheckError):
        separating_hyperplane([1.0, 0.0], QueryPoint([0.5, 0.5]), points)


def test_witness_or_inconclusive__failed_recheck_is_inconclusive() -> None:
    """Report witness-check instead of raising when the iterate does not separate."""
    points = PointSet.from_rows([[1.0, 0.0], [0.0, 1.0]])
    p = QueryPoint([0.5, 0.5])
    result = witness_or_inconclusive(Iterate.at_vertex(points, 0, p), p, points)

    assert isinstance(result, Inconclusive)
    assert result.reason == "witness-check"
    assert result.coeffs is not None
    assert result.coeffs.tolist() == [1.0, 0.0]


def test_distance_bracket__examples() -> None:
    """Return (gap / 2, gap) and reject non-positive gaps."""
    lo, hi = distance_bracket(math.sqrt(0.5))
    assert lo == pytest.approx(0.35355, abs=1e-5)
    assert hi == pytest.approx(0.70711, abs=1e-5)
    assert distance_bracket(2.0) == (1.0, 2.0)
    with pytest.raises(InvalidInputError):
        distance_bracket(0.0)


def test_run_stats__observed_nu_defaults_and_bounds() -> None:
    """Report 1 without steps and keep nu in (0, 1] with c >= 0."""
    stats = RunStats()
    assert stats.observed_nu == 1.0
    stats.record_start(1.0)
    stats.record_step(0.5, math.pi / 6, 0, 1.0)
    assert stats.observed_nu == pytest.approx(0.5)
    assert stats.observed_c == pytest.approx(3.0)


def test_run_stats__absorb_keeps_round_boundaries() -> None:
    """Skip round boundaries when pairing consecutive gaps."""
    first = RunStats()
    first.record_start(1.0)
    first.record_step(0.5, 0.1, 0, 1.0)
    second = RunStats()
    second.record_start(0.5)
    second.record_step(0.25, 0.1, 1, 1.0)
    first.absorb(second)
    assert first.iterations == 2
    assert first.round_starts == [0, 2]
    assert first.step_pairs() == [(1.0, 0.5), (0.5, 0.25)]
