"""Tests for LP feasibility through convex-hull membership."""

from __future__ import annotations

import numpy as np
import pytest
from scipy.optimize import linprog

from hullcheck.core.errors import (
    InvalidInputError,
    LastCoefficientCollapseError,
    RecessionSuspectedError,
)
from hullcheck.core.lp import (
    ApproxFeasible,
    InfeasibleCertificate,
    LpInstance,
    LpMode,
    augmented_distance_sup,
    bounded_m_solve,
    doubling_round_limit,
    doubling_solve,
    extract_x0,
    last_doubling_mu,
    reduce_no_recession,
    sensitivity_epsilon,
    sensitivity_residual_factor,
    two_phase_solve,
)


def _no_recession_system(rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Columns with a positive first coordinate, so ``Ad = 0, d >= 0`` forces ``d = 0``."""
    m = int(rng.integers(2, 6))
    n = int(rng.integers(2, 11))
    a = rng.normal(size=(m, n))
    a[0] = rng.uniform(0.5, 1.5, size=n)
    x_star = rng.uniform(0.1, 1.0, size=n)
    return a, a @ x_star


# --- LpInstance tests ---


def test_lp_instance__validates_shapes_and_mode() -> None:
    """Reject mismatched b, missing M and out-of-range eps0."""
    with pytest.raises(InvalidInputError):
        LpInstance(np.ones((2, 3)), np.ones(3))
    with pytest.raises(InvalidInputError):
        LpInstance(np.ones((2, 3)), np.ones(2), mode=LpMode.BOUNDED_M)
    with pytest.raises(InvalidInputError):
        LpInstance(np.ones((2, 3)), np.ones(2), eps0=1.5)


def test_lp_instance__r_prime() -> None:
    """Take the largest of the column norms and ||b||."""
    instance = LpInstance(np.array([[3.0, 0.0], [4.0, 1.0]]), np.array([1.0, 1.0]))
    assert instance.r_prime == 5.0


# --- Reduction helpers tests ---


def test_reduce_no_recession__appends_minus_b() -> None:
    """Build {a_1, ..., a_n, -b} with the origin as query."""
    points, origin, r_prime = reduce_no_recession(np.array([[1.0, 2.0]]), np.array([3.0]))
    assert points.columns.tolist() == [[1.0, 2.0, -3.0]]
    assert origin.coords.tolist() == [0.0]
    assert r_prime == 3.0


def test_extract_x0__divides_by_last_coefficient() -> None:
    """Scale the leading coefficients by 1 / alpha_{n+1}."""
    assert extract_x0([0.5, 0.25, 0.25]).tolist() == [2.0, 1.0]


def test_extract_x0__raises_on_collapse() -> None:
    """Refuse a vanishing coefficient of -b."""
    with pytest.raises(LastCoefficientCollapseError):
        extract_x0([1.0, 0.0])


def test_extract_x0__residual_is_gap_over_last_coefficient() -> None:
    """Satisfy ||A x0 - b|| = ||p'|| / alpha_{n+1} for reduced iterates p'."""
    rng = np.random.default_rng(41)
    for _ in range(100):
        a, b = _no_recession_system(rng)
        points, _, _ = reduce_no_recession(a, b)
        alpha = rng.uniform(0.1, 1.0, size=points.count)
        alpha /= alpha.sum()
        gap = float(np.linalg.norm(points.combine(alpha)))
        residual = float(np.linalg.norm(a @ extract_x0(alpha) - b))
        assert residual == pytest.approx(gap / alpha[-1], rel=1e-9, abs=1e-12)


def test_sensitivity_epsilon__example_and_inverse() -> None:
    """Return 0.025 for (1, 1, 2, 0.1) and invert the forward bound."""
    eps = sensitivity_epsilon(1.0, 1.0, 2.0, 0.1)
    assert eps == pytest.approx(0.025)
    assert sensitivity_residual_factor(eps, 1.0, 1.0) == pytest.approx(0.1)
    with pytest.raises(InvalidInputError):
        sensitivity_epsilon(0.0, 1.0, 2.0, 0.1)


# --- Two-Phase tests ---


def test_two_phase_solve__scalar_example() -> None:
    """Recover x0 = 2 for x = 2 with Delta'_0 = 0.5."""
    result, stats = two_phase_solve(np.array([[1.0]]), np.array([2.0]), 1e-2)

    assert isinstance(result, ApproxFeasible)
    assert result.x0 == pytest.approx([2.0], abs=1e-9)
    assert result.delta0_lower == 0.5
    assert result.residual < result.bound
    assert len(stats.round_starts) == 2


def test_two_phase_solve__phase_one_rounds_resume_from_last_iterate() -> None:
    """Start each halving round at the gap the previous round ended with."""
    a = np.array([[-10.0, 10.0], [1.0, 1.0]])
    result, stats = two_phase_solve(a, np.array([0.0, 1.0]), 1e-2)

    assert isinstance(result, ApproxFeasible)
    assert result.x0 == pytest.approx([0.5, 0.5], abs=1e-6)
    assert len(stats.round_starts) == 5
    for start in stats.round_starts[1:]:
        assert stats.gap_series[start] == pytest.approx(stats.gap_series[start - 1])
    assert stats.iterations == 2


def test_two_phase_solve__infeasible_system() -> None:
    """Return a witness of the reduced instance for x = 0, 0 = 1."""
    result, _ = two_phase_solve(np.array([[1.0], [0.0]]), np.array([0.0, 1.0]), 1e-2)

    assert isinstance(result, InfeasibleCertificate)
    assert result.context == "no-recession reduction"
    assert result.to_dict()["inner"]["kind"] == "witness"


def test_two_phase_solve__recession_direction_detected() -> None:
    """Give up when Phase I keeps finding the origin inside conv(A)."""
    with pytest.raises(RecessionSuspectedError):
        two_phase_solve(np.array([[1.0, -1.0]]), np.array([1.0]), 1e-2, eps_floor=1e-3)


def test_two_phase_solve__sensitivity_pipeline_on_seeded_systems() -> None:
    """Meet the residual bound and the alpha_{n+1} lower bound on every system."""
    rng = np.random.default_rng(2024)
    eps0 = 1e-2
    for _ in range(40):
        a, b = _no_recession_system(rng)
        result, _ = two_phase_solve(a, b, eps0)
        assert isinstance(result, ApproxFeasible)
        assert np.all(result.x0 >= 0.0)
        r_prime = LpInstance(a, b).r_prime
        assert float(np.linalg.norm(a @ result.x0 - b)) < eps0 * r_prime
        assert result.delta0_lower is not None
        assert result.alpha_last is not None
        b0 = float(np.linalg.norm(b))
        assert result.alpha_last > result.delta0_lower / (2.0 * (result.delta0_lower + b0))


def test_two_phase_solve__agrees_with_linprog() -> None:
    """Match scipy's feasibility verdict on feasible and sign-flipped systems."""
    rng = np.random.default_rng(99)
    for k in range(30):
        a, b = _no_recession_system(rng)
        if k % 2:
            b[0] = -abs(b[0]) - 0.1
        result, _ = two_phase_solve(a, b, 1e-2)
        reference = linprog(np.zeros(a.shape[1]), A_eq=a, b_eq=b, bounds=(0, None))
        assert (reference.status == 0) == isinstance(result, ApproxFeasible)


# --- Bounded-M tests ---


def test_bounded_m_solve__scalar_example() -> None:
    """Hit b / M = 0.5 exactly with y = (0.5, 0.5) and x0 = 2."""
    result, _ = bounded_m_solve(np.array([[1.0]]), np.array([2.0]), 4.0, 1e-2)

    assert isinstance(result, ApproxFeasible)
    assert result.x0.tolist() == [2.0]
    assert result.mu == 4.0
    assert result.residual == 0.0


def test_bounded_m_solve__residual_below_two_r_prime_eps() -> None:
    """Stay below 2 R' eps on seeded bounded-feasible systems."""
    rng = np.random.default_rng(77)
    eps = 1e-2
    for _ in range(40):
        m = int(rng.integers(2, 5))
        n = int(rng.integers(2, 9))
        a = rng.normal(size=(m, n))
        x_star = rng.uniform(0.0, 1.0, size=n)
        b = a @ x_star
        big_m = max(1.0, 1.5 * float(x_star.sum()))
        result, _ = bounded_m_solve(a, b, big_m, eps)
        assert isinstance(result, ApproxFeasible)
        r_prime = LpInstance(a, b).r_prime
        assert result.residual < 2.0 * r_prime * eps
        assert np.all(result.x0 >= 0.0)


def test_bounded_m_solve__infeasible_sign() -> None:
    """Separate b / M from conv{a_i, 0} when b points the wrong way."""
    result, _ = bounded_m_solve(np.array([[1.0]]), np.array([-1.0]), 2.0, 1e-2)
    assert isinstance(result, InfeasibleCertificate)
    assert not result.at_cap


def test_bounded_and_doubling__agree_on_verdicts() -> None:
    """Give the same verdict for M = 4 and doubling up to mu = 4."""
    rng = np.random.default_rng(61)
    for k in range(20):
        a = rng.uniform(0.1, 1.0, size=(3, 6))
        x_star = rng.uniform(0.1, 0.5, size=6)
        b = a @ x_star if k % 2 == 0 else -(a @ x_star)
        bounded, _ = bounded_m_solve(a, b, 4.0, 5e-2)
        doubled, _ = doubling_solve(a, b, 5e-2, 4.0)
        assert type(bounded) is type(doubled)
        expected = ApproxFeasible if k % 2 == 0 else InfeasibleCertificate
        assert isinstance(bounded, expected)


def test_infeasible_certificate__separates_its_reduced_query() -> None:
    """Put b / scale strictly on the far side of the witness hyperplane."""
    a, b = np.array([[1.0]]), np.array([-1.0])
    bounded, _ = bounded_m_solve(a, b, 4.0, 1e-2)
    doubled, _ = doubling_solve(a, b, 1e-2, 16.0)
    for result, scale in ((bounded, 4.0), (doubled, 16.0)):
        assert isinstance(result, InfeasibleCertificate)
        assert result.scale == scale
        query = result.reduced_query(b)
        assert query.tolist() == [-1.0 / scale]
        inner = result.inner
        assert float(inner.hyperplane_normal @ query) > inner.hyperplane_offset
        assert float(inner.hyperplane_normal @ a[:, 0]) < inner.hyperplane_offset

    no_rec, _ = two_phase_solve(np.array([[1.0], [0.0]]), np.array([0.0, 1.0]), 1e-2)
    assert isinstance(no_rec, InfeasibleCertificate)
    assert no_rec.scale is None
    assert no_rec.reduced_query([0.0, 1.0]).tolist() == [0.0, 0.0]


def test_augmented_distance_sup__matches_mu_grid() -> None:
    """Attain sup over mu >= 1 of d(u, w / mu) at mu = 1 or in the limit."""
    rng = np.random.default_rng(5)
    mus = np.geomspace(1.0, 1e6, 2001)
    for _ in range(200):
        u, w = rng.normal(size=(2, 4))
        grid = max(float(np.linalg.norm(u - w / mu)) for mu in mus)
        sup = augmented_distance_sup(u, w)
        assert grid <= sup + 1e-12
        assert grid >= sup - 1e-5 * (1.0 + float(np.linalg.norm(w)))


# --- Doubling tests ---


def test_doubling_solve__feasible_after_two_rounds() -> None:
    """Find x = 2 at mu = 2 after failing at mu = 1."""
    result, stats = doubling_solve(np.array([[1.0]]), np.array([2.0]), 1e-2, 16.0)

    assert isinstance(result, ApproxFeasible)
    assert result.mu == 2.0
    assert result.x0.tolist() == [2.0]
    assert len(stats.round_starts) == 2


def test_doubling_solve__stops_at_cap() -> None:
    """Report infeasibility at the cap after log2(cap) + 1 rounds."""
    result, stats = doubling_solve(np.array([[1.0]]), np.array([-1.0]), 1e-2, 4.0)

    assert isinstance(result, InfeasibleCertificate)
    assert result.at_cap
    assert result.context == "doubling up to mu=4"
    assert len(stats.round_starts) == doubling_round_limit(4.0) == 3


def test_doubling_solve__certificate_scale_is_last_mu() -> None:
    """Record the largest power of two not above the cap as the scale."""
    for cap in (1.0, 3.0, 16.0, 20.0):
        result, _ = doubling_solve(np.array([[1.0]]), np.array([-1.0]), 1e-2, cap)
        assert isinstance(result, InfeasibleCertificate)
        assert result.scale == last_doubling_mu(cap)
    assert last_doubling_mu(20.0) == 16.0
    with pytest.raises(InvalidInputError):
        last_doubling_mu(0.5)


def test_doubling_solve__rejects_small_cap() -> None:
    """Require mu_cap >= 1."""
    with pytest.raises(InvalidInputError):
        doubling_solve(np.array([[1.0]]), np.array([1.0]), 1e-2, 0.5)
