"""LP feasibility via convex-hull membership.

``Ax = b, x >= 0`` is decided by reducing it to membership problems:

* no recession direction: ``0 in conv{a_1, ..., a_n, -b}`` (Two-Phase solver);
* bounded by ``M``: ``b / M in conv{a_1, ..., a_n, 0}``;
* unknown bound: the bounded form with ``mu = 1, 2, 4, ...`` up to a cap.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import StrEnum
from typing import Any

import numpy as np
from numpy.typing import ArrayLike

from hullcheck.core.certificate import (
    ApproxSolution,
    Inconclusive,
    RunStats,
    Witness,
)
from hullcheck.core.errors import (
    InvalidInputError,
    LastCoefficientCollapseError,
    RecessionSuspectedError,
)
from hullcheck.core.geometry import Iterate, PointSet, QueryPoint, Tolerances, Vector
from hullcheck.core.solver import solve
from hullcheck.utils.constant import (
    ALPHA_MIN_THRESHOLD,
    HULLCHECK_EPS_FLOOR,
    HULLCHECK_MAX_ITERS,
)


class LpMode(StrEnum):
    """How the LP is reduced to membership."""

    NO_RECESSION = "no-recession"
    BOUNDED_M = "bounded-m"


@dataclass(frozen=True, eq=False)
class LpInstance:
    """The system ``Ax = b, x >= 0``.

    Attributes:
        a: ``(m, n)`` matrix whose columns are ``a_i``.
        b: Right-hand side of length ``m``.
        mode: Reduction used.
        big_m: Bound ``M`` for :attr:`LpMode.BOUNDED_M`.
        eps0: Target relative residual accuracy.
    """

    a: Vector
    b: Vector
    mode: LpMode = LpMode.NO_RECESSION
    big_m: float | None = None
    eps0: float = 1e-3

    def __post_init__(self) -> None:
        """Validate shapes, finiteness and mode parameters.

        Raises:
            InvalidInputError: If any field is inconsistent.
        """
        a = np.array(self.a, dtype=np.float64)
        b = np.array(self.b, dtype=np.float64).reshape(-1)
        if a.ndim == 1:
            a = a.reshape(-1, 1)
        if a.ndim != 2 or a.shape[0] != b.shape[0] or a.shape[1] < 1:
            msg = f"A has shape {a.shape} but b has length {b.shape[0]}"
            raise InvalidInputError(msg)
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            msg = "LP data contains non-finite entries"
            raise InvalidInputError(msg)
        if self.mode is LpMode.BOUNDED_M and (self.big_m is None or self.big_m <= 0.0):
            msg = "Bounded-M mode needs M > 0"
            raise InvalidInputError(msg)
        if not 0.0 < self.eps0 < 1.0:
            msg = f"eps0 must lie in (0, 1), got {self.eps0!r}"
            raise InvalidInputError(msg)
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "mode", LpMode(self.mode))

    @property
    def r_prime(self) -> float:
        """``R' = max{||a_i||, ||b||}``."""
        return max(float(np.linalg.norm(self.a, axis=0).max()), float(np.linalg.norm(self.b)))


@dataclass
class ApproxFeasible:
    """A nonnegative ``x0`` with ``d(A x0, b) = residual < bound``."""

    x0: Vector
    residual: float
    bound: float
    alpha_last: float | None = None
    mu: float | None = None
    delta0_lower: float | None = None
    kind: str = field(default="approx-feasible", init=False)

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary for JSON serialization.

        Returns:
            Dictionary representation of the result.
        """
        return {
            "kind": self.kind,
            "x0": [float(x) for x in self.x0],
            "residual": self.residual,
            "bound": self.bound,
            "alpha_last": self.alpha_last,
            "mu": self.mu,
            "delta0_lower": self.delta0_lower,
        }


@dataclass
class InfeasibleCertificate:
    """A witness for a reduced membership instance.

    Attributes:
        inner: The witness of the reduced instance.
        context: Which reduced instance the witness refers to.
        at_cap: True when the doubling scheme stopped at its cap, i.e. the
            system is infeasible for every tested ``mu`` but not proven
            infeasible outright.
        scale: ``M`` (or the last ``mu``) of a bounded reduction, whose query is
            ``b / scale``; None for the no-recession reduction, whose query is 0.
    """

    inner: Witness
    context: str
    at_cap: bool = False
    scale: float | None = None
    kind: str = field(default="infeasible", init=False)

    def reduced_query(self, b: ArrayLike) -> Vector:
        """Return the query of the reduced instance the witness separates."""
        rhs = np.asarray(b, dtype=np.float64)
        return np.zeros_like(rhs) if self.scale is None else rhs / self.scale

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary for JSON serialization.

        Returns:
            Dictionary representation of the result.
        """
        return {
            "kind": self.kind,
            "context": self.context,
            "at_cap": self.at_cap,
            "scale": self.scale,
            "inner": self.inner.to_dict(),
        }


LpResult = ApproxFeasible | InfeasibleCertificate | Inconclusive


# --- No-recession reduction ---


def reduce_no_recession(a: ArrayLike, b: ArrayLike) -> tuple[PointSet, QueryPoint, float]:
    """Reduce ``Ax = b, x >= 0`` to ``0 in conv{a_1, ..., a_n, -b}``.

    Args:
        a: ``(m, n)`` matrix.
        b: Right-hand side.

    Returns:
        ``(points, origin, r_prime)`` with ``n + 1`` points.
    """
    instance = LpInstance(a, b)
    columns = np.column_stack([instance.a, -instance.b])
    return PointSet(columns), QueryPoint(np.zeros(instance.b.shape[0])), instance.r_prime


def extract_x0(coeffs: ArrayLike, *, threshold: float = ALPHA_MIN_THRESHOLD) -> Vector:
    """Recover ``x0 = alpha_{1..n} / alpha_{n+1}`` from reduced coefficients.

    Args:
        coeffs: Simplex vector of length ``n + 1``.
        threshold: Smallest acceptable ``alpha_{n+1}``.

    Returns:
        Nonnegative vector of length ``n``.

    Raises:
        LastCoefficientCollapseError: If ``alpha_{n+1} <= threshold``.
    """
    alpha = np.asarray(coeffs, dtype=np.float64)
    last = float(alpha[-1])
    if last <= threshold:
        msg = f"Coefficient of -b collapsed to {last:.3e}; sensitivity bound not respected"
        raise LastCoefficientCollapseError(msg)
    return np.maximum(alpha[:-1], 0.0) / last


def sensitivity_epsilon(delta0_lower: float, b_norm: float, r_prime: float, eps0: float) -> float:
    """Inner accuracy that guarantees an LP residual below ``eps0 * R'``.

    Args:
        delta0_lower: ``Delta'_0``, a positive lower bound on ``d(0, conv(A))``.
        b_norm: ``b_0 = ||b||``.
        r_prime: ``R' = max{||a_i||, ||b||}``.
        eps0: Target residual accuracy.

    Returns:
        ``(Delta'_0 / 2) * min{1 / R', eps0 / (Delta'_0 + b_0)}``.

    Raises:
        InvalidInputError: If ``Delta'_0`` or ``R'`` is not positive.
    """
    if delta0_lower <= 0.0 or r_prime <= 0.0:
        msg = "Delta'_0 and R' must be positive"
        raise InvalidInputError(msg)
    return 0.5 * delta0_lower * min(1.0 / r_prime, eps0 / (delta0_lower + b_norm))


def sensitivity_residual_factor(eps: float, delta0_lower: float, b_norm: float) -> float:
    """Forward form ``eps' = 2 (1 + b_0 / Delta'_0) eps`` of the sensitivity bound."""
    return 2.0 * (1.0 + b_norm / delta0_lower) * eps


def _safe_eps(eps: float) -> float:
    return min(eps, 0.5)


def _residual(a: Vector, b: Vector, x0: Vector) -> float:
    return float(np.linalg.norm(a @ x0 - b))


def two_phase_solve(
    a: ArrayLike,
    b: ArrayLike,
    eps0: float,
    *,
    max_iters: int = HULLCHECK_MAX_ITERS,
    eps_floor: float = HULLCHECK_EPS_FLOOR,
) -> tuple[LpResult, RunStats]:
    """Two-Phase LP feasibility under the no-recession assumption.

    Phase I halves ``eps`` from 0.5, each round resuming from the last iterate,
    until the origin is separated from ``conv{a_i}``; half the witness norm
    lower-bounds that distance. Phase II warm-starts on ``{a_1, ..., a_n, -b}``
    at the sensitivity accuracy.

    Args:
        a: ``(m, n)`` matrix.
        b: Right-hand side.
        eps0: Target residual accuracy relative to ``R'``.
        max_iters: Step budget per inner run.
        eps_floor: Phase I gives up below this accuracy.

    Returns:
        ``(result, stats)``; stats hold one round per inner run.

    Raises:
        RecessionSuspectedError: If Phase I cannot separate the origin.
    """
    instance = LpInstance(a, b, eps0=eps0)
    columns = PointSet(instance.a)
    origin = QueryPoint(np.zeros(instance.b.shape[0]))
    stats = RunStats()

    eps = 0.5
    witness: Witness | None = None
    warm_phase: Iterate | None = None
    while witness is None:
        if eps < eps_floor:
            msg = f"Phase I reached eps={eps:.3e} without a witness: 0 may lie in conv(A)"
            raise RecessionSuspectedError(msg)
        tol = Tolerances(eps=eps, max_iters=max_iters)
        cert, phase_stats = solve(columns, origin, tol, initial=warm_phase)
        stats.absorb(phase_stats)
        if isinstance(cert, Witness):
            witness = cert
        elif isinstance(cert, Inconclusive):
            return cert, stats
        else:
            warm_phase = Iterate.from_coeffs(columns, cert.coeffs, origin)
            eps /= 2.0
    delta0_lower = 0.5 * float(np.linalg.norm(witness.point))
    logging.info("LP Phase I: witness found at eps=%.3e, Delta'_0=%.6e", eps, delta0_lower)

    reduced, _, r_prime = reduce_no_recession(instance.a, instance.b)
    b_norm = float(np.linalg.norm(instance.b))
    eps_inner = _safe_eps(sensitivity_epsilon(delta0_lower, b_norm, r_prime, eps0))
    warm = Iterate.from_coeffs(reduced, np.append(witness.coeffs, 0.0), origin)
    cert, phase_stats = solve(
        reduced, origin, Tolerances(eps=eps_inner, max_iters=max_iters), initial=warm
    )
    stats.absorb(phase_stats)
    result = _from_reduced(instance, cert, r_prime, "no-recession reduction", delta0_lower)
    return result, stats


def _from_reduced(
    instance: LpInstance,
    cert: ApproxSolution | Witness | Inconclusive,
    r_prime: float,
    ctx: str,
    delta0_lower: float,
) -> LpResult:
    if isinstance(cert, Witness):
        return InfeasibleCertificate(cert, ctx)
    if isinstance(cert, Inconclusive):
        return cert
    x0 = extract_x0(cert.coeffs)
    residual = _residual(instance.a, instance.b, x0)
    alpha_last = float(cert.coeffs[-1])
    logging.info("LP Phase II: residual %.3e with alpha_{n+1}=%.3e", residual, alpha_last)
    return ApproxFeasible(
        x0, residual, instance.eps0 * r_prime, alpha_last=alpha_last, delta0_lower=delta0_lower
    )


# --- Bounded-M augmentation ---


def augmented_distance_sup(u: ArrayLike, w: ArrayLike) -> float:
    """Return ``sup_{mu >= 1} d(u, w / mu) = max{d(u, w), ||u||}``."""
    uu = np.asarray(u, dtype=np.float64)
    ww = np.asarray(w, dtype=np.float64)
    return max(float(np.linalg.norm(uu - ww)), float(np.linalg.norm(uu)))


def _augmented(instance: LpInstance) -> PointSet:
    return PointSet(np.column_stack([instance.a, np.zeros(instance.b.shape[0])]))


def _bounded_round(
    instance: LpInstance,
    augmented: PointSet,
    mu: float,
    eps: float,
    max_iters: int,
    initial: Iterate | None,
) -> tuple[ApproxSolution | Witness | Inconclusive, RunStats, QueryPoint]:
    target = QueryPoint(instance.b / mu)
    warm = None
    if initial is not None:
        warm = Iterate.from_coeffs(augmented, initial.coeffs, target)
    tol = Tolerances(eps=_safe_eps(eps / mu), max_iters=max_iters)
    cert, stats = solve(augmented, target, tol, initial=warm)
    return cert, stats, target


def _scaled_solution(
    instance: LpInstance, cert: ApproxSolution, mu: float, eps: float
) -> ApproxFeasible:
    x0 = mu * np.maximum(cert.coeffs[:-1], 0.0)
    residual = _residual(instance.a, instance.b, x0)
    return ApproxFeasible(x0, residual, 2.0 * instance.r_prime * eps, mu=mu)


def bounded_m_solve(
    a: ArrayLike,
    b: ArrayLike,
    big_m: float,
    eps: float,
    *,
    max_iters: int = HULLCHECK_MAX_ITERS,
) -> tuple[LpResult, RunStats]:
    """Decide ``Ax = b, x >= 0, sum x <= M`` via ``b / M in conv{a_i, 0}``.

    Args:
        a: ``(m, n)`` matrix.
        b: Right-hand side.
        big_m: Bound ``M >= 1`` on ``sum x``.
        eps: Target accuracy; the inner run uses ``eps / M``.
        max_iters: Step budget.

    Returns:
        ``(result, stats)``; an approximate solution has residual ``< 2 R' eps``.
    """
    instance = LpInstance(a, b, mode=LpMode.BOUNDED_M, big_m=big_m, eps0=eps)
    augmented = _augmented(instance)
    cert, stats, _ = _bounded_round(instance, augmented, big_m, eps, max_iters, None)
    if isinstance(cert, Witness):
        ctx = f"bounded-M augmentation (M={big_m!r})"
        return InfeasibleCertificate(cert, ctx, scale=float(big_m)), stats
    if isinstance(cert, Inconclusive):
        return cert, stats
    return _scaled_solution(instance, cert, big_m, eps), stats


def doubling_solve(
    a: ArrayLike,
    b: ArrayLike,
    eps: float,
    mu_cap: float,
    *,
    max_iters: int = HULLCHECK_MAX_ITERS,
) -> tuple[LpResult, RunStats]:
    """Bounded-M scheme with ``mu = 1, 2, 4, ...`` until feasible or ``mu > mu_cap``.

    Each round warm-starts from the previous round's witness.

    Args:
        a: ``(m, n)`` matrix.
        b: Right-hand side.
        eps: Target accuracy.
        mu_cap: Largest ``mu`` tried.
        max_iters: Step budget per round.

    Returns:
        ``(result, stats)`` with one stats round per ``mu``.

    Raises:
        InvalidInputError: If ``mu_cap < 1``.
    """
    if mu_cap < 1.0:
        msg = f"mu_cap must be at least 1, got {mu_cap!r}"
        raise InvalidInputError(msg)
    instance = LpInstance(a, b, mode=LpMode.BOUNDED_M, big_m=mu_cap, eps0=eps)
    augmented = _augmented(instance)
    stats = RunStats()
    mu = 1.0
    previous: Witness | None = None
    warm: Iterate | None = None
    while mu <= mu_cap:
        cert, round_stats, target = _bounded_round(instance, augmented, mu, eps, max_iters, warm)
        stats.absorb(round_stats)
        if isinstance(cert, ApproxSolution):
            logging.info("Doubling: feasible at mu=%g after %d rounds", mu, len(stats.round_starts))
            return _scaled_solution(instance, cert, mu, eps), stats
        if isinstance(cert, Inconclusive):
            return cert, stats
        previous = cert
        warm = Iterate.from_coeffs(augmented, cert.coeffs, target)
        mu *= 2.0
    assert previous is not None
    rounds = len(stats.round_starts)
    last_mu = mu / 2.0
    logging.info("Doubling: infeasible for every mu <= %g (%d rounds)", mu_cap, rounds)
    ctx = f"doubling up to mu={last_mu:g}"
    return InfeasibleCertificate(previous, ctx, at_cap=True, scale=last_mu), stats


def doubling_round_limit(mu_cap: float) -> int:
    """Upper bound ``ceil(log2 mu_cap) + 1`` on doubling rounds."""
    return math.ceil(math.log2(mu_cap)) + 1 if mu_cap > 1.0 else 1


def last_doubling_mu(mu_cap: float) -> float:
    """Largest ``mu = 2^j`` the doubling scheme tries under ``mu_cap``."""
    if mu_cap < 1.0:
        msg = f"mu_cap must be at least 1, got {mu_cap!r}"
        raise InvalidInputError(msg)
    mu = 1.0
    while mu * 2.0 <= mu_cap:
        mu *= 2.0
    return mu
