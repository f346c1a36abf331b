"""Certificates and run statistics produced by the solvers.

Every outcome carries its full coefficient vector over ``S`` so a consumer can
re-verify it without this package.
"""

from __future__ import annotations

import logging
import math
import sys
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from numpy.typing import ArrayLike

from hullcheck.core.errors import InvalidInputError, WitnessCheckError
from hullcheck.core.geometry import Iterate, PointSet, QueryPoint, Vector, pivot_margins


def _floats(values: ArrayLike) -> list[float]:
    return [float(x) for x in np.asarray(values, dtype=np.float64).tolist()]


@dataclass
class ApproxSolution:
    """An iterate ``p'`` with ``d(p', p) < eps_used * R``.

    Attributes:
        coeffs: Convex coefficients over ``S``.
        point: ``sum_i coeffs_i v_i``.
        gap: ``d(p', p)``.
        radius: ``R = max_i d(p, v_i)``.
        eps_used: Accuracy the stop test was run with.
    """

    coeffs: Vector
    point: Vector
    gap: float
    radius: float
    eps_used: float
    kind: str = field(default="approx", init=False)

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary for JSON serialization.

        Returns:
            Dictionary representation of the certificate.
        """
        return {
            "kind": self.kind,
            "coeffs": _floats(self.coeffs),
            "point": _floats(self.point),
            "gap": self.gap,
            "radius": self.radius,
            "eps_used": self.eps_used,
        }


@dataclass
class Witness:
    """An iterate strictly closer than ``p`` to every point of ``S``.

    Attributes:
        coeffs: Convex coefficients over ``S``.
        point: The witness ``p'``.
        gap: ``d(p', p)``.
        hyperplane_normal: ``c = p - p'``.
        hyperplane_offset: ``gamma = (||p||^2 - ||p'||^2) / 2``.
        distance_lo: Lower bound ``gap / 2`` on ``d(p, conv(S))``.
        distance_hi: Upper bound ``gap`` on ``d(p, conv(S))``.
    """

    coeffs: Vector
    point: Vector
    gap: float
    hyperplane_normal: Vector
    hyperplane_offset: float
    distance_lo: float
    distance_hi: float
    kind: str = field(default="witness", init=False)

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary for JSON serialization.

        Returns:
            Dictionary representation of the certificate.
        """
        return {
            "kind": self.kind,
            "coeffs": _floats(self.coeffs),
            "point": _floats(self.point),
            "gap": self.gap,
            "hyperplane_normal": _floats(self.hyperplane_normal),
            "hyperplane_offset": self.hyperplane_offset,
            "distance_lo": self.distance_lo,
            "distance_hi": self.distance_hi,
        }


@dataclass
class Inconclusive:
    """The iteration budget ran out before either certificate was found.

    Attributes:
        reason: Short machine-readable reason.
        coeffs: Coefficients of the last iterate, when one exists.
        gap: Gap of the last iterate.
    """

    reason: str = "max-iters"
    coeffs: Vector | None = None
    gap: float | None = None
    kind: str = field(default="inconclusive", init=False)

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary for JSON serialization.

        Returns:
            Dictionary representation of the outcome.
        """
        return {
            "kind": self.kind,
            "reason": self.reason,
            "coeffs": None if self.coeffs is None else _floats(self.coeffs),
            "gap": self.gap,
        }


Certificate = ApproxSolution | Witness | Inconclusive


@dataclass
class RunStats:
    """Per-run trace of the Triangle Algorithm and its variants.

    ``gap_series[0]`` is the starting gap; every executed step appends one
    entry to each of the step series.

    Attributes:
        iterations: Executed steps.
        gap_series: Gaps ``delta_0, delta_1, ...``.
        pivot_angle_series: Pivot angle at the iterate (radians) per step.
        pivot_index_series: Pivot index per step (``>= n`` for auxiliary pivots).
        pivot_radius_series: ``d(p, v)`` of the pivot used per step.
        pivot_scans: Pivot-predicate evaluations.
        radius: ``R = max_i d(p, v_i)``.
        round_starts: Offsets into ``gap_series`` where a new round began.
        events: Notable non-step events (auxiliary pivots, early exits).
    """

    iterations: int = 0
    gap_series: list[float] = field(default_factory=list)
    pivot_angle_series: list[float] = field(default_factory=list)
    pivot_index_series: list[int] = field(default_factory=list)
    pivot_radius_series: list[float] = field(default_factory=list)
    pivot_scans: int = 0
    radius: float = 0.0
    round_starts: list[int] = field(default_factory=list)
    events: list[str] = field(default_factory=list)

    def record_start(self, gap: float) -> None:
        """Open a new round starting at ``gap``."""
        self.round_starts.append(len(self.gap_series))
        self.gap_series.append(float(gap))

    def record_step(self, gap: float, angle: float, index: int, pivot_radius: float) -> None:
        """Record one executed step."""
        self.iterations += 1
        self.gap_series.append(float(gap))
        self.pivot_angle_series.append(float(angle))
        self.pivot_index_series.append(int(index))
        self.pivot_radius_series.append(float(pivot_radius))

    def step_pairs(self) -> list[tuple[float, float]]:
        """Return ``(delta, delta')`` for every executed step, skipping round boundaries."""
        starts = set(self.round_starts)
        return [
            (self.gap_series[i - 1], self.gap_series[i])
            for i in range(1, len(self.gap_series))
            if i not in starts
        ]

    @property
    def observed_nu(self) -> float:
        """Observed visibility constant.

        The maximum over executed steps of ``max(sin theta', delta'/delta)``;
        the ratio term covers steps whose projection is clamped at the pivot.
        Runs without steps report 1.
        """
        values = [
            max(math.sin(angle), after / before if before > 0.0 else 0.0)
            for angle, (before, after) in zip(
                self.pivot_angle_series, self.step_pairs(), strict=False
            )
        ]
        if not values:
            return 1.0
        return min(1.0, max(sys.float_info.epsilon, max(values)))

    @property
    def observed_c(self) -> float:
        """Observed visibility factor ``c`` with ``nu = 1 / sqrt(1 + c)``."""
        nu = self.observed_nu
        return max(0.0, 1.0 / (nu * nu) - 1.0)

    @property
    def final_gap(self) -> float | None:
        """Last recorded gap."""
        return self.gap_series[-1] if self.gap_series else None

    def absorb(self, other: RunStats) -> None:
        """Append another run's trace as new rounds of this one."""
        offset = len(self.gap_series)
        self.iterations += other.iterations
        self.gap_series.extend(other.gap_series)
        self.pivot_angle_series.extend(other.pivot_angle_series)
        self.pivot_index_series.extend(other.pivot_index_series)
        self.pivot_radius_series.extend(other.pivot_radius_series)
        self.pivot_scans += other.pivot_scans
        self.round_starts.extend(offset + s for s in other.round_starts)
        self.events.extend(other.events)
        self.radius = max(self.radius, other.radius)

    def continue_with(self, other: RunStats) -> None:
        """Append the steps of a run that started from this run's last iterate."""
        self.iterations += other.iterations
        self.gap_series.extend(other.gap_series[1:])
        self.pivot_angle_series.extend(other.pivot_angle_series)
        self.pivot_index_series.extend(other.pivot_index_series)
        self.pivot_radius_series.extend(other.pivot_radius_series)
        self.pivot_scans += other.pivot_scans
        self.events.extend(other.events)

    def to_dict(self) -> dict[str, Any]:
        """Summarise the run for reports (the full trace goes to CSV).

        Returns:
            Dictionary representation of the statistics.
        """
        return {
            "iterations": self.iterations,
            "pivot_scans": self.pivot_scans,
            "initial_gap": self.gap_series[0] if self.gap_series else None,
            "final_gap": self.final_gap,
            "radius": self.radius,
            "rounds": len(self.round_starts),
            "observed_nu": self.observed_nu,
            "observed_c": self.observed_c,
            "events": list(self.events),
        }


def separating_hyperplane(
    witness_point: ArrayLike, p: QueryPoint, points: PointSet
) -> tuple[Vector, float]:
    """Build the orthogonal bisector of ``[p, p']`` for a witness ``p'``.

    Args:
        witness_point: Candidate witness ``p'``.
        p: Query point.
        points: The point set ``S``.

    Returns:
        ``(c, gamma)`` with ``c^T p > gamma`` and ``c^T v_i < gamma`` for all ``i``.
        Both sides are checked as ``c^T (p + p' - 2 v) / 2``, the pivot margin
        with its sign flipped.

    Raises:
        WitnessCheckError: If ``p' = p`` or some ``v_i`` is not strictly closer
            to ``p'`` than to ``p``.
    """
    x = np.asarray(witness_point, dtype=np.float64)
    q = p.coords
    normal = q - x
    if not float(normal @ normal) > 0.0:
        msg = "Bisector of [p, p'] is undefined: p' coincides with p"
        raise WitnessCheckError(msg)
    if np.any(pivot_margins(points.columns, x, q) >= 0.0):
        msg = "Point is not a witness: some v_i is at least as close to p as to p'"
        raise WitnessCheckError(msg)
    gamma = 0.5 * float(normal @ (q + x))
    return normal, gamma


def distance_bracket(witness_gap: float) -> tuple[float, float]:
    """Return the factor-two bracket ``(gap / 2, gap)`` on ``d(p, conv(S))``.

    Raises:
        InvalidInputError: If the gap is not positive.
    """
    if not witness_gap > 0.0:
        msg = f"Witness gap must be positive, got {witness_gap!r}"
        raise InvalidInputError(msg)
    return 0.5 * witness_gap, witness_gap


def make_witness(iterate: Iterate, p: QueryPoint, points: PointSet) -> Witness:
    """Verify ``iterate`` as a witness and package the certificate."""
    normal, gamma = separating_hyperplane(iterate.point, p, points)
    lo, hi = distance_bracket(iterate.gap)
    return Witness(
        coeffs=iterate.coeffs.copy(),
        point=iterate.point.copy(),
        gap=iterate.gap,
        hyperplane_normal=normal,
        hyperplane_offset=gamma,
        distance_lo=lo,
        distance_hi=hi,
    )


def witness_or_inconclusive(
    iterate: Iterate, p: QueryPoint, points: PointSet
) -> Witness | Inconclusive:
    """Package a pivot-free iterate, or report ``witness-check`` when it fails re-checking."""
    try:
        return make_witness(iterate, p, points)
    except WitnessCheckError as exc:
        logging.warning("Witness re-check failed at gap %.3e: %s", iterate.gap, exc)
        return make_inconclusive(iterate, reason="witness-check")


def make_approx(iterate: Iterate, radius: float, eps_used: float) -> ApproxSolution:
    """Package an iterate that passed the stop test."""
    return ApproxSolution(
        coeffs=iterate.coeffs.copy(),
        point=iterate.point.copy(),
        gap=iterate.gap,
        radius=radius,
        eps_used=eps_used,
    )


def make_inconclusive(iterate: Iterate | None, reason: str = "max-iters") -> Inconclusive:
    """Package the last iterate of a run that ran out of budget."""
    if iterate is None:
        return Inconclusive(reason=reason)
    return Inconclusive(reason=reason, coeffs=iterate.coeffs.copy(), gap=iterate.gap)
