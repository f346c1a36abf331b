"""Sampled visibility diagnostics.

Estimates the worst-case best-pivot angle over ``conv(S)`` minus a small ball
around ``p``, and the cosine constant that bounds strict-pivot contraction,
by drawing random convex combinations of ``S``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from hullcheck.cli.generators import SplitMix64
from hullcheck.core.certificate import RunStats
from hullcheck.core.errors import InvalidInputError, VisibilityInconsistencyError
from hullcheck.core.geometry import PointSet, QueryPoint, Tolerances, pivot_cosines, pivot_mask
from hullcheck.core.oracle import Verdict, oracle_membership
from hullcheck.core.solver import solve
from hullcheck.utils.constant import ORACLE_MAX_DIM, ORACLE_MAX_POINTS

REJECTION_ATTEMPTS_PER_SAMPLE = 50


@dataclass
class VisibilityReport:
    """Sampled and observed visibility constants.

    Attributes:
        samples: Accepted samples.
        witness_samples: Samples that had no pivot (only possible for ``p`` outside).
        theta_star_sampled: Largest sampled best-pivot angle at the iterate.
        nu_sampled: ``sin(theta_star_sampled)``.
        nu_observed: Observed visibility constant of a solver run.
        c_observed: Observed visibility factor of the same run.
        phi_star_sampled: Largest sampled ``min_j cos`` of the angle at ``p``.
        lambda_star_sampled: ``sqrt(1 - phi_star_sampled^2)``.
    """

    samples: int
    witness_samples: int
    theta_star_sampled: float
    nu_sampled: float
    nu_observed: float
    c_observed: float
    phi_star_sampled: float
    lambda_star_sampled: float

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary for JSON serialization.

        Returns:
            Dictionary representation of the report.
        """
        return {
            "samples": self.samples,
            "witness_samples": self.witness_samples,
            "theta_star_sampled": self.theta_star_sampled,
            "nu_sampled": self.nu_sampled,
            "nu_observed": self.nu_observed,
            "c_observed": self.c_observed,
            "phi_star_sampled": self.phi_star_sampled,
            "lambda_star_sampled": self.lambda_star_sampled,
        }


def _certified_inside(points: PointSet, p: QueryPoint) -> bool:
    if points.count > ORACLE_MAX_POINTS or points.dim > ORACLE_MAX_DIM:
        return False
    return oracle_membership(points, p, 0.0) is Verdict.INSIDE


def visibility_probe(
    points: PointSet,
    p: QueryPoint,
    eps: float,
    samples: int,
    seed: int,
    *,
    stats: RunStats | None = None,
) -> VisibilityReport:
    """Estimate visibility constants by rejection sampling.

    Args:
        points: The point set ``S``.
        p: Query point; membership is not required.
        eps: Samples closer than ``eps * R`` to ``p`` are rejected.
        samples: Number of accepted samples wanted.
        seed: SplitMix64 seed.
        stats: Run whose observed constants are reported; a Triangle run at
            ``eps`` is made when omitted.

    Returns:
        The sampled diagnostics.

    Raises:
        InvalidInputError: If ``samples`` is not positive.
        VisibilityInconsistencyError: If a sample has no pivot although ``p``
            is certified inside ``conv(S)``.
    """
    if samples < 1:
        msg = f"samples must be positive, got {samples}"
        raise InvalidInputError(msg)
    p.check_against(points)
    if stats is None:
        _, stats = solve(points, p, Tolerances(eps=eps))
    q = p.coords
    columns = points.columns
    radius = points.radius(p)
    offsets = columns - q[:, None]
    offset_norms = np.sqrt(np.einsum("ij,ij->j", offsets, offsets))
    inside = _certified_inside(points, p)

    rng = SplitMix64(seed)
    accepted = 0
    witnesses = 0
    theta_star = 0.0
    phi_star = -1.0
    for _ in range(samples * REJECTION_ATTEMPTS_PER_SAMPLE):
        if accepted >= samples:
            break
        x = points.combine(rng.dirichlet(points.count))
        u = x - q
        gap = float(np.linalg.norm(u))
        if gap <= eps * radius:
            continue
        accepted += 1

        with np.errstate(divide="ignore", invalid="ignore"):
            cos_at_p = (offsets.T @ u) / (offset_norms * gap)
        cos_at_p = np.where(offset_norms > 0.0, cos_at_p, -1.0)
        phi_star = max(phi_star, float(cos_at_p.min()))

        mask = pivot_mask(columns, x, q)
        if not mask.any():
            if inside:
                msg = f"Sample {accepted} has no pivot although p is inside conv(S)"
                raise VisibilityInconsistencyError(msg)
            witnesses += 1
            continue
        best_cos = float(np.max(np.where(mask, pivot_cosines(columns, x, q), -np.inf)))
        theta_star = max(theta_star, math.acos(max(-1.0, min(1.0, best_cos))))

    if accepted < samples:
        logging.warning("Visibility probe accepted only %d of %d samples", accepted, samples)
    phi = max(-1.0, min(1.0, phi_star))
    return VisibilityReport(
        samples=accepted,
        witness_samples=witnesses,
        theta_star_sampled=theta_star,
        nu_sampled=math.sin(theta_star),
        nu_observed=stats.observed_nu,
        c_observed=stats.observed_c,
        phi_star_sampled=phi,
        lambda_star_sampled=math.sqrt(max(0.0, 1.0 - phi * phi)),
    )
