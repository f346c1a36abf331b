"""Exact nearest-point oracle for desk-scale instances.

The oracle enumerates every affinely independent subset ``T`` of ``S`` with
``|T| <= m + 1``, projects ``p`` onto ``aff(T)`` and keeps projections whose
barycentric coordinates are nonnegative. It shares no code with the solvers'
projection routines, so it can serve as an independent check.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import StrEnum
from typing import Any

import numpy as np

from hullcheck.core.errors import InvalidInputError, OracleSizeError
from hullcheck.core.geometry import PointSet, QueryPoint, Vector
from hullcheck.utils.constant import COMPARE_TOL, ORACLE_MAX_DIM, ORACLE_MAX_POINTS

BARY_TOL = 1e-12


class Verdict(StrEnum):
    """Membership verdict of the oracle."""

    INSIDE = "inside"
    OUTSIDE = "outside"
    AMBIGUOUS = "ambiguous"


@dataclass(frozen=True, eq=False)
class OracleResult:
    """Nearest point of ``conv(S)`` to ``p``.

    Attributes:
        point: The nearest point.
        distance: ``d(p, conv(S))``.
        support: Indices of the face the nearest point lies on.
        weights: Convex coefficients over all of ``S`` (zero off the support).
    """

    point: Vector
    distance: float
    support: tuple[int, ...]
    weights: Vector

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary for JSON serialization.

        Returns:
            Dictionary representation of the result.
        """
        return {
            "point": [float(x) for x in self.point],
            "distance": self.distance,
            "support": list(self.support),
            "weights": [float(x) for x in self.weights],
        }


def _check_size(points: PointSet) -> None:
    if points.count > ORACLE_MAX_POINTS or points.dim > ORACLE_MAX_DIM:
        msg = (
            f"Oracle limited to n <= {ORACLE_MAX_POINTS} and m <= {ORACLE_MAX_DIM}, "
            f"got n={points.count}, m={points.dim}"
        )
        raise OracleSizeError(msg)


def _face_projection(face: Vector, q: Vector) -> Vector | None:
    """Barycentric weights of the projection of ``q`` onto ``aff(face)``.

    Returns None when the face is affinely dependent or the projection falls
    outside the face.
    """
    k = face.shape[1]
    if k == 1:
        return np.ones(1)
    anchor = face[:, 0]
    edges = face[:, 1:] - anchor[:, None]
    if np.linalg.matrix_rank(edges) < k - 1:
        return None
    t, *_ = np.linalg.lstsq(edges, q - anchor, rcond=None)
    bary = np.concatenate(([1.0 - float(t.sum())], t))
    if np.any(bary < -BARY_TOL):
        return None
    bary = np.maximum(bary, 0.0)
    return bary / bary.sum()


def oracle_nearest(points: PointSet, p: QueryPoint) -> OracleResult:
    """Compute the exact nearest point of ``conv(S)`` to ``p``.

    Faces are visited by size, then lexicographically; a later face replaces
    the incumbent only when strictly closer, so ties keep the earliest support.

    Args:
        points: The point set ``S`` (``n <= 12``, ``m <= 6``).
        p: Query point.

    Returns:
        The nearest point with its distance, support and coefficients.

    Raises:
        OracleSizeError: If the instance exceeds the enumeration guard.
    """
    _check_size(points)
    p.check_against(points)
    q = p.coords
    columns = points.columns
    best: OracleResult | None = None
    for size in range(1, min(points.count, points.dim + 1) + 1):
        for support in itertools.combinations(range(points.count), size):
            face = columns[:, support]
            bary = _face_projection(face, q)
            if bary is None:
                continue
            point = face @ bary
            distance = float(np.linalg.norm(point - q))
            if best is None or distance < best.distance - COMPARE_TOL * (1.0 + best.distance):
                weights = np.zeros(points.count)
                weights[list(support)] = bary
                best = OracleResult(point, distance, support, weights)
    assert best is not None
    return best


def verdict_for(result: OracleResult, p: QueryPoint, margin: float) -> Verdict:
    """Classify an oracle result.

    Args:
        result: Output of :func:`oracle_nearest`.
        p: The query it was computed for.
        margin: Distances in ``(tol, margin]`` count as ambiguous.

    Returns:
        The verdict.

    Raises:
        InvalidInputError: If ``margin`` is negative.
    """
    if margin < 0.0:
        msg = f"margin must be nonnegative, got {margin!r}"
        raise InvalidInputError(msg)
    if result.distance <= COMPARE_TOL * (1.0 + float(np.linalg.norm(p.coords))):
        return Verdict.INSIDE
    if result.distance > margin:
        return Verdict.OUTSIDE
    return Verdict.AMBIGUOUS


def oracle_membership(points: PointSet, p: QueryPoint, margin: float) -> Verdict:
    """Decide membership exactly, with an ambiguity band of width ``margin``."""
    return verdict_for(oracle_nearest(points, p), p, margin)
