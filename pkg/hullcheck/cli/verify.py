"""Re-check a report's certificate against the input files, without solving."""

from __future__ import annotations

from typing import Any

import numpy as np

from hullcheck.cli.config import Mode
from hullcheck.core.geometry import PointSet, QueryPoint, Vector, pivot_margins, pivot_mask
from hullcheck.core.lp import last_doubling_mu
from hullcheck.utils.constant import POINT_DRIFT_TOL, SIMPLEX_SUM_TOL


def _simplex_problems(coeffs: Vector, n: int) -> list[str]:
    problems = []
    if coeffs.shape != (n,):
        return [f"expected {n} coefficients, got {coeffs.shape[0]}"]
    if np.any(coeffs < 0.0):
        problems.append("negative coefficient")
    if abs(float(coeffs.sum()) - 1.0) > SIMPLEX_SUM_TOL * max(1, n):
        problems.append(f"coefficients sum to {float(coeffs.sum())!r}")
    return problems


def _point_problems(points: PointSet, coeffs: Vector, point: Vector) -> list[str]:
    scale = 1.0 + float(np.abs(points.columns).max())
    if float(np.linalg.norm(points.combine(coeffs) - point)) > POINT_DRIFT_TOL * scale:
        return ["point does not match its coefficients"]
    return []


def check_approx(cert: dict[str, Any], points: PointSet, p: QueryPoint) -> list[str]:
    """Check an approximate solution: simplex coefficients and ``d(p', p) < eps R``."""
    coeffs = np.asarray(cert["coeffs"], dtype=np.float64)
    problems = _simplex_problems(coeffs, points.count)
    if problems:
        return problems
    point = np.asarray(cert["point"], dtype=np.float64)
    problems += _point_problems(points, coeffs, point)
    gap = float(np.linalg.norm(points.combine(coeffs) - p.coords))
    bound = float(cert["eps_used"]) * points.radius(p)
    if gap >= bound * (1.0 + POINT_DRIFT_TOL) + POINT_DRIFT_TOL:
        problems.append(f"gap {gap!r} is not below eps * R = {bound!r}")
    return problems


def check_witness(cert: dict[str, Any], points: PointSet, p: QueryPoint) -> list[str]:
    """Check a witness: simplex coefficients, closeness to every point, separation.

    Closeness is tested with the same pivot margins the solver uses. The
    hyperplane must then be the bisector ``c = p - p'``, ``gamma = c^T (p + p') / 2``
    up to drift, which separates exactly when every margin is negative.
    """
    coeffs = np.asarray(cert["coeffs"], dtype=np.float64)
    problems = _simplex_problems(coeffs, points.count)
    if problems:
        return problems
    point = np.asarray(cert["point"], dtype=np.float64)
    problems += _point_problems(points, coeffs, point)
    q = p.coords
    bisector = q - point
    if not float(bisector @ bisector) > 0.0:
        return [*problems, "witness coincides with p"]
    if np.any(pivot_margins(points.columns, point, q) >= 0.0):
        problems.append("some point is at least as close to p as to the witness")
    normal = np.asarray(cert["hyperplane_normal"], dtype=np.float64)
    gamma = float(cert["hyperplane_offset"])
    scale = 1.0 + max(float(np.abs(q).max()), float(np.abs(point).max()))
    if normal.shape != bisector.shape or (
        float(np.linalg.norm(normal - bisector)) > POINT_DRIFT_TOL * scale
    ):
        problems.append("hyperplane normal is not p - p'")
    elif abs(gamma - 0.5 * float(bisector @ (q + point))) > POINT_DRIFT_TOL * scale * scale:
        problems.append("hyperplane offset is not the bisector of [p, p']")
    return problems


def check_general_witness(cert: dict[str, Any], points: PointSet, p: QueryPoint) -> list[str]:
    """Check that a general witness is strictly closer than ``p`` to every point."""
    point = np.asarray(cert["point"], dtype=np.float64)
    if np.any(pivot_mask(points.columns, point, p.coords)):
        return ["general witness is not strictly closer than p to every point"]
    return []


def check_lp_solution(cert: dict[str, Any], a: Vector, b: Vector) -> list[str]:
    """Check ``x0 >= 0`` and ``d(A x0, b) < bound``."""
    x0 = np.asarray(cert["x0"], dtype=np.float64)
    if x0.shape != (a.shape[1],):
        return [f"expected {a.shape[1]} entries in x0, got {x0.shape[0]}"]
    problems = []
    if np.any(x0 < 0.0):
        problems.append("x0 has a negative entry")
    residual = float(np.linalg.norm(a @ x0 - b))
    if not residual < float(cert["bound"]):
        problems.append(f"residual {residual!r} is not below {cert['bound']!r}")
    return problems


def check_lp_infeasible(
    cert: dict[str, Any], a: Vector, b: Vector, mode: Mode, expected_scale: float | None
) -> list[str]:
    """Check the witness against the reduced instance rebuilt from ``(mode, b, M)``.

    The no-recession reduction separates 0 from ``conv{a_i, -b}``; the bounded
    reductions separate ``b / M`` from ``conv{a_i, 0}``. The certificate's
    ``scale`` must equal ``expected_scale``, the ``M`` (or last doubling ``mu``)
    the run was configured with.
    """
    claimed = cert.get("scale")
    if mode is Mode.LP_NORECESSION:
        if claimed is not None:
            return [f"no-recession certificate carries a scale {claimed!r}"]
        reduced = PointSet(np.column_stack([a, -b]))
        query = QueryPoint(np.zeros_like(b))
    else:
        if expected_scale is None:
            return ["bounded certificate needs M (--big-m) or the doubling cap (--mu-cap)"]
        if claimed is None or float(claimed) != expected_scale:
            return [f"certificate scale {claimed!r} does not match M = {expected_scale!r}"]
        reduced = PointSet(np.column_stack([a, np.zeros_like(b)]))
        query = QueryPoint(b / expected_scale)
    return check_witness(cert["inner"], reduced, query)


def expected_lp_scale(
    mode: Mode, config: dict[str, Any], *, big_m: float | None, mu_cap: float | None
) -> float | None:
    """Return the ``M`` a bounded LP certificate must refer to.

    Flags win over the report's own config; doubling runs end at the largest
    power of two not above the cap.
    """
    if mode is Mode.LP_BOUNDED_M:
        value = big_m if big_m is not None else config.get("big_m")
        return None if value is None else float(value)
    if mode is Mode.LP_DOUBLING:
        cap = mu_cap if mu_cap is not None else config.get("mu_cap")
        return None if cap is None else last_doubling_mu(float(cap))
    return None


def verify_report(
    report: dict[str, Any],
    *,
    points: PointSet | None = None,
    query: QueryPoint | None = None,
    lp: tuple[Vector, Vector] | None = None,
    big_m: float | None = None,
    mu_cap: float | None = None,
) -> list[str]:
    """Re-check the certificate in ``report``.

    Args:
        report: A parsed ``hullcheck/1`` report.
        points: Input points (membership and ball modes).
        query: Input query point.
        lp: ``(A, b)`` for LP modes.
        big_m: ``M`` a bounded-M certificate must refer to; defaults to the report config.
        mu_cap: Doubling cap; defaults to the report config.

    Returns:
        Problems found; empty when the certificate checks out. Inconclusive
        outcomes carry no claim and always pass.
    """
    cert = report["certificate"]
    kind = cert["kind"]
    config = report.get("config", {})
    mode = Mode(config.get("mode", Mode.MEMBERSHIP))
    if kind == "inconclusive":
        return []
    if kind in {"approx-feasible", "infeasible"}:
        if lp is None:
            return ["LP certificate needs --lp-a and --lp-b"]
        a, b = lp
        if kind == "approx-feasible":
            return check_lp_solution(cert, a, b)
        expected = expected_lp_scale(mode, config, big_m=big_m, mu_cap=mu_cap)
        return check_lp_infeasible(cert, a, b, mode, expected)
    if points is None or query is None:
        return ["membership certificate needs --points and --query"]
    if kind == "approx":
        return check_approx(cert, points, query)
    if kind == "empty-intersection":
        return check_approx(cert["certificate"], points, query)
    if kind == "witness":
        return check_witness(cert, points, query)
    if kind == "intersection-point":
        return check_witness(cert["certificate"], points, query)
    if kind == "general-witness":
        return check_general_witness(cert, points, query)
    if kind == "coord-approx":
        gap = float(np.linalg.norm(np.asarray(cert["point"]) - query.coords))
        if abs(gap - float(cert["gap"])) > POINT_DRIFT_TOL * (1.0 + gap):
            return ["reported gap does not match the point"]
        return []
    return [f"unknown certificate kind {kind!r}"]
