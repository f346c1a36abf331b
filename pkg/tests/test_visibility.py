"""Tests for the sampled visibility diagnostics."""

from __future__ import annotations

import math

import pytest

from hullcheck.cli.visibility import visibility_probe
from hullcheck.core.errors import InvalidInputError
from hullcheck.core.geometry import PointSet, QueryPoint, Tolerances
from hullcheck.core.solver import solve

SQUARE = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]


def test_visibility_probe__square_centre_band() -> None:
    """Keep the worst best-pivot angle of the square centre between pi/8 and pi/4."""
    report = visibility_probe(PointSet.from_rows(SQUARE), QueryPoint([0.5, 0.5]), 1e-2, 2000, 1)

    assert report.samples == 2000
    assert report.witness_samples == 0
    assert math.sin(math.pi / 8) - 0.01 <= report.nu_sampled <= 1.0 / math.sqrt(2.0) + 1e-9
    assert 0.0 <= report.lambda_star_sampled <= 1.0


def test_visibility_probe__edge_midpoint_is_poorly_visible() -> None:
    """Approach nu = 1 when p sits on the boundary."""
    report = visibility_probe(
        PointSet.from_rows(SQUARE), QueryPoint([0.5, 0.0]), 1e-2, 20_000, 3
    )
    assert report.nu_sampled >= 0.9


def test_visibility_probe__segment_has_zero_angle() -> None:
    """See every iterate of a segment head-on."""
    report = visibility_probe(PointSet.from_rows([[0.0], [1.0]]), QueryPoint([0.5]), 1e-2, 500, 2)
    assert report.theta_star_sampled == pytest.approx(0.0, abs=1e-6)


def test_visibility_probe__counts_witness_samples_outside() -> None:
    """Count samples without a pivot when p lies outside the hull."""
    points = PointSet.from_rows([[1.0, 0.0], [0.0, 1.0]])
    report = visibility_probe(points, QueryPoint([0.0, 0.0]), 1e-2, 500, 4)
    assert 0 < report.witness_samples < report.samples


def test_visibility_probe__reports_observed_constants_of_given_run() -> None:
    """Copy nu and c from the supplied run statistics."""
    points = PointSet.from_rows(SQUARE)
    p = QueryPoint([0.3, 0.6])
    _, stats = solve(points, p, Tolerances(eps=1e-4))
    report = visibility_probe(points, p, 1e-2, 100, 5, stats=stats)

    assert report.nu_observed == stats.observed_nu
    assert report.c_observed == stats.observed_c
    assert report.to_dict()["samples"] == 100


def test_visibility_probe__rejects_nonpositive_samples() -> None:
    """Raise when fewer than one sample is requested."""
    with pytest.raises(InvalidInputError):
        visibility_probe(PointSet.from_rows(SQUARE), QueryPoint([0.5, 0.5]), 1e-2, 0, 0)
