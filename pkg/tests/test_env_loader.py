"""Tests for environment-driven settings."""

from __future__ import annotations

import pytest

from hullcheck.utils.env_loader import load_project_env


def test_load_project_env__keeps_prefixed_non_blank(monkeypatch: pytest.MonkeyPatch) -> None:
    """Keep HULLCHECK_ variables, strip them and drop blank ones."""
    monkeypatch.setenv("HULLCHECK_THREADS", " 4 ")
    monkeypatch.setenv("HULLCHECK_LOG_LEVEL", "   ")
    monkeypatch.setenv("UNRELATED_SETTING", "1")

    env = load_project_env()

    assert env["HULLCHECK_THREADS"] == "4"
    assert "HULLCHECK_LOG_LEVEL" not in env
    assert "UNRELATED_SETTING" not in env
