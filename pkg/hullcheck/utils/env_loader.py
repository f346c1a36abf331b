"""Environment variable loading utilities."""

from __future__ import annotations

import os

ENV_PREFIX = "HULLCHECK_"


def load_project_env(prefix: str = ENV_PREFIX) -> dict[str, str]:
    """Collect the project settings from the process environment.

    Args:
        prefix: Only variables whose name starts with this prefix are kept.

    Returns:
        Matching variables with surrounding whitespace stripped; blank values
        are dropped so the built-in defaults apply.
    """
    return {
        name: value.strip()
        for name, value in os.environ.items()
        if name.startswith(prefix) and value.strip()
    }
