"""hullcheck - Convex-hull membership solver built on the Triangle Algorithm."""

from __future__ import annotations

__version__ = "0.1.0"
