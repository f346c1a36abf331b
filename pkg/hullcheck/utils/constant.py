"""Project-wide constants and configuration."""

from __future__ import annotations

from .env_loader import load_project_env

# Load once (single source of truth)
_ENV = load_project_env()

# Environment-driven settings (typed, with defaults)
HULLCHECK_THREADS: int = max(1, int(_ENV.get("HULLCHECK_THREADS", "1")))
HULLCHECK_MAX_ITERS: int = int(_ENV.get("HULLCHECK_MAX_ITERS", "10000000"))
HULLCHECK_REFRESH_PERIOD: int = int(_ENV.get("HULLCHECK_REFRESH_PERIOD", "1000"))
HULLCHECK_EPS_FLOOR: float = float(_ENV.get("HULLCHECK_EPS_FLOOR", str(2.0**-40)))
HULLCHECK_LOG_LEVEL: str = _ENV.get("HULLCHECK_LOG_LEVEL", "WARNING").upper()

# Numerical tolerances
SIMPLEX_SUM_TOL: float = 1e-12
POINT_DRIFT_TOL: float = 1e-9
COMPARE_TOL: float = 1e-12
ALPHA_MIN_THRESHOLD: float = 1e-14

# Brute-force oracle guards
ORACLE_MAX_POINTS: int = 12
ORACLE_MAX_DIM: int = 6

# Auxiliary pivot strategies
STRATEGY_I_MIN_REDUCTION: float = 1e-3
STRATEGY_IV_WINDOW: int = 20
STRATEGY_IV_MIN_HITS: int = 5
STRATEGY_IV_MIN_REDUCTION: float = 0.01

# Reporting
REPORT_SCHEMA: str = "hullcheck/1"
TRACE_COLUMNS: tuple[str, ...] = ("iter", "gap", "pivot_index", "pivot_angle")
