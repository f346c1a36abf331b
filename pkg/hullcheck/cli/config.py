"""Run configuration assembled from command-line flags."""

from __future__ import annotations

from dataclasses import dataclass
from enum import StrEnum
from typing import Any

from hullcheck.core.errors import InvalidInputError
from hullcheck.core.geometry import PivotRule, Tolerances
from hullcheck.utils.constant import HULLCHECK_MAX_ITERS

SEED_MAX = 2**64 - 1


class Variant(StrEnum):
    """Solver family."""

    TRIANGLE = "triangle"
    VIRTUAL = "virtual"
    AVTA = "avta"
    DELTA_K = "delta_k"
    GREEDY = "greedy"


class Mode(StrEnum):
    """Problem the run decides."""

    MEMBERSHIP = "membership"
    LP_NORECESSION = "lp_norecession"
    LP_BOUNDED_M = "lp_boundedM"
    LP_DOUBLING = "lp_doubling"
    BALLS = "balls"

    @property
    def is_lp(self) -> bool:
        """Whether the mode reads an LP instance instead of points."""
        return self in {Mode.LP_NORECESSION, Mode.LP_BOUNDED_M, Mode.LP_DOUBLING}


@dataclass(frozen=True)
class RunConfig:
    """Validated settings for a single run.

    Attributes:
        variant: Solver family for membership and ball modes.
        pivot_rule: Pivot rule.
        eps: Relative accuracy of the membership solver.
        eps0: Residual accuracy for LP modes.
        k: Carried points of the Delta_k algorithm.
        t: Inner iterations per AVTA cycle.
        max_iters: Step budget.
        seed: Seed for generated instances.
        mode: Problem mode.
        big_m: Bound for ``lp_boundedM``.
        mu_cap: Largest ``mu`` for ``lp_doubling``.
        halving: Run the eps-halving driver from 0.5 down to ``eps``.
        wall_clock: Include wall-clock timings in reports.
    """

    variant: Variant = Variant.TRIANGLE
    pivot_rule: PivotRule = PivotRule.FIRST_INDEX
    eps: float = 1e-3
    eps0: float = 1e-2
    k: int = 3
    t: int = 2
    max_iters: int = HULLCHECK_MAX_ITERS
    seed: int = 0
    mode: Mode = Mode.MEMBERSHIP
    big_m: float | None = None
    mu_cap: float = 1024.0
    halving: bool = False
    wall_clock: bool = False

    def __post_init__(self) -> None:
        """Coerce enums and validate ranges.

        Raises:
            InvalidInputError: If any setting is invalid.
        """
        try:
            object.__setattr__(self, "variant", Variant(self.variant))
            object.__setattr__(self, "mode", Mode(self.mode))
            object.__setattr__(self, "pivot_rule", PivotRule(self.pivot_rule))
        except ValueError as exc:
            msg = f"Unknown option: {exc}"
            raise InvalidInputError(msg) from exc
        if not 0 <= self.seed <= SEED_MAX:
            msg = f"seed must be a 64-bit unsigned integer, got {self.seed}"
            raise InvalidInputError(msg)
        if not 0.0 < self.eps0 < 1.0:
            msg = f"eps0 must lie in (0, 1), got {self.eps0!r}"
            raise InvalidInputError(msg)
        if self.mode is Mode.LP_BOUNDED_M and (self.big_m is None or self.big_m <= 0.0):
            msg = "--big-m must be positive in lp_boundedM mode"
            raise InvalidInputError(msg)
        if self.mu_cap < 1.0:
            msg = f"mu_cap must be at least 1, got {self.mu_cap!r}"
            raise InvalidInputError(msg)
        self.tolerances()

    def tolerances(self) -> Tolerances:
        """Build the solver tolerances for this run."""
        return Tolerances(
            eps=self.eps,
            max_iters=self.max_iters,
            pivot_rule=self.pivot_rule,
            t_inner=self.t,
            k_faces=self.k,
        )

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary for JSON serialization.

        Returns:
            Dictionary representation of the configuration.
        """
        return {
            "variant": str(self.variant),
            "pivot_rule": str(self.pivot_rule),
            "eps": self.eps,
            "eps0": self.eps0,
            "k": self.k,
            "t": self.t,
            "max_iters": self.max_iters,
            "seed": self.seed,
            "mode": str(self.mode),
            "big_m": self.big_m,
            "mu_cap": self.mu_cap,
            "halving": self.halving,
        }
