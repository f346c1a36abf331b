"""Seeded instance generators.

All randomness comes from SplitMix64 so instances can be regenerated in any
language from the seed alone:

* ``next_u64``: ``state += 0x9E3779B97F4A7C15``; ``z = state``;
  ``z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9``; ``z = (z ^ (z >> 27)) *
  0x94D049BB133111EB``; return ``z ^ (z >> 31)`` (all mod 2^64).
* ``uniform``: ``(next_u64 >> 11) * 2^-53`` in ``[0, 1)``.
* ``normal``: Box-Muller ``sqrt(-2 ln(1 - u1)) * cos(2 pi u2)``, one value per pair.
* ``dirichlet``: ``-ln(1 - u)`` draws, normalised.
* Instance ``i`` of a family uses ``SplitMix64(master.next_u64())`` where the
  master generator is seeded with the run seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import StrEnum

import numpy as np

from hullcheck.core.errors import InvalidInputError
from hullcheck.core.geometry import PointSet, QueryPoint, Vector

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


class SplitMix64:
    """SplitMix64 pseudo-random generator."""

    def __init__(self, seed: int) -> None:
        """Initialize the generator.

        Args:
            seed: 64-bit unsigned seed.
        """
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        """Return the next 64-bit output."""
        self._state = (self._state + _GOLDEN) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
        return z ^ (z >> 31)

    def uniform(self) -> float:
        """Return a float in ``[0, 1)`` with 53 random bits."""
        return (self.next_u64() >> 11) * 2.0**-53

    def normal(self, size: int) -> Vector:
        """Return ``size`` standard normal draws."""
        out = np.empty(size)
        for i in range(size):
            u1 = 1.0 - self.uniform()
            u2 = self.uniform()
            out[i] = math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)
        return out

    def dirichlet(self, size: int) -> Vector:
        """Return a Dirichlet(1, ..., 1) vector of length ``size``."""
        weights = np.array([-math.log(1.0 - self.uniform()) for _ in range(size)])
        total = float(weights.sum())
        if total <= 0.0:
            return np.full(size, 1.0 / size)
        return weights / total

    def spawn(self) -> SplitMix64:
        """Return an independent child generator."""
        return SplitMix64(self.next_u64())


class Family(StrEnum):
    """Generated instance families."""

    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    SQUARE_BALL = "square-ball"


@dataclass(frozen=True, eq=False)
class Instance:
    """A generated membership instance.

    Attributes:
        instance_id: Stable identifier, unique within a family.
        family: Family the instance came from.
        points: The point set ``S``.
        query: The query point ``p``.
        rho: Radius of a ball around ``p`` inside ``conv(S)``, when known.
        shift: Distance ``p`` was pushed past a supporting hyperplane, when infeasible.
    """

    instance_id: str
    family: Family
    points: PointSet
    query: QueryPoint
    rho: float | None = None
    shift: float | None = None


@dataclass(frozen=True)
class GeneratorSpec:
    """Parameters of an instance family.

    Attributes:
        family: Which family to draw.
        count: Number of instances.
        m: Dimension (ignored by ``square-ball``).
        n: Number of points (``square-ball`` adds boundary points beyond the corners).
        shift: Outward shift for infeasible instances.
        rho: Interior radius of the first square-ball instance; halved per instance.
    """

    family: Family = Family.FEASIBLE
    count: int = 10
    m: int = 2
    n: int = 5
    shift: float = 0.1
    rho: float = 0.25

    def __post_init__(self) -> None:
        """Validate the guards.

        Raises:
            InvalidInputError: If a parameter is out of range.
        """
        object.__setattr__(self, "family", Family(self.family))
        if self.count < 1 or self.m < 1 or self.n < 1:
            msg = f"count, m and n must be positive, got {self.count}, {self.m}, {self.n}"
            raise InvalidInputError(msg)
        if self.shift <= 0.0:
            msg = f"shift must be positive, got {self.shift!r}"
            raise InvalidInputError(msg)
        if not 0.0 < self.rho <= 0.5:
            msg = f"rho must lie in (0, 0.5], got {self.rho!r}"
            raise InvalidInputError(msg)
        if self.family is Family.SQUARE_BALL and self.n < 4:
            msg = "square-ball instances need n >= 4 (the corners)"
            raise InvalidInputError(msg)


def feasible_instance(rng: SplitMix64, m: int, n: int, instance_id: str = "0") -> Instance:
    """Gaussian points with ``p`` a Dirichlet(1) combination of them."""
    columns = np.column_stack([rng.normal(m) for _ in range(n)])
    points = PointSet(columns)
    query = QueryPoint(points.combine(rng.dirichlet(n)))
    return Instance(instance_id, Family.FEASIBLE, points, query)


def infeasible_instance(
    rng: SplitMix64, m: int, n: int, shift: float, instance_id: str = "0"
) -> Instance:
    """Gaussian points with ``p`` pushed ``shift`` past a supporting hyperplane.

    A random unit direction ``u`` defines the supporting hyperplane
    ``u^T x = max_i u^T v_i``; ``p`` lies at distance ``shift`` beyond it, so
    ``d(p, conv(S)) >= shift``.
    """
    columns = np.column_stack([rng.normal(m) for _ in range(n)])
    points = PointSet(columns)
    inside = points.combine(rng.dirichlet(n))
    direction = rng.normal(m)
    norm = float(np.linalg.norm(direction))
    if norm == 0.0:
        direction = np.eye(m)[0]
    else:
        direction /= norm
    height = float((columns.T @ direction).max())
    query = QueryPoint(inside + (height - float(inside @ direction) + shift) * direction)
    return Instance(instance_id, Family.INFEASIBLE, points, query, shift=shift)


def square_ball_instance(
    rng: SplitMix64, n: int, rho: float, instance_id: str = "0"
) -> Instance:
    """Unit square corners plus boundary points, with ``B(p, rho)`` inside the square.

    ``p = (rho, 1/2)``, so the largest interior ball around ``p`` has radius ``rho``.
    """
    corners = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
    extra = []
    for _ in range(n - 4):
        side = int(rng.uniform() * 4.0)
        t = rng.uniform()
        a = np.array(corners[side])
        b = np.array(corners[(side + 1) % 4])
        extra.append((1.0 - t) * a + t * b)
    points = PointSet.from_rows(np.array(corners + [tuple(e) for e in extra]))
    return Instance(instance_id, Family.SQUARE_BALL, points, QueryPoint([rho, 0.5]), rho=rho)


def generate(spec: GeneratorSpec, seed: int) -> list[Instance]:
    """Draw the instances of ``spec`` from ``seed``.

    Args:
        spec: Family parameters.
        seed: Master seed.

    Returns:
        ``spec.count`` instances with ids ``<family>-<i>``.
    """
    master = SplitMix64(seed)
    instances = []
    for i in range(spec.count):
        rng = master.spawn()
        instance_id = f"{spec.family}-{i:04d}"
        if spec.family is Family.FEASIBLE:
            instances.append(feasible_instance(rng, spec.m, spec.n, instance_id))
        elif spec.family is Family.INFEASIBLE:
            instances.append(infeasible_instance(rng, spec.m, spec.n, spec.shift, instance_id))
        else:
            rho = spec.rho / 2.0**i
            instances.append(square_ball_instance(rng, spec.n, rho, instance_id))
    return instances
