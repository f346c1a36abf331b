"""Exception hierarchy for hullcheck.

Exceptions signal misuse or violated preconditions. Running out of iterations
is never an exception; solvers report it as an ``Inconclusive`` outcome.
"""

from __future__ import annotations


class HullcheckError(Exception):
    """Base class for all hullcheck errors."""


class DimensionMismatchError(HullcheckError, ValueError):
    """Vectors or point sets of incompatible dimensions were combined."""


class InvalidInputError(HullcheckError, ValueError):
    """An argument violates a documented precondition."""


class DegenerateSegmentError(HullcheckError, ValueError):
    """A pivot coincides with the iterate, so no step along it is possible."""


class WitnessCheckError(HullcheckError, RuntimeError):
    """A point claimed as witness fails the strict witness inequalities."""


class LastCoefficientCollapseError(HullcheckError, RuntimeError):
    """The coefficient of ``-b`` is too small to recover an LP solution."""


class RecessionSuspectedError(HullcheckError, RuntimeError):
    """Phase I could not separate the origin from the columns of ``A``."""


class OracleSizeError(HullcheckError, ValueError):
    """Instance too large for brute-force face enumeration."""


class VisibilityInconsistencyError(HullcheckError, RuntimeError):
    """A sampled iterate has no pivot although the query is inside the hull."""


class InputFormatError(HullcheckError, ValueError):
    """A CSV input could not be parsed.

    Attributes:
        row: 1-based data row number where parsing failed, if known.
    """

    def __init__(self, msg: str, *, row: int | None = None) -> None:
        """Initialize with a message and the offending row.

        Args:
            msg: Human-readable description.
            row: 1-based data row number.
        """
        super().__init__(msg)
        self.row = row
