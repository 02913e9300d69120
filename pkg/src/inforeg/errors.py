"""Exception hierarchy shared by the library, the CLI and the HTTP routes.

Input problems subclass :class:`ValueError` so callers that only know about
the builtin still catch them. Numerical problems subclass
:class:`NumericalError`; the CLI maps those to exit code 2.
"""

from __future__ import annotations

from pathlib import Path


class InfoRegError(Exception):
    """Base class for every error raised by :mod:`inforeg`."""


class DimensionMismatchError(InfoRegError, ValueError):
    """Point, parameter or dataset dimensions disagree."""

    def __init__(self, expected: int, got: int, what: str = "point") -> None:
        super().__init__(f"{what} has dimension {got}, expected {expected}")
        self.expected = expected
        self.got = got


class EmptyDatasetError(InfoRegError, ValueError):
    """An operation that needs at least one point received none."""


class ConfigurationError(InfoRegError, ValueError):
    """Configuration values are inconsistent with each other or with the data."""


class UnsupportedOperationError(InfoRegError, ValueError):
    """The density variant does not support the requested operation."""


class NumericalError(InfoRegError):
    """A computation failed for numerical reasons."""


class DivergentIntegralError(NumericalError):
    """The density reaches zero on the interval, so ∫ dx/p(x) diverges."""

    def __init__(self, a: float, b: float, at: float | None = None) -> None:
        where = f" (p vanishes near x={at:.6g})" if at is not None else ""
        super().__init__(f"reciprocal integral over [{a:.6g}, {b:.6g}] diverges{where}")
        self.a = a
        self.b = b
        self.at = at


class NonFiniteObjectiveError(NumericalError):
    """Objective or gradient evaluated to NaN or infinity."""


class EmptySuperlevelSetError(NumericalError):
    """The level α is at or above the maximum of the density."""


class CheckFailedError(NumericalError):
    """A numerical verification produced a margin below its tolerance."""


class ExperimentAbortedError(NumericalError):
    """Every method failed on a trial, so the experiment cannot continue."""


class ReportWriteError(InfoRegError, OSError):
    """Writing an output file failed."""

    def __init__(self, path: Path, reason: str) -> None:
        super().__init__(f"failed to write {path}: {reason}")
        self.path = path


__all__ = [
    "ConfigurationError",
    "CheckFailedError",
    "DimensionMismatchError",
    "DivergentIntegralError",
    "EmptyDatasetError",
    "EmptySuperlevelSetError",
    "ExperimentAbortedError",
    "InfoRegError",
    "NonFiniteObjectiveError",
    "NumericalError",
    "ReportWriteError",
    "UnsupportedOperationError",
]
