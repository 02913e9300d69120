"""Input guards shared by the numerical modules.

The ``validate_*`` helpers are pure predicates; the ``as_*`` / ``check_*``
helpers normalize their input or raise one of the :mod:`inforeg.errors`
exceptions.
"""

from __future__ import annotations

from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import DimensionMismatchError, EmptyDatasetError

FloatArray = NDArray[np.float64]


def validate_labels(y: ArrayLike) -> bool:
    """Return ``True`` if every label is -1 or +1.

    Examples:
        >>> validate_labels([1, -1, 1])
        True
        >>> validate_labels([0, 1])
        False
    """

    arr = np.asarray(y, dtype=float)
    return bool(np.all((arr == 1.0) | (arr == -1.0)))


def validate_finite(values: ArrayLike) -> bool:
    """Return ``True`` if every entry is finite."""

    return bool(np.all(np.isfinite(np.asarray(values, dtype=float))))


def as_points(x: ArrayLike, dim: int, what: str = "point") -> FloatArray:
    """Return ``x`` as an ``(n, dim)`` float array.

    A scalar is one 1D point. A flat array is a sequence of scalars when
    ``dim == 1`` and a single point otherwise.
    """

    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(-1, 1) if dim == 1 else arr.reshape(1, -1)
    elif arr.ndim != 2:
        raise ValueError(f"{what} must be a scalar, vector or matrix, got ndim={arr.ndim}")
    if arr.shape[1] != dim:
        raise DimensionMismatchError(dim, arr.shape[1], what)
    return arr


def as_vector(x: ArrayLike, dim: int | None = None, what: str = "vector") -> FloatArray:
    """Return ``x`` as a flat float vector, optionally checking its length."""

    arr = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
    if dim is not None and arr.shape[0] != dim:
        raise DimensionMismatchError(dim, arr.shape[0], what)
    return arr


def check_nonempty(items: Any, what: str) -> None:
    """Raise :class:`EmptyDatasetError` when ``items`` has no elements."""

    if len(items) == 0:
        raise EmptyDatasetError(f"{what} is empty")


__all__ = [
    "FloatArray",
    "as_points",
    "as_vector",
    "check_nonempty",
    "validate_finite",
    "validate_labels",
]
