"""Input validation helpers."""

from __future__ import annotations

import numpy as np

from .errors import ErrorCode, OperationError

__all__ = ["as_operator_matrix", "check_positive", "check_square_finite"]


def check_square_finite(matrix, name: str = "matrix") -> np.ndarray:
    """Return ``matrix`` as a complex 2-d array, rejecting bad shapes and non-finite entries."""
    arr = np.asarray(matrix)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise OperationError(
            ErrorCode.INVALID_OPERATOR, f"{name} must be a non-empty square matrix, got shape {arr.shape}"
        )
    arr = arr.astype(complex, copy=False)
    if not np.all(np.isfinite(arr)):
        raise OperationError(ErrorCode.INVALID_OPERATOR, f"{name} has non-finite entries")
    return arr


def as_operator_matrix(obj, name: str = "operator") -> np.ndarray:
    """Accept an :class:`OperatorMatrix` or array-like and return the entries."""
    entries = getattr(obj, "entries", obj)
    return check_square_finite(entries, name)


def check_positive(value: float, name: str) -> float:
    value = float(value)
    if not value > 0 or not np.isfinite(value):
        raise OperationError(ErrorCode.INVALID_OPERATOR, f"{name} must be a positive finite number, got {value}")
    return value
