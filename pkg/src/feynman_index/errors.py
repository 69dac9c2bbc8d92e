"""Error codes and exception types shared by all modules."""

from __future__ import annotations

import enum

__all__ = ["ErrorCode", "OperationError", "LowerHalfPlaneWarning"]


class ErrorCode(str, enum.Enum):
    FAILS_TO_CONVERGE = "FAILS_TO_CONVERGE"
    AMBIGUOUS_CLUSTERING = "AMBIGUOUS_CLUSTERING"
    ZERO_NOT_ISOLATED = "ZERO_NOT_ISOLATED"
    EIGENVALUE_ON_RAY = "EIGENVALUE_ON_RAY"
    FREQUENCY_OVERFLOW = "FREQUENCY_OVERFLOW"
    NO_CLOSED_FORM_TAIL = "NO_CLOSED_FORM_TAIL"
    FIT_ILL_CONDITIONED = "FIT_ILL_CONDITIONED"
    TRUNCATION_WINDOW_VIOLATED = "TRUNCATION_WINDOW_VIOLATED"
    SUPPORT_VIOLATION = "SUPPORT_VIOLATION"
    SOLVER_TOLERANCE_NOT_MET = "SOLVER_TOLERANCE_NOT_MET"
    NONINTEGER_INDEX = "NONINTEGER_INDEX"
    ENDPOINT_ZERO_AMBIGUOUS = "ENDPOINT_ZERO_AMBIGUOUS"
    OUTSIDE_PRODUCT_REGION = "OUTSIDE_PRODUCT_REGION"
    POLE_AT_BETA = "POLE_AT_BETA"
    QUADRATURE_NOT_CONVERGED = "QUADRATURE_NOT_CONVERGED"
    DIMENSION_UNSUPPORTED = "DIMENSION_UNSUPPORTED"
    CONFIG_INVALID = "CONFIG_INVALID"
    INVALID_OPERATOR = "INVALID_OPERATOR"


class OperationError(Exception):
    """Raised when an operation cannot honour its contract.

    Parameters
    ----------
    code : ErrorCode
        Machine-readable failure class.
    message : str
        Human-readable detail.
    """

    def __init__(self, code: ErrorCode, message: str = ""):
        self.code = ErrorCode(code)
        self.message = message
        super().__init__(f"{self.code.value}: {message}" if message else self.code.value)


class LowerHalfPlaneWarning(RuntimeWarning):
    """Semigroup evaluated at a time with negative imaginary part."""
