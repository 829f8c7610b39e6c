"""
Custom Exceptions and Exception Handlers
Centralizes error handling logic for library calls and the CLI
"""

import json
import sys
from typing import Any, Dict, Optional, Type

from app.core.logging import get_logger

logger = get_logger(__name__)


class RetrodictionError(Exception):
    """Base class for every error raised by the toolkit"""
    pass


class ConfigValidationError(RetrodictionError):
    """Raised when a configuration field violates its bound"""

    def __init__(self, field: str, bound: str, value: Any = None):
        self.field = field
        self.bound = bound
        self.value = value
        message = f"{field} violates bound: {bound}"
        if value is not None:
            message += f" (got {value})"
        super().__init__(message)


class StepSizeError(RetrodictionError):
    """Raised when the sample rate is too low for the discrete integrator"""
    pass


class UndefinedCooperativityError(RetrodictionError):
    """Raised for cooperativity of an undamped oscillator"""
    pass


class NoProbeLightError(RetrodictionError):
    """Raised when the shot noise is infinite because n̄ = 0"""
    pass


class ModelValidityError(RetrodictionError):
    """Raised when parameters leave the regime the model describes"""
    pass


class CovarianceNotPSDError(RetrodictionError):
    """Raised when a covariance matrix is not positive semi-definite within tolerance"""
    pass


class IllConditionedError(RetrodictionError):
    """Raised when the normalization matrix cannot be inverted reliably"""

    def __init__(self, cond: float, limit: float):
        self.cond = cond
        self.limit = limit
        super().__init__(
            f"normalization matrix ill-conditioned: cond(J)={cond:.3e} > {limit:.1e} "
            f"(oscillators not resolved)"
        )


class FactorizationError(RetrodictionError):
    """Raised when the noise matrix factorization fails"""
    pass


class MemoryBudgetError(RetrodictionError):
    """Raised when the dense noise matrix does not fit the memory budget"""

    def __init__(self, required_bytes: int, budget_bytes: int, suggested_decimation: int):
        self.required_bytes = required_bytes
        self.budget_bytes = budget_bytes
        self.suggested_decimation = suggested_decimation
        super().__init__(
            f"noise matrix needs {required_bytes / 2**20:.1f} MB, budget is "
            f"{budget_bytes / 2**20:.1f} MB; suggested decimation factor {suggested_decimation}"
        )


class GridMismatchError(RetrodictionError):
    """Raised when a filter bank and a record live on different grids"""
    pass


class InsufficientSamplesError(RetrodictionError):
    """Raised when an ensemble is too small for the requested statistic"""
    pass


class RankDeficientError(RetrodictionError):
    """Raised when the broadened moment system cannot be inverted"""

    def __init__(self, smallest_singular_value: float, message: str = ""):
        self.smallest_singular_value = smallest_singular_value
        super().__init__(
            message or f"moment system rank-deficient: smallest singular value "
            f"{smallest_singular_value:.3e}"
        )


class RecordIOError(RetrodictionError):
    """Raised when records or configs cannot be read or written"""
    pass


class SpectralError(RetrodictionError):
    """Raised for invalid spectral-estimation requests"""
    pass


class SweepSpecError(RetrodictionError):
    """Raised when a sweep axis does not resolve against the configuration"""
    pass


# Exit codes per error family; 0 is reserved for success
EXIT_CODES: Dict[Type[Exception], int] = {
    ConfigValidationError: 2,
    StepSizeError: 2,
    UndefinedCooperativityError: 2,
    NoProbeLightError: 2,
    ModelValidityError: 2,
    SweepSpecError: 2,
    RecordIOError: 3,
    GridMismatchError: 4,
    SpectralError: 4,
    InsufficientSamplesError: 4,
    CovarianceNotPSDError: 5,
    IllConditionedError: 5,
    FactorizationError: 5,
    RankDeficientError: 5,
    MemoryBudgetError: 6,
}

INTERNAL_ERROR_CODE = 70


def exit_code_for(exc: BaseException) -> int:
    """Resolve the exit code of an exception by walking its MRO"""
    for cls in type(exc).__mro__:
        if cls in EXIT_CODES:
            return EXIT_CODES[cls]
    if isinstance(exc, RetrodictionError):
        return 1
    return INTERNAL_ERROR_CODE


def create_error_response(
    error_type: str,
    message: str,
    exit_code: int,
    details: Optional[Dict[str, Any]] = None
) -> Dict[str, Any]:
    """
    Create a standardized error payload

    Args:
        error_type: Type of error
        message: Error message
        exit_code: Process exit code
        details: Optional additional details

    Returns:
        Dict: Error payload
    """
    content = {
        "success": False,
        "error": error_type,
        "message": message,
        "exit_code": exit_code,
    }

    if details:
        content["details"] = details

    return content


def _error_details(exc: BaseException) -> Dict[str, Any]:
    details = {}
    for attr in ("field", "bound", "cond", "suggested_decimation", "smallest_singular_value"):
        if hasattr(exc, attr):
            details[attr] = getattr(exc, attr)
    return details


def handle_cli_exception(exc: BaseException, stream=None) -> int:
    """
    Log an exception, print its payload and return the exit code

    Args:
        exc: Raised exception
        stream: Output stream for the JSON payload (stderr by default)

    Returns:
        int: Exit code for the process
    """
    stream = stream or sys.stderr
    code = exit_code_for(exc)

    if isinstance(exc, RetrodictionError):
        logger.error(f"❌ {type(exc).__name__}: {exc}")
        payload = create_error_response(
            error_type=type(exc).__name__,
            message=str(exc),
            exit_code=code,
            details=_error_details(exc)
        )
    else:
        logger.error(f"❌ Unhandled Exception: {exc}", exc_info=True)
        payload = create_error_response(
            error_type="InternalError",
            message="An unexpected error occurred",
            exit_code=code
        )

    print(json.dumps(payload, default=str), file=stream)
    return code
