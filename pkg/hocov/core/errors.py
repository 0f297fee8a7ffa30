"""
Error categories, exception hierarchy and error reporting for hocov.

Every failure the library raises on purpose derives from ``HocovError`` and
carries an ``ErrorCategory``. The command-line front end turns a category into
a process exit code and a one-line machine-parsable message.
"""

import json
import logging
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Dict, Optional

logger = logging.getLogger(__name__)


class ErrorCategory(Enum):
    """Error categories for classification."""
    CONFIG_ERROR = "config_error"
    DATA_ERROR = "data_error"
    NUMERICAL_ERROR = "numerical_error"

    @property
    def exit_code(self) -> int:
        """Process exit status for this category."""
        return _EXIT_CODES[self]


_EXIT_CODES = {
    ErrorCategory.CONFIG_ERROR: 2,
    ErrorCategory.DATA_ERROR: 3,
    ErrorCategory.NUMERICAL_ERROR: 4,
}


class HocovError(Exception):
    """Base class for all library errors."""

    category: ErrorCategory = ErrorCategory.NUMERICAL_ERROR

    def __init__(self, message: str, context: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.context = context or {}


class ConfigError(HocovError):
    """Invalid configuration or arguments."""
    category = ErrorCategory.CONFIG_ERROR


class DomainError(ConfigError, ValueError):
    """An argument violates an operation precondition."""
    pass


class DataError(HocovError):
    """Input data cannot be used."""
    category = ErrorCategory.DATA_ERROR


class NumericalError(HocovError):
    """A numerical procedure failed."""
    category = ErrorCategory.NUMERICAL_ERROR


class RangeError(NumericalError):
    """Overflow or an argument outside the range a method supports."""
    pass


class AccuracyError(NumericalError):
    """Quadrature or series did not reach the requested accuracy."""
    pass


class UndefinedObjectiveError(NumericalError):
    """Every bin was excluded from the WLS objective."""
    pass


class NotPositiveDefiniteError(NumericalError):
    """Covariance matrix could not be factorized even with maximum jitter."""
    pass


class ErrorEvent:
    """Represents a single reported error."""

    def __init__(
        self,
        error: Exception,
        category: ErrorCategory,
        context: Optional[Dict[str, Any]] = None,
    ):
        """
        Initialize error event.

        Args:
            error: The exception that occurred
            category: Error category
            context: Additional context information
        """
        self.error = error
        self.error_type = type(error).__name__
        self.error_message = " ".join(str(error).split())
        self.category = category
        self.context = context or {}
        self.timestamp = datetime.now(timezone.utc)

    def to_dict(self) -> Dict[str, Any]:
        """Convert error event to dictionary."""
        return {
            "error_type": self.error_type,
            "error_message": self.error_message,
            "category": self.category.value,
            "context": self.context,
            "timestamp": self.timestamp.isoformat(),
        }

    def to_line(self) -> str:
        """Single-line form printed by the CLI."""
        return (
            f"error category={self.category.value} "
            f"type={self.error_type} message={self.error_message}"
        )


def categorize(error: Exception) -> ErrorCategory:
    """Map an exception to its category; unknown errors count as numerical."""
    if isinstance(error, HocovError):
        return error.category
    if isinstance(error, (FileNotFoundError, PermissionError)):
        return ErrorCategory.DATA_ERROR
    return ErrorCategory.NUMERICAL_ERROR


def report_error(
    error: Exception,
    category: Optional[ErrorCategory] = None,
    context: Optional[Dict[str, Any]] = None,
) -> ErrorEvent:
    """
    Log an error and return its event.

    Args:
        error: The exception that occurred
        category: Overrides the category derived from the exception
        context: Additional context information

    Returns:
        ErrorEvent object
    """
    merged = dict(getattr(error, "context", {}) or {})
    merged.update(context or {})
    event = ErrorEvent(error, category or categorize(error), merged)

    log_message = f"[{event.category.value.upper()}] {event.error_type}: {event.error_message}"
    if merged:
        log_message += f" | Context: {json.dumps(merged, default=str)}"
    logger.error(log_message)
    return event
