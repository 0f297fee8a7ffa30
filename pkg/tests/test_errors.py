"""
Tests for error categories and error reporting.
"""

import logging

import pytest

from hocov.core.errors import (
    AccuracyError,
    ConfigError,
    DataError,
    DomainError,
    ErrorCategory,
    ErrorEvent,
    NotPositiveDefiniteError,
    RangeError,
    UndefinedObjectiveError,
    categorize,
    report_error,
)


def test_report_error_builds_event():
    """Test reporting an error returns a populated event."""
    error = DataError("duplicate locations", context={"pairs": 2})
    event = report_error(error, context={"file": "points.csv"})

    assert event.error_type == "DataError"
    assert event.error_message == "duplicate locations"
    assert event.category == ErrorCategory.DATA_ERROR
    assert event.context == {"pairs": 2, "file": "points.csv"}


def test_report_error_logs(caplog):
    """Test that reporting writes an error log record."""
    with caplog.at_level(logging.ERROR, logger="hocov.core.errors"):
        report_error(RangeError("overflow"))
    assert "[NUMERICAL_ERROR] RangeError: overflow" in caplog.text


def test_category_override():
    """Test that an explicit category wins over the derived one."""
    event = report_error(ValueError("bad"), category=ErrorCategory.CONFIG_ERROR)
    assert event.category == ErrorCategory.CONFIG_ERROR


def test_error_event_to_dict():
    """Test converting error event to dictionary."""
    event = ErrorEvent(
        error=AccuracyError("quadrature did not converge"),
        category=ErrorCategory.NUMERICAL_ERROR,
        context={"h": 5.0},
    )
    event_dict = event.to_dict()

    assert event_dict["error_type"] == "AccuracyError"
    assert event_dict["error_message"] == "quadrature did not converge"
    assert event_dict["category"] == "numerical_error"
    assert event_dict["context"]["h"] == 5.0
    assert "timestamp" in event_dict


def test_to_line_is_single_line():
    """Test the machine-parsable one-line form."""
    event = ErrorEvent(ConfigError("invalid configuration:\n n_bins: too small"), ErrorCategory.CONFIG_ERROR)
    line = event.to_line()

    assert "\n" not in line
    assert line == (
        "error category=config_error type=ConfigError "
        "message=invalid configuration: n_bins: too small"
    )


@pytest.mark.parametrize(
    "error, category, code",
    [
        (ConfigError("x"), ErrorCategory.CONFIG_ERROR, 2),
        (DomainError("x"), ErrorCategory.CONFIG_ERROR, 2),
        (DataError("x"), ErrorCategory.DATA_ERROR, 3),
        (FileNotFoundError("x"), ErrorCategory.DATA_ERROR, 3),
        (UndefinedObjectiveError("x"), ErrorCategory.NUMERICAL_ERROR, 4),
        (NotPositiveDefiniteError("x"), ErrorCategory.NUMERICAL_ERROR, 4),
        (ZeroDivisionError("x"), ErrorCategory.NUMERICAL_ERROR, 4),
    ],
)
def test_categorize_and_exit_codes(error, category, code):
    """Test the category and exit status of each error kind."""
    assert categorize(error) == category
    assert categorize(error).exit_code == code


def test_domain_error_is_value_error():
    """Test that precondition failures are also ValueErrors."""
    with pytest.raises(ValueError):
        raise DomainError("n must be positive")
