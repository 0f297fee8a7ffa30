"""
Logging configuration for hocov.
"""

import logging
import sys
from typing import List

from hocov.core.config import settings


def setup_logging(level: str = "") -> None:
    """Configure library logging."""

    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stdout)]
    if settings.LOG_FILE:
        handlers.append(logging.FileHandler(settings.LOG_FILE, mode="a"))

    # Configure root logger
    logging.basicConfig(
        level=getattr(logging, (level or settings.LOG_LEVEL).upper()),
        format=settings.LOG_FORMAT,
        handlers=handlers,
        force=True,
    )

    # Configure specific loggers
    loggers_config = {
        "matplotlib": {"level": "WARNING"},
        "PIL": {"level": "WARNING"},
    }

    for logger_name, config in loggers_config.items():
        logger = logging.getLogger(logger_name)
        logger.setLevel(getattr(logging, config["level"]))


def get_logger(name: str) -> logging.Logger:
    """Get a configured logger instance."""
    return logging.getLogger(name)


class LoggerMixin:
    """Mixin class to add logging capabilities to any class."""

    @property
    def logger(self) -> logging.Logger:
        """Get logger instance for the class."""
        return get_logger(f"{self.__class__.__module__}.{self.__class__.__name__}")
