"""
Exception hierarchy shared across qtemporal.
"""

from __future__ import annotations


class QTemporalError(Exception):
    """Base class for every error raised on purpose by this package."""


class InvalidScenarioError(QTemporalError, ValueError):
    pass


class InvalidCorrelationTableError(QTemporalError, ValueError):
    pass


class InvalidRealizationError(QTemporalError, ValueError):
    pass


class SpanNotSaturatedError(QTemporalError):
    pass


class SolverError(QTemporalError):
    """A solve finished with a non-optimal status where a bound was required."""

    def __init__(self, message: str, status: str | None = None) -> None:
        super().__init__(message)
        self.status = status


class ConfigError(QTemporalError, ValueError):
    pass
