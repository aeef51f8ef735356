"""
Exception hierarchy shared by every robosoccer app.
"""

from django.core.exceptions import ValidationError


class RobosoccerError(Exception):
    """Base class for all simulator and agent errors."""


class ConfigurationError(RobosoccerError, ValidationError):
    """
    Invalid configuration value or structure.

    The message always starts with the dotted key that failed
    (e.g. ``field.length``) followed by the violated constraint.
    """

    def __init__(self, key, constraint):
        self.key = key
        self.constraint = constraint
        ValidationError.__init__(
            self,
            f"{key}: {constraint}",
            code='invalid',
            params={'key': key, 'constraint': constraint},
        )

    def __str__(self):
        return self.message

    def with_prefix(self, prefix):
        """Return a copy whose key is nested under ``prefix``."""
        if not prefix:
            return self
        return ConfigurationError(f"{prefix}.{self.key}", self.constraint)


class SimulationStateError(RobosoccerError):
    """Operation not allowed in the current state (stopped world, empty bank, ...)."""


class LookupFailure(RobosoccerError, LookupError):
    """Unknown robot id, scenario name or similar identifier."""


class DomainError(RobosoccerError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class StalledBallError(DomainError):
    """Smoothed ball speed too small to estimate an arrival time."""


class TraceParseError(RobosoccerError):
    """Malformed trace file."""

    def __init__(self, line_no, reason):
        self.line_no = line_no
        self.reason = reason
        super().__init__(f"line {line_no}: {reason}")
