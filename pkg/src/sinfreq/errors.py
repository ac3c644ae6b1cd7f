class SinfreqError(Exception):
    """Base class for all package errors."""


class ConfigurationError(SinfreqError, ValueError):
    """Invalid parameters, schedules or scenario files."""


class DomainError(SinfreqError, ValueError):
    """A function was evaluated outside its domain (negative time, segment switch instant)."""


class NumericalError(SinfreqError, ArithmeticError):
    """A non-finite value appeared in the pipeline.

    ``step`` holds the offending grid index when known.
    """

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class SynchronizationError(SinfreqError):
    """Channel outputs with mismatched timestamps were combined."""


class FormatError(SinfreqError, ValueError):
    """A CSV artifact is malformed or lacks required columns."""
