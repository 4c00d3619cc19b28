"""Exception hierarchy shared by all ratecol modules."""


class RatecolError(Exception):
    """Base class for every error raised by ratecol."""


class InputError(RatecolError, ValueError):
    """Invalid arguments: wrong lengths, out-of-range values, malformed specs."""


class ResourceLimitError(RatecolError):
    """An exhaustive computation would exceed its configured size cap."""


class StructuralViolationError(RatecolError):
    """A protocol transcript breaks the zero-error structure it must have.

    The offending transcript is kept on ``transcript`` so callers can report it.
    """

    def __init__(self, message, transcript=None):
        super().__init__(message)
        self.transcript = transcript


class ConsistencyError(RatecolError):
    """An internal self-check failed. This indicates a bug, not bad input."""
