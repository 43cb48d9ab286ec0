"""Exception types shared across the library."""


class GazeTraceError(Exception):
    """Base class for every error raised by this package."""


class MalformedRecord(GazeTraceError):
    """A log or config record is missing a field or has the wrong type."""


class NonMonotonicTimestamps(GazeTraceError):
    """Timestamps in a log go backwards."""


class NegativeOffset(GazeTraceError):
    """An edit record carries a negative buffer offset."""


class MissingFile(GazeTraceError):
    """A required file is absent from a session directory."""


class InvariantViolation(GazeTraceError):
    """A cross-field invariant failed while loading or replaying a session.

    ``edit_index`` names the offending edit when the violation is tied to one.
    """

    def __init__(self, message: str, edit_index: int | None = None):
        super().__init__(message)
        self.edit_index = edit_index


class OffsetOutOfRange(GazeTraceError):
    """An edit's offset or span does not fit inside the target buffer."""


class DeleteMismatch(GazeTraceError):
    """The text a delete claims to remove differs from the buffer content."""


class UnknownGrammar(GazeTraceError):
    """No tokenizer is registered under the requested grammar name."""


class RangeInconsistency(GazeTraceError):
    """Token-shift arithmetic disagrees with the actual snapshot contents.

    Signals a bug in edit-batch range composition, not bad user data.
    """


class PositionOutOfFile(GazeTraceError):
    """A line index points past the end of a snapshot."""


class UnknownTokenId(GazeTraceError):
    """The queried token id was never issued in this session."""


class UnknownBatch(GazeTraceError):
    """The queried edit-batch index does not exist."""


class OutputUnwritable(GazeTraceError):
    """The benchmark or CLI cannot write its output file."""
