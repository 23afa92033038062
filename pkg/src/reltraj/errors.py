"""Exception types shared across the package."""


class RelTrajError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(RelTrajError):
    """A file could not be parsed in the expected format."""


class ValidationError(RelTrajError):
    """A parsed object violates an invariant.

    ``field`` carries a dotted/indexed path into the offending record,
    e.g. ``sentences[3].mentions[0].entity``.
    """

    def __init__(self, message, field=None):
        self.field = field
        if field:
            message = f"{field}: {message}"
        super().__init__(message)


class UnknownSequenceError(RelTrajError):
    """An annotation references a (doc, pair) with no extracted sequence."""


class IndexOutOfRangeError(RelTrajError):
    """An annotation references a sentence index past the sequence end."""


class InvalidStateError(RelTrajError):
    """A relationship state outside {+1, -1} was supplied."""


class InsufficientDataError(RelTrajError):
    """Not enough fully labeled sequences for the requested fold count."""


class ConflictError(RelTrajError):
    """A lexicon assigns both polarities to one word."""


class LengthMismatchError(RelTrajError):
    """Two aligned sequences have different lengths."""


class EmptySequenceError(RelTrajError):
    """A decoder was asked to label an empty sequence."""


class EmptyInputError(RelTrajError):
    """An operation requiring a non-empty input received an empty one."""


class EmptyTrainingSetError(RelTrajError):
    """Training was requested with no fully labeled sequences."""


class InvalidParameterError(RelTrajError):
    """A configuration parameter is outside its documented range."""


class ModelFormatError(RelTrajError):
    """A model file has an unsupported version or inconsistent contents."""
