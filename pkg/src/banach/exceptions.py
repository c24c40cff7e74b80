from typing import Optional


class SummingError(Exception):
    """Base class for every error raised by the summing-norm engine"""


class DimensionMismatchError(SummingError, ValueError):
    """Vector, sequence or operator shapes do not agree"""


class IndexRangeError(SummingError, ValueError):
    """An index p lies outside [1, inf]"""


class InvalidSpaceError(SummingError, ValueError):
    """A norm specification does not describe a symmetric convex body"""


class UnsupportedComputationError(SummingError):
    """The requested class/space/method combination has no computation path"""


class HypothesisError(SummingError):
    """A structural hypothesis of a duality statement fails for the given classes"""

    def __init__(self, message: str, missing: Optional[dict] = None):
        super().__init__(message)
        self.missing = missing or {}


class NonLinearFunctionalError(SummingError):
    """A black-box functional failed the linearity check"""


class MalformedObjectiveError(SummingError):
    """An objective returned a non-finite value"""


class UnknownSuiteError(SummingError):
    """No verification suite is registered under the given name"""


class ManifestError(SummingError):
    """
    Malformed JSON input or an unresolved manifest reference.
    Carries the 1-based line and column when the JSON parser reported them.
    """

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column
