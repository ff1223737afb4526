"""Exception hierarchy.

Every error raised by the library derives from :class:`OmvitError`. The two
intermediate classes map onto CLI exit codes: :class:`DataError` (exit 2) for
bad inputs and :class:`NumericError` (exit 3) for quantities that are
mathematically undefined.
"""


class OmvitError(Exception):
    """Base class for all library errors."""


class DataError(OmvitError, ValueError):
    pass


class NumericError(OmvitError, ArithmeticError):
    pass


class ParseError(DataError):
    """Malformed line in an input file."""

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}: "
        elif where:
            where += " "
        super().__init__(where + message)


class EmptyGraphError(DataError):
    pass


class NodeIdError(DataError, IndexError):
    pass


class CoverageError(DataError):
    """A node has no community membership."""


class ConsistencyError(DataError):
    """Graph and community structure do not describe the same node set."""


class ParameterError(OmvitError, ValueError):
    pass


class UndefinedModularityError(NumericError):
    pass


class ThresholdUndefinedError(NumericError):
    pass


class UndefinedBaselineError(NumericError):
    pass
