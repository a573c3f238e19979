"""Exception types raised across the package."""


class FoltError(Exception):
    """Base class for all errors raised by folt."""


class DimensionError(FoltError, ValueError):
    """Array shapes do not agree."""


class BoundsError(FoltError, IndexError):
    """A coordinate falls outside the image."""


class NumericError(FoltError, ArithmeticError):
    """Non-finite values or a singular system."""


class ParameterError(FoltError, ValueError):
    """An algorithm parameter is out of its valid range."""


class InputError(FoltError, ValueError):
    """Bad user-supplied data (frames, ground truth, config)."""


class ParseError(InputError):
    """A text record could not be parsed."""

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
