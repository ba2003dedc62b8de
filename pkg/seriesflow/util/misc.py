"""Misc util functions."""

import logging

__all__ = [
    "SeriesflowError",
    "BackendMismatch",
    "OrderError",
    "CapMismatch",
    "UnboundUnknown",
    "UnboundParameter",
    "SingularSeed",
    "MissingCoefficient",
    "OracleBreakdown",
    "DocumentError",
    "InvalidParameter",
    "get_logger",
]


class SeriesflowError(Exception):
    """Exception used to notify users of errors in a friendly way without displaying traceback."""

    def __init__(self, message, module="", function=""):
        """Raise an error and notify user of the problem in a friendly way.

        Args:
            message: Error message.
            module: Name of module where error occurred (optional).
            function: Name of function where error occurred (optional).
        """
        self.message = message
        self.module = module
        self.function = function
        super().__init__(message)

    def __str__(self):
        return self.message


class BackendMismatch(SeriesflowError):
    """Exact and float values were combined in one operation."""


class OrderError(SeriesflowError):
    """A coefficient beyond the trustworthy order was requested, or an order is too small for an operation."""


class CapMismatch(SeriesflowError):
    """Incompatible axes or caps, or caps too small for the requested construction."""


class UnboundUnknown(SeriesflowError):
    """An expression refers to an unknown with no series bound to it."""


class UnboundParameter(SeriesflowError):
    """An expression coefficient refers to a parameter with no value."""


class SingularSeed(SeriesflowError):
    """The leading coefficient makes the recurrence divide by zero."""


class MissingCoefficient(SeriesflowError):
    """A recurrence needs a coefficient that has not been computed yet."""


class OracleBreakdown(SeriesflowError):
    """The numerical reference integration hit a singularity."""


class DocumentError(SeriesflowError):
    """A coefficient document could not be read or does not match the expected format."""


class InvalidParameter(SeriesflowError):
    """A physical or numerical parameter is outside its allowed range."""


def get_logger(name):
    """Get a logger that is a child of 'seriesflow', so that the CLI log handlers pick it up."""
    if not name.startswith("seriesflow"):
        name = "seriesflow.modules." + name
    return logging.getLogger(name)
