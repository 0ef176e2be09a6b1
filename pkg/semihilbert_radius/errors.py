"""
Exception hierarchy for the semi-Hilbertian radius toolkit.

Every error carries the process exit code the command line reports for it:
1 for unreadable input, 2 for a violated mathematical precondition,
3 for a bad parameter or identifier, 4 for report I/O.
"""


class ToolkitError(Exception):
    """Base class for all toolkit failures"""

    exit_code = 2


class ParseError(ToolkitError):
    exit_code = 1


class NonFinite(ToolkitError):
    """NaN or Inf in a matrix, vector or objective value"""

    exit_code = 2


class NotHermitian(ToolkitError):
    exit_code = 2


class NotPSD(ToolkitError):
    exit_code = 2


class DimensionMismatch(ToolkitError):
    exit_code = 2


class NotABounded(ToolkitError):
    """Operator does not map N(A) into N(A); its A-seminorm is infinite"""

    exit_code = 2


class ZeroWeight(ToolkitError):
    """An infimum over A-unit vectors was requested with A = 0"""

    exit_code = 2


class InvalidParams(ToolkitError):
    exit_code = 3


class UnknownCheck(ToolkitError):
    exit_code = 3


class UnsupportedEnsemble(ToolkitError):
    exit_code = 3


class ReportIOError(ToolkitError):
    exit_code = 4
