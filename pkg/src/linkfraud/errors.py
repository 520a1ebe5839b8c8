"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes: data problems exit 2, computation
problems exit 3.
"""


class LinkFraudError(Exception):
    """Base class for all package errors."""

    exit_code = 3


class DataError(LinkFraudError, ValueError):
    """Input data is malformed, inconsistent or missing."""

    exit_code = 2


class ParseError(DataError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"{message} at line {line}"
        super().__init__(message)


class ValidationError(DataError):
    pass


class UnknownNodeError(DataError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown node"


class InsufficientDataError(DataError):
    pass


class UndefinedMetricError(LinkFraudError, ValueError):
    """A ratio whose denominator is zero for this input."""


class EstimateUndefinedError(UndefinedMetricError):
    pass


class SingularExponentError(LinkFraudError, ValueError):
    pass


class GenerationError(LinkFraudError):
    """A synthetic generator could not land inside its target bands."""


class ConvergenceError(LinkFraudError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class SourceError(LinkFraudError):
    """A data source call failed; the harvester retries these."""
