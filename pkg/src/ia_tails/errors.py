"""Exception hierarchy shared by every module."""


class IATailsError(Exception):
    """Base class for all package errors."""


class ParameterError(IATailsError, ValueError):
    """Distribution or configuration parameters outside their domain."""


class DomainError(IATailsError, ValueError):
    """An argument (sample, probability, ...) lies outside the support."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class InsufficientDataError(IATailsError, ValueError):
    """Too few samples for the requested operation."""


class NumericError(IATailsError, ArithmeticError):
    """A numerical routine (quadrature, root bracket, continued fraction) failed."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class MomentDivergenceError(NumericError):
    """Requested power-moment is infinite for the given coupling."""


class InversionError(NumericError):
    """Moment inversion produced a value outside the admissible range."""


class NoSolutionError(NumericError):
    """A bracketing root search found no sign change."""


class FitError(NumericError):
    """Every optimizer restart failed."""


class SampleParseError(IATailsError, ValueError):
    """A sample file line could not be parsed as a number."""

    def __init__(self, message, lineno=None):
        super().__init__(message)
        self.lineno = lineno
