"""Exception hierarchy shared by every module."""


class IFBAError(Exception):
    """Base class for all package errors."""


class DomainError(IFBAError, ValueError):
    """A numeric argument lies outside its admissible domain.

    ``field`` names the offending parameter so the CLI can report it.
    """

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class ConfigurationError(IFBAError, ValueError):
    """An operation object is incompletely or inconsistently configured."""


class StructuralError(IFBAError, TypeError):
    """Elements from different algebra models were combined."""


class UnsupportedOperation(IFBAError):
    """The operation is not defined for this algebra model."""


class NonInvertible(IFBAError, ArithmeticError):
    """The element has no inverse according to the direct-inversion oracle."""


class Diverged(IFBAError, ArithmeticError):
    """A geometric series stopped decaying; carries the norm trace."""

    def __init__(self, message, trace):
        super().__init__(message)
        self.trace = list(trace)
