"""Exception hierarchy shared by every module."""


class GFTError(Exception):
    """Base class for all errors raised by gftlab."""


class UsageError(GFTError, ValueError):
    """Caller passed arguments that violate an operation's contract."""


class DomainError(GFTError, ValueError):
    """Input lies outside the mathematical domain of the operation."""


class SingularityError(DomainError):
    """A quantity is undefined at a sampled point (zero derivative, zero of phi, ...)."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class NumericalError(GFTError, RuntimeError):
    """An iterative method failed to converge."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
