"""Exception types raised by the library."""


class PurifyError(Exception):
    """Base class for all library errors."""


class DomainError(PurifyError, ValueError):
    """An argument lies outside the domain of the operation."""


class StructureError(PurifyError, ValueError):
    """An operand has the wrong basis structure for the requested operation."""


class ResourceError(PurifyError):
    """A computation would exceed a configured size limit."""


class TruncationError(PurifyError):
    """A truncated object has more weight outside the kept space than allowed."""

    def __init__(self, message, excess):
        super().__init__(message)
        self.excess = excess


class ConvergenceError(PurifyError):
    """An iterative method stopped before reaching its tolerance."""

    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


class NotPSDError(PurifyError, ValueError):
    """A matrix expected to be positive semidefinite has a negative eigenvalue."""

    def __init__(self, message, min_eigenvalue):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue
