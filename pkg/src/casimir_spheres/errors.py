"""Exception hierarchy shared by all modules."""


class CasimirError(Exception):
    """Base class for every error raised by this package."""


class DomainError(CasimirError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class RangeError(CasimirError, ValueError):
    """A lookup falls outside the range covered by tabulated data."""


class ConvergenceError(CasimirError, ArithmeticError):
    """A series or quadrature failed to reach the requested tolerance.

    Parameters
    ----------
    message : str
        Human readable description.
    mode : int, optional
        Index of the Matsubara mode (or series term) being evaluated when
        the failure occurred.
    """

    def __init__(self, message, mode=None):
        if mode is not None:
            message = f"{message} (mode n={mode})"
        super().__init__(message)
        self.mode = mode


class FitError(CasimirError, ValueError):
    """A least-squares problem is rank deficient or otherwise ill posed."""

    def __init__(self, message, condition_number=None):
        if condition_number is not None:
            message = f"{message} (condition number {condition_number:.3g})"
        super().__init__(message)
        self.condition_number = condition_number


class TableDataWarning(UserWarning):
    """A coefficient table was evaluated outside its grid or replaced by a fallback."""
