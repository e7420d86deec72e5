"""Exception hierarchy."""


class SeqDiscError(Exception):
    """Base class for all package errors."""


class InvalidSpecError(SeqDiscError, ValueError):
    """Overlap or channel parameters outside their allowed range."""


class InvalidParameterError(SeqDiscError, ValueError):
    """A measurement parameter (c, q, t, index) outside its allowed range."""


class PositivityError(SeqDiscError, ValueError):
    """The requested measurement would make the failure operator non-positive."""

    def __init__(self, message, min_eigenvalue=None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class NotPSDError(SeqDiscError, ValueError):
    """A matrix required to be positive semidefinite has a negative eigenvalue."""


class NumericalFailure(SeqDiscError, RuntimeError):
    """An iterative routine failed to converge, or a structural check failed."""


class InvalidPlanError(SeqDiscError, ValueError):
    """A chain plan violates the overlap ladder constraints."""
