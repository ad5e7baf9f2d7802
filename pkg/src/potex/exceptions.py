"""Exception types raised across the package."""


class PotexError(Exception):
    """Base class for all package errors."""


class DomainError(PotexError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class GridTooCoarseError(PotexError, ValueError):
    """A quadrature grid cannot resolve the requested truncation degree exactly."""


class AdmissibilityError(PotexError, ValueError):
    """A Robin coefficient pair makes some mode denominator a - b(k+1) vanish."""


class TruncationMismatchError(PotexError, ValueError):
    """A spectrum has a larger truncation degree than the operator acting on it."""


class UnsupportedProblemError(PotexError, NotImplementedError):
    """The requested object does not exist for this boundary problem.

    Raised for the generator, semigroup and resolvents of the Robin trace
    family, which is not a semigroup and has no infinitesimal generator.
    """
