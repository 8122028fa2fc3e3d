"""Exception hierarchy shared by every module of the package."""


class CarlemanError(Exception):
    """Base class for all errors raised by this package."""


class PoleError(CarlemanError, ValueError):
    """A Gamma-function pole was hit (or approached within the guard distance)."""


class DomainError(CarlemanError, ValueError):
    """A point or a domain lies outside the region an operation is defined on."""


class CoincidenceError(CarlemanError, ValueError):
    """Two arguments coincide at a singularity of a kernel."""


class RangeError(CarlemanError, ValueError):
    """An integer index (degree, derivative order) is outside its admissible range."""


class ConvergenceError(CarlemanError, RuntimeError):
    """A refinement loop failed to reach its tolerance."""


class NotPositiveDefinite(CarlemanError, ArithmeticError):
    """Cholesky factorisation of a Gram matrix broke down."""


class RankDeficiency(CarlemanError, ArithmeticError):
    """Arnoldi produced a numerically dependent basis vector."""


class NoConvergence(CarlemanError, RuntimeError):
    """The polynomial root finder did not converge."""

    def __init__(self, message, worst_residual=None):
        super().__init__(message)
        self.worst_residual = worst_residual


class DegenerateInput(CarlemanError, ValueError):
    """Input data cannot be fitted (non-positive values, too few points)."""
