"""Exception types raised across the package."""


class DimensionError(ValueError):
    """Operands have incompatible shapes or an invalid subsystem partition."""


class NotHermitianError(ValueError):
    """A matrix required to be Hermitian is not, beyond tolerance."""


class InvalidStateError(ValueError):
    """A density matrix failed trace, Hermiticity or positivity checks."""


class IntegrationError(RuntimeError):
    """Time integration aborted; ``diagnostic`` carries the offending values."""

    def __init__(self, message, diagnostic=None):
        super().__init__(message)
        self.diagnostic = diagnostic or {}


class SteadyStateError(RuntimeError):
    """Steady-state search is inapplicable or did not converge."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class UndefinedEfficiencyError(ZeroDivisionError):
    """Efficiency requested with zero hot-bath heat flux."""


class TruncationWarning(UserWarning):
    """Top Fock level population exceeded the leakage tolerance."""
