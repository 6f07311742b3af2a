"""Exception types shared across the package."""


class RieszGasError(Exception):
    """Base class for all package errors."""


class DomainError(RieszGasError):
    """Input outside the mathematical domain of an operation."""


class SingularityError(RieszGasError):
    """Pointwise evaluation requested at a singular point of a kernel."""


class VacuumConventionError(DomainError):
    """Nonzero momentum on a vacuum cell (rho = 0 requires m = 0)."""


class BlowupError(RieszGasError):
    """Numerical blow-up (density floor hit or non-finite state).

    Carries the last valid state snapshot in ``state`` for post-mortem.
    """

    def __init__(self, message, state=None, diagnostics=None):
        super().__init__(message)
        self.state = state
        self.diagnostics = diagnostics


class IterationError(RieszGasError):
    """Iterative solver failed to converge; ``best`` holds the best iterate."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class ConfigError(RieszGasError):
    """Malformed or inconsistent run configuration."""
