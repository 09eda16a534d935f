"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument is outside the physical or mathematical domain of an operation."""


class ConfigurationError(ValueError):
    """A scheme or run configuration is internally inconsistent."""


class IntegrationError(RuntimeError):
    """The master-equation integrator failed to meet its tolerance.

    Attributes
    ----------
    worst_error : float or None
        Largest local error estimate reported by the integrator, if available.
    """

    def __init__(self, message, worst_error=None):
        super().__init__(message)
        self.worst_error = worst_error
