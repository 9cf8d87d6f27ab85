"""Exception types shared across the package."""


class DomainError(ValueError):
    """Raised when an argument lies outside the domain of a map or chart."""


class ConvergenceError(RuntimeError):
    """Raised when a numerical procedure fails to reach its tolerance."""


class ChartSwitchRequired(DomainError):
    """Raised when a geodesic state approaches the edge of its chart."""
