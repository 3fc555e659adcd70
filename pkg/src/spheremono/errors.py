"""Exception hierarchy shared by all modules."""


class MonodromyError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(MonodromyError, ValueError):
    """Malformed potential or run configuration."""


class PoleSingularity(MonodromyError, ValueError):
    """The modified potential was evaluated at a pole with nonzero momentum."""


class DegenerateCritical(UserWarning):
    """A critical point with vanishing second derivative was found."""


class TooManySignChanges(MonodromyError):
    pass


class ToleranceNotMet(MonodromyError):
    """Adaptive quadrature hit its depth cap above the requested tolerance."""

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class NonConvergent(MonodromyError):
    """A sequence limit could not be established."""

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class CriticalValue(MonodromyError, ValueError):
    """The energy is (numerically) a critical value of the modified potential."""


class NoOrbit(MonodromyError, ValueError):
    """The energy lies below the minimum of the modified potential."""


class IntegrationFailure(MonodromyError):
    pass


class SectionNotFound(MonodromyError):
    pass


class TrackingLost(MonodromyError):
    pass


class BranchLost(MonodromyError):
    """The tracked orbit branch disappeared while decreasing the momentum."""


class InvalidCircuit(MonodromyError):
    """A circuit crosses critical or out-of-range values."""

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)
