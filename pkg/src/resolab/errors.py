"""Exception hierarchy shared by all resolab modules."""


class ResolabError(Exception):
    """Base class for every error raised by resolab."""


class RangeError(ResolabError, ValueError):
    """Argument outside the range where the routine's accuracy is certified."""


class DomainError(ResolabError, ValueError):
    """Argument outside the mathematical domain of the routine."""


class ConsistencyError(ResolabError):
    """Two independent routes to the same quantity disagree."""


class MisuseError(ResolabError):
    """A routine was called on a model that violates its preconditions."""


class ConvergenceError(ResolabError):
    """An iterative procedure failed to converge."""


class StiffnessError(ResolabError):
    """ODE step size underflow."""


class DegenerateBasisError(ResolabError):
    """A solution basis lost numerical rank."""


class InconclusiveCountError(ResolabError):
    """Argument-principle count cannot be trusted (zero too close to the contour)."""

    def __init__(self, message, nearest=None):
        super().__init__(message)
        self.nearest = nearest


class InsufficientDataError(ResolabError, ValueError):
    """Too few usable samples for a fit."""


class ConfigError(ResolabError, ValueError):
    """Invalid sweep configuration."""
