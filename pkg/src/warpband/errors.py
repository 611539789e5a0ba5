"""Exception hierarchy shared by all warpband modules."""


class WarpbandError(Exception):
    """Base class for all package errors."""


class DomainError(WarpbandError, ValueError):
    """A location or profile value lies outside its admissible domain."""


class SingularSliceError(WarpbandError, ValueError):
    """A slice quantity divides by a vanishing warping factor or weight."""


class ParameterRangeError(WarpbandError, ValueError):
    """Model or operator parameters fall outside the supported range."""


class PreconditionError(WarpbandError, ValueError):
    """An operation was called on inputs that violate its preconditions."""


class ConvergenceError(WarpbandError, RuntimeError):
    """An iterative solver failed to converge.

    The partially converged state, if any, is attached as ``solution``.
    """

    def __init__(self, message, solution=None):
        super().__init__(message)
        self.solution = solution


class ConfigError(WarpbandError, ValueError):
    """A run configuration could not be parsed or validated."""
