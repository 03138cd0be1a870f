"""Exception hierarchy shared by every module."""


class BoundStateError(Exception):
    """Base class for all library errors."""


class InvalidParams(BoundStateError, ValueError):
    """A potential, problem or preset parameter violates its domain."""


class FallToCenter(BoundStateError):
    """The inverse-square channel is over-attractive; gamma would be complex."""


class NotBound(BoundStateError):
    """The requested level has a non-positive decay exponent."""


class ScaleError(BoundStateError, OverflowError):
    """Polynomial coefficients grew past the representable range."""


class NoConvergence(BoundStateError):
    """An iterative search stopped before finding everything asked of it.

    ``partial`` carries whatever was found.
    """

    def __init__(self, message, partial=()):
        super().__init__(message)
        self.partial = list(partial)


class GridTooCoarse(BoundStateError):
    """A grid cannot resolve the requested quantity."""


class NoBoundStates(BoundStateError):
    """No eigenvalue lies below the continuum threshold."""
