"""Exception taxonomy shared by all gsmoment modules.

Every error raised by the public API derives from GsmomentError, so callers
can catch one base type at CLI boundaries and map it to an exit code.
"""


class GsmomentError(Exception):
    """Base class for all gsmoment errors."""


class InvalidParameter(GsmomentError):
    """A constructor or operation argument is outside its documented domain."""


class NotAWeightSequence(GsmomentError):
    """Proposed log-weights fail a construction invariant (normalization,
    finiteness, or divergence of the ratio sequence)."""


class IndexOutOfHorizon(GsmomentError):
    """A ratio or weight was requested beyond the cached horizon of a
    table-backed sequence."""


class HorizonExceeded(GsmomentError):
    """An associated-function argument lies beyond the largest cached ratio,
    where the counting formula would silently truncate."""


class RequiresLogConvexity(GsmomentError):
    """The operation is only meaningful for log-convex sequences and the
    log-convexity check did not return Holds."""


class DepthExceeded(GsmomentError):
    """A symbolic derivative was requested beyond the supported order."""


class UnsupportedAtom(GsmomentError):
    """The operation does not apply to this atom family (e.g. a half-line
    reduction applied to a Gaussian atom)."""


class UnsupportedSupport(GsmomentError):
    """The function's support is incompatible with the requested transform
    (e.g. a Laplace transform of a whole-line function)."""


class SingularMultiplier(GsmomentError):
    """A multiplier shift was requested for a function with G(0) = 0, where
    the reciprocal jet does not exist."""


class IllConditioned(GsmomentError):
    """The moment Gram system could not be solved to the requested residual
    tolerance within the precision cap."""


class ConditionRefused(GsmomentError):
    """A solve was refused because the governing sequence condition did not
    hold and no override was given."""


class TargetTooLarge(GsmomentError):
    """The requested finite moment problem exceeds the supported order cap."""


class ExtrapolationDivergence(GsmomentError):
    """A boundary value and its approach-path extrapolation disagree beyond
    tolerance."""
