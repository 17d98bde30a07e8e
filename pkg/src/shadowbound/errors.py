"""Exception hierarchy shared by every module."""


class ShadowBoundError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(ShadowBoundError, ValueError):
    pass


class Singular(ShadowBoundError, ArithmeticError):
    pass


class Infeasible(ShadowBoundError):
    pass


class UnboundedEdge(ShadowBoundError):
    pass


class LimitExceeded(ShadowBoundError):
    pass


class Degenerate(ShadowBoundError):
    """A nondegeneracy / simplicity assumption failed on the input."""


class NonGeneric(ShadowBoundError):
    """A parametric event was not generic (ties along the w-c segment)."""


class Tie(ShadowBoundError):
    """Two pivot candidates scored exactly equal under tie_policy='error'."""


class UncertifiableComparison(ShadowBoundError):
    pass


class StepCapExceeded(ShadowBoundError):
    pass


class NotRegular(ShadowBoundError, ValueError):
    pass


class NotInterior(ShadowBoundError, ValueError):
    pass


class EpsTooLarge(ShadowBoundError, ValueError):
    pass


class BallNotInterior(ShadowBoundError, ValueError):
    pass


class DeltaUnderflow(ShadowBoundError):
    pass


class DegeneratePath(ShadowBoundError):
    pass


class GenerationFailed(ShadowBoundError):
    pass


class KSearchExhausted(ShadowBoundError):
    pass


class DegenerateProjection(ShadowBoundError):
    pass


class DuplicateValues(ShadowBoundError):
    pass
