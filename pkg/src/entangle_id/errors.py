"""Exception hierarchy.

Every domain failure derives from :class:`EntangleIdError` (itself a
``ValueError``), so callers can catch the whole family at once. The CLI maps
these to exit code 3.
"""


class EntangleIdError(ValueError):
    """Base class for all domain errors raised by this package."""


class InvariantViolation(EntangleIdError):
    """A value does not satisfy the invariants of its type."""


class EmptyInputError(InvariantViolation):
    pass


class NegativeWeightError(InvariantViolation):
    pass


class ZeroSumError(InvariantViolation):
    pass


class NotNormalizedError(InvariantViolation):
    pass


class DimensionMismatchError(EntangleIdError):
    pass


class DimensionTooSmallError(EntangleIdError):
    pass


class NotMajorizedError(EntangleIdError):
    pass


class AlreadyConvertibleError(EntangleIdError):
    """Catalyst search requested for a pair that is convertible without one."""


class SearchTooLargeError(EntangleIdError):
    pass


class IndexOutOfRangeError(EntangleIdError):
    pass


class DegenerateTargetError(EntangleIdError):
    pass


class NoConvergenceError(EntangleIdError):
    pass


class TooLargeError(EntangleIdError):
    pass


class ZeroAtPositiveTargetError(EntangleIdError):
    """q_i = 0 where p_i > 0: the objective gradient is infinite there."""


class DomainError(EntangleIdError):
    pass


class StrategyKindMismatchError(EntangleIdError):
    pass


class ParseError(EntangleIdError):
    """Malformed state document; message carries line/column when known."""
