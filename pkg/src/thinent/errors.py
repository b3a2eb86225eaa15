"""Exception hierarchy.

Every error raised for bad input derives from :class:`ThinentError`, which is
itself a ``ValueError`` so callers that only care about "bad value" can catch
the builtin.
"""


class ThinentError(ValueError):
    pass


# pmf construction
class NotNormalized(ThinentError):
    pass


class NegativeMass(ThinentError):
    pass


class EmptySupport(ThinentError):
    pass


class BadParameter(ThinentError):
    pass


class TruncationOverflow(ThinentError):
    pass


# functionals
class ZeroMean(ThinentError):
    pass


class InteriorZero(ThinentError):
    pass


class NonPositiveF(ThinentError):
    pass


class IncomparableSupports(ThinentError):
    pass


class InfiniteInformation(ThinentError):
    pass


# thinning
class AlphaOutOfRange(ThinentError):
    pass


class AlphaTooClose(ThinentError):
    pass


# concentration
class DegenerateSupport(ThinentError):
    pass


class NotCLogConcave(ThinentError):
    pass


class SupportExceedsN(ThinentError):
    pass


# monotonicity
class NotULC(ThinentError):
    pass


# Bernoulli-sum paths
class OutOfRange(ThinentError):
    pass


class LengthMismatch(ThinentError):
    pass


class BadQ(ThinentError):
    pass


class DirectionNotIncreasing(ThinentError):
    pass
