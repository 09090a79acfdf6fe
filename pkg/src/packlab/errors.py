"""Exception types raised across packlab.

Every error is a ``PacklabError`` (a ``ValueError``), so callers that only
care about "bad input" can catch one class.
"""


class PacklabError(ValueError):
    pass


# frames
class EmptyInput(PacklabError):
    pass


class NonUnitColumn(PacklabError):
    pass


class TooFewVectors(PacklabError):
    pass


class NotPSD(PacklabError):
    pass


class RankExceedsD(PacklabError):
    pass


class NotTight(PacklabError):
    pass


class NoComplement(PacklabError):
    pass


class AlreadyReal(PacklabError):
    pass


class NotETF(PacklabError):
    pass


class NotStronglyRegular(PacklabError):
    pass


class UnknownFormat(PacklabError):
    pass


# algebra
class NoPrime(PacklabError):
    pass


class NotPrime(PacklabError):
    pass


class OrderUnavailable(PacklabError):
    pass


class NoRealRoots(PacklabError):
    pass


class TrivialCharacterRequested(UserWarning):
    """Warning (not an error): the zero character was asked for."""


# weil
class DegreeTooLarge(PacklabError):
    pass


class TooManyBases(PacklabError):
    pass


class OutOfGerzonRange(PacklabError):
    pass


class PrimeUnavailable(PacklabError):
    pass


class DegenerateK(PacklabError):
    pass


# secure
class ZeroCoherence(PacklabError):
    pass


class TooLarge(PacklabError):
    pass


class SingularInput(PacklabError):
    pass


class InconsistentForm(PacklabError):
    pass


# certify
class NotSpanning(PacklabError):
    pass


class DimensionMismatch(PacklabError):
    pass


class ConferenceCase(PacklabError):
    pass


class BoundViolated(PacklabError):
    pass


class NonIntegralEigenvalue(PacklabError):
    pass


class WrongRatio(PacklabError):
    pass


class BadTheta(PacklabError):
    pass


class ZeroY(PacklabError):
    pass


# incidence
class BadUniformity(PacklabError):
    pass


class BadIntersections(PacklabError):
    pass


class BadVectorNorms(PacklabError):
    pass


class UnsupportedQ(PacklabError):
    pass


class InvalidZ(PacklabError):
    pass


class HalfCase(PacklabError):
    pass


# catalog
class UnknownKey(PacklabError):
    pass


class MissingExternalData(PacklabError):
    pass


class UnsupportedD(PacklabError):
    pass
