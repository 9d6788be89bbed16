"""Exception and warning types raised across the package."""


class TGeoError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(TGeoError, ValueError):
    pass


class SpacelikeUnsupported(TGeoError):
    """A predicate needs |v| but a squared length is negative."""


class NonTimelike(TGeoError):
    """A closed form was asked for outside its timelike premise."""


class NoSolutionFound(TGeoError):
    """Every start of the numeric solver failed to reach a root.

    The existence report gathered before giving up is attached as ``report``.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NegativeSigma(TGeoError):
    """An envelope needed the square root of a negative world function."""


class DegenerateTube(TGeoError):
    pass


class DegenerateLink(TGeoError):
    pass


class NotEquivalent(TGeoError):
    pass


class KindMismatch(TGeoError):
    pass


class CFLViolation(TGeoError):
    pass


class NonFiniteState(TGeoError):
    """A hydrodynamic step produced inf or nan, usually from an under-resolved grid."""


class ZeroDensity(UserWarning):
    """Density fell to the floor; derived fields are zeroed there."""
