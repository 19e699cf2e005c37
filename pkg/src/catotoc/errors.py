"""Exception types raised across the package."""


class CatOtocError(Exception):
    """Base class for all package errors."""


class InvalidDimensionError(CatOtocError, ValueError):
    pass


class DimensionMismatchError(CatOtocError, ValueError):
    pass


class UnsupportedMapError(CatOtocError, ValueError):
    pass


class NotHyperbolicError(CatOtocError, ValueError):
    pass


class BasisUnavailableError(CatOtocError, ValueError):
    """Raised when a basis kind cannot be built for the requested dimension."""


class DegenerateWindowError(CatOtocError, ValueError):
    pass


class NumericalConsistencyError(CatOtocError, ArithmeticError):
    """A computed quantity violates an identity it must satisfy exactly."""
