"""Exception types shared across the package."""


class GardingError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(GardingError, ValueError):
    pass


class DegenerateDirection(GardingError, ValueError):
    """p(a) vanishes (within tolerance), so a cannot serve as a direction."""


class NotReal(GardingError, ValueError):
    """Restriction polynomial has a root with non-negligible imaginary part."""

    def __init__(self, message, residue=None, x=None):
        super().__init__(message)
        self.residue = residue
        self.x = x


class ConeViolation(GardingError, ValueError):
    """A vector required to lie in the Garding cone does not."""


class TrackingAmbiguous(GardingError, RuntimeError):
    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class BracketFailure(GardingError, RuntimeError):
    pass


class NotOnHyperplane(GardingError, ValueError):
    pass


class InterlacingViolation(GardingError, RuntimeError):
    pass


class SchemaError(GardingError, ValueError):
    pass


class StencilError(GardingError, RuntimeError):
    pass


class Divergence(GardingError, RuntimeError):
    pass
