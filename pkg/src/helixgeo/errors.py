"""Exception hierarchy.

Input problems derive from :class:`ValidationError` (CLI exit code 1),
numerical breakdowns from :class:`NumericalError` (CLI exit code 2).
"""


class HelixGeoError(Exception):
    """Base class for all package errors."""


class ValidationError(HelixGeoError, ValueError):
    """Inputs do not describe a valid surface, orbit or launch."""


class NumericalError(HelixGeoError, ArithmeticError):
    """A numerical procedure failed to reach its tolerance."""


# surface parameters
class InvalidParameter(ValidationError):
    pass


class NonPositiveB(InvalidParameter):
    pass


class AxisIntersection(InvalidParameter):
    pass


class BadFrequency(InvalidParameter):
    pass


class CuspedProfile(InvalidParameter):
    pass


# orbits and launches
class ZeroMomentum(ValidationError):
    pass


class BelowMinimum(ValidationError):
    pass


class ForbiddenRegion(ValidationError):
    pass


class ZeroSpeed(ValidationError):
    pass


# numerics
class DegenerateCritical(NumericalError):
    pass


class StepFailure(NumericalError):
    pass


class EventStorm(NumericalError):
    pass
