"""Exception hierarchy shared across the package.

Every error that can abort a CLI run is a subclass of :class:`CarmagenError`,
so the command-line front end can report the failing condition by class name
and exit nonzero.
"""


class CarmagenError(Exception):
    """Base class for all model/numerics errors raised by this package."""


class OrderViolation(CarmagenError):
    """The moving-average order is not strictly smaller than the pole count."""


class RieszViolation(CarmagenError):
    """Two purely-imaginary poles differ by a nonzero multiple of 2*pi, or the
    discrete kernel fails strict positivity on the frequency grid."""


class FactorizationFailure(CarmagenError):
    """Minimum-phase spectral factorization failed (root on or too close to
    the unit circle, or residual check not met)."""


class Unsupported(CarmagenError):
    """The request requires a stationary (or otherwise restricted) model and
    the supplied system does not qualify."""


class SignalTooShort(CarmagenError):
    """Input signal is too short for the requested filtering operation."""


class QuadratureFailure(CarmagenError):
    """Adaptive quadrature could not reach the requested tolerance."""
