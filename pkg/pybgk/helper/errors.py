# Exceptions raised by pybgk.


class SpectralError(Exception):
    """The base exception class for all errors raised by this package."""


class RangeError(SpectralError, OverflowError):
    """A special function left the representable floating point range."""


class DomainError(SpectralError, ValueError):
    """An argument lies outside the domain of the requested formula,
    e.g. on or beyond the essential line Re(lambda) = -1/tau."""


class DegenerateInputError(SpectralError, ValueError):
    """Input that admits no meaningful answer, e.g. a zero wave vector."""


class NonConvergence(SpectralError):
    """An iterative solver did not converge.

    Parameters
    ----------
    message : str
        Description of the failure.
    last_k : float or None
        Last wave number at which a solution was available.
    last_value : complex or None
        Last accepted iterate or branch value.
    """

    def __init__(self, message, last_k=None, last_value=None):
        super().__init__(message)
        self.last_k = last_k
        self.last_value = last_value


class StripEscape(NonConvergence):
    """A Newton iterate left the strip -1/tau < Re(lambda)."""


class ContourThroughZero(SpectralError):
    """A contour passes (numerically) through a zero or a pole."""


class DegenerateModes(SpectralError):
    """The basis of hydrodynamic eigenvectors is (numerically) singular."""


class BeyondCritical(SpectralError):
    """Exact hydrodynamics requested beyond the minimal critical wave number."""


class ResolutionError(SpectralError, ValueError):
    """The velocity quadrature cannot resolve the requested argument."""


class DivisionError(SpectralError, ZeroDivisionError):
    """A denominator of a closed-form expression vanishes."""
