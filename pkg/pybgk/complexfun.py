"""Plasma dispersion function and relatives.

Z(zeta) = (1/sqrt(2 pi)) int exp(-v**2/2) / (v - zeta) dv is evaluated through
the Faddeeva function w, Z+(zeta) = i sqrt(pi/2) w(zeta/sqrt(2)). The
continuation Z- follows from Z-(zeta) = -Z+(-zeta).
"""
import logging
import math
from enum import Enum
from warnings import warn
import numpy as np
from scipy.special import wofz
from .helper.errors import RangeError, DomainError
from .helper.helpers import gaussian_moment


_LOGGER = logging.getLogger(__name__)
_LOGGER.addHandler(logging.NullHandler())

SQRT_HALF_PI = math.sqrt(math.pi / 2)
# beyond this radius Z+ is summed from its asymptotic series
ASYMPTOTIC_RADIUS = 10.0
ASYMPTOTIC_MAX_TERMS = 20
# half opening of the excluded sector around arg = -pi/2
ASYMPTOTIC_SECTOR_GUARD = 0.05


class Branch(Enum):
    """Which analytic continuation of Z is evaluated."""
    UPPER = 'upper'
    LOWER = 'lower'


def _check_finite(zeta):
    arr = np.asarray(zeta, dtype=complex)
    if not np.all(np.isfinite(arr)):
        raise DomainError("zeta must be finite")
    return arr


def _scalar_or_array(arr, like):
    return complex(arr) if np.ndim(like) == 0 else arr


def faddeeva_w(zeta):
    """Faddeeva function w(zeta) = exp(-zeta**2) erfc(-i zeta).

    Parameters
    ----------
    zeta : complex or array_like
        argument

    Returns
    -------
    _ : complex or numpy.ndarray
        w(zeta)

    Raises
    ------
    RangeError
        if the result overflows (large negative imaginary part)
    """
    z = _check_finite(zeta)
    with np.errstate(over='ignore', invalid='ignore'):
        w = wofz(z)
    if not np.all(np.isfinite(w)):
        raise RangeError(f"Faddeeva function overflows at {zeta}")
    return _scalar_or_array(w, zeta)


def _asymptotic_optimal(z):
    """Asymptotic series of Z+ truncated at its smallest term."""
    total = 0j
    inv2 = 1. / (z * z)
    term = -1. / z
    last = math.inf
    n = 0
    while True:
        mag = abs(term)
        if mag >= last or mag <= 1e-17 * abs(total):
            if mag <= 1e-17 * abs(total):
                total += term
            break
        total += term
        last = mag
        n += 1
        term = term * (2 * n - 1) * inv2
    return total


def _z_upper(z):
    big = (np.abs(z) > ASYMPTOTIC_RADIUS) & (z.imag >= 0)
    out = np.empty(z.shape, dtype=complex)
    small = ~big
    if np.any(small):
        with np.errstate(over='ignore', invalid='ignore'):
            out[small] = 1j * SQRT_HALF_PI * wofz(z[small] / math.sqrt(2.))
    for idx in zip(*np.nonzero(big)):
        out[idx] = _asymptotic_optimal(complex(z[idx]))
    if not np.all(np.isfinite(out)):
        raise RangeError("plasma dispersion function overflows")
    return out


def plasma_Z(zeta, branch=Branch.UPPER):
    """Plasma dispersion function.

    Parameters
    ----------
    zeta : complex or array_like
        argument
    branch : Branch
        Branch.UPPER evaluates Z+ (the defining integral for Im zeta > 0 and
        its continuation below), Branch.LOWER evaluates Z-
        (Default value = Branch.UPPER)

    Returns
    -------
    _ : complex or numpy.ndarray
        Z(zeta)
    """
    z = np.atleast_1d(_check_finite(zeta))
    branch = Branch(branch)
    if branch is Branch.UPPER:
        out = _z_upper(z)
    else:
        out = -_z_upper(-z)
    return _scalar_or_array(out.reshape(np.shape(zeta)), zeta)


def plasma_Z_derivative(zeta, branch=Branch.UPPER, order=1):
    """Derivatives of Z from the differential equation Z' = -zeta Z - 1.

    Higher orders follow Z^(n) = -zeta Z^(n-1) - (n - 1) Z^(n-2).

    Parameters
    ----------
    zeta : complex or array_like
        argument
    branch : Branch
        continuation (Default value = Branch.UPPER)
    order : int
        derivative order, at least 1 (Default value = 1)
    """
    if int(order) != order or order < 1:
        raise ValueError("order must be a positive integer")
    z = _check_finite(zeta)
    prev = plasma_Z(z, branch)
    cur = -z * prev - 1.
    for n in range(2, int(order) + 1):
        prev, cur = cur, -z * cur - (n - 1) * prev
    return _scalar_or_array(cur, zeta)


def plasma_Z_asymptotic(zeta, terms):
    """Partial sum -sum_{n < terms} (2n - 1)!! / zeta**(2n + 1) of the
    asymptotic expansion of Z+.

    The expansion holds outside the sector around the negative imaginary
    axis where the Gaussian part of Z+ dominates, so arguments with
    -3 pi/4 - guard < arg(zeta) < -pi/4 + guard are rejected.

    Parameters
    ----------
    zeta : complex
        argument, |zeta| > 0
    terms : int
        number of terms, 1 <= terms <= 20

    Returns
    -------
    _ : complex
        truncated series
    """
    z = complex(_check_finite(zeta))
    if int(terms) != terms or not 1 <= terms <= ASYMPTOTIC_MAX_TERMS:
        raise ValueError(f"terms must be an integer in 1..{ASYMPTOTIC_MAX_TERMS}")
    if z == 0:
        raise DomainError("asymptotic series undefined at zeta = 0")
    arg = math.atan2(z.imag, z.real)
    if -3 * math.pi / 4 - ASYMPTOTIC_SECTOR_GUARD < arg < -math.pi / 4 + ASYMPTOTIC_SECTOR_GUARD:
        raise DomainError(f"arg(zeta) = {arg:.3f} lies in the sector where the series fails")
    if abs(z) < 2.:
        warn("asymptotic series used for |zeta| < 2, expect poor accuracy")
    total = 0j
    term = -1. / z
    for n in range(int(terms)):
        total += term
        term = term * (2 * n + 1) / (z * z)
    return total


def dispersion_moments(zeta, nmax, branch=Branch.UPPER):
    """Moments W_n = <u**n / (u - zeta)> of the Gaussian, n = 0..nmax.

    W_0 = Z and W_n = E[u**(n-1)] + zeta W_(n-1).
    """
    z = complex(_check_finite(zeta))
    w = np.empty(nmax + 1, dtype=complex)
    w[0] = plasma_Z(z, branch)
    for n in range(1, nmax + 1):
        w[n] = gaussian_moment(n - 1) + z * w[n - 1]
    return w


def dispersion_moment_derivatives(zeta, nmax, branch=Branch.UPPER):
    """d W_n / d zeta for n = 0..nmax, with W_n' = W_(n-1) + zeta W_n'(n-1)."""
    z = complex(_check_finite(zeta))
    w = dispersion_moments(z, nmax, branch)
    dw = np.empty(nmax + 1, dtype=complex)
    dw[0] = -z * w[0] - 1.
    for n in range(1, nmax + 1):
        dw[n] = w[n - 1] + z * dw[n - 1]
    return dw
