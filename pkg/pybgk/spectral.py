"""Rotation frames, Green's matrices and the spectral function Sigma.

Everything here is expressed through zeta = i (tau lambda + 1) / (k tau).
The strip -1/tau < Re(lambda) maps to Im(zeta) > 0, so the upper
continuation of Z is used throughout.
"""
import logging
import math
from dataclasses import dataclass
import numpy as np
import scipy.linalg
from .complexfun import Branch, plasma_Z, dispersion_moments, dispersion_moment_derivatives
from .helper.errors import DomainError, DegenerateInputError, DivisionError
from .helper.helpers import as_complex, gaussian_moment


_LOGGER = logging.getLogger(__name__)
_LOGGER.addHandler(logging.NullHandler())

SQRT6 = math.sqrt(6.)
# relative distance (in units of 1/tau) kept from the essential line
STRIP_GUARD = 1e-9
# |zeta| beyond which the Green's matrix is summed from its large-zeta series
SERIES_RADIUS = 10.0
_SERIES_MAX_TERMS = 200
# indices of density, parallel velocity and temperature in the k-aligned frame
LONGITUDINAL = (0, 1, 4)
SHEAR = (2, 3)
# magnitude below which closed-form denominators count as zero
DENOMINATOR_GUARD = 1e-14


@dataclass(frozen=True)
class Params:
    """Wave number k >= 0 and relaxation time tau > 0."""
    k: float
    tau: float

    def __post_init__(self):
        if not (math.isfinite(self.tau) and self.tau > 0):
            raise DegenerateInputError(f"tau must be positive, got {self.tau}")
        if not (math.isfinite(self.k) and self.k >= 0):
            raise DegenerateInputError(f"k must be non-negative, got {self.k}")

    @property
    def kappa(self):
        """Dimensionless wave number k tau."""
        return self.k * self.tau

    @property
    def k_crit_min(self):
        """Minimal critical wave number, the one of the shear branch."""
        return math.sqrt(math.pi / 2) / self.tau

    def with_k(self, k):
        return Params(float(k), self.tau)

    def check_strip(self, lam):
        """Return lambda as complex, rejecting points at or left of the essential line."""
        lam = as_complex(lam, 'lambda')
        if lam.real <= -(1. - STRIP_GUARD) / self.tau:
            raise DomainError(f"Re(lambda) = {lam.real} is not right of the essential line "
                              f"-1/tau = {-1. / self.tau}")
        return lam

    def zeta(self, lam):
        if self.k == 0:
            raise DegenerateInputError("zeta is undefined for k = 0")
        return 1j * (self.tau * lam + 1.) / self.kappa


@dataclass(frozen=True)
class WaveVector:
    k1: float
    k2: float = 0.
    k3: float = 0.

    @classmethod
    def from_array(cls, arr):
        k1, k2, k3 = (float(x) for x in arr)
        return cls(k1, k2, k3)

    @property
    def array(self):
        return np.array([self.k1, self.k2, self.k3], dtype=float)

    @property
    def norm(self):
        return math.sqrt(self.k1 ** 2 + self.k2 ** 2 + self.k3 ** 2)

    @property
    def key(self):
        """Integer lattice key, used by the simulator."""
        return (int(round(self.k1)), int(round(self.k2)), int(round(self.k3)))

    def __neg__(self):
        return WaveVector(-self.k1, -self.k2, -self.k3)


@dataclass(frozen=True, eq=False)
class RotationFrame:
    """Rotation Q sending (k, 0, 0) to the wave vector, and diag(1, Q, 1)."""
    Q: np.ndarray

    @property
    def Qtilde(self):
        qt = np.eye(5)
        qt[1:4, 1:4] = self.Q
        return qt


@dataclass(frozen=True, eq=False)
class GreensMatrix:
    entries: np.ndarray
    zeta: complex
    params: Params


def rotation_frame(kvec):
    """Rotation frame of a wave vector (Rodrigues' formula).

    Parameters
    ----------
    kvec : WaveVector
        wave vector, nonzero

    Returns
    -------
    _ : RotationFrame
        frame whose first column is the unit wave vector
    """
    k = kvec.norm
    if k == 0:
        raise DegenerateInputError("rotation frame undefined for k = 0")
    k1, k2, k3 = kvec.k1, kvec.k2, kvec.k3
    if k1 / k < -1. + 1e-8:
        # any rotation with Q e1 = -e1 will do
        return RotationFrame(np.diag([-1., -1., 1.]))
    d = k * k + k1 * k
    Q = np.array([[k1 / k, -k2 / k, -k3 / k],
                  [k2 / k, 1. - k2 * k2 / d, -k2 * k3 / d],
                  [k3 / k, -k2 * k3 / d, 1. - k3 * k3 / d]])
    return RotationFrame(Q)


def moment_matrix(r):
    """Gram matrix <e_i e_j r> of the k-aligned basis
    (1, u, v2, v3, (|v|**2 - 3)/sqrt(6)) for a moment sequence r_n = <u**n r>.

    Perpendicular moments are Gaussian and integrate in closed form.
    """
    r0, r1, r2, r3, r4 = r[:5]
    m = np.zeros((5, 5), dtype=complex)
    m[0, 0] = m[2, 2] = m[3, 3] = r0
    m[0, 1] = m[1, 0] = r1
    m[1, 1] = r2
    m[0, 4] = m[4, 0] = (r2 - r0) / SQRT6
    m[1, 4] = m[4, 1] = (r3 - r1) / SQRT6
    m[4, 4] = (r4 - 2. * r2 + 5. * r0) / 6.
    return m


def green_matrix(zeta, params):
    """Green's matrix G(zeta), assembled entry by entry from Z(zeta).

    Parameters
    ----------
    zeta : complex
        argument with Im(zeta) > 0
    params : Params
        wave number and relaxation time the matrix belongs to

    Returns
    -------
    _ : GreensMatrix
    """
    zeta = as_complex(zeta, 'zeta')
    if zeta.imag <= 0:
        raise DomainError("green_matrix is pinned to the upper branch, Im(zeta) > 0 required")
    return GreensMatrix(green_entries(zeta), zeta, params)


def green_entries(zeta, branch=Branch.UPPER):
    """Entries of the Green's matrix for any zeta, continued through Z+ by default."""
    zeta = as_complex(zeta, 'zeta')
    z = plasma_Z(zeta, branch)
    g = np.zeros((5, 5), dtype=complex)
    g[0, 0] = g[2, 2] = g[3, 3] = z
    g[0, 1] = g[1, 0] = 1. + zeta * z
    g[1, 1] = zeta + zeta ** 2 * z
    g[0, 4] = g[4, 0] = (zeta + (zeta ** 2 - 1.) * z) / SQRT6
    g[1, 4] = g[4, 1] = (zeta ** 2 + (zeta ** 3 - zeta) * z) / SQRT6
    g[4, 4] = (zeta ** 3 - zeta + (zeta ** 4 - 2. * zeta ** 2 + 5.) * z) / 6.
    return g


_MU = np.array([gaussian_moment(n) for n in range(_SERIES_MAX_TERMS + 6)])


def _series_green(tl, kappa, tau, derivative):
    a = 1. + tl
    eye = np.eye(5, dtype=complex)
    # 1/a - 1 without cancellation
    d = (-tl / a) * eye
    dd = (-tau / a ** 2) * eye
    q = -1j * kappa / a
    coef = 1. / a
    last = math.inf
    for j in range(1, _SERIES_MAX_TERMS):
        coef = coef * q
        term = coef * moment_matrix(_MU[j:j + 5])
        mag = np.max(np.abs(term))
        # asymptotic series: stop at the smallest term
        if mag > last:
            break
        d += term
        if derivative:
            dd += (-tau * (j + 1) / a) * term
        if mag <= 1e-17 * np.max(np.abs(d)):
            break
        last = mag
    return d, dd


def shifted_green(lam, params, derivative=False, continued=False):
    """Shifted Green's matrix D(lambda) = G_S - Id in the k-aligned frame.

    Small k tau is summed from the large-zeta series, which avoids the
    cancellation in the closed form; otherwise D = M(W / (i k tau)) - Id
    with W the Gaussian dispersion moments.

    Parameters
    ----------
    lam : complex
        spectral parameter in the strip
    params : Params
        wave number (> 0) and relaxation time
    derivative : bool
        also return dD/dlambda (Default value = False)
    continued : bool
        allow lambda left of the essential line, where D is the analytic
        continuation through Z+ (Default value = False)

    Returns
    -------
    _ : numpy.ndarray or tuple of numpy.ndarray
        D, or (D, dD/dlambda)
    """
    lam = as_complex(lam, "lambda") if continued else params.check_strip(lam)
    if params.k == 0:
        raise DegenerateInputError("shifted Green's matrix needs k > 0")
    tau, kappa = params.tau, params.kappa
    tl = tau * lam
    a = 1. + tl
    zeta = 1j * a / kappa
    if abs(zeta) >= SERIES_RADIUS:
        d, dd = _series_green(tl, kappa, tau, derivative)
    else:
        w = dispersion_moments(zeta, 4)
        d = moment_matrix(w / (1j * kappa)) - np.eye(5)
        if derivative:
            dd = moment_matrix(dispersion_moment_derivatives(zeta, 4) * tau / kappa ** 2)
    if derivative:
        return d, dd
    return d


def _block(m, idx):
    return m[np.ix_(idx, idx)]


def adjugate3(m):
    """Adjugate of a 3x3 matrix by cofactors."""
    a = np.empty((3, 3), dtype=complex)
    for i in range(3):
        for j in range(3):
            rows = [r for r in range(3) if r != j]
            cols = [c for c in range(3) if c != i]
            sub = m[np.ix_(rows, cols)]
            a[i, j] = (-1) ** (i + j) * (sub[0, 0] * sub[1, 1] - sub[0, 1] * sub[1, 0])
    return a


def _det3(m):
    return (m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1]) -
            m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0]) +
            m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0]))


def longitudinal_condition(lam, params, derivative=False, continued=False):
    """Longitudinal factor det D_long(lambda) of the spectral function.

    Its zeros are the diffusion and acoustic eigenvalues. With
    ``derivative`` the lambda-derivative (Jacobi's formula) is returned too.
    """
    if derivative:
        d, dd = shifted_green(lam, params, derivative=True, continued=continued)
        dl = _block(d, LONGITUDINAL)
        return _det3(dl), np.trace(adjugate3(dl) @ _block(dd, LONGITUDINAL))
    return _det3(_block(shifted_green(lam, params, continued=continued), LONGITUDINAL))


def shear_factor(lam, params, derivative=False, continued=False):
    """Shear entry D_33 = (Z - i k tau)/(i k tau) of the shifted Green's matrix."""
    if derivative:
        d, dd = shifted_green(lam, params, derivative=True, continued=continued)
        return d[2, 2], dd[2, 2]
    return shifted_green(lam, params, continued=continued)[2, 2]


def shear_condition(lam, params):
    """Z(zeta) - i k tau; its zero is the shear eigenvalue."""
    lam = params.check_strip(lam)
    return plasma_Z(params.zeta(lam), Branch.UPPER) - 1j * params.kappa


def longitudinal_bracket(zeta, z, kappa):
    """Longitudinal bracket of the closed-form spectral function, six times
    det of the longitudinal block of G(zeta) - i kappa. ``z`` is Z(zeta)."""
    return (zeta + 6j * kappa ** 3 - zeta * (zeta ** 2 + 5.) * kappa ** 2 +
            2j * (zeta ** 2 + 3.) * kappa -
            4j * z ** 2 * ((zeta ** 2 + 1.) * kappa - 1j * zeta) +
            z * (zeta ** 2 - (zeta ** 4 + 4. * zeta ** 2 + 11.) * kappa ** 2 +
                 2j * kappa * zeta ** 3 - 5.))


def sigma_closed(lam, params):
    """Spectral function Sigma_{k,tau}(lambda) in closed form.

    The shear factor squared times the longitudinal bracket; for large
    |zeta| the longitudinal factor is taken from the series form of the
    shifted Green's matrix, which is the same function without the
    cancellation.

    Parameters
    ----------
    lam : complex
        spectral parameter, -1/tau < Re(lambda)
    params : Params
        wave number (> 0) and relaxation time

    Returns
    -------
    _ : complex
        Sigma(lambda)
    """
    lam = params.check_strip(lam)
    if params.k == 0:
        raise DegenerateInputError("sigma_closed needs k > 0")
    kappa = params.kappa
    zeta = params.zeta(lam)
    if abs(zeta) < SERIES_RADIUS:
        z = plasma_Z(zeta, Branch.UPPER)
        return (z - 1j * kappa) ** 2 * longitudinal_bracket(zeta, z, kappa) / (6. * (1j * kappa) ** 5)
    d = shifted_green(lam, params)
    return d[2, 2] ** 2 * _det3(_block(d, LONGITUDINAL))


def sigma_det(lam, params, kvec=None):
    """Spectral function as det(G_S - Id), built from the verbatim Green's
    matrix by conjugation with the rotation frame.

    Parameters
    ----------
    lam : complex
        spectral parameter in the strip
    params : Params
        wave number (> 0) and relaxation time
    kvec : WaveVector or None
        direction of the wave vector, |kvec| must equal params.k
        (Default value = None, i.e. (k, 0, 0))
    """
    lam = params.check_strip(lam)
    if params.k == 0:
        raise DegenerateInputError("sigma_det needs k > 0")
    if kvec is None:
        kvec = WaveVector(params.k)
    elif not math.isclose(kvec.norm, params.k, rel_tol=1e-12):
        raise ValueError(f"|kvec| = {kvec.norm} differs from k = {params.k}")
    kappa = params.kappa
    g = green_matrix(params.zeta(lam), params).entries
    qt = rotation_frame(kvec).Qtilde
    gs_minus_id = qt @ (g - 1j * kappa * np.eye(5)) @ qt.T / (1j * kappa)
    return complex(scipy.linalg.det(gs_minus_id))


def temperature_zeta(zeta, kappa, branch=Branch.UPPER):
    """Temperature moment of the unit-density longitudinal eigenvector,
    written in zeta. Unlike the lambda form it stays finite on the real
    zeta axis, i.e. on the essential line.

    Raises
    ------
    DivisionError
        if the denominator kappa (zeta + (zeta**2 - 1) Z) vanishes
    """
    zeta = as_complex(zeta, 'zeta')
    z = plasma_Z(zeta, branch)
    den = kappa * (zeta + (zeta ** 2 - 1.) * z)
    if abs(den) < DENOMINATOR_GUARD:
        raise DivisionError(f"temperature denominator vanishes at zeta = {zeta}")
    return 1j * SQRT6 * (kappa ** 2 + 1j * zeta * kappa + z * (zeta + 1j * (zeta ** 2 + 1.) * kappa) + 1.) / den
