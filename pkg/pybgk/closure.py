"""Exact hydrodynamic closure of the linear BGK equation.

Given the five hydrodynamic eigenvalues of a wave vector, the eigenvectors
are fixed by one scalar, the spectral temperature theta(lambda). From them
follow the change of coordinates H, the transport coefficients c1 ... c6
and the 5x5 generator of the exact hydrodynamics of that wave vector. The
classical Euler, Navier-Stokes and Burnett generators are provided as
constant-coefficient truncations.

All generators act on h = (rho, u, sqrt(3/2) T) unless they are converted
with :func:`to_physical_variables`.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from warnings import warn
import numpy as np
import scipy.linalg
from .complexfun import plasma_Z
from .modes import Label, ModeSet, find_modes, critical_data
from .spectral import (Params, WaveVector, rotation_frame, shifted_green, green_entries,
                       temperature_zeta, SQRT6, SERIES_RADIUS, DENOMINATOR_GUARD)
from .helper.errors import DegenerateModes, BeyondCritical, DivisionError, DegenerateInputError
from .helper.helpers import as_complex, cyclic, fit_taylor


_LOGGER = logging.getLogger(__name__)
_LOGGER.addHandler(logging.NullHandler())

SQRT_2_3 = math.sqrt(2. / 3.)
DET_H_MIN = 1e-12
# relative agreement demanded between cyclic and expanded coefficients
CROSS_CHECK_TOL = 1e-8
# k tau of the largest point of the small-k ladder
LADDER_KAPPA = 0.1
LADDER_POINTS = 6
EXPANSION_TOL = 1e-3
TO_PHYSICAL = np.diag([1., 1., 1., 1., SQRT_2_3])


class Model(Enum):
    """Hydrodynamic model of a generator."""
    EXACT = 'exact'
    EULER = 'euler'
    NAVIER_STOKES = 'ns'
    BURNETT = 'burnett'


class BeyondPolicy(Enum):
    """What the exact model does with branches past their critical wave number."""
    REJECT = 'reject'
    PIN = 'pin'


@dataclass(frozen=True)
class SpectralTemperature:
    value: complex
    lam: complex
    k: float
    tau: float


@dataclass(frozen=True, eq=False)
class BasisMatrixH:
    """Change of coordinates from spectral to macroscopic variables.

    ``aligned`` is the matrix in the frame where k points along the first
    axis, ``entries`` = Qtilde @ aligned. Columns follow the eigenvalue
    order (diff, ac, ac*, shear, shear).
    """
    entries: np.ndarray
    aligned: np.ndarray
    modes: ModeSet
    frame: object

    @property
    def det(self):
        return complex(scipy.linalg.det(self.entries))


@dataclass(frozen=True)
class ClosureCoefficients:
    """Real transport coefficients of one wave number.

    The complex coefficients of the generator are
    (C1, ..., C6) = (i c1, c2, i c3, c4, i c5, c6). ``imag`` holds the parts
    of C1 ... C6 that must vanish, ``det_h`` the determinant of H.
    """
    c1: float
    c2: float
    c3: float
    c4: float
    c5: float
    c6: float
    lambda_shear: float
    k: float
    tau: float
    det_h: float
    imag: tuple = (0., 0., 0., 0., 0., 0.)

    @property
    def values(self):
        return np.array([self.c1, self.c2, self.c3, self.c4, self.c5, self.c6])

    @property
    def complex_values(self):
        return np.array([1j * self.c1, self.c2, 1j * self.c3, self.c4, 1j * self.c5, self.c6])

    @property
    def contamination(self):
        """max_j |spurious part of C_j| / (1 + |c_j|)."""
        return float(np.max(np.abs(self.imag) / (1. + np.abs(self.values))))


@dataclass(frozen=True, eq=False)
class HydroGenerator:
    """5x5 generator d/dt h = matrix @ h of one wave vector.

    Exact generators with all five modes alive carry their ModeSet, which
    gives the eigendecomposition without a numerical eigensolver.
    """
    matrix: np.ndarray
    kvec: WaveVector
    model: Model
    tau: float
    variables: str = 'h'
    modes: ModeSet = None

    @property
    def eigenvalues(self):
        return np.linalg.eigvals(self.matrix)

    def conj(self):
        return HydroGenerator(self.matrix.conj(), -self.kvec, self.model, self.tau, self.variables,
                              self.modes)


@dataclass(frozen=True)
class PhysicalConstants:
    """Reference scales; SI units are the caller's business."""
    kB: float = 1.
    m: float = 1.
    T0: float = 1.
    rho0: float = 1.
    L: float = 1.

    def __post_init__(self):
        for name in ('kB', 'm', 'T0', 'rho0', 'L'):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class DimensionalReport:
    t_thermal: float
    v_thermal: float
    tau_relax: float
    l_mfp: float
    k: float
    prefactors: dict
    rates: dict


@dataclass(frozen=True)
class ExpansionTerm:
    """One extracted Taylor coefficient of a transport coefficient."""
    name: str
    power: int
    extracted: float
    target: float
    published: float

    @property
    def rel_error(self):
        return abs(self.extracted - self.target) / abs(self.target)

    def passed(self, tol=EXPANSION_TOL):
        return self.rel_error <= tol


@dataclass(frozen=True)
class ShearAdjugateDerivative:
    matrix: np.ndarray
    closed_form: complex
    off_pattern: float

    @property
    def ratio(self):
        return complex(self.matrix[2, 2] / self.closed_form)


def _as_wavevector(kvec):
    return kvec if isinstance(kvec, WaveVector) else WaveVector.from_array(kvec)


def _theta_closed(lam, params):
    kappa, tl = params.kappa, params.tau * lam
    z = plasma_Z(params.zeta(lam))
    num = SQRT6 * ((kappa ** 2 - tl * (tl + 1.)) * z - 1j * kappa * (kappa ** 2 - tl))
    den = (kappa ** 2 + (tl + 1.) ** 2) * z - 1j * kappa * (tl + 1.)
    if abs(den) < DENOMINATOR_GUARD:
        raise DivisionError(f"temperature denominator vanishes at lambda = {lam}")
    return num / den


def _theta_quotient(lam, params):
    d = shifted_green(lam, params)
    if abs(d[4, 4]) < DENOMINATOR_GUARD:
        raise DivisionError(f"D44 vanishes at lambda = {lam}")
    return -(d[0, 4] + 1j * lam / params.k * d[1, 4]) / d[4, 4]


def spectral_temperature(lam, params, form='auto'):
    """Spectral temperature theta(lambda), the temperature moment of the
    k-aligned eigenvector with unit density.

    Parameters
    ----------
    lam : complex
        spectral parameter in the strip
    params : Params
        wave number (> 0) and relaxation time
    form : str
        'closed' (rational in Z and lambda), 'zeta' (rational in Z and zeta),
        'quotient' (moment quotient of the shifted Green's matrix, equal to
        the others at eigenvalues only) or 'auto', which takes the closed
        form and the quotient for |zeta| >= SERIES_RADIUS where the closed
        form cancels (Default value = 'auto')

    Returns
    -------
    _ : SpectralTemperature

    Raises
    ------
    DivisionError
        if the denominator is below 1e-14 in magnitude
    """
    lam = params.check_strip(lam)
    if params.k == 0:
        raise DegenerateInputError("spectral temperature needs k > 0")
    if form == 'auto':
        form = 'closed' if abs(params.zeta(lam)) < SERIES_RADIUS else 'quotient'
    if form == 'closed':
        value = _theta_closed(lam, params)
    elif form == 'zeta':
        value = temperature_zeta(params.zeta(lam), params.kappa)
    elif form == 'quotient':
        value = _theta_quotient(lam, params)
    else:
        raise ValueError(f"unknown form {form!r}")
    return SpectralTemperature(complex(value), lam, params.k, params.tau)


def longitudinal_spectrum(modes):
    """(lambda_d, lambda_a, lambda_a*) and their temperatures, with the
    reality and conjugation structure imposed exactly."""
    params = modes.params
    ld, la = modes.lambda_diff, modes.lambda_ac
    td = spectral_temperature(ld, params).value.real
    ta = spectral_temperature(la, params).value
    return (complex(ld.real), la, la.conjugate()), (complex(td), ta, ta.conjugate())


def aligned_basis(lams, thetas, k):
    """k-aligned H: columns (1, i lambda/k, 0, 0, theta) and the two shear unit vectors."""
    h = np.zeros((5, 5), dtype=complex)
    for j, (lam, theta) in enumerate(zip(lams, thetas)):
        h[0, j] = 1.
        h[1, j] = 1j * lam / k
        h[4, j] = theta
    h[2, 3] = h[3, 4] = 1.
    return h


def basis_H(modes, frame=None):
    """Change of coordinates H of a set of hydrodynamic modes.

    Parameters
    ----------
    modes : ModeSet
        all five eigenvalues alive
    frame : RotationFrame
        frame of the wave vector (Default value = None, i.e. k along the
        first axis)

    Returns
    -------
    _ : BasisMatrixH
    """
    modes.require_alive()
    if frame is None:
        frame = rotation_frame(WaveVector(modes.k))
    lams, thetas = longitudinal_spectrum(modes)
    aligned = aligned_basis(lams, thetas, modes.k)
    return BasisMatrixH(frame.Qtilde @ aligned, aligned, modes, frame)


def _det_h(lams, thetas, k):
    ld, la, _ = lams
    td, _, tac = thetas
    return 2. / k * (la.imag * td.real - ((la - ld) * tac).imag)


def det_H(modes):
    """Closed form (2/k)[Im(lambda_a) theta_d - Im((lambda_a - lambda_d) theta_a*)], real."""
    modes.require_alive()
    lams, thetas = longitudinal_spectrum(modes)
    return _det_h(lams, thetas, modes.k)


def cyclic_coefficients(lams, thetas, k, dh):
    """C1 ... C6 as sums over the cyclic permutations of the longitudinal modes."""
    triples = list(zip(cyclic(lams), cyclic(thetas)))
    c1 = sum(l1 * l3 * (l1 - l3) * t2 for (l1, l2, l3), (t1, t2, t3) in triples) / (k * k * dh)
    c2 = 1j / (k * dh) * sum((l1 * l1 - l3 * l3) * t2 for (l1, l2, l3), (t1, t2, t3) in triples)
    ld, la, lac = lams
    c3 = -(ld - la) * (la - lac) * (lac - ld) / (k * k * dh)
    c4 = 1j / (k * dh) * sum(l2 * (l1 - l3) * t1 * t3 for (l1, l2, l3), (t1, t2, t3) in triples)
    c5 = sum((l3 - l1) * t1 * t3 for (l1, l2, l3), (t1, t2, t3) in triples) / dh
    c6 = -1j / (k * dh) * sum(l1 * t1 * (l2 - l3) for (l1, l2, l3), (t1, t2, t3) in triples)
    return np.array([c1, c2, c3, c4, c5, c6], dtype=complex)


def expanded_coefficients(lams, thetas, k, dh):
    """C1 ... C6 in their expanded form, written with real and imaginary parts."""
    ld, la, lac = lams
    ld, td, ta = ld.real, thetas[0].real, thetas[1]
    im_a = la.imag
    c1 = 2j / (k * k * dh) * (ld * (lac * (ld - lac) * ta).imag - abs(la) ** 2 * im_a * td)
    c2 = -2. / (k * dh) * (((ld ** 2 - lac ** 2) * ta).imag - 2. * la.real * im_a * td)
    c3 = 2j * abs(ld - la) ** 2 * im_a / (k * k * dh)
    c4 = 2. / (k * dh) * ((lac * (ld - la) * ta * td).imag + ld * im_a * abs(ta) ** 2)
    c5 = 2j / dh * (td * (ta * (ld - la)).imag + im_a * abs(ta) ** 2)
    c6 = 2. / (k * dh) * (ld * td * im_a + (la * ta * (lac - ld)).imag)
    return np.array([c1, c2, c3, c4, c5, c6], dtype=complex)


def _coefficients(lams, thetas, lambda_shear, k, tau):
    dh = _det_h(lams, thetas, k)
    if abs(dh) < DET_H_MIN:
        raise DegenerateModes(f"|det H| = {abs(dh):.3g} below {DET_H_MIN} at k = {k}")
    big = cyclic_coefficients(lams, thetas, k, dh)
    other = expanded_coefficients(lams, thetas, k, dh)
    gap = np.max(np.abs(big - other) / (1. + np.abs(big)))
    if gap > CROSS_CHECK_TOL:
        warn(f"cyclic and expanded transport coefficients differ by {gap:.3g} at k = {k}")
    _LOGGER.debug("k = %g: det H = %.12g, cyclic/expanded gap %.3g", k, dh, gap)
    # C1, C3, C5 are imaginary, C2, C4, C6 real
    real = [big[0].imag, big[1].real, big[2].imag, big[3].real, big[4].imag, big[5].real]
    spurious = (big[0].real, big[1].imag, big[2].real, big[3].imag, big[4].real, big[5].imag)
    return ClosureCoefficients(*real, lambda_shear=float(lambda_shear.real), k=k, tau=tau,
                               det_h=float(dh), imag=tuple(float(x) for x in spurious))


def transport_coefficients(modes, params=None):
    """Transport coefficients c1 ... c6 of a set of hydrodynamic modes.

    Parameters
    ----------
    modes : ModeSet
        all five eigenvalues alive
    params : Params
        must agree with the modes if given (Default value = None)

    Returns
    -------
    _ : ClosureCoefficients

    Raises
    ------
    DegenerateModes
        if |det H| < 1e-12
    """
    if params is not None and (params.k, params.tau) != (modes.k, modes.tau):
        raise ValueError("params do not belong to the modes")
    modes.require_alive()
    lams, thetas = longitudinal_spectrum(modes)
    return _coefficients(lams, thetas, modes.lambda_shear, modes.k, modes.tau)


def aligned_exact(coeffs):
    """Exact generator in the k-aligned frame."""
    c1, c2, c3, c4, c5, c6 = coeffs.complex_values
    k = coeffs.k
    s = np.zeros((5, 5), dtype=complex)
    s[0, 1] = -1j * k
    s[1, 0], s[1, 1], s[1, 4] = c1, c2, c3
    s[2, 2] = s[3, 3] = coeffs.lambda_shear
    s[4, 0], s[4, 1], s[4, 4] = c4, c5, c6
    return s


def aligned_classical(model, k, tau):
    """Euler, Navier-Stokes or Burnett generator in the k-aligned frame."""
    model = Model(model)
    s = np.zeros((5, 5), dtype=complex)
    s[0, 1] = s[1, 0] = -1j * k
    s[1, 4] = s[4, 1] = -1j * SQRT_2_3 * k
    if model is Model.EULER:
        return s
    s[1, 1] = -4. / 3. * tau * k ** 2
    s[2, 2] = s[3, 3] = -tau * k ** 2
    s[4, 4] = -5. / 3. * tau * k ** 2
    if model is Model.NAVIER_STOKES:
        return s
    if model is Model.BURNETT:
        s[1, 0] += -4. / 3. * 1j * tau ** 2 * k ** 3
        s[4, 1] += -1. / 3. * SQRT_2_3 * 1j * tau ** 2 * k ** 3
        return s
    raise ValueError(f"{model} has no constant-coefficient form")


@lru_cache(maxsize=4096)
def cached_modes(k, tau):
    """find_modes, memoized on (k, tau)."""
    return find_modes(Params(k, tau))


def _pinned_coefficients(modes):
    """Coefficients with dead branches pinned to the essential line.

    A dead longitudinal mode keeps the temperature and, for the acoustic
    pair, the imaginary part it had where it met the line.
    """
    tau, k = modes.tau, modes.k
    params = modes.params
    edge = -1. / tau
    if modes.lambda_diff is None:
        _, _, td = critical_data(Label.DIFFUSION, tau)
        ld = complex(edge)
        td = complex(td.real)
    else:
        ld = complex(modes.lambda_diff.real)
        td = complex(spectral_temperature(ld, params).value.real)
    if modes.lambda_ac is None:
        _, lam_c, ta = critical_data(Label.ACOUSTIC_PLUS, tau)
        la = complex(edge, lam_c.imag)
    else:
        la = modes.lambda_ac
        ta = spectral_temperature(la, params).value
    ls = complex(edge) if modes.lambda_shear is None else modes.lambda_shear
    dead = [lab.value for lab, ok in modes.alive.items() if not ok]
    warn(f"branches {dead} pinned to Re(lambda) = -1/tau at k = {k}")
    return _coefficients((ld, la, la.conjugate()), (td, ta, ta.conjugate()), ls, k, tau)


def coefficients_at(k, tau, beyond=BeyondPolicy.REJECT):
    """Modes and transport coefficients of the wave number k.

    Parameters
    ----------
    k : float
        wave number, > 0
    tau : float
        relaxation time
    beyond : BeyondPolicy
        REJECT raises past the minimal critical wave number, PIN sets dead
        eigenvalues to Re(lambda) = -1/tau (Default value = BeyondPolicy.REJECT)

    Returns
    -------
    _ : tuple of (ModeSet, ClosureCoefficients)
    """
    params = Params(float(k), tau)
    if params.k == 0:
        raise DegenerateInputError("transport coefficients need k > 0")
    if params.k >= params.k_crit_min and BeyondPolicy(beyond) is BeyondPolicy.REJECT:
        raise BeyondCritical(f"k = {params.k} is not below the minimal critical wave number "
                             f"{params.k_crit_min} (tau = {tau})")
    modes = cached_modes(params.k, tau)
    coeffs = transport_coefficients(modes) if modes.all_alive else _pinned_coefficients(modes)
    return modes, coeffs


def generator(kvec, tau, model=Model.EXACT, beyond=BeyondPolicy.REJECT):
    """Hydrodynamic generator of one wave vector.

    Parameters
    ----------
    kvec : WaveVector or array_like
        wave vector
    tau : float
        relaxation time
    model : Model
        EXACT (spectral closure), EULER, NAVIER_STOKES or BURNETT
        (Default value = Model.EXACT)
    beyond : BeyondPolicy
        for EXACT past the minimal critical wave number: REJECT raises,
        PIN sets dead eigenvalues to Re(lambda) = -1/tau
        (Default value = BeyondPolicy.REJECT)

    Returns
    -------
    _ : HydroGenerator
        Qtilde @ S @ Qtilde.T with S the k-aligned generator

    Raises
    ------
    BeyondCritical
        for EXACT past the minimal critical wave number under REJECT
    """
    kvec = _as_wavevector(kvec)
    model, beyond = Model(model), BeyondPolicy(beyond)
    params = Params(kvec.norm, tau)
    k = params.k
    if k == 0:
        return HydroGenerator(np.zeros((5, 5), dtype=complex), kvec, model, tau)
    modes = None
    if model is Model.EXACT:
        modes, coeffs = coefficients_at(k, tau, beyond)
        s = aligned_exact(coeffs)
        if not modes.all_alive:
            modes = None
    else:
        s = aligned_classical(model, k, tau)
    qt = rotation_frame(kvec).Qtilde
    return HydroGenerator(qt @ s @ qt.T, kvec, model, tau, modes=modes)


def esbgk_burnett_matrix(kvec):
    """Physical-variable Burnett generator of the ES-BGK model with b = 0 and
    tau = 1, assembled directly from its real-space operators
    (grad -> i k, Laplacian -> -|k|**2)."""
    kvec = _as_wavevector(kvec)
    kv = kvec.array
    k2 = kv @ kv
    m = np.zeros((5, 5), dtype=complex)
    # d rho/dt = -div u
    m[0, 1:4] = -1j * kv
    # du/dt = -grad(rho + T) + lap u + 1/3 grad div u + 4/3 grad lap rho
    m[1:4, 0] = -1j * kv - 4. / 3. * 1j * k2 * kv
    m[1:4, 4] = -1j * kv
    m[1:4, 1:4] = -k2 * np.eye(3) - 1. / 3. * np.outer(kv, kv)
    # 3/2 dT/dt = -div u + 5/2 lap T + 1/3 lap div u
    m[4, 1:4] = 2. / 3. * (-1j * kv - 1. / 3. * 1j * k2 * kv)
    m[4, 4] = -5. / 3. * k2
    return HydroGenerator(m, kvec, Model.BURNETT, 1., variables='physical')


def to_physical_variables(gen):
    """Rewrite a generator for (rho, u, T) instead of (rho, u, sqrt(3/2) T)."""
    if gen.variables != 'h':
        raise ValueError("generator is already in physical variables")
    m = TO_PHYSICAL @ gen.matrix @ np.linalg.inv(TO_PHYSICAL)
    return HydroGenerator(m, gen.kvec, gen.model, gen.tau, variables='physical')


def to_h_variables(gen):
    """Inverse of :func:`to_physical_variables`."""
    if gen.variables != 'physical':
        raise ValueError("generator is already in h variables")
    m = np.linalg.inv(TO_PHYSICAL) @ gen.matrix @ TO_PHYSICAL
    return HydroGenerator(m, gen.kvec, gen.model, gen.tau, variables='h')


def invariant_check(coeffs, modes):
    """Residuals of the characteristic-polynomial identities of the
    longitudinal block: trace, sum of principal 2-minors and determinant."""
    ld, la = modes.lambda_diff.real, modes.lambda_ac
    c1, c2, c3, c4, c5, c6 = coeffs.values
    k = coeffs.k
    return {'trace': abs(c2 + c6 - (ld + 2. * la.real)),
            'minors': abs(-k * c1 + c2 * c6 + c3 * c5 - (2. * ld * la.real + abs(la) ** 2)),
            'det': abs(-k * (c1 * c6 - c3 * c4) - ld * abs(la) ** 2)}


# (name, index, fit powers, [(power, target(tau), published(tau))])
_EXPANSIONS = [
    ('c1', 0, (1, 3, 5, 7), [(1, lambda t: -1., lambda t: -1.),
                             (3, lambda t: -4. / 3. * t ** 2, lambda t: -4. / 3. * t ** 2)]),
    ('c2', 1, (2, 4, 6, 8), [(2, lambda t: -4. / 3. * t, lambda t: -4. / 3. * t),
                             (4, lambda t: 16. / 9. * t ** 3, lambda t: 16. / 9. * t ** 3)]),
    ('c3', 2, (1, 3, 5, 7), [(1, lambda t: -SQRT_2_3, lambda t: -SQRT_2_3)]),
    ('c4', 3, (4, 6, 8, 10), [(4, lambda t: -SQRT_2_3 * t ** 3,
                               lambda t: -SQRT_2_3 * 10. / 3. * t ** 3)]),
    ('c5', 4, (1, 3, 5, 7), [(1, lambda t: -SQRT_2_3, lambda t: -SQRT_2_3),
                             (3, lambda t: -SQRT_2_3 / 3. * t ** 2, lambda t: -SQRT_2_3 / 3. * t ** 2)]),
    ('c6', 5, (2, 4, 6, 8), [(2, lambda t: -5. / 3. * t, lambda t: -5. / 3. * t),
                             (4, lambda t: 25. / 9. * t ** 3, lambda t: -16. / 9. * t ** 3)]),
]


def small_k_ladder(params, n_points=LADDER_POINTS):
    """Wave numbers k0 / 2**i, i < n_points, with k0 = params.k."""
    return params.k / 2. ** np.arange(n_points)


def classical_expansion_check(params, n_points=LADDER_POINTS, perturb=None):
    """Extract the small-k Taylor coefficients of c1 ... c6 numerically.

    The coefficients are sampled on k0 / 2**i and fitted by four monomials
    of the right parity. Targets are the self-consistent expansion; the
    published values are reported alongside (they differ for the k**4
    terms of c4 and c6).

    Parameters
    ----------
    params : Params
        params.k is the top of the ladder, k tau <= 0.2; k tau = 0.1 is a
        good choice
    n_points : int
        ladder length (Default value = 6)
    perturb : dict
        name -> offset added to that coefficient before fitting, used to
        test the check itself (Default value = None)

    Returns
    -------
    _ : list of ExpansionTerm
    """
    if not 0 < params.kappa <= 0.2 + 1e-12:
        raise ValueError(f"the ladder needs 0 < k tau <= 0.2, got {params.kappa}")
    tau = params.tau
    ks = small_k_ladder(params, n_points)
    table = np.array([transport_coefficients(find_modes(params.with_k(k))).values for k in ks])
    for name, offset in (perturb or {}).items():
        table[:, int(name.lstrip('c')) - 1] += offset
    terms = []
    for name, idx, powers, targets in _EXPANSIONS:
        fit = fit_taylor(ks, table[:, idx], powers)
        for power, target, published in targets:
            terms.append(ExpansionTerm(name, power, float(fit[powers.index(power)]),
                                       target(tau), published(tau)))
    return terms


def dimensionalize(coeffs, constants=PhysicalConstants()):
    """Reintroduce units.

    Lengths scale with L, velocities with v_thermal = sqrt(kB T0 / m) and
    times with t_thermal = L / v_thermal; the mean free path is
    l_mfp = tau L = tau_relax v_thermal.

    Parameters
    ----------
    coeffs : ClosureCoefficients
        nondimensional coefficients
    constants : PhysicalConstants
        kB, m, T0, rho0 and L (Default value = all ones)

    Returns
    -------
    _ : DimensionalReport
        thermal scales, the prefactors of the dimensional transport
        operators and the dimensional decay rates of c2, c6 and
        lambda_shear
    """
    c = constants
    t_thermal = c.L * math.sqrt(c.m / (c.kB * c.T0))
    v_thermal = math.sqrt(c.kB * c.T0 / c.m)
    tau_relax = coeffs.tau * t_thermal
    l_mfp = coeffs.tau * c.L
    prefactors = {'continuity': c.rho0,
                  'I1': c.kB * c.T0 / (c.m * c.rho0),
                  'I_shear': 1. / tau_relax,
                  'I2': l_mfp ** 2 / tau_relax,
                  'I3': c.kB / (c.m * tau_relax),
                  'I4': c.T0 / (c.rho0 * tau_relax),
                  'I5': c.T0,
                  'I6': 1. / tau_relax}
    rates = {'c2': coeffs.c2 / t_thermal, 'c6': coeffs.c6 / t_thermal,
             'lambda_shear': coeffs.lambda_shear / t_thermal}
    return DimensionalReport(t_thermal, v_thermal, tau_relax, l_mfp, coeffs.k / c.L, prefactors, rates)


def adjugate_column(zeta, params, normalized=False):
    """Last column a(zeta) of adj(G(zeta) - i k tau).

    Parameters
    ----------
    zeta : complex
        argument, Im(zeta) > 0
    params : Params
        wave number and relaxation time
    normalized : bool
        divide by the first entry, which gives (1, i lambda/k, 0, 0, theta)
        at a longitudinal eigenvalue (Default value = False)
    """
    zeta = as_complex(zeta, 'zeta')
    kappa = params.kappa
    z = plasma_Z(zeta)
    ik = 1j * kappa
    base = zeta + (zeta ** 2 - 1.) * z
    a = np.array([ik * base / SQRT6,
                  (1. + ik * zeta) * base / SQRT6,
                  0., 0.,
                  -1. - kappa ** 2 - ik * zeta - (ik + zeta + ik * zeta ** 2) * z], dtype=complex)
    if normalized:
        if abs(a[0]) < DENOMINATOR_GUARD:
            raise DivisionError(f"first entry of a(zeta) vanishes at zeta = {zeta}")
        a = a / a[0]
    return a


def adjugate(m):
    """Adjugate of a square matrix by cofactors."""
    n = m.shape[0]
    out = np.empty_like(m, dtype=complex)
    for i in range(n):
        for j in range(n):
            minor = np.delete(np.delete(m, j, axis=0), i, axis=1)
            out[i, j] = (-1) ** (i + j) * scipy.linalg.det(minor)
    return out


def shear_adjugate_derivative(params, lambda_shear=None, n_points=32):
    """Derivative in zeta of adj(G(zeta) - i k tau) at the shear mode.

    The derivative is the Cauchy integral over a circle around zeta_shear,
    summed with the trapezoidal rule. Only the two shear diagonal entries
    survive; both equal
    A = -i lambda (kappa**4 + (lambda tau)**4 + (lambda tau)**3 + lambda tau**3 k**2) / (6 k).

    Parameters
    ----------
    params : Params
        wave number below the shear critical wave number
    lambda_shear : float
        shear eigenvalue (Default value = None, found by continuation)
    n_points : int
        points on the circle (Default value = 32)

    Returns
    -------
    _ : ShearAdjugateDerivative
        the matrix, the closed form A and the largest off-pattern entry
        relative to |A|
    """
    if lambda_shear is None:
        lambda_shear = find_modes(params).lambda_shear
        if lambda_shear is None:
            raise BeyondCritical(f"shear mode is dead at k = {params.k}")
    lam = complex(lambda_shear)
    k, tau, kappa = params.k, params.tau, params.kappa
    zs = params.zeta(lam)
    radius = 0.25 * min(abs(zs), 1.)
    phases = np.exp(2j * np.pi * np.arange(n_points) / n_points)
    shift = 1j * kappa * np.eye(5)
    deriv = sum(adjugate(green_entries(zs + radius * p) - shift) / p for p in phases) / (n_points * radius)
    lt = lam * tau
    closed = -1j * lam * (kappa ** 4 + lt ** 4 + lt ** 3 + lam * tau ** 3 * k ** 2) / (6. * k)
    mask = np.ones((5, 5), dtype=bool)
    mask[2, 2] = mask[3, 3] = False
    off = float(np.max(np.abs(deriv[mask])) / abs(closed))
    return ShearAdjugateDerivative(deriv, complex(closed), off)
