"""Hydrodynamic eigenvalue branches of the linear BGK operator.

Five isolated eigenvalues live right of the essential line Re(lambda) = -1/tau
as long as k is below the critical wave numbers: the real diffusion mode, the
real shear mode (multiplicity two) and the acoustic pair. This module seeds
them from their small-k expansions, refines them by Newton's method, tracks
them in k and locates where they merge into the essential spectrum.
"""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from warnings import warn
import numpy as np
from scipy.optimize import brentq, root
from .complexfun import plasma_Z
from .spectral import (Params, longitudinal_condition, shear_factor, sigma_closed,
                       longitudinal_bracket, temperature_zeta, STRIP_GUARD)
from .helper.errors import (NonConvergence, StripEscape, ContourThroughZero,
                            DegenerateInputError, DegenerateModes)
from .helper.helpers import Rectangle, winding_number


_LOGGER = logging.getLogger(__name__)
_LOGGER.addHandler(logging.NullHandler())

NEWTON_MAX_ITER = 50
NEWTON_STEP_TOL = 1e-10
NEWTON_RESIDUAL_TOL = 1e-12
# a branch closer than this (in units of 1/tau) to the essential line is dead
TERMINATION_GAP = 1e-6
# relative accuracy of bisected critical wave numbers
CRITICAL_RTOL = 1e-8
# largest k tau at which the Taylor seeds are used without continuation
SEED_KAPPA = 0.3
# corrector failures in a row before a branch is given up
MAX_FAILURES = 3
SUCCESSES_TO_GROW = 5
COUNT_GUARD = 1e-8
SQRT_HALF_PI = math.sqrt(math.pi / 2)


class Label(Enum):
    """Hydrodynamic branch."""
    DIFFUSION = 'diffusion'
    SHEAR = 'shear'
    ACOUSTIC_PLUS = 'acoustic'
    ACOUSTIC_MINUS = 'acoustic*'

    @property
    def is_real(self):
        return self in (Label.DIFFUSION, Label.SHEAR)


# labels with independent values; the minus branch is the conjugate
TRACKED = (Label.DIFFUSION, Label.SHEAR, Label.ACOUSTIC_PLUS)


@dataclass(frozen=True)
class ModeSet:
    """Eigenvalues of one wave number.

    A branch that has merged into the essential spectrum is stored as None.

    Attributes
    ----------
    lambda_diff : complex or None
        diffusion eigenvalue (real)
    lambda_shear : complex or None
        shear eigenvalue (real, double)
    lambda_ac : complex or None
        acoustic eigenvalue with positive imaginary part
    k : float
        wave number
    tau : float
        relaxation time
    shear_multiplicity : int
        algebraic multiplicity of the shear mode (Default value = 2)
    """
    lambda_diff: complex
    lambda_shear: complex
    lambda_ac: complex
    k: float
    tau: float
    shear_multiplicity: int = 2

    def __post_init__(self):
        edge = -1. / self.tau
        for label in TRACKED:
            lam = self.value(label)
            if lam is None:
                continue
            if not edge < lam.real < 0:
                raise ValueError(f"{label.value} eigenvalue {lam} outside the strip ({edge}, 0)")
            if label.is_real and lam.imag != 0:
                raise ValueError(f"{label.value} eigenvalue {lam} must be real")
        if self.lambda_ac is not None and not self.lambda_ac.imag > 0:
            raise ValueError(f"acoustic eigenvalue {self.lambda_ac} needs Im > 0")

    @property
    def params(self):
        return Params(self.k, self.tau)

    @property
    def lambda_ac_conj(self):
        return None if self.lambda_ac is None else self.lambda_ac.conjugate()

    def value(self, label):
        label = Label(label)
        return {Label.DIFFUSION: self.lambda_diff,
                Label.SHEAR: self.lambda_shear,
                Label.ACOUSTIC_PLUS: self.lambda_ac,
                Label.ACOUSTIC_MINUS: self.lambda_ac_conj}[label]

    @property
    def alive(self):
        """Mapping label -> whether the branch exists at this k."""
        return {label: self.value(label) is not None for label in Label}

    @property
    def all_alive(self):
        return all(self.alive.values())

    def require_alive(self):
        """Return self, or raise DegenerateModes if a branch is dead."""
        if not self.all_alive:
            dead = [lab.value for lab, ok in self.alive.items() if not ok]
            raise DegenerateModes(f"branches {dead} are dead at k = {self.k}")
        return self

    @property
    def eigenvalues(self):
        """The five eigenvalues (diff, ac, ac*, shear, shear)."""
        self.require_alive()
        return np.array([self.lambda_diff, self.lambda_ac, self.lambda_ac_conj,
                         self.lambda_shear, self.lambda_shear], dtype=complex)


@dataclass
class BranchCurve:
    """Samples (k, lambda) of one traced branch.

    ``k_terminal`` is the critical wave number when the branch died inside
    the traced range, otherwise None.
    """
    tau: float
    label: Label
    samples: list = field(default_factory=list)
    k_terminal: float = None

    @property
    def ks(self):
        return np.array([k for k, _ in self.samples])

    @property
    def values(self):
        return np.array([lam for _, lam in self.samples], dtype=complex)

    @property
    def terminated(self):
        return self.k_terminal is not None

    def append(self, k, lam):
        if self.samples and not k > self.samples[-1][0]:
            raise ValueError("branch samples must have strictly increasing k")
        self.samples.append((float(k), complex(lam)))


def taylor_seed(label, k, tau):
    """Small-k expansion of a branch.

    Parameters
    ----------
    label : Label
        branch
    k : float
        wave number
    tau : float
        relaxation time

    Returns
    -------
    _ : complex
        the expansion through order k**4

    Examples
    --------
    >>> round(taylor_seed(Label.SHEAR, 0.1, 1.0).real, 6)
    -0.0099
    """
    label = Label(label)
    if label is Label.DIFFUSION:
        return complex(-tau * k ** 2 + 9. / 5. * tau ** 3 * k ** 4)
    if label is Label.SHEAR:
        return complex(-tau * k ** 2 + tau ** 3 * k ** 4)
    ac = complex(-tau * k ** 2 + 62. / 45. * tau ** 3 * k ** 4,
                 math.sqrt(5. / 3.) * k + 7. * tau ** 2 / (6. * math.sqrt(15.)) * k ** 3)
    return ac if label is Label.ACOUSTIC_PLUS else ac.conjugate()


def _target(label, lam, params, continued):
    if label is Label.SHEAR:
        return shear_factor(lam, params, derivative=True, continued=continued)
    return longitudinal_condition(lam, params, derivative=True, continued=continued)


def _newton(label, guess, params, continued=False):
    lam = complex(guess)
    if label.is_real:
        lam = complex(lam.real, 0.)
    edge = -(1. - STRIP_GUARD) / params.tau
    converged = False
    for it in range(NEWTON_MAX_ITER):
        f, df = _target(label, lam, params, continued)
        if df == 0 or not np.isfinite(df):
            raise NonConvergence(f"vanishing derivative for {label.value} at lambda = {lam}",
                                 last_k=params.k, last_value=lam)
        step = f / df
        if label.is_real:
            step = complex(step.real, 0.)
        lam = lam - step
        if not continued and lam.real <= edge:
            raise StripEscape(f"{label.value} iterate {lam} left the strip at k = {params.k}",
                              last_k=params.k, last_value=lam)
        if converged:
            # one polishing step after the tolerance was met
            _LOGGER.debug("%s converged to %s in %d steps", label.value, lam, it + 1)
            return lam
        if abs(step) <= NEWTON_STEP_TOL * (1. + abs(lam)):
            converged = abs(_target(label, lam, params, continued)[0]) <= NEWTON_RESIDUAL_TOL
    raise NonConvergence(f"Newton for {label.value} did not converge in {NEWTON_MAX_ITER} "
                         f"iterations at k = {params.k}", last_k=params.k, last_value=lam)


def refine_root(label, guess, params):
    """Newton refinement of a branch eigenvalue.

    The shear mode is a zero of the shear factor (Z - i k tau)/(i k tau),
    the other modes are zeros of the longitudinal factor of the spectral
    function. Derivatives come from the differential equation of Z.

    Parameters
    ----------
    label : Label
        branch
    guess : complex
        starting value in the strip
    params : Params
        wave number (> 0) and relaxation time

    Returns
    -------
    _ : complex
        the root; real for the diffusion and shear branches

    Raises
    ------
    NonConvergence
        after NEWTON_MAX_ITER iterations
    StripEscape
        if an iterate leaves the strip
    """
    label = Label(label)
    if params.k == 0:
        raise DegenerateInputError("eigenvalues are refined for k > 0 only")
    params.check_strip(guess)
    return _newton(label, guess, params)


def _alive(lam, tau):
    return lam.real + 1. / tau >= TERMINATION_GAP / tau


def _bisect_critical(label, tau, k_lo, lam_lo, k_hi, lam_hi, slope):
    """Bisect the wave number where the branch meets the essential line.

    ``lam_hi`` is the continued root at k_hi or None if it is unknown.
    """
    while k_hi - k_lo > CRITICAL_RTOL * k_hi:
        mid = 0.5 * (k_lo + k_hi)
        if lam_hi is not None:
            guess = lam_lo + (lam_hi - lam_lo) * (mid - k_lo) / (k_hi - k_lo)
        else:
            guess = lam_lo + slope * (mid - k_lo)
        try:
            lam = _newton(label, guess, Params(mid, tau), continued=True)
        except NonConvergence:
            lam = None
        if lam is not None and _alive(lam, tau):
            slope = (lam - lam_lo) / (mid - k_lo)
            k_lo, lam_lo = mid, lam
        else:
            k_hi, lam_hi = mid, lam
    return 0.5 * (k_lo + k_hi)


def trace_branch(label, tau, k_max, dk, k_start=None):
    """Continue a branch in k.

    A secant predictor feeds the Newton corrector. The step halves on
    corrector failure, doubles after five successes and never exceeds
    ``dk``. The branch dies when it comes within TERMINATION_GAP/tau of the
    essential line; the critical wave number is then bisected.

    Parameters
    ----------
    label : Label
        branch
    tau : float
        relaxation time
    k_max : float
        end of the traced range
    dk : float
        largest step, > 0
    k_start : float
        first wave number (Default value = min(dk, 0.1/tau))

    Returns
    -------
    _ : BranchCurve

    Raises
    ------
    NonConvergence
        if the corrector fails repeatedly away from the essential line;
        ``last_k`` is the last good wave number
    """
    label = Label(label)
    if not dk > 0:
        raise ValueError("dk must be positive")
    if label is Label.ACOUSTIC_MINUS:
        curve = trace_branch(Label.ACOUSTIC_PLUS, tau, k_max, dk, k_start)
        out = BranchCurve(tau, label, k_terminal=curve.k_terminal)
        for k, lam in curve.samples:
            out.append(k, lam.conjugate())
        return out
    Params(0., tau)
    k = min(dk, 0.1 / tau) if k_start is None else float(k_start)
    lam = refine_root(label, taylor_seed(label, k, tau), Params(k, tau))
    curve = BranchCurve(tau, label)
    curve.append(k, lam)
    h, successes, failures = dk, 0, 0
    while k < k_max:
        k_next = min(k + h, k_max)
        if len(curve.samples) > 1:
            (k0, l0), (k1, l1) = curve.samples[-2:]
            slope = (l1 - l0) / (k1 - k0)
        else:
            slope = (taylor_seed(label, k + 1e-6, tau) - taylor_seed(label, k, tau)) / 1e-6
        guess = lam + slope * (k_next - k)
        try:
            new = _newton(label, guess, Params(k_next, tau), continued=True)
            if abs(new - guess) > max(2. * abs(guess - lam), 0.02 / tau):
                raise NonConvergence(f"{label.value} corrector jumped to {new}", last_k=k, last_value=lam)
        except NonConvergence as err:
            failures += 1
            successes = 0
            _LOGGER.debug("corrector failed at k = %g (%s), halving the step", k_next, err)
            if failures >= MAX_FAILURES:
                if lam.real + 1. / tau < 0.1 / tau:
                    curve.k_terminal = _bisect_critical(label, tau, k, lam, k_next, None, slope)
                    _LOGGER.info("%s branch dies at k = %.10g", label.value, curve.k_terminal)
                    return curve
                raise NonConvergence(f"tracing {label.value} failed after k = {k}",
                                     last_k=k, last_value=lam) from err
            h *= 0.5
            continue
        failures = 0
        if not _alive(new, tau):
            curve.k_terminal = _bisect_critical(label, tau, k, lam, k_next, new, slope)
            _LOGGER.info("%s branch dies at k = %.10g", label.value, curve.k_terminal)
            return curve
        k, lam = k_next, new
        curve.append(k, lam)
        successes += 1
        if successes >= SUCCESSES_TO_GROW:
            h, successes = min(2. * h, dk), 0
    return curve


def _branch_value(label, params):
    """Eigenvalue of one branch at (k, tau), None if the branch is dead."""
    kappa = params.kappa
    if kappa <= SEED_KAPPA:
        lam = _newton(label, taylor_seed(label, params.k, params.tau), params, continued=True)
        return lam if _alive(lam, params.tau) else None
    curve = trace_branch(label, params.tau, params.k, 0.05 / params.tau,
                         k_start=SEED_KAPPA / params.tau)
    if curve.terminated:
        return None
    return curve.samples[-1][1]


def find_modes(params):
    """All hydrodynamic eigenvalues at one wave number.

    Above k tau = SEED_KAPPA the branches are continued from there, so that
    each root keeps the label of its small-k expansion.

    Parameters
    ----------
    params : Params
        wave number (> 0) and relaxation time

    Returns
    -------
    _ : ModeSet
    """
    if params.k == 0:
        raise DegenerateInputError("find_modes needs k > 0")
    values = {label: _branch_value(label, params) for label in TRACKED}
    shear, diff = values[Label.SHEAR], values[Label.DIFFUSION]
    if shear is not None and diff is not None and abs(shear - diff) < 1e-8 * (1. + abs(diff)):
        warn(f"shear and diffusion eigenvalues collide at k = {params.k}")
    return ModeSet(lambda_diff=diff, lambda_shear=shear, lambda_ac=values[Label.ACOUSTIC_PLUS],
                   k=params.k, tau=params.tau)


def sweep_modes(ks, tau):
    """find_modes along an increasing grid of wave numbers.

    Only the first point is solved from scratch; every further root is
    Newton-corrected from a secant extrapolation of the previous two, so
    fine grids cost a few Newton steps per branch and point.

    Parameters
    ----------
    ks : array_like
        strictly increasing positive wave numbers
    tau : float
        relaxation time

    Returns
    -------
    _ : list of ModeSet
    """
    ks = [float(k) for k in ks]
    if not ks:
        return []
    if ks[0] <= 0 or np.any(np.diff(ks) <= 0):
        raise ValueError("wave numbers must be positive and strictly increasing")
    first = find_modes(Params(ks[0], tau))
    history = {label: [(ks[0], first.value(label))] for label in TRACKED}
    out = [first]
    for k in ks[1:]:
        params = Params(k, tau)
        values = {}
        for label in TRACKED:
            past = history[label]
            if past[-1][1] is None:
                values[label] = None
                continue
            if len(past) > 1:
                (k0, l0), (k1, l1) = past[-2:]
                guess = l1 + (l1 - l0) * (k - k1) / (k1 - k0)
            else:
                guess = past[-1][1]
            try:
                lam = _newton(label, guess, params, continued=True)
            except NonConvergence:
                lam = _branch_value(label, params)
            if lam is not None and not _alive(lam, tau):
                lam = None
            values[label] = lam
            past.append((k, lam))
        out.append(ModeSet(lambda_diff=values[Label.DIFFUSION], lambda_shear=values[Label.SHEAR],
                           lambda_ac=values[Label.ACOUSTIC_PLUS], k=k, tau=tau))
    return out


def _diffusion_limit_kappa():
    s = SQRT_HALF_PI
    # longitudinal bracket at zeta = 0 divided by i
    return brentq(lambda x: 6. * x ** 3 - 11. * s * x ** 2 + (6. + 4. * s * s) * x - 5. * s, 0.1, 5.)


def _acoustic_limit():
    def residual(v):
        x, kappa = v
        b = longitudinal_bracket(complex(x), plasma_Z(complex(x)), kappa)
        return [b.real, b.imag]

    sol = root(residual, [-1.37, 1.31], tol=1e-14)
    if not sol.success:
        raise NonConvergence(f"acoustic critical point not found: {sol.message}")
    x, kappa = sol.x
    return float(x), float(kappa)


def critical_wavenumber(label, tau, method='limit'):
    """Wave number at which a branch merges into the essential spectrum.

    Parameters
    ----------
    label : Label
        branch
    tau : float
        relaxation time
    method : str
        'limit' solves for the branch touching Re(lambda) = -1/tau directly
        (analytic for shear), 'bisect' traces the branch and bisects on its
        termination (Default value = 'limit')

    Returns
    -------
    _ : float
        critical wave number

    Examples
    --------
    >>> round(critical_wavenumber(Label.SHEAR, 2.0), 5)
    0.62666
    """
    label = Label(label)
    Params(0., tau)
    if method == 'limit':
        if label is Label.SHEAR:
            return SQRT_HALF_PI / tau
        if label is Label.DIFFUSION:
            return _diffusion_limit_kappa() / tau
        return _acoustic_limit()[1] / tau
    if method == 'bisect':
        curve = trace_branch(label, tau, 2. / tau, 0.05 / tau)
        if not curve.terminated:
            raise NonConvergence(f"{label.value} branch did not terminate below k = {2. / tau}",
                                 last_k=curve.samples[-1][0], last_value=curve.samples[-1][1])
        return curve.k_terminal
    raise ValueError(f"unknown method {method!r}, use 'limit' or 'bisect'")


def critical_data(label, tau):
    """Critical wave number, eigenvalue and spectral temperature of a branch
    at the point where it meets the essential line.

    The temperature is None for the shear branch, whose eigenvectors carry
    no temperature moment.

    Returns
    -------
    _ : tuple
        (k_crit, lambda_crit, theta_crit)
    """
    label = Label(label)
    if label is Label.SHEAR:
        return SQRT_HALF_PI / tau, complex(-1. / tau), None
    if label is Label.DIFFUSION:
        kappa = _diffusion_limit_kappa()
        x = 0.
    else:
        x, kappa = _acoustic_limit()
    # lambda = (-i kappa zeta - 1)/tau on real zeta
    lam = complex(-1., -kappa * x) / tau
    theta = temperature_zeta(complex(x), kappa)
    if label is Label.DIFFUSION:
        theta = complex(theta.real, 0.)
    if label is Label.ACOUSTIC_MINUS:
        lam, theta = lam.conjugate(), theta.conjugate()
    return kappa / tau, lam, theta


def default_contour(params, margin):
    """Rectangle in the strip enclosing all hydrodynamic eigenvalues."""
    tau = params.tau
    height = 2. * params.k + 1. / tau
    return Rectangle(-1. / tau + margin, 1. / tau, -height, height)


def default_margin(params):
    """Distance of the default contour from the essential line.

    At most 0.05/tau, and never more than half the gap between the line and
    the leftmost living eigenvalue, so that modes close to their critical
    wave number stay inside.
    """
    margin = 0.05 / params.tau
    modes = find_modes(params)
    reals = [modes.value(label).real for label in TRACKED if modes.alive[label]]
    if reals:
        margin = min(margin, 0.5 * (min(reals) + 1. / params.tau))
    return margin


def count_roots(params, margin=None, rectangle=None, n_per_side=64, max_points=2 ** 14):
    """Number of zeros of the spectral function inside a rectangle.

    The winding number of sigma_closed along the boundary is evaluated on a
    sampled path; the sampling is refined until consecutive phase jumps
    stay below pi/4.

    Parameters
    ----------
    params : Params
        wave number (> 0) and relaxation time
    margin : float
        distance of the default contour from the essential line
        (Default value = None, see default_margin)
    rectangle : Rectangle
        contour; overrides the default (Default value = None)
    n_per_side : int
        initial number of samples per side (Default value = 64)
    max_points : int
        refinement limit per side (Default value = 2**14)

    Returns
    -------
    _ : int
        number of zeros, counted with multiplicity

    Raises
    ------
    ContourThroughZero
        if |Sigma| < 1e-8 on the contour
    """
    if rectangle is None:
        if margin is None:
            margin = default_margin(params)
        rectangle = default_contour(params, margin)
    n = n_per_side
    while True:
        path = rectangle.boundary(n)
        values = np.array([sigma_closed(lam, params) for lam in path])
        if np.min(np.abs(values)) < COUNT_GUARD:
            raise ContourThroughZero(f"|Sigma| < {COUNT_GUARD} on the contour {rectangle}")
        jumps = np.abs(np.angle(values[1:] / values[:-1]))
        if np.max(jumps) < np.pi / 4 or n >= max_points:
            break
        n *= 2
    count = winding_number(values)
    _LOGGER.debug("winding number %d with %d samples per side", count, n)
    return count
