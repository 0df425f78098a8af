"""Brute-force validation on a discrete velocity grid.

Everything the closed forms claim is recomputed here by quadrature. In the
frame where k points along the first axis the streaming term only sees the
parallel velocity u, and the five collision invariants have Gaussian
perpendicular parts. A distribution in the invariant subspace of the BGK
operator is therefore

    f(v) = A(u) + B(u) v2 + C(u) v3 + D(u) (|v_perp|**2 - 2)/2

and the discrete space holds the values of A, B, C, D at N Gauss-Hermite
nodes in u. The operator there is a diagonal plus a rank-5 update, so its
resolvent reduces to a 5x5 capacitance system.
"""
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
import numpy as np
import scipy.linalg
from numpy.polynomial.hermite_e import hermegauss
from scipy.integrate import quad
from .closure import aligned_basis, aligned_exact, transport_coefficients, longitudinal_spectrum
from .modes import Label
from .spectral import Params, moment_matrix, SQRT6, LONGITUDINAL
from .helper.errors import ResolutionError, ContourThroughZero, NonConvergence
from .helper.helpers import Rectangle, as_complex, gaussian_moment


_LOGGER = logging.getLogger(__name__)
_LOGGER.addHandler(logging.NullHandler())

# quadrature arguments must keep this many node spacings from the real axis
RESOLUTION_FACTOR = 3.
# nodes lighter than this fraction of the heaviest weight do not set the resolution
WEIGHT_CUTOFF = 1e-14
ADAPTIVE_MIN_IM = 1e-2
# half width of a per-mode square relative to the smallest eigenvalue distance
MODE_BOX = 0.45
NEWTON_MAX_ITER = 50


@lru_cache(maxsize=16)
def _hermite_rule(n):
    x, w = hermegauss(n)
    w = w / np.sum(w)
    x.flags.writeable = w.flags.writeable = False
    return x, w


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """Nodes and weights for E[f(u)] with u standard normal.

    Weights are positive and sum to one; N nodes integrate polynomials up
    to degree 2N - 1 exactly.
    """
    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if not np.all(self.weights > 0):
            raise ValueError("quadrature weights must be positive")
        if abs(np.sum(self.weights) - 1.) > 1e-12:
            raise ValueError("quadrature weights must sum to one")

    @classmethod
    def hermite(cls, n):
        """Gauss-Hermite rule of the probabilists' weight exp(-u**2/2)."""
        if int(n) != n or n < 3:
            raise ValueError("a grid needs at least 3 nodes")
        return cls(*_hermite_rule(int(n)))

    @property
    def size(self):
        return len(self.nodes)

    @property
    def resolution(self):
        """Largest node spacing among the nodes that carry weight."""
        heavy = self.nodes[self.weights >= WEIGHT_CUTOFF * np.max(self.weights)]
        return float(np.max(np.diff(heavy)))

    def expectation(self, values):
        return np.sum(self.weights * values)

    def exactness_error(self, max_degree=None):
        """Largest relative error on the Gaussian moments up to max_degree
        (Default value = min(2N - 1, 61); higher moments overflow)."""
        if max_degree is None:
            max_degree = min(2 * self.size - 1, 61)
        err = 0.
        for n in range(max_degree + 1):
            exact = gaussian_moment(n)
            got = self.expectation(self.nodes ** n)
            err = max(err, abs(got - exact) / max(1., exact))
        return err

    def check_resolves(self, zeta):
        """Raise ResolutionError unless |Im zeta| >= 3 node spacings."""
        need = RESOLUTION_FACTOR * self.resolution
        if abs(zeta.imag) < need:
            raise ResolutionError(f"|Im zeta| = {abs(zeta.imag):.3g} below {need:.3g}, "
                                  f"the grid of {self.size} nodes cannot resolve it")


def quadrature_Z(zeta, n_nodes=200, grid=None):
    """Plasma dispersion function E[1/(u - zeta)] by Gauss-Hermite quadrature.

    For Im zeta < 0 the sum approximates the defining integral, which is the
    lower continuation.

    Raises
    ------
    ResolutionError
        if |Im zeta| < 3 node spacings
    """
    zeta = as_complex(zeta, 'zeta')
    grid = grid or QuadratureGrid.hermite(n_nodes)
    grid.check_resolves(zeta)
    return complex(grid.expectation(1. / (grid.nodes - zeta)))


def adaptive_Z(zeta, n=0):
    """E[u**n/(u - zeta)] by adaptive quadrature (scipy.integrate.quad).

    Used near the real axis where a fixed grid would need too many nodes.
    """
    zeta = as_complex(zeta, 'zeta')
    if abs(zeta.imag) < ADAPTIVE_MIN_IM:
        raise ResolutionError(f"|Im zeta| must be at least {ADAPTIVE_MIN_IM}")
    norm = 1. / math.sqrt(2. * math.pi)

    def part(which):
        def integrand(u):
            val = norm * math.exp(-0.5 * u * u) * u ** n / (u - zeta)
            return val.real if which == 0 else val.imag
        inner = [zeta.real] if -40. < zeta.real < 40. else None
        value, _ = quad(integrand, -40., 40., points=inner, limit=400, epsabs=1e-15, epsrel=1e-13)
        return value

    return complex(part(0), part(1))


@dataclass(frozen=True, eq=False)
class DiscreteOperator:
    """L_k = -i k u - 1/tau + (1/tau) P5 on the discrete space of 4N values.

    Attributes
    ----------
    params : Params
        wave number and relaxation time
    grid : QuadratureGrid
        nodes in the parallel velocity
    diagonal : numpy.ndarray
        streaming and relaxation part, length 4N
    basis : numpy.ndarray
        4N x 5 matrix whose columns represent the collision invariants
        (1, u, v2, v3, (|v|**2 - 3)/sqrt(6))
    weights : numpy.ndarray
        quadrature weights of the 4N values
    """
    params: Params
    grid: QuadratureGrid
    diagonal: np.ndarray
    basis: np.ndarray
    weights: np.ndarray

    @classmethod
    def from_grid(cls, params, grid):
        u, n = grid.nodes, grid.size
        one = np.ones(n)
        diag = np.tile(-1j * params.k * u - 1. / params.tau, 4)
        phi = np.zeros((4 * n, 5), dtype=complex)
        phi[:n, 0] = one
        phi[:n, 1] = u
        phi[n:2 * n, 2] = one
        phi[2 * n:3 * n, 3] = one
        phi[:n, 4] = (u * u - 1.) / SQRT6
        phi[3 * n:, 4] = 2. / SQRT6
        return cls(params, grid, diag, phi, np.tile(grid.weights, 4))

    @classmethod
    def hermite(cls, params, n_nodes=200):
        return cls.from_grid(params, QuadratureGrid.hermite(n_nodes))

    @property
    def size(self):
        return len(self.diagonal)

    @property
    def streaming(self):
        """i kappa u on the 4N values."""
        return np.tile(1j * self.params.kappa * self.grid.nodes, 4)

    def moments(self, f):
        """Moments <f e_n> = Phi^H W f of a vector or of the columns of a block."""
        w = self.weights if f.ndim == 1 else self.weights[:, None]
        return self.basis.conj().T @ (w * f)

    def norm(self, f):
        return math.sqrt(float(np.sum(self.weights * np.abs(f) ** 2)))

    def apply(self, f):
        f = np.asarray(f, dtype=complex)
        lead = self.diagonal * f if f.ndim == 1 else self.diagonal[:, None] * f
        return lead + self.basis @ self.moments(f) / self.params.tau

    def dense(self):
        return np.diag(self.diagonal) + self.basis @ (self.basis.conj().T * self.weights) / self.params.tau

    def green_shifted(self, w):
        """G_S(w) = <e_n e_m / (tau w + 1 + i kappa u)> by quadrature."""
        a = 1. + self.params.tau * w
        r = np.array([self.grid.expectation(self.grid.nodes ** n / (a + 1j * self.params.kappa * self.grid.nodes))
                      for n in range(5)])
        return moment_matrix(r)

    def compressed_resolvent(self, w):
        """G_L(w) = -(1/tau) Phi^H W (L - w)^-1 Phi = G_S (Id - G_S)^-1."""
        gs = self.green_shifted(w)
        return gs @ np.linalg.inv(np.eye(5) - gs)

    def resolvent_apply(self, w, x):
        """(L - w)^-1 x through the 5x5 capacitance system."""
        x = np.asarray(x, dtype=complex)
        vec = x.ndim == 1
        if vec:
            x = x[:, None]
        dinv = 1. / (self.diagonal - w)
        y = dinv[:, None] * x
        cap = np.eye(5) - self.green_shifted(w)
        if np.linalg.cond(cap) > 1e14:
            raise ContourThroughZero(f"resolvent pole at w = {w}")
        corr = np.linalg.solve(cap, self.moments(y)) / self.params.tau
        out = y - dinv[:, None] * (self.basis @ corr)
        return out[:, 0] if vec else out

    def eigenfunction(self, lam, eta):
        """f = Phi eta / (tau lambda + 1 + i kappa u), the eigenfunction with
        moments eta at the eigenvalue lambda."""
        a = 1. + self.params.tau * lam
        return (self.basis @ eta) / (a + self.streaming)


def _resolved_operator(params, n_nodes, points):
    op = DiscreteOperator.hermite(params, n_nodes)
    for w in np.atleast_1d(points):
        op.grid.check_resolves(params.zeta(w))
    return op


def quadrature_sigma(lam, params, n_nodes=200, adaptive=False):
    """Spectral function det(G_S - Id) with G_S assembled by quadrature.

    Parameters
    ----------
    lam : complex
        spectral parameter in the strip
    params : Params
        wave number (> 0) and relaxation time
    n_nodes : int
        Gauss-Hermite nodes (Default value = 200)
    adaptive : bool
        compute the five moments with adaptive quadrature instead, which
        works close to the essential line (Default value = False)

    Raises
    ------
    ResolutionError
        if the grid cannot resolve zeta(lambda)
    """
    lam = params.check_strip(lam)
    return complex(np.linalg.det(quadrature_green(lam, params, n_nodes, adaptive) - np.eye(5)))


def quadrature_green(lam, params, n_nodes=200, adaptive=False):
    """G_S(lambda) in the k-aligned frame by quadrature."""
    zeta = params.zeta(lam)
    if adaptive:
        r = np.array([adaptive_Z(zeta, n) for n in range(5)]) / (1j * params.kappa)
        return moment_matrix(r)
    op = _resolved_operator(params, n_nodes, lam)
    return op.green_shifted(lam)


def quadrature_root(guess, params, factor='longitudinal', n_nodes=200):
    """Newton with a numerical derivative on a factor of quadrature_sigma.

    ``factor`` is 'longitudinal' (det of the (0, 1, 4) block of G_S - Id)
    or 'shear' (the entry D_33).
    """
    def target(lam):
        d = quadrature_green(lam, params, n_nodes) - np.eye(5)
        if factor == 'shear':
            return d[2, 2]
        return np.linalg.det(d[np.ix_(LONGITUDINAL, LONGITUDINAL)])

    lam = as_complex(guess, 'guess')
    for _ in range(NEWTON_MAX_ITER):
        h = 1e-7 * (1. + abs(lam))
        deriv = (target(lam + h) - target(lam - h)) / (2. * h)
        step = target(lam) / deriv
        lam -= step
        if abs(step) <= 1e-13 * (1. + abs(lam)):
            return lam
    raise NonConvergence(f"quadrature root did not converge from {guess}", last_k=params.k, last_value=lam)


def _moment_columns(modes):
    """Eigenvalues and k-aligned moment vectors of the five modes."""
    lams, thetas = longitudinal_spectrum(modes)
    h = aligned_basis(lams, thetas, modes.k)
    return [lams[0], lams[1], lams[2], modes.lambda_shear, modes.lambda_shear], h


def eigenvector_residual(modes, params=None, n_nodes=200):
    """max over the five modes of |L f - lambda f| / |f| on the discrete grid.

    The eigenfunctions are built from their moments by the resolvent formula
    f = P5 f / (tau lambda + 1 + i tau k u).
    """
    params = params or modes.params
    modes.require_alive()
    lams, h = _moment_columns(modes)
    op = _resolved_operator(params, n_nodes, lams)
    worst = 0.
    for j, lam in enumerate(lams):
        f = op.eigenfunction(lam, h[:, j])
        worst = max(worst, op.norm(op.apply(f) - lam * f) / op.norm(f))
    return worst


def default_riesz_contour(modes):
    """Rectangle around all hydrodynamic eigenvalues with a uniform clearance,
    kept away from the essential line."""
    tau = modes.tau
    lams = modes.eigenvalues
    low = np.min(lams.real)
    left = -1. / tau + max(0.1 / tau, 0.5 * (low + 1. / tau))
    gap = low - left
    top = np.max(np.abs(lams.imag)) + gap
    return Rectangle(left, np.max(lams.real) + gap, -top, top)


def mode_rectangles(modes):
    """One small square per distinct eigenvalue: diff, ac, ac*, shear."""
    distinct = {Label.DIFFUSION: modes.lambda_diff, Label.ACOUSTIC_PLUS: modes.lambda_ac,
                Label.ACOUSTIC_MINUS: modes.lambda_ac_conj, Label.SHEAR: modes.lambda_shear}
    values = list(distinct.values())
    gaps = [abs(a - b) for i, a in enumerate(values) for b in values[i + 1:]]
    half = MODE_BOX * min(min(gaps), 0.1 / modes.tau)
    return {label: Rectangle(lam.real - half, lam.real + half, lam.imag - half, lam.imag + half)
            for label, lam in distinct.items()}


def riesz_projector(params, contour, n_nodes=200, n_contour=256):
    """Compression P5 P P5 of the Riesz projector of a contour.

    P = -(1/(2 pi i)) int (L - w)^-1 dw; on moments this is
    (tau/(2 pi i)) int G_L(w) dw. Each side is integrated with Gauss-Legendre.

    Parameters
    ----------
    params : Params
        wave number (> 0) and relaxation time
    contour : Rectangle
        encloses the wanted eigenvalues, clear of the essential line
    n_nodes : int
        velocity nodes (Default value = 200)
    n_contour : int
        contour points in total (Default value = 256)

    Returns
    -------
    _ : numpy.ndarray
        5x5 matrix of moments of the projected invariants

    Raises
    ------
    ResolutionError
        if the grid cannot resolve the contour
    """
    nodes, weights = contour.gauss_legendre(max(n_contour // 4, 2))
    op = _resolved_operator(params, n_nodes, nodes)
    total = np.zeros((5, 5), dtype=complex)
    for w, dw in zip(nodes, weights):
        total += dw * op.compressed_resolvent(w)
    return params.tau * total / (2j * np.pi)


def apply_projector(op, contour, x, n_contour=256):
    """Full discrete Riesz projector applied to a block of vectors."""
    nodes, weights = contour.gauss_legendre(max(n_contour // 4, 2))
    total = np.zeros(np.shape(x), dtype=complex)
    for w, dw in zip(nodes, weights):
        total += dw * op.resolvent_apply(w, x)
    return -total / (2j * np.pi)


@dataclass(frozen=True)
class ProjectorReport:
    idempotency: float
    singular_values: np.ndarray
    rank: int
    angles: dict

    @property
    def max_angle(self):
        return max(self.angles.values())


def projector_checks(modes, n_nodes=200, n_contour=256, block=10, seed=0):
    """Idempotency, rank and eigenvector directions of the numeric projector.

    Idempotency and rank are checked on the full discrete projector applied
    to a random block; per-mode compressed projectors are compared with the
    columns of H through principal angles.
    """
    params = modes.params
    modes.require_alive()
    contour = default_riesz_contour(modes)
    op = _resolved_operator(params, n_nodes, contour.corners)
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((op.size, block)) + 1j * rng.standard_normal((op.size, block))
    px = apply_projector(op, contour, x, n_contour)
    ppx = apply_projector(op, contour, px, n_contour)
    scale = np.sqrt(op.weights)[:, None]
    idem = np.linalg.norm(scale * (ppx - px), 2) / np.linalg.norm(scale * px, 2)
    sv = scipy.linalg.svdvals(scale * px)
    rank = int(np.sum(sv > 1e-8 * sv[0]))
    _, h = _moment_columns(modes)
    columns = {Label.DIFFUSION: [0], Label.ACOUSTIC_PLUS: [1], Label.ACOUSTIC_MINUS: [2], Label.SHEAR: [3, 4]}
    angles = {}
    for label, box in mode_rectangles(modes).items():
        m = riesz_projector(params, box, n_nodes, n_contour)
        cols = columns[label]
        u, _, _ = np.linalg.svd(m)
        angles[label] = float(np.max(scipy.linalg.subspace_angles(u[:, :len(cols)], h[:, cols])))
    _LOGGER.debug("projector: idempotency %.3g, rank %d, angles %s", idem, rank, angles)
    return ProjectorReport(float(idem), sv, rank, angles)


def _closure_lift(op, modes, closure):
    """4N x 5 matrix lifting macroscopic moments to distributions."""
    phi = op.basis
    if closure == 'euler':
        return phi
    if closure == 'ns':
        # first-order Chapman-Enskog: C m = -i tau k P5perp (u Phi m)
        uphi = np.tile(op.grid.nodes, 4)[:, None] * phi
        perp = uphi - phi @ op.moments(uphi)
        return phi - 1j * op.params.tau * op.params.k * perp
    if closure == 'exact':
        lams, h = _moment_columns(modes)
        f = np.stack([op.eigenfunction(lam, h[:, j]) for j, lam in enumerate(lams)], axis=1)
        return f @ np.linalg.inv(op.moments(f))
    raise ValueError(f"unknown closure {closure!r}, use 'exact', 'euler' or 'ns'")


def invariance_residual(modes, n_nodes=200, closure='exact'):
    """Operator norm of (C P5 - P5perp) L (1 + C) on the moment space.

    With the lift F = (1 + C) of moments to distributions, the residual is
    F Phi^H W L F - L F: zero iff the lifted manifold is invariant.

    Parameters
    ----------
    modes : ModeSet
        all five eigenvalues alive
    n_nodes : int
        velocity nodes (Default value = 200)
    closure : str
        'exact' (spectral closure), 'euler' (C = 0) or 'ns' (first-order
        Chapman-Enskog) (Default value = 'exact')
    """
    modes.require_alive()
    op = _resolved_operator(modes.params, n_nodes, modes.eigenvalues)
    lift = _closure_lift(op, modes, closure)
    lf = op.apply(lift)
    res = lift @ op.moments(lf) - lf
    return float(np.linalg.norm(np.sqrt(op.weights)[:, None] * res, 2))


def kinetic_trajectory(op, f0, times):
    """Discrete kinetic solution exp(L t) f0 at the given times (dense expm)."""
    dense = op.dense()
    times = np.asarray(times, dtype=float)
    if np.any(np.diff(times) < 0) or times[0] < 0:
        raise ValueError("times must be non-negative and increasing")
    out = np.empty((len(times), len(f0)), dtype=complex)
    f, t_prev, step, dt_prev = np.asarray(f0, dtype=complex), 0., None, None
    for i, t in enumerate(times):
        dt = t - t_prev
        if dt > 0:
            if dt_prev is None or not math.isclose(dt, dt_prev, rel_tol=1e-12):
                step, dt_prev = scipy.linalg.expm(dense * dt), dt
            f = step @ f
        out[i] = f
        t_prev = t
    return out


@dataclass(frozen=True)
class TrajectoryComparison:
    times: np.ndarray
    kinetic: np.ndarray
    hydro: np.ndarray

    @property
    def gap(self):
        return np.max(np.abs(self.kinetic - self.hydro), axis=1)


def hydro_vs_kinetic(modes, times, n_nodes=200, project=True, seed=0):
    """Moments of a kinetic trajectory against the exact closure trajectory.

    A random discrete initial condition is (optionally) projected onto the
    hydrodynamic manifold with the numeric Riesz projector; its moments are
    evolved with the exact generator and compared with the moments of the
    kinetic solution. Without projection the gap measures the attraction
    to the manifold.
    """
    modes.require_alive()
    params = modes.params
    contour = default_riesz_contour(modes)
    op = _resolved_operator(params, n_nodes, contour.corners)
    rng = np.random.default_rng(seed)
    # random moments times a cosine wiggle in u
    f0 = op.basis @ (rng.standard_normal(5) + 1j * rng.standard_normal(5))
    f0 = f0 * (1. + 0.5 * np.cos(np.tile(op.grid.nodes, 4)))
    projected = apply_projector(op, contour, f0[:, None])[:, 0]
    kin = kinetic_trajectory(op, projected if project else f0, times)
    kin_moments = np.array([op.moments(f) for f in kin])
    s = aligned_exact(transport_coefficients(modes))
    m0 = op.moments(projected)
    hyd = np.array([scipy.linalg.expm(s * t) @ m0 for t in times])
    return TrajectoryComparison(np.asarray(times), kin_moments, hyd)


def attraction_rate(comparison, t_min):
    """Decay rate of the kinetic-to-closure gap for t >= t_min.

    The gap oscillates, so the fit uses its upper envelope max_{s >= t} gap(s).
    """
    mask = comparison.times >= t_min
    envelope = np.maximum.accumulate(comparison.gap[mask][::-1])[::-1]
    slope, _ = np.polyfit(comparison.times[mask], np.log(envelope), 1)
    return -float(slope)
