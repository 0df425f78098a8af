"""Linear hydrodynamics on the 3-torus [0, 2 pi)**3.

The fields h = (rho, u, sqrt(3/2) T) are expanded in Fourier modes
exp(i k.x) with integer wave vectors |k| <= K_max. Every wave vector
evolves independently under its 5x5 generator, so time stepping is an
exact propagator per mode. Conjugate wave vectors get conjugate
propagators, which keeps the physical fields real.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from warnings import warn
import numpy as np
import scipy.linalg
from .closure import (Model, BeyondPolicy, generator, coefficients_at, basis_H, TO_PHYSICAL)
from .spectral import Params, WaveVector, rotation_frame
from .helper.errors import BeyondCritical, DegenerateInputError
from .helper.helpers import write_table, read_table


_LOGGER = logging.getLogger(__name__)
_LOGGER.addHandler(logging.NullHandler())

REALNESS_TOL = 1e-10
COMPONENTS = ('rho', 'u1', 'u2', 'u3', 'h4')
SQRT_3_2 = math.sqrt(1.5)


def lattice(K_max):
    """Integer wave vectors with |k| <= K_max, sorted."""
    if int(K_max) != K_max or K_max < 0:
        raise ValueError(f"K_max must be a non-negative integer, got {K_max}")
    K_max = int(K_max)
    r = range(-K_max, K_max + 1)
    return [(a, b, c) for a in r for b in r for c in r if a * a + b * b + c * c <= K_max * K_max]


def _neg(key):
    return (-key[0], -key[1], -key[2])


def _representatives(keys):
    """One key of every pair {k, -k}, plus keys whose partner is absent."""
    present = set(keys)
    return [key for key in keys if key >= _neg(key) or _neg(key) not in present]


def _workers(jobs):
    return None if jobs is None else max(1, int(jobs))


@dataclass(frozen=True)
class SimConfig:
    """Parameters of a simulation on the torus.

    Attributes
    ----------
    tau : float
        relaxation time, > 0
    K_max : int
        radius of the wave vector lattice, >= 0
    model : Model
        closure used for every wave vector (Default value = Model.EXACT)
    beyond_critical : BeyondPolicy
        what EXACT does with lattice points past the minimal critical wave
        number (Default value = BeyondPolicy.REJECT)
    dt_output : float
        spacing of the output times (Default value = 0.1)
    t_end : float
        last output time (Default value = 1.0)
    """
    tau: float
    K_max: int
    model: Model = Model.EXACT
    beyond_critical: BeyondPolicy = BeyondPolicy.REJECT
    dt_output: float = 0.1
    t_end: float = 1.

    def __post_init__(self):
        object.__setattr__(self, 'model', Model(self.model))
        object.__setattr__(self, 'beyond_critical', BeyondPolicy(self.beyond_critical))
        if not (math.isfinite(self.tau) and self.tau > 0):
            raise ValueError(f"tau must be positive, got {self.tau}")
        if int(self.K_max) != self.K_max or self.K_max < 0:
            raise ValueError(f"K_max must be a non-negative integer, got {self.K_max}")
        object.__setattr__(self, 'K_max', int(self.K_max))
        if not self.dt_output > 0:
            raise ValueError(f"dt_output must be positive, got {self.dt_output}")
        if not self.t_end >= 0:
            raise ValueError(f"t_end must be non-negative, got {self.t_end}")

    @property
    def lattice(self):
        return lattice(self.K_max)

    @property
    def max_norm(self):
        return max(math.sqrt(a * a + b * b + c * c) for a, b, c in self.lattice)

    @property
    def times(self):
        n = int(math.floor(self.t_end / self.dt_output + 1e-9))
        return self.dt_output * np.arange(n + 1)

    def check(self):
        """Raise BeyondCritical if EXACT under REJECT meets a lattice point
        at or past the minimal critical wave number."""
        if self.model is not Model.EXACT or self.beyond_critical is BeyondPolicy.PIN:
            return self
        k_crit = Params(0., self.tau).k_crit_min
        if self.max_norm >= k_crit:
            raise BeyondCritical(f"lattice reaches |k| = {self.max_norm:.6g} >= k_crit,min = "
                                 f"{k_crit:.6g} at tau = {self.tau}; use beyond_critical='pin'")
        return self


@dataclass
class FieldState:
    """Fourier coefficients of h at one time.

    ``coefficients`` maps integer keys (k1, k2, k3) to complex 5-vectors.
    The states produced by this module satisfy h(-k) = conj(h(k)).
    """
    coefficients: dict
    time: float = 0.

    def __post_init__(self):
        coeffs = {}
        for key, value in self.coefficients.items():
            if isinstance(key, WaveVector):
                key = key.key
            key = tuple(int(x) for x in key)
            value = np.asarray(value, dtype=complex)
            if value.shape != (5,):
                raise ValueError(f"coefficient of {key} must have 5 components, got {value.shape}")
            coeffs[key] = value
        self.coefficients = dict(sorted(coeffs.items()))

    @classmethod
    def zeros(cls, K_max, time=0.):
        return cls({key: np.zeros(5, dtype=complex) for key in lattice(K_max)}, time)

    @classmethod
    def from_physical(cls, fields, K_max, time=0.):
        """Coefficients of fields sampled on a uniform n**3 grid of the torus.

        Parameters
        ----------
        fields : array_like
            shape (5, n, n, n): rho, u1, u2, u3 and T at x = 2 pi j / n
        K_max : int
            radius of the kept lattice, n > 2 K_max
        time : float
            time stamp (Default value = 0.)

        Returns
        -------
        _ : FieldState
            Hermitian symmetric state in h variables
        """
        fields = np.asarray(fields)
        if fields.ndim != 4 or fields.shape[0] != 5 or len(set(fields.shape[1:])) != 1:
            raise ValueError(f"fields must have shape (5, n, n, n), got {fields.shape}")
        n = fields.shape[1]
        if n <= 2 * K_max:
            raise ValueError(f"grid of {n} points cannot resolve K_max = {K_max}")
        spectrum = np.fft.fftn(fields, axes=(1, 2, 3)) / n ** 3
        to_h = np.linalg.inv(TO_PHYSICAL)
        coeffs = {key: to_h @ spectrum[:, key[0] % n, key[1] % n, key[2] % n]
                  for key in lattice(K_max)}
        return cls(coeffs, time).symmetrize()

    @property
    def keys(self):
        return list(self.coefficients)

    @property
    def wave_vectors(self):
        return [WaveVector(*key) for key in self.coefficients]

    def __getitem__(self, key):
        if isinstance(key, WaveVector):
            key = key.key
        return self.coefficients[tuple(key)]

    def copy(self):
        return FieldState({key: v.copy() for key, v in self.coefficients.items()}, self.time)

    @property
    def hermitian_gap(self):
        """max |h(-k) - conj(h(k))|, infinite if a partner is missing."""
        gap = 0.
        for key, value in self.coefficients.items():
            partner = self.coefficients.get(_neg(key))
            if partner is None:
                return math.inf
            gap = max(gap, float(np.max(np.abs(partner - value.conj()))))
        return gap

    def symmetrize(self):
        """Enforce h(-k) = conj(h(k)) by averaging each pair."""
        out = {}
        for key, value in self.coefficients.items():
            partner = self.coefficients.get(_neg(key), value.conj())
            out[key] = 0.5 * (value + partner.conj())
            out[_neg(key)] = out[key].conj()
        return FieldState(out, self.time)

    def norm(self, exclude_zero=False):
        """L2 norm of the coefficient vector (Parseval)."""
        return math.sqrt(sum(float(np.vdot(v, v).real) for key, v in self.coefficients.items()
                             if not (exclude_zero and key == (0, 0, 0))))


@dataclass(frozen=True)
class Snapshot:
    """Physical fields (rho, u1, u2, u3, T) on a uniform grid."""
    fields: np.ndarray
    time: float
    imag_rel: float

    @property
    def n_grid(self):
        return self.fields.shape[1]

    @property
    def coordinates(self):
        return 2. * np.pi * np.arange(self.n_grid) / self.n_grid


def to_physical(state, n_grid):
    """Inverse transform of a state onto an n_grid**3 grid.

    Returns a Snapshot whose ``imag_rel`` is the largest imaginary part
    relative to the largest field value; a warning is issued if it exceeds
    1e-10.
    """
    n = int(n_grid)
    K = max((max(abs(x) for x in key) for key in state.coefficients), default=0)
    if n <= 2 * K:
        raise ValueError(f"grid of {n} points cannot represent wave numbers up to {K}")
    spectrum = np.zeros((5, n, n, n), dtype=complex)
    for key, value in state.coefficients.items():
        spectrum[:, key[0] % n, key[1] % n, key[2] % n] = TO_PHYSICAL @ value
    fields = np.fft.ifftn(spectrum, axes=(1, 2, 3)) * n ** 3
    scale = float(np.max(np.abs(fields))) or 1.
    imag_rel = float(np.max(np.abs(fields.imag))) / scale
    if imag_rel > REALNESS_TOL:
        warn(f"physical fields have relative imaginary parts {imag_rel:.3g} at t = {state.time}")
    return Snapshot(fields.real.copy(), state.time, imag_rel)


def assemble(config, jobs=None):
    """One h-variable generator per lattice point of the configuration.

    Parameters
    ----------
    config : SimConfig
        valid configuration
    jobs : int
        worker threads, None lets the executor decide (Default value = None)

    Returns
    -------
    _ : dict
        key (k1, k2, k3) -> HydroGenerator in lattice order; k = 0 gets the
        zero matrix and -k gets the conjugate generator of k

    Raises
    ------
    BeyondCritical
        EXACT under REJECT with a lattice point at or past k_crit,min
    """
    config.check()
    keys = config.lattice
    canonical = _representatives(keys)

    def build(key):
        return generator(WaveVector(*key), config.tau, config.model, config.beyond_critical)

    with ThreadPoolExecutor(max_workers=_workers(jobs)) as pool:
        gens = dict(zip(canonical, pool.map(build, canonical)))
    out = {}
    for key in keys:
        out[key] = gens[key] if key in gens else gens[_neg(key)].conj()
    _LOGGER.debug("assembled %d %s generators for K_max = %d", len(out), config.model.value,
                  config.K_max)
    return out


class Propagator:
    """exp(t G) of one generator.

    Exact generators with their modes use H exp(Lambda t) H^-1; all others
    use scipy.linalg.expm.
    """

    def __init__(self, gen):
        if gen.variables != 'h':
            raise ValueError("the simulator works in h variables")
        self.gen = gen
        self._basis = None
        if gen.modes is not None and gen.kvec.norm > 0:
            h = basis_H(gen.modes, rotation_frame(gen.kvec)).entries
            self._basis = (h, np.linalg.inv(h), gen.modes.eigenvalues)

    @property
    def diagonalized(self):
        return self._basis is not None

    def __call__(self, t):
        if self._basis is None:
            return scipy.linalg.expm(self.gen.matrix * t)
        h, hinv, lams = self._basis
        return (h * np.exp(lams * t)) @ hinv


def _propagators(state, generators, jobs):
    missing = [key for key in state.coefficients if key not in generators]
    if missing:
        raise ValueError(f"no generator for wave vectors {missing[:5]}")
    canonical = _representatives(state.keys)
    with ThreadPoolExecutor(max_workers=_workers(jobs)) as pool:
        props = list(pool.map(lambda key: Propagator(generators[key]), canonical))
    return dict(zip(canonical, props))


def _advance(state, props, t):
    out = {}
    for key, prop in props.items():
        p = prop(t)
        out[key] = p @ state.coefficients[key]
        partner = _neg(key)
        if partner != key and partner in state.coefficients and partner not in props:
            out[partner] = p.conj() @ state.coefficients[partner]
    return FieldState(out, state.time + t)


def evolve(state, generators, t, jobs=None):
    """Evolve a state by the time t.

    Parameters
    ----------
    state : FieldState
        coefficients at state.time
    generators : dict
        key -> HydroGenerator covering the lattice of the state
    t : float
        time step
    jobs : int
        worker threads (Default value = None)

    Returns
    -------
    _ : FieldState
        h(t) = exp(t G(k)) h(0) per wave vector, at time state.time + t
    """
    return _advance(state, _propagators(state, generators, jobs), t)


def trajectory(state, generators, times, jobs=None):
    """States at state.time + t for every t in times, each propagated from
    the initial state (no error accumulation)."""
    props = _propagators(state, generators, jobs)
    return [_advance(state, props, float(t)) for t in times]


def simulate(state, config, jobs=None):
    """Assemble the generators of a configuration and return the trajectory
    on its output times."""
    return trajectory(state, assemble(config, jobs), config.times, jobs)


_KERNELS = ('1', '2', '3', '4', '5', '6', 'shear')


def kernel_coefficients(config):
    """Fourier coefficients of the non-local transport operators.

    The physical-variable equations read, with hat{K}_j evaluated at |k|,

        d rho/dt = -i k.u
        du/dt = i k K1 rho - (K2 k (k.u) - K_shear u) + i k K3 T
        dT/dt = K4 rho + i K5 (k.u) + K6 T

    with K1 = c1/k, K2 = (lambda_shear - c2)/k**2, K3 = sqrt(3/2) c3/k,
    K4 = sqrt(2/3) c4, K5 = sqrt(2/3) c5/k, K6 = c6, K_shear = lambda_shear.

    Parameters
    ----------
    config : SimConfig
        EXACT model

    Returns
    -------
    _ : dict
        (j, k**2) -> float with j in '1' ... '6', 'shear' and k**2 the
        integer squared norms of the lattice, k = 0 excluded
    """
    if config.model is not Model.EXACT:
        raise ValueError("kernel coefficients belong to the exact model")
    config.check()
    table = {}
    for k2 in sorted({a * a + b * b + c * c for a, b, c in config.lattice} - {0}):
        k = math.sqrt(k2)
        _, co = coefficients_at(k, config.tau, config.beyond_critical)
        if co.contamination > REALNESS_TOL:
            warn(f"transport coefficients at k = {k} carry imaginary parts {co.contamination:.3g}")
        values = (co.c1 / k, (co.lambda_shear - co.c2) / k2, SQRT_3_2 * co.c3 / k,
                  co.c4 / SQRT_3_2, co.c5 / (SQRT_3_2 * k), co.c6, co.lambda_shear)
        for name, value in zip(_KERNELS, values):
            table[(name, k2)] = float(value)
    return table


@dataclass
class ModelComparison:
    """L2 distances between the trajectories of several models.

    ``gaps`` maps a pair of model names to the distance at every time,
    ``per_k`` maps the same pair to key -> distances.
    """
    times: np.ndarray
    models: list
    gaps: dict = field(default_factory=dict)
    per_k: dict = field(default_factory=dict)

    def max_gap(self, a, b):
        return float(np.max(self.gaps[(Model(a).value, Model(b).value)]))


def compare_models(state0, config, models, jobs=None):
    """Evolve one initial state under several models and compare.

    Parameters
    ----------
    state0 : FieldState
        shared initial data
    config : SimConfig
        tau, lattice, output times and beyond-critical policy; its model
        field is ignored
    models : list
        models to compare
    jobs : int
        worker threads (Default value = None)

    Returns
    -------
    _ : ModelComparison
    """
    models = [Model(m) for m in models]
    if not models:
        raise ValueError("nothing to compare")
    times = config.times
    runs = []
    for model in models:
        cfg = SimConfig(config.tau, config.K_max, model, config.beyond_critical,
                        config.dt_output, config.t_end)
        runs.append(simulate(state0, cfg, jobs))
    report = ModelComparison(times, [m.value for m in models])
    for (i, a), (j, b) in combinations(enumerate(models), 2):
        pair = (a.value, b.value)
        per_k = {key: np.array([np.linalg.norm(sa[key] - sb[key]) for sa, sb in zip(runs[i], runs[j])])
                 for key in state0.keys}
        report.per_k[pair] = per_k
        report.gaps[pair] = np.sqrt(sum(d ** 2 for d in per_k.values()))
        _LOGGER.info("%s vs %s: max L2 gap %.3g", a.value, b.value, float(np.max(report.gaps[pair])))
    return report


def decay_rate(states, key=None, t_min=None, t_max=None):
    """Slope of log |h| over time, by least squares.

    Parameters
    ----------
    states : list of FieldState
        trajectory
    key : tuple
        wave vector to follow (Default value = None, the norm over k != 0)
    t_min, t_max : float
        fit window (Default value = None, the whole trajectory)
    """
    times = np.array([s.time for s in states])
    if key is None:
        amps = np.array([s.norm(exclude_zero=True) for s in states])
    else:
        amps = np.array([np.linalg.norm(s[key]) for s in states])
    mask = np.ones(len(times), dtype=bool)
    if t_min is not None:
        mask &= times >= t_min
    if t_max is not None:
        mask &= times <= t_max
    if mask.sum() < 2 or np.any(amps[mask] <= 0):
        raise DegenerateInputError("a decay rate needs two or more nonzero amplitudes")
    slope, _ = np.polyfit(times[mask], np.log(amps[mask]), 1)
    return float(slope)


# text formats

def _state_rows(state, prefix=()):
    return [list(prefix) + list(key) + [float(x) for v in value for x in (v.real, v.imag)]
            for key, value in state.coefficients.items()]


def _component_columns():
    return [f"{c}_{part}" for c in COMPONENTS for part in ('re', 'im')]


def _read(path, schema, delimiter):
    with open(path) as fh:
        name, comments, columns, rows = read_table(fh, delimiter)
    if name != schema:
        raise ValueError(f"{path} holds a {name} table, expected {schema}")
    return comments, columns, rows


def write_state(state, path):
    """Write a state: one line per wave vector, k1 k2 k3 then the real and
    imaginary parts of the five components, separated by spaces."""
    with open(path, 'w') as fh:
        write_table(fh, 'state', ['k1', 'k2', 'k3'] + _component_columns(), _state_rows(state),
                    delimiter=' ', comments=[f"time {float(state.time)!r}"])


def read_state(path):
    """Read a file written by :func:`write_state`.

    A file without a time line starts at t = 0; the state is symmetrized.
    """
    comments, columns, rows = _read(path, 'state', ' ')
    time = 0.
    for line in comments:
        if line.startswith('time '):
            time = float(line.split()[1])
    if len(columns) != 13 or any(len(row) != 13 for row in rows):
        raise ValueError(f"{path}: a state record has 13 fields")
    coeffs = {tuple(int(x) for x in row[:3]): np.array(row[3::2], dtype=float) + 1j * np.array(row[4::2])
              for row in rows}
    return FieldState(coeffs, time).symmetrize()


def series_rows(states):
    return [row for s in states for row in _state_rows(s, prefix=(float(s.time),))]


SERIES_COLUMNS = ['time', 'k1', 'k2', 'k3'] + _component_columns()


def write_series(states, path):
    """CSV time series: time, k1, k2, k3 and ten reals per row."""
    with open(path, 'w') as fh:
        write_table(fh, 'series', SERIES_COLUMNS, series_rows(states))


def read_series(path):
    """Inverse of :func:`write_series`, a list of FieldState."""
    _, _, rows = _read(path, 'series', ',')
    grouped = {}
    for row in rows:
        key = tuple(int(x) for x in row[1:4])
        grouped.setdefault(float(row[0]), {})[key] = (np.array(row[4::2], dtype=float) +
                                                      1j * np.array(row[5::2]))
    return [FieldState(coeffs, t) for t, coeffs in grouped.items()]


def write_snapshot(snapshot, path):
    """CSV grid dump: x1, x2, x3, rho, u1, u2, u3, T."""
    x = snapshot.coordinates
    grid = np.stack(np.meshgrid(x, x, x, indexing='ij'), axis=0).reshape(3, -1)
    data = np.concatenate([grid, snapshot.fields.reshape(5, -1)], axis=0).T
    with open(path, 'w') as fh:
        write_table(fh, 'snapshot', ['x1', 'x2', 'x3', 'rho', 'u1', 'u2', 'u3', 'T'],
                    data.tolist(), comments=[f"time {float(snapshot.time)!r}"])
