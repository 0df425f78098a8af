"""Command line interface.

    pybgk <command> [options]

Commands: modes, kcrit, coeffs, generator, simulate, compare, validate and
plot. Options may also come from an INI file given with --config: the
[pybgk] section applies to every command, a section named after the
command overrides it, and flags override both.
"""
import argparse
import configparser
import json
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import numpy as np
from .closure import (Model, BeyondPolicy, SQRT_2_3, LADDER_KAPPA, coefficients_at, generator,
                      classical_expansion_check, aligned_classical, esbgk_burnett_matrix,
                      to_physical_variables, transport_coefficients, det_H, cached_modes)
from .hydrosim import (SimConfig, FieldState, read_state, simulate, compare_models, series_rows,
                       to_physical, write_snapshot, SERIES_COLUMNS)
from .modes import (Label, critical_wavenumber, find_modes, sweep_modes, taylor_seed, trace_branch,
                    default_contour)
from .oracle import (quadrature_sigma, quadrature_root, eigenvector_residual, projector_checks,
                     invariance_residual, hydro_vs_kinetic, attraction_rate)
from .spectral import Params, WaveVector, sigma_closed, sigma_det
from .helper.errors import SpectralError, NonConvergence
from .helper.helpers import set_logging, write_table, SCHEMA_VERSION
from .version import __version__


_LOGGER = logging.getLogger(__name__)
_LOGGER.addHandler(logging.NullHandler())

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_ERROR = 2
FORMATS = ('csv', 'json')
ALL_CHECKS = tuple(range(1, 13))


def _floats(text):
    return tuple(float(x) for x in str(text).split(','))


def _ints(text):
    return tuple(int(x) for x in str(text).split(','))


def _words(text):
    return tuple(x.strip() for x in str(text).split(',') if x.strip())


def _perturb(text):
    out = {}
    for item in _words(text):
        name, _, value = item.partition('=')
        if name not in ('c1', 'c2', 'c3', 'c4', 'c5', 'c6') or not value:
            raise ValueError(f"perturbation must read cj=offset, got {item!r}")
        out[name] = float(value)
    return out


def _optional_int(text):
    return None if str(text).lower() in ('', 'none') else int(text)


# field -> parser of its text form
_CONVERTERS = {
    'tau': float, 'k_min': float, 'k_max': float, 'k_n': int, 'kvec': _floats,
    'model': Model, 'beyond_critical': BeyondPolicy, 'out': str, 'format': str,
    'seed': int, 'jobs': _optional_int, 'K_max': int, 't_end': float, 'dt_output': float,
    'state': str, 'models': _words, 'checks': _ints, 'perturb': _perturb, 'kind': str,
    'sigma_points': int, 'deth_points': int, 'snapshot_every': _optional_int,
    'snapshot_dir': str, 'n_grid': int,
}


@dataclass(frozen=True)
class RunConfig:
    """Everything a command needs, merged from defaults, file and flags."""
    command: str
    tau: float = 0.25
    k_min: float = 0.
    k_max: float = 1.
    k_n: int = 20
    kvec: tuple = None
    model: Model = Model.EXACT
    beyond_critical: BeyondPolicy = BeyondPolicy.REJECT
    out: str = None
    format: str = 'csv'
    seed: int = 0
    jobs: int = None
    K_max: int = 1
    t_end: float = 1.
    dt_output: float = 0.1
    state: str = None
    models: tuple = ('exact', 'euler', 'ns', 'burnett')
    checks: tuple = ALL_CHECKS
    perturb: dict = field(default=None, hash=False)
    kind: str = 'branches'
    sigma_points: int = 200
    deth_points: int = 500
    snapshot_every: int = None
    snapshot_dir: str = '.'
    n_grid: int = 16

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if not self.tau > 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if self.k_min < 0:
            raise ValueError(f"k_min must be non-negative, got {self.k_min}")
        if self.k_max < self.k_min:
            raise ValueError("k_max must not be below k_min")
        if self.k_n < 1:
            raise ValueError(f"k_n must be at least 1, got {self.k_n}")
        if self.format not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}, got {self.format!r}")
        if self.kvec is not None and len(self.kvec) != 3:
            raise ValueError("kvec needs three components x,y,z")
        if self.sigma_points < 1 or self.deth_points < 2:
            raise ValueError("validation needs at least 1 spectral point and 2 det H points")
        if self.snapshot_every is not None and self.snapshot_every < 1:
            raise ValueError(f"snapshot_every must be at least 1, got {self.snapshot_every}")
        unknown = set(self.checks) - set(ALL_CHECKS)
        if unknown:
            raise ValueError(f"unknown checks {sorted(unknown)}")

    @property
    def ks(self):
        """Sweep wave numbers; k = 0 carries no modes and is skipped."""
        ks = np.linspace(self.k_min, self.k_max, self.k_n)
        return ks[ks > 0]

    @property
    def wave_vector(self):
        return WaveVector(*(self.kvec or (1., 0., 0.)))


def load_config(command, flags, path=None):
    """Merge defaults, the config file and command line flags.

    Parameters
    ----------
    command : str
        sub-command name
    flags : dict
        options given on the command line, as text
    path : str
        INI file (Default value = None)

    Returns
    -------
    _ : RunConfig
    """
    values = {}
    if path is not None:
        parser = configparser.ConfigParser()
        parser.optionxform = str
        if not parser.read(path):
            raise OSError(f"cannot read config file {path}")
        for section in ('pybgk', command):
            if parser.has_section(section):
                values.update({key.replace('-', '_'): text for key, text in parser.items(section)})
    values.update(flags)
    unknown = set(values) - set(_CONVERTERS)
    if unknown:
        raise ValueError(f"unknown options {sorted(unknown)}")
    return RunConfig(command, **{key: _CONVERTERS[key](text) for key, text in values.items()})


@dataclass
class Table:
    """Named table written as versioned CSV or JSON."""
    name: str
    columns: list
    rows: list
    meta: dict = field(default_factory=dict)

    def write(self, fh, fmt='csv'):
        if fmt == 'csv':
            comments = [f"{key} {value}" for key, value in self.meta.items()]
            write_table(fh, self.name, self.columns, self.rows, comments=comments)
            return
        doc = {'schema': f"pybgk-{self.name} v{SCHEMA_VERSION}", 'meta': self.meta,
               'columns': self.columns, 'rows': [[_json_value(x) for x in row] for row in self.rows]}
        json.dump(doc, fh, indent=1)
        fh.write('\n')


def _json_value(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x) if math.isfinite(x) else None
    if isinstance(x, dict):
        return {str(k): _json_value(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_json_value(v) for v in x]
    return x


def _emit(cfg, table):
    if cfg.out in (None, '-'):
        table.write(sys.stdout, cfg.format)
    else:
        with open(cfg.out, 'w', newline='') as fh:
            table.write(fh, cfg.format)
        _LOGGER.info("wrote %s table of %d rows to %s", table.name, len(table.rows), cfg.out)


def _sweep(func, items, jobs):
    """func over items in a thread pool, results in input order."""
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(func, items))


def _parts(lam):
    return (math.nan, math.nan) if lam is None else (lam.real, lam.imag)


def modes_table(cfg):
    def point(k):
        try:
            return find_modes(Params(float(k), cfg.tau))
        except NonConvergence as err:
            raise NonConvergence(f"mode search failed at k = {k}: {err}",
                                 last_k=err.last_k, last_value=err.last_value) from err

    rows = []
    for k, modes in zip(cfg.ks, _sweep(point, cfg.ks, cfg.jobs)):
        alive = modes.alive
        rows.append([float(k), *_parts(modes.lambda_diff), *_parts(modes.lambda_shear),
                     *_parts(modes.lambda_ac), *_parts(modes.lambda_ac_conj),
                     int(alive[Label.DIFFUSION]), int(alive[Label.SHEAR]),
                     int(alive[Label.ACOUSTIC_PLUS])])
    columns = ['k', 'diff_re', 'diff_im', 'shear_re', 'shear_im', 'ac_re', 'ac_im',
               'acm_re', 'acm_im', 'alive_diff', 'alive_shear', 'alive_ac']
    return Table('modes', columns, rows, {'tau': repr(cfg.tau)})


def run_modes(cfg):
    """Eigenvalue branches over the k sweep."""
    _emit(cfg, modes_table(cfg))
    return EXIT_OK


def kcrit_table(cfg):
    rows = []
    for label in (Label.DIFFUSION, Label.SHEAR, Label.ACOUSTIC_PLUS):
        for method in ('limit', 'bisect'):
            k = critical_wavenumber(label, cfg.tau, method)
            rows.append([label.value, method, k, k * cfg.tau])
    return Table('kcrit', ['label', 'method', 'k_crit', 'kappa_crit'], rows, {'tau': repr(cfg.tau)})


def run_kcrit(cfg):
    """Critical wave numbers of the three branches."""
    _emit(cfg, kcrit_table(cfg))
    return EXIT_OK


def leading_order(k, tau):
    """Leading small-k terms of c1 ... c6."""
    return [-k, -4. / 3. * tau * k ** 2, -SQRT_2_3 * k, -SQRT_2_3 * tau ** 3 * k ** 4,
            -SQRT_2_3 * k, -5. / 3. * tau * k ** 2]


def coeffs_table(cfg):
    results = _sweep(lambda k: coefficients_at(float(k), cfg.tau, cfg.beyond_critical)[1],
                     cfg.ks, cfg.jobs)
    rows = []
    for k, co in zip(cfg.ks, results):
        if co.contamination > 1e-10:
            _LOGGER.warning("imaginary contamination %.3g at k = %g", co.contamination, k)
        rows.append([float(k), *co.values, co.lambda_shear, co.det_h, *leading_order(float(k), cfg.tau)])
    columns = (['k'] + [f"c{j}" for j in range(1, 7)] + ['lambda_shear', 'det_h'] +
               [f"ref_c{j}" for j in range(1, 7)])
    return Table('coeffs', columns, rows, {'tau': repr(cfg.tau)})


def run_coeffs(cfg):
    """Transport coefficients with their leading-order references."""
    _emit(cfg, coeffs_table(cfg))
    return EXIT_OK


def run_generator(cfg):
    """The 5x5 generator of one wave vector, entry by entry."""
    gen = generator(cfg.wave_vector, cfg.tau, cfg.model, cfg.beyond_critical)
    rows = [[i, j, gen.matrix[i, j].real, gen.matrix[i, j].imag] for i in range(5) for j in range(5)]
    meta = {'model': cfg.model.value, 'tau': repr(cfg.tau), 'variables': gen.variables,
            'kvec': ','.join(repr(x) for x in gen.kvec.array)}
    _emit(cfg, Table('generator', ['row', 'col', 're', 'im'], rows, meta))
    return EXIT_OK


def _sim_config(cfg, model=None):
    return SimConfig(cfg.tau, cfg.K_max, model or cfg.model, cfg.beyond_critical,
                     cfg.dt_output, cfg.t_end)


def initial_state(cfg):
    """The state file of the configuration, or a density wave of amplitude
    one along kvec."""
    if cfg.state:
        return read_state(cfg.state)
    state = FieldState.zeros(cfg.K_max)
    key = cfg.wave_vector.key
    if key not in state.coefficients:
        raise ValueError(f"wave vector {key} is not on the lattice of K_max = {cfg.K_max}")
    state.coefficients[key][0] = 0.5
    return state.symmetrize()


def run_simulate(cfg):
    """Time series of the Fourier coefficients, with optional grid snapshots."""
    states = simulate(initial_state(cfg), _sim_config(cfg), cfg.jobs)
    if cfg.snapshot_every:
        os.makedirs(cfg.snapshot_dir, exist_ok=True)
        for index in range(0, len(states), cfg.snapshot_every):
            path = os.path.join(cfg.snapshot_dir, f"snapshot_{index:04d}.csv")
            write_snapshot(to_physical(states[index], cfg.n_grid), path)
            _LOGGER.debug("wrote %s", path)
    meta = {'model': cfg.model.value, 'tau': repr(cfg.tau)}
    _emit(cfg, Table('series', SERIES_COLUMNS, series_rows(states), meta))
    return EXIT_OK


def run_compare(cfg):
    """L2 gaps between the trajectories of several models."""
    report = compare_models(initial_state(cfg), _sim_config(cfg), cfg.models, cfg.jobs)
    pairs = list(report.gaps)
    rows = [[float(t)] + [float(report.gaps[p][i]) for p in pairs] for i, t in enumerate(report.times)]
    _emit(cfg, Table('compare', ['time'] + [f"{a}-{b}" for a, b in pairs], rows,
                     {'tau': repr(cfg.tau)}))
    return EXIT_OK


def run_plot(cfg):
    """Render branches, coefficients, det H or the argument of Sigma to --out."""
    import matplotlib.pyplot as plt
    from .helper.visualization import branchplot, coefficientplot, dethplot, argumentplot
    if cfg.out in (None, '-'):
        raise ValueError("plot needs --out PATH")
    fig, ax = plt.subplots()
    if cfg.kind == 'branches':
        curves = [trace_branch(label, cfg.tau, cfg.k_max, (cfg.k_max - cfg.k_min) / cfg.k_n)
                  for label in (Label.DIFFUSION, Label.SHEAR, Label.ACOUSTIC_PLUS)]
        branchplot(curves, ax=ax)
    elif cfg.kind in ('coeffs', 'deth'):
        table = coeffs_table(cfg)
        data = np.array(table.rows, dtype=float)
        if cfg.kind == 'coeffs':
            coefficientplot(data[:, 0], data[:, 1:7], references=data[:, 9:15], ax=ax)
        else:
            dethplot(data[:, 0], data[:, 8], ax=ax)
    elif cfg.kind == 'argument':
        params = Params(cfg.wave_vector.norm, cfg.tau)
        argumentplot(lambda lam: sigma_closed(lam, params), default_contour(params, 0.05 / cfg.tau),
                     n=cfg.k_n * 5, ax=ax)
    else:
        raise ValueError(f"unknown plot kind {cfg.kind!r}")
    fig.savefig(cfg.out)
    plt.close(fig)
    return EXIT_OK


# validation suite

@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    margin: float
    values: dict = field(default_factory=dict)
    error: str = None


_CHECKS = {}


def _check(number, name):
    def register(func):
        _CHECKS[number] = (name, func)
        return func
    return register


@_check(1, 'critical wave numbers')
def check_critical(cfg, rng):
    values, margins = {}, []
    for tau in (0.25, 0.5, 1.):
        for label, target, tol, method in ((Label.SHEAR, math.sqrt(math.pi / 2), 1e-6, 'limit'),
                                           (Label.SHEAR, math.sqrt(math.pi / 2), 1e-4, 'bisect'),
                                           (Label.DIFFUSION, 1.3560, 5e-4, 'limit'),
                                           (Label.ACOUSTIC_PLUS, 1.3118, 5e-4, 'limit')):
            kappa = critical_wavenumber(label, tau, method) * tau
            values[f"{label.value}/{method}/tau={tau}"] = kappa
            margins.append(tol - abs(kappa - target))
    return min(margins), values


@_check(2, 'small-k mode expansions')
def check_expansions(cfg, rng):
    tau, ks = 0.25, (0.08, 0.04, 0.02)
    orders = {Label.DIFFUSION: 6, Label.SHEAR: 6, Label.ACOUSTIC_PLUS: 5}
    values, margins = {}, []
    all_modes = [find_modes(Params(k, tau)) for k in ks]
    for label, p in orders.items():
        ratios = [abs(m.value(label) - taylor_seed(label, k, tau)) / k ** p for k, m in zip(ks, all_modes)]
        values[label.value] = ratios
        # non-increasing under halving, up to 25 percent
        margins += [(1.25 * big - small) / big for big, small in zip(ratios, ratios[1:])]
    return min(margins), values


@_check(3, 'spectral function forms')
def check_sigma_forms(cfg, rng):
    n_points = cfg.sigma_points
    tau, k = 0.5, 0.7
    params = Params(k, tau)
    worst = 0.
    for _ in range(n_points):
        # tau lambda + 1 with real part in [0.4, 1.5] keeps zeta resolved
        a = complex(rng.uniform(0.4, 1.5), rng.uniform(-1., 1.))
        lam = (a - 1.) / tau
        s1, s2 = sigma_closed(lam, params), sigma_det(lam, params)
        s3 = quadrature_sigma(lam, params)
        scale = max(abs(s1), abs(s2), abs(s3))
        worst = max(worst, abs(s1 - s2) / scale, abs(s1 - s3) / scale)
    return 1e-8 - worst, {'worst_relative_gap': worst, 'points': n_points}


@_check(4, 'transport coefficient expansions')
def check_taylor(cfg, rng):
    tau = 0.25
    terms = classical_expansion_check(Params(LADDER_KAPPA / tau, tau), perturb=cfg.perturb)
    values = {f"{t.name}/k^{t.power}": {'extracted': t.extracted, 'target': t.target,
                                        'published': t.published, 'rel_error': t.rel_error}
              for t in terms}
    return min(1e-3 - t.rel_error for t in terms), values


@_check(5, 'realness of the coefficients')
def check_realness(cfg, rng):
    worst = 0.
    for tau in (0.25, 0.5, 1.):
        for kappa in (0.05, 0.3, 0.7, 1.1):
            co = transport_coefficients(cached_modes(kappa / tau, tau))
            worst = max(worst, co.contamination)
    return 1e-10 - worst, {'max_contamination': worst}


@_check(6, 'det H without zeros')
def check_det_h(cfg, rng):
    tau = 0.25
    k_crit = Params(0., tau).k_crit_min
    ks = np.linspace(0.01, k_crit - 0.01, cfg.deth_points)
    dets = np.array([det_H(modes) for modes in sweep_modes(ks, tau)])
    sign = np.sign(dets[0])
    return float(np.min(sign * dets)), {'min_abs': float(np.min(np.abs(dets))),
                                        'max_abs': float(np.max(np.abs(dets)))}


@_check(7, 'quadrature eigenvalues and eigenvectors')
def check_oracle_modes(cfg, rng):
    params = Params(0.7, 0.5)
    modes = find_modes(params)
    gaps = {}
    for label, factor in ((Label.DIFFUSION, 'longitudinal'), (Label.ACOUSTIC_PLUS, 'longitudinal'),
                          (Label.SHEAR, 'shear')):
        lam = modes.value(label)
        gaps[label.value] = abs(quadrature_root(lam, params, factor) - lam)
    residual = eigenvector_residual(modes)
    values = dict(gaps, eigenvector_residual=residual)
    return min(1e-8 - max(gaps.values()), 1e-7 - residual), values


@_check(8, 'Riesz projector')
def check_projector(cfg, rng):
    modes = find_modes(Params(0.7, 0.5))
    report = projector_checks(modes, seed=cfg.seed)
    values = {'idempotency': report.idempotency, 'max_angle': report.max_angle, 'rank': report.rank}
    return min(1e-8 - report.idempotency, 1e-6 - report.max_angle), values


@_check(9, 'invariance equation')
def check_invariance(cfg, rng):
    modes = find_modes(Params(0.7, 0.5))
    res = {name: invariance_residual(modes, closure=name) for name in ('exact', 'euler', 'ns')}
    margin = min(1e-7 - res['exact'], res['euler'] - res['exact'], res['ns'] - res['exact'])
    return margin, res


@_check(10, 'classical limits')
def check_classical(cfg, rng):
    k, tau = 0.37, 0.8
    i = 1j
    s = SQRT_2_3
    expected = {
        Model.EULER: {(0, 1): -i * k, (1, 0): -i * k, (1, 4): -i * s * k, (4, 1): -i * s * k},
    }
    viscous = {(1, 1): -4. / 3. * tau * k ** 2, (2, 2): -tau * k ** 2, (3, 3): -tau * k ** 2,
               (4, 4): -5. / 3. * tau * k ** 2}
    expected[Model.NAVIER_STOKES] = {**expected[Model.EULER], **viscous}
    burnett = dict(expected[Model.NAVIER_STOKES])
    burnett[(1, 0)] = -i * k - 4. / 3. * i * tau ** 2 * k ** 3
    burnett[(4, 1)] = -i * s * k - 1. / 3. * s * i * tau ** 2 * k ** 3
    expected[Model.BURNETT] = burnett
    worst = 0.
    for model, entries in expected.items():
        want = np.zeros((5, 5), dtype=complex)
        for (r, c), v in entries.items():
            want[r, c] = v
        worst = max(worst, float(np.max(np.abs(aligned_classical(model, k, tau) - want))))
    kvec = WaveVector(0.3, -0.2, 0.5)
    es = esbgk_burnett_matrix(kvec).matrix
    ours = to_physical_variables(generator(kvec, 1., Model.BURNETT)).matrix
    es_gap = float(np.max(np.abs(es - ours)))
    return 1e-12 - max(worst, es_gap), {'display_gap': worst, 'esbgk_gap': es_gap}


@_check(11, 'kinetic cross-check')
def check_kinetic(cfg, rng):
    tau = 0.5
    modes = find_modes(Params(0.7, tau))
    on = hydro_vs_kinetic(modes, np.linspace(0., 5. * tau, 11), seed=cfg.seed)
    gap = float(np.max(on.gap))
    off = hydro_vs_kinetic(modes, np.linspace(0., 10. * tau, 41), project=False, seed=cfg.seed)
    rate = attraction_rate(off, 2. * tau)
    need = 0.9 * (1. / tau + float(np.max(modes.eigenvalues.real)))
    return min(1e-6 - gap, rate - need), {'projected_gap': gap, 'attraction_rate': rate,
                                          'required_rate': need}


@_check(12, 'scaling collapse')
def check_scaling(cfg, rng):
    kappa = 0.5
    scaled = []
    for tau in (1., 0.5, 0.25):
        k = kappa / tau
        c = transport_coefficients(cached_modes(k, tau)).values
        scaled.append(np.array([c[0] / k, tau * c[1], c[2] / k, tau * c[3], c[4] / k, tau * c[5]]))
    worst = max(float(np.max(np.abs(x - scaled[0]) / (1. + np.abs(scaled[0])))) for x in scaled[1:])
    return 1e-10 - worst, {'worst_gap': worst}


def validate(cfg):
    """Run the selected checks.

    Returns
    -------
    _ : list of CheckResult
        a check that raises is reported with ``error`` set and fails
    """
    results = []
    for number in cfg.checks:
        name, func = _CHECKS[number]
        rng = np.random.default_rng([cfg.seed, number])
        _LOGGER.info("check %d: %s", number, name)
        try:
            margin, values = func(cfg, rng)
        except (SpectralError, ArithmeticError, ValueError, np.linalg.LinAlgError) as err:
            _LOGGER.error("check %d raised %s", number, err)
            results.append(CheckResult(number, name, False, math.nan, error=f"{type(err).__name__}: {err}"))
            continue
        results.append(CheckResult(number, name, bool(margin >= 0), float(margin), values))
    return results


def _check_record(result):
    record = {'number': result.number, 'name': result.name, 'passed': result.passed,
              'margin': result.margin, 'values': result.values}
    if result.error:
        record['error'] = result.error
    return _json_value(record)


def run_validate(cfg):
    """Validation suite; exit 1 on a failed check, 2 if a check raised."""
    results = validate(cfg)
    report = {'schema': f"pybgk-validate v{SCHEMA_VERSION}", 'version': __version__,
              'seed': cfg.seed, 'perturb': cfg.perturb or {},
              'passed': all(r.passed for r in results),
              'checks': [_check_record(r) for r in results]}
    if cfg.out in (None, '-'):
        json.dump(report, sys.stdout, indent=1)
        sys.stdout.write('\n')
    else:
        with open(cfg.out, 'w') as fh:
            json.dump(report, fh, indent=1)
            fh.write('\n')
    for r in results:
        _LOGGER.info("check %2d %-40s %s margin %s", r.number, r.name,
                     'pass' if r.passed else 'FAIL', r.margin)
    if any(r.error for r in results):
        return EXIT_ERROR
    return EXIT_OK if report['passed'] else EXIT_FAILED


COMMANDS = {
    'modes': run_modes,
    'kcrit': run_kcrit,
    'coeffs': run_coeffs,
    'generator': run_generator,
    'simulate': run_simulate,
    'compare': run_compare,
    'validate': run_validate,
    'plot': run_plot,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    add = common.add_argument
    # defaults are suppressed so that absent flags do not shadow the config file
    add('--config', help="INI file with a [pybgk] section and per-command sections")
    add('--tau', help="relaxation time")
    add('--k-min', dest='k_min', help="first wave number of a sweep")
    add('--k-max', dest='k_max', help="last wave number of a sweep")
    add('--k-n', dest='k_n', help="number of sweep points")
    add('--kvec', help="wave vector x,y,z")
    add('--model', help="exact, euler, ns or burnett")
    add('--beyond-critical', dest='beyond_critical', help="reject or pin")
    add('--out', help="output file, - for stdout")
    add('--format', help="csv or json")
    add('--seed', help="seed of the randomized checks")
    add('--jobs', help="worker threads")
    add('--K-max', dest='K_max', help="radius of the simulation lattice")
    add('--t-end', dest='t_end', help="last output time")
    add('--dt-output', dest='dt_output', help="output interval")
    add('--state', help="initial state file")
    add('--models', help="models to compare, comma separated")
    add('--checks', help="validation checks to run, comma separated numbers")
    add('--perturb', help="offsets of transport coefficients, e.g. c2=1e-3")
    add('--kind', help="plot kind: branches, coeffs, deth or argument")
    add('--sigma-points', dest='sigma_points', help="random strip points of validation check 3")
    add('--deth-points', dest='deth_points', help="wave numbers of validation check 6")
    add('--snapshot-every', dest='snapshot_every', help="write a grid snapshot every N output times")
    add('--snapshot-dir', dest='snapshot_dir', help="directory of the snapshot files")
    add('--n-grid', dest='n_grid', help="grid points per axis of the snapshots")
    add('-v', '--verbose', action='count', default=0, help="-v info, -vv debug")
    parser = argparse.ArgumentParser(prog='pybgk', description="Exact hydrodynamics of the linear BGK equation")
    parser.add_argument('--version', action='version', version=f"pybgk {__version__}")
    sub = parser.add_subparsers(dest='command', required=True)
    for name, func in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=func.__doc__.splitlines()[0])
    return parser


def main(argv=None):
    """Entry point of the pybgk command; returns the exit code."""
    args = vars(build_parser().parse_args(argv))
    command = args.pop('command')
    verbose = args.pop('verbose', 0)
    if verbose:
        set_logging(logging.DEBUG if verbose > 1 else logging.INFO)
    path = args.pop('config', None)
    try:
        cfg = load_config(command, args, path)
        return COMMANDS[cfg.command](cfg)
    except (SpectralError, ValueError, OSError) as err:
        _LOGGER.error("%s failed: %s", command, err)
        print(f"pybgk {command}: error: {err}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == '__main__':
    sys.exit(main())
