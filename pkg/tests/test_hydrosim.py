from unittest import TestCase
import os
import shutil
import tempfile
import numpy as np
from numpy.testing import assert_allclose
import scipy.linalg
from pybgk.closure import Model, BeyondPolicy, basis_H
from pybgk.spectral import WaveVector, rotation_frame
from pybgk.hydrosim import (SimConfig, FieldState, lattice, assemble, Propagator, evolve, trajectory,
                            simulate, to_physical, kernel_coefficients, compare_models, decay_rate,
                            write_state, read_state, write_series, read_series, write_snapshot)
from pybgk.helper.errors import BeyondCritical, DegenerateInputError


def _wave_state(K_max, amplitude=0.5, key=(1, 0, 0)):
    state = FieldState.zeros(K_max)
    state.coefficients[key][0] = amplitude
    return state.symmetrize()


class TestLattice(TestCase):

    def test_sizes(self):
        self.assertEqual(lattice(0), [(0, 0, 0)])
        self.assertEqual(len(lattice(1)), 7)
        self.assertEqual(len(lattice(2)), 33)
        self.assertEqual(lattice(1), sorted(lattice(1)))
        with self.assertRaises(ValueError):
            lattice(-1)
        with self.assertRaises(ValueError):
            lattice(1.5)


class TestSimConfig(TestCase):

    def test_validation(self):
        with self.assertRaises(ValueError):
            SimConfig(0., 1)
        with self.assertRaises(ValueError):
            SimConfig(1., 1, dt_output=0.)
        with self.assertRaises(ValueError):
            SimConfig(1., 1, model='grad13')

    def test_times(self):
        assert_allclose(SimConfig(1., 1, dt_output=0.25, t_end=1.).times, [0., 0.25, 0.5, 0.75, 1.])

    def test_beyond_critical(self):
        with self.assertRaises(BeyondCritical):
            SimConfig(0.25, 6).check()
        self.assertIsNotNone(SimConfig(0.25, 6, beyond_critical='pin').check())
        self.assertIsNotNone(SimConfig(0.25, 6, model='ns').check())
        with self.assertRaises(BeyondCritical):
            assemble(SimConfig(0.25, 6))


class TestFieldState(TestCase):

    def setUp(self):
        rng = np.random.default_rng(3)
        coeffs = {key: rng.standard_normal(5) + 1j * rng.standard_normal(5) for key in lattice(2)}
        self.state = FieldState(coeffs).symmetrize()
        self.tmp = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def test_symmetrize(self):
        self.assertLess(self.state.hermitian_gap, 1e-15)
        self.assertEqual(self.state[(0, 0, 0)].imag.tolist(), [0.] * 5)
        partial = FieldState({(1, 0, 0): np.ones(5)})
        self.assertEqual(partial.hermitian_gap, np.inf)

    def test_keys(self):
        state = FieldState({WaveVector(1., 0., 0.): np.zeros(5), (0, 0, 0): np.zeros(5)})
        self.assertEqual(state.keys, [(0, 0, 0), (1, 0, 0)])
        with self.assertRaises(ValueError):
            FieldState({(0, 0, 0): np.zeros(4)})

    def test_physical_round_trip(self):
        snap = to_physical(self.state, 8)
        self.assertLess(snap.imag_rel, 1e-12)
        self.assertEqual(snap.fields.shape, (5, 8, 8, 8))
        back = FieldState.from_physical(snap.fields, 2)
        for key in self.state.keys:
            assert_allclose(back[key], self.state[key], atol=1e-12)
        with self.assertRaises(ValueError):
            FieldState.from_physical(snap.fields, 4)

    def test_state_file(self):
        path = os.path.join(self.tmp, 'state.txt')
        self.state.time = 0.5
        write_state(self.state, path)
        with open(path) as fh:
            self.assertTrue(fh.readline().startswith('# pybgk-schema: state v1'))
        back = read_state(path)
        self.assertEqual(back.time, 0.5)
        again = os.path.join(self.tmp, 'again.txt')
        write_state(back, again)
        with open(path) as a, open(again) as b:
            self.assertEqual(a.read(), b.read())

    def test_series_file(self):
        path = os.path.join(self.tmp, 'series.csv')
        states = [self.state, FieldState(self.state.coefficients, 1.5)]
        write_series(states, path)
        back = read_series(path)
        self.assertEqual([s.time for s in back], [0., 1.5])
        assert_allclose(back[1][(1, 1, 0)], self.state[(1, 1, 0)])
        with self.assertRaises(ValueError):
            read_state(path)

    def test_snapshot_file(self):
        path = os.path.join(self.tmp, 'snapshot.csv')
        write_snapshot(to_physical(self.state, 6), path)
        with open(path) as fh:
            lines = fh.read().splitlines()
        self.assertEqual(lines[-1].count(','), 7)
        self.assertEqual(len([line for line in lines if not line.startswith('#')]), 6 ** 3)


class TestAssembly(TestCase):

    def test_zero_lattice(self):
        gens = assemble(SimConfig(0.25, 0))
        self.assertEqual(list(gens), [(0, 0, 0)])
        assert_allclose(gens[(0, 0, 0)].matrix, np.zeros((5, 5)))

    def test_conjugate_pairs(self):
        gens = assemble(SimConfig(0.5, 1, model='ns'), jobs=2)
        self.assertEqual(list(gens), lattice(1))
        for key, gen in gens.items():
            minus = gens[(-key[0], -key[1], -key[2])]
            assert_allclose(minus.matrix, gen.matrix.conj())


class TestEvolution(TestCase):

    def setUp(self):
        self.config = SimConfig(0.5, 1, t_end=1., dt_output=0.25)
        self.gens = assemble(self.config)

    def test_propagator_matches_expm(self):
        gen = self.gens[(0, 1, 0)]
        prop = Propagator(gen)
        self.assertTrue(prop.diagonalized)
        assert_allclose(prop(0.7), scipy.linalg.expm(0.7 * gen.matrix), atol=1e-10)

    def test_single_mode(self):
        key = (1, 0, 0)
        modes = self.gens[key].modes
        column = basis_H(modes, rotation_frame(WaveVector(*key))).entries[:, 0]
        state = FieldState.zeros(1)
        state.coefficients[key] = column
        state = state.symmetrize()
        column = state[key]
        out = evolve(state, self.gens, 0.3)
        assert_allclose(out[key], np.exp(modes.lambda_diff * 0.3) * column, atol=1e-12)
        self.assertAlmostEqual(out.time, 0.3)
        self.assertLess(out.hermitian_gap, 1e-14)
        states = trajectory(state, self.gens, np.linspace(0., 1., 6))
        self.assertAlmostEqual(decay_rate(states, key), modes.lambda_diff.real, places=8)

    def test_continuity_equation(self):
        rng = np.random.default_rng(8)
        coeffs = {key: rng.standard_normal(5) + 1j * rng.standard_normal(5) for key in lattice(1)}
        state = FieldState(coeffs).symmetrize()
        t, dt = 0.4, 1e-4
        ahead, behind = evolve(state, self.gens, t + dt), evolve(state, self.gens, t - dt)
        now = evolve(state, self.gens, t)
        for key in state.keys:
            rate = (ahead[key][0] - behind[key][0]) / (2. * dt)
            self.assertAlmostEqual(rate, -1j * np.dot(key, now[key][1:4]), delta=1e-7)

    def test_slowest_mode_sets_the_decay(self):
        key = (1, 0, 0)
        gen = self.gens[key]
        values = gen.modes.eigenvalues
        slowest = int(np.argmax(values.real))
        column = basis_H(gen.modes, rotation_frame(WaveVector(*key))).entries[:, slowest]
        state = FieldState.zeros(1)
        state.coefficients[key] = column
        tau = self.config.tau
        states = trajectory(state.symmetrize(), self.gens, np.linspace(2. * tau, 10. * tau, 9))
        rate = decay_rate(states, key, t_min=2. * tau, t_max=10. * tau)
        self.assertAlmostEqual(rate, float(np.max(values.real)), delta=1e-6)

    def test_fields_stay_real(self):
        rng = np.random.default_rng(9)
        coeffs = {key: rng.standard_normal(5) + 1j * rng.standard_normal(5) for key in lattice(1)}
        state = FieldState(coeffs).symmetrize()
        for s in trajectory(state, self.gens, np.linspace(0., 2., 5)):
            self.assertLess(s.hermitian_gap, 1e-12)
            self.assertLess(to_physical(s, 4).imag_rel, 1e-12)

    def test_semigroup(self):
        state = _wave_state(1)
        once = evolve(state, self.gens, 0.5)
        twice = evolve(evolve(state, self.gens, 0.2), self.gens, 0.3)
        for key in state.keys:
            assert_allclose(twice[key], once[key], atol=1e-10)

    def test_mean_is_conserved(self):
        state = _wave_state(1)
        state.coefficients[(0, 0, 0)][:] = [1., 0.1, 0., 0., 0.2]
        for s in simulate(state, self.config):
            assert_allclose(s[(0, 0, 0)], [1., 0.1, 0., 0., 0.2])

    def test_missing_generator(self):
        with self.assertRaises(ValueError):
            evolve(_wave_state(2, key=(2, 0, 0)), self.gens, 0.1)

    def test_decay_rate_needs_points(self):
        with self.assertRaises(DegenerateInputError):
            decay_rate([_wave_state(1)])


class TestKernels(TestCase):

    def test_small_tau(self):
        tau = 0.05
        table = kernel_coefficients(SimConfig(tau, 1))
        self.assertEqual(sorted({k2 for _, k2 in table}), [1])
        self.assertAlmostEqual(table[('1', 1)], -1., delta=1e-2)
        self.assertAlmostEqual(table[('2', 1)], tau / 3., delta=1e-3)
        self.assertAlmostEqual(table[('3', 1)], -1., delta=1e-2)
        self.assertAlmostEqual(table[('4', 1)], 0., delta=1e-3)
        self.assertAlmostEqual(table[('5', 1)], -2. / 3., delta=1e-2)
        self.assertAlmostEqual(table[('6', 1)], -5. / 3. * tau, delta=1e-3)
        self.assertAlmostEqual(table[('shear', 1)], -tau, delta=1e-3)
        with self.assertRaises(ValueError):
            kernel_coefficients(SimConfig(tau, 1, model=Model.EULER))


class TestCompareModels(TestCase):

    def test_identical_models(self):
        config = SimConfig(0.5, 1, t_end=1., dt_output=0.5)
        report = compare_models(_wave_state(1), config, ['ns', 'ns'])
        self.assertEqual(report.max_gap('ns', 'ns'), 0.)

    def test_navier_stokes_beats_euler(self):
        tau = 0.01
        config = SimConfig(tau, 1, beyond_critical=BeyondPolicy.REJECT, t_end=100., dt_output=10.)
        report = compare_models(_wave_state(1), config, ['exact', 'euler', 'ns'])
        self.assertEqual(len(report.gaps), 3)
        self.assertLess(report.max_gap('exact', 'ns'), report.max_gap('exact', 'euler'))
        with self.assertRaises(ValueError):
            compare_models(_wave_state(1), config, [])
