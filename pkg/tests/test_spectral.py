from unittest import TestCase
import math
import numpy as np
from numpy.testing import assert_allclose
from pybgk.complexfun import plasma_Z, dispersion_moments
from pybgk.spectral import (Params, WaveVector, rotation_frame, moment_matrix, green_matrix,
                            shifted_green, sigma_closed, sigma_det, shear_condition,
                            longitudinal_condition, longitudinal_bracket, green_entries,
                            SERIES_RADIUS, LONGITUDINAL)
from pybgk.helper.errors import DegenerateInputError, DomainError


class TestParams(TestCase):

    def test_validation(self):
        with self.assertRaises(DegenerateInputError):
            Params(0.5, 0.)
        with self.assertRaises(DegenerateInputError):
            Params(-1., 1.)

    def test_kappa_and_critical(self):
        p = Params(0.7, 0.5)
        self.assertAlmostEqual(p.kappa, 0.35)
        self.assertAlmostEqual(p.k_crit_min, math.sqrt(math.pi / 2) / 0.5)

    def test_strip(self):
        p = Params(0.7, 0.5)
        self.assertEqual(p.check_strip(-1.), -1. + 0j)
        with self.assertRaises(DomainError):
            p.check_strip(-2.)
        with self.assertRaises(DomainError):
            p.check_strip(-2.5 + 1j)
        self.assertAlmostEqual(p.zeta(-1.), 1j * 0.5 / 0.35)


class TestRotationFrame(TestCase):

    def test_first_column_is_the_direction(self):
        for k in ([0.3, -0.2, 0.5], [0., 0., 2.], [-1., 0., 0.], [-1., 1e-12, 0.]):
            kv = WaveVector.from_array(k)
            q = rotation_frame(kv).Q
            assert_allclose(q[:, 0], kv.array / kv.norm, atol=1e-12)
            assert_allclose(q.T @ q, np.eye(3), atol=1e-12)
            self.assertAlmostEqual(np.linalg.det(q), 1., places=12)

    def test_zero_vector(self):
        with self.assertRaises(DegenerateInputError):
            rotation_frame(WaveVector(0.))

    def test_wavevector(self):
        kv = WaveVector(1., -2., 3.)
        self.assertEqual((-kv).key, (-1, 2, -3))
        self.assertAlmostEqual(kv.norm, math.sqrt(14.))


class TestGreensMatrix(TestCase):

    def setUp(self):
        self.params = Params(0.7, 0.5)

    def test_gaussian_moments_give_identity(self):
        assert_allclose(moment_matrix([1., 0., 1., 0., 3.]), np.eye(5), atol=1e-15)

    def test_green_matrix_entries(self):
        zeta = 0.4 + 1.2j
        g = green_matrix(zeta, self.params).entries
        z = plasma_Z(zeta)
        self.assertAlmostEqual(g[0, 0], z)
        self.assertAlmostEqual(g[2, 2], z)
        self.assertAlmostEqual(g[0, 1], 1. + zeta * z)
        assert_allclose(g, g.T)
        with self.assertRaises(DomainError):
            green_matrix(0.4 - 1j, self.params)

    def test_series_and_closed_form_agree(self):
        params = Params(0.1, 1.)
        lam = 0.2
        self.assertGreaterEqual(abs(params.zeta(lam)), SERIES_RADIUS)
        series = shifted_green(lam, params)
        w = dispersion_moments(params.zeta(lam), 4)
        closed = moment_matrix(w / (1j * params.kappa)) - np.eye(5)
        assert_allclose(series, closed, rtol=1e-6, atol=1e-10)

    def test_derivative(self):
        lam, h = -0.3 + 0.4j, 1e-6
        d, dd = shifted_green(lam, self.params, derivative=True)
        numeric = (shifted_green(lam + h, self.params) - shifted_green(lam - h, self.params)) / (2 * h)
        assert_allclose(dd, numeric, rtol=1e-6, atol=1e-8)
        f, df = longitudinal_condition(lam, self.params, derivative=True)
        numeric = (longitudinal_condition(lam + h, self.params) -
                   longitudinal_condition(lam - h, self.params)) / (2 * h)
        self.assertLess(abs(df - numeric), 1e-6 * (1 + abs(df)))


class TestSpectralFunction(TestCase):

    def setUp(self):
        self.params = Params(0.7, 0.5)
        self.points = [-0.5 + 0.3j, 0.2 - 0.7j, -1.2 + 1.5j, 0.9 + 0.1j]

    def test_closed_and_determinant_forms_agree(self):
        for lam in self.points:
            a, b = sigma_closed(lam, self.params), sigma_det(lam, self.params)
            self.assertLess(abs(a - b), 1e-9 * max(abs(a), abs(b)))

    def test_forms_agree_on_random_points(self):
        rng = np.random.default_rng(11)
        tau = self.params.tau
        for _ in range(100):
            lam = (complex(rng.uniform(0.4, 1.5), rng.uniform(-1., 1.)) - 1.) / tau
            a, b = sigma_closed(lam, self.params), sigma_det(lam, self.params)
            self.assertLess(abs(a - b), 1e-8 * max(abs(a), abs(b)))

    def test_bracket_is_six_longitudinal_determinants(self):
        zeta, kappa = 0.4 + 0.9j, 0.6
        block = green_entries(zeta)[np.ix_(LONGITUDINAL, LONGITUDINAL)] - 1j * kappa * np.eye(3)
        bracket = longitudinal_bracket(zeta, plasma_Z(zeta), kappa)
        self.assertLess(abs(bracket - 6. * np.linalg.det(block)), 1e-12 * (1. + abs(bracket)))

    def test_rotation_invariance(self):
        kv = WaveVector(0.7 * 0.6, 0., 0.7 * 0.8)
        for lam in self.points:
            a, b = sigma_det(lam, self.params), sigma_det(lam, self.params, kv)
            self.assertLess(abs(a - b), 1e-10 * abs(a))
        with self.assertRaises(ValueError):
            sigma_det(0.1, self.params, WaveVector(1.))

    def test_zero_wavenumber(self):
        with self.assertRaises(DegenerateInputError):
            sigma_closed(0.1, Params(0., 1.))

    def test_shear_condition_sign_change(self):
        # Z(zeta) - i kappa on the imaginary zeta axis is purely imaginary
        value = shear_condition(-0.2, self.params)
        self.assertLess(abs(value.real), 1e-14)
