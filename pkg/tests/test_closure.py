from unittest import TestCase
import math
import numpy as np
from numpy.testing import assert_allclose
from pybgk.closure import (Model, BeyondPolicy, PhysicalConstants, spectral_temperature, basis_H,
                           det_H, transport_coefficients, invariant_check, generator,
                           aligned_classical, esbgk_burnett_matrix, to_physical_variables,
                           to_h_variables, classical_expansion_check, dimensionalize,
                           adjugate_column, adjugate, shear_adjugate_derivative,
                           coefficients_at)
from pybgk.modes import find_modes
from pybgk.spectral import Params, WaveVector, rotation_frame, green_entries
from pybgk.helper.errors import BeyondCritical, DegenerateInputError


def _sorted(values):
    return np.array(sorted(values, key=lambda z: (round(z.real, 8), z.imag)))


class TestSpectralTemperature(TestCase):

    def setUp(self):
        self.params = Params(0.5, 1.)
        self.modes = find_modes(self.params)

    def test_forms_agree_at_eigenvalues(self):
        for lam in (self.modes.lambda_diff, self.modes.lambda_ac):
            closed = spectral_temperature(lam, self.params, 'closed').value
            for form in ('zeta', 'quotient'):
                other = spectral_temperature(lam, self.params, form).value
                self.assertLess(abs(closed - other), 1e-8 * (1. + abs(closed)))

    def test_diffusion_temperature_is_real(self):
        theta = spectral_temperature(self.modes.lambda_diff, self.params).value
        self.assertLess(abs(theta.imag), 1e-10 * (1. + abs(theta)))

    def test_unknown_form(self):
        with self.assertRaises(ValueError):
            spectral_temperature(-0.2, self.params, 'series')

    def test_adjugate_column_at_eigenvalue(self):
        lam = self.modes.lambda_ac
        a = adjugate_column(self.params.zeta(lam), self.params, normalized=True)
        theta = spectral_temperature(lam, self.params).value
        assert_allclose(a, [1., 1j * lam / self.params.k, 0., 0., theta], atol=1e-8)

    def test_adjugate_is_rank_one_at_eigenvalue(self):
        zeta = self.params.zeta(self.modes.lambda_ac)
        adj = adjugate(green_entries(zeta) - 1j * self.params.kappa * np.eye(5))
        a = adjugate_column(zeta, self.params)
        g = adj[0, 0] / a[0] ** 2
        self.assertLess(np.linalg.norm(adj - g * np.outer(a, a)), 1e-8 * np.linalg.norm(adj))


class TestBasisAndCoefficients(TestCase):

    def setUp(self):
        self.params = Params(0.5, 0.5)
        self.modes = find_modes(self.params)
        self.coeffs = transport_coefficients(self.modes)

    def test_det_h_closed_form(self):
        h = basis_H(self.modes)
        self.assertLess(abs(h.det.imag), 1e-10)
        self.assertAlmostEqual(h.det.real, det_H(self.modes), places=10)
        self.assertAlmostEqual(self.coeffs.det_h, det_H(self.modes))

    def test_rotated_basis_has_the_same_determinant(self):
        frame = rotation_frame(WaveVector(0.3, 0., 0.4))
        self.assertAlmostEqual(basis_H(self.modes, frame).det.real, det_H(self.modes), places=10)

    def test_coefficients_are_real(self):
        self.assertLess(self.coeffs.contamination, 1e-10)

    def test_invariants(self):
        for name, residual in invariant_check(self.coeffs, self.modes).items():
            self.assertLess(residual, 1e-10, name)

    def test_params_must_match(self):
        with self.assertRaises(ValueError):
            transport_coefficients(self.modes, Params(0.4, 0.5))

    def test_dimensionalize(self):
        report = dimensionalize(self.coeffs)
        self.assertAlmostEqual(report.t_thermal, 1.)
        self.assertAlmostEqual(report.tau_relax, 0.5)
        self.assertAlmostEqual(report.rates['c2'], self.coeffs.c2)
        scaled = dimensionalize(self.coeffs, PhysicalConstants(L=2.))
        self.assertAlmostEqual(scaled.l_mfp, 1.)
        self.assertAlmostEqual(scaled.k, 0.25)
        with self.assertRaises(ValueError):
            PhysicalConstants(T0=0.)

    def test_expansion_ladder(self):
        terms = classical_expansion_check(Params(0.4, 0.25))
        self.assertTrue(all(term.passed() for term in terms), [t for t in terms if not t.passed()])
        perturbed = classical_expansion_check(Params(0.4, 0.25), perturb={'c2': 1e-3})
        self.assertFalse(all(term.passed() for term in perturbed if term.name == 'c2'))
        with self.assertRaises(ValueError):
            classical_expansion_check(Params(1., 1.))


class TestGenerator(TestCase):

    def test_exact_generator_reproduces_the_modes(self):
        kvec = WaveVector(0.3, 0.4, 0.)
        gen = generator(kvec, 0.5)
        self.assertIsNotNone(gen.modes)
        assert_allclose(_sorted(gen.eigenvalues), _sorted(gen.modes.eigenvalues), atol=1e-8)

    def test_continuity_row(self):
        kvec = WaveVector(0.3, -0.2, 0.1)
        for model in Model:
            row = generator(kvec, 0.5, model).matrix[0]
            assert_allclose(row, [0., -0.3j, 0.2j, -0.1j, 0.], atol=1e-12)

    def test_conjugate_of_opposite_wave_vector(self):
        kvec = WaveVector(0.2, 0.5, -0.1)
        for model in Model:
            plus = generator(kvec, 0.4, model).matrix
            minus = generator(-kvec, 0.4, model).matrix
            assert_allclose(minus, plus.conj(), atol=1e-10)

    def test_euler_is_isentropic_sound(self):
        k = 0.7
        values = _sorted(np.linalg.eigvals(aligned_classical(Model.EULER, k, 1.)))
        assert_allclose(values, _sorted(np.array([-1j, 0., 0., 0., 1j]) * math.sqrt(5. / 3.) * k),
                        atol=1e-12)

    def test_truncation_order(self):
        def error(model, k):
            exact = find_modes(Params(k, 1.)).eigenvalues
            approx = np.linalg.eigvals(aligned_classical(model, k, 1.))
            return max(np.min(np.abs(approx - lam)) for lam in exact)

        # halving k divides the eigenvalue error by 4, 8 and 16
        for model, ratio in ((Model.EULER, 4.), (Model.NAVIER_STOKES, 8.), (Model.BURNETT, 16.)):
            got = error(model, 0.04) / error(model, 0.02)
            self.assertAlmostEqual(got / ratio, 1., delta=0.1)

    def test_esbgk_burnett(self):
        for kvec in (WaveVector(0.3, 0.1, -0.2), WaveVector(1., 0., 0.)):
            mine = to_physical_variables(generator(kvec, 1., Model.BURNETT)).matrix
            assert_allclose(mine, esbgk_burnett_matrix(kvec).matrix, atol=1e-12)

    def test_variable_conversion(self):
        gen = generator(WaveVector(0.5), 1., Model.NAVIER_STOKES)
        back = to_h_variables(to_physical_variables(gen))
        assert_allclose(back.matrix, gen.matrix, atol=1e-14)
        with self.assertRaises(ValueError):
            to_h_variables(gen)
        with self.assertRaises(ValueError):
            to_physical_variables(to_physical_variables(gen))

    def test_zero_wave_vector(self):
        gen = generator(WaveVector(0.), 0.5)
        assert_allclose(gen.matrix, np.zeros((5, 5)))

    def test_beyond_critical(self):
        with self.assertRaises(BeyondCritical):
            generator(WaveVector(6.), 0.25)
        with self.assertWarns(UserWarning):
            gen = generator(WaveVector(1.3), 1., beyond=BeyondPolicy.PIN)
        self.assertIsNone(gen.modes)
        self.assertTrue(np.all(np.isfinite(gen.matrix)))
        with self.assertRaises(DegenerateInputError):
            coefficients_at(0., 1.)


class TestShearAdjugate(TestCase):

    def test_derivative_pattern(self):
        result = shear_adjugate_derivative(Params(0.7, 0.5))
        self.assertLess(abs(result.ratio - 1.), 1e-6)
        self.assertLess(abs(result.matrix[3, 3] / result.closed_form - 1.), 1e-6)
        self.assertLess(result.off_pattern, 1e-8)
