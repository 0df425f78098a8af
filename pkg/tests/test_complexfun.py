from unittest import TestCase
import math
import warnings
import numpy as np
from numpy.testing import assert_allclose
from scipy.integrate import quad
from pybgk.complexfun import (Branch, faddeeva_w, plasma_Z, plasma_Z_derivative,
                              plasma_Z_asymptotic, dispersion_moments,
                              dispersion_moment_derivatives)
from pybgk.oracle import quadrature_Z, adaptive_Z
from pybgk.helper.errors import RangeError, DomainError


class TestPlasmaZ(TestCase):

    def setUp(self):
        self.points = [0.3 + 1j, -2. + 0.5j, 4. + 0.01j, 1e-3 + 2j, 7. + 3j]

    def test_value_at_origin(self):
        self.assertAlmostEqual(plasma_Z(0.), 1j * math.sqrt(math.pi / 2), places=14)
        self.assertAlmostEqual(faddeeva_w(0.), 1., places=14)

    def test_reflection_symmetry(self):
        for z in self.points:
            self.assertAlmostEqual(plasma_Z(-z.conjugate()), -plasma_Z(z).conjugate(), places=12)

    def test_lower_branch(self):
        for z in self.points:
            zc = z.conjugate()
            self.assertAlmostEqual(plasma_Z(zc, Branch.LOWER), -plasma_Z(-zc), places=12)

    def test_upper_branch_is_continuous_across_the_axis(self):
        for x in (-1.5, 0., 0.7, 3.):
            above, below = plasma_Z(x + 1e-9j), plasma_Z(x - 1e-9j)
            self.assertLess(abs(above - below), 1e-7)

    def test_derivative_matches_difference_quotient(self):
        h = 1e-6
        for z in self.points:
            numeric = (plasma_Z(z + h) - plasma_Z(z - h)) / (2 * h)
            self.assertLess(abs(plasma_Z_derivative(z) - numeric), 1e-7 * (1 + abs(numeric)))
        self.assertAlmostEqual(plasma_Z_derivative(0.), -1., places=14)

    def test_second_derivative(self):
        z = 0.4 + 0.9j
        expected = -plasma_Z(z) - z * plasma_Z_derivative(z)
        self.assertAlmostEqual(plasma_Z_derivative(z, order=2), expected, places=12)
        with self.assertRaises(ValueError):
            plasma_Z_derivative(z, order=0)

    def test_asymptotic_series(self):
        z = 8. + 2j
        self.assertLess(abs(plasma_Z_asymptotic(z, 10) - plasma_Z(z)), 1e-8 * abs(plasma_Z(z)))
        big = 15. + 1j
        self.assertLess(abs(plasma_Z(big) + 1. / big + 1. / big ** 3), 5. / abs(big) ** 5)

    def test_asymptotic_truncation(self):
        self.assertLess(abs(plasma_Z_asymptotic(10., 6) - plasma_Z(10.)), 2e-9)
        self.assertLess(abs(plasma_Z_asymptotic(10., 8) - plasma_Z(10.)), 1e-10)
        self.assertAlmostEqual(plasma_Z_asymptotic(5j, 1), 0.2j, places=15)
        # divergent series, more terms is worse
        self.assertLess(abs(plasma_Z_asymptotic(4., 8) - plasma_Z(4.)),
                        abs(plasma_Z_asymptotic(4., 20) - plasma_Z(4.)))

    def test_asymptotic_guards(self):
        with self.assertRaises(DomainError):
            plasma_Z_asymptotic(-5j, 5)
        with self.assertRaises(ValueError):
            plasma_Z_asymptotic(5., 0)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter('always')
            plasma_Z_asymptotic(1.5, 3)
        self.assertTrue(any(issubclass(w.category, UserWarning) for w in caught))

    def test_array_input(self):
        out = plasma_Z(np.array(self.points))
        self.assertEqual(out.shape, (len(self.points),))
        assert_allclose(out, [plasma_Z(z) for z in self.points], rtol=1e-14)

    def test_errors(self):
        with self.assertRaises(RangeError):
            faddeeva_w(-30j)
        with self.assertRaises(DomainError):
            plasma_Z(complex(float('nan'), 0.))


class TestDispersionMoments(TestCase):

    def test_recursion(self):
        z = 0.2 + 0.8j
        w = dispersion_moments(z, 4)
        zz = plasma_Z(z)
        self.assertAlmostEqual(w[0], zz, places=14)
        self.assertAlmostEqual(w[1], 1. + z * zz, places=14)
        self.assertAlmostEqual(w[2], z + z * z * zz, places=14)
        self.assertAlmostEqual(w[3], 1. + z * w[2], places=14)

    def test_derivatives(self):
        z, h = -0.5 + 1.1j, 1e-6
        numeric = (dispersion_moments(z + h, 4) - dispersion_moments(z - h, 4)) / (2 * h)
        assert_allclose(dispersion_moment_derivatives(z, 4), numeric, rtol=1e-7, atol=1e-8)


class TestPlasmaZProperties(TestCase):

    def setUp(self):
        rng = np.random.default_rng(5)
        radius = 5. * np.sqrt(rng.uniform(0., 1., 1000))
        angle = rng.uniform(0., np.pi, 1000)
        z = radius * np.exp(1j * angle)
        # upper half of the disk |zeta| <= 5, off the real axis
        self.upper = z.real + 1j * np.maximum(z.imag, 0.05)
        self.rng = rng

    def test_bounded_by_value_at_origin(self):
        bound = math.sqrt(math.pi / 2.)
        self.assertLessEqual(np.max(np.abs(plasma_Z(self.upper))), bound * (1. + 1e-14))
        lower = np.max(np.abs(plasma_Z(self.upper.conjugate(), Branch.LOWER)))
        self.assertLessEqual(lower, bound * (1. + 1e-14))

    def test_argument_sign(self):
        self.assertTrue(np.all(plasma_Z(self.upper).imag > 0))
        self.assertTrue(np.all(plasma_Z(self.upper.conjugate(), Branch.LOWER).imag < 0))

    def test_differential_equation_residual(self):
        h = 1e-5
        z = self.upper
        numeric = (plasma_Z(z + h) - plasma_Z(z - h)) / (2. * h)
        residual = numeric + z * plasma_Z(z) + 1.
        self.assertLess(np.max(np.abs(residual)), 1e-7)
        exact = np.array([plasma_Z_derivative(x) for x in z[:50]])
        assert_allclose(exact, -z[:50] * plasma_Z(z[:50]) - 1., rtol=1e-13, atol=1e-13)

    def test_faddeeva_reflection(self):
        z = self.upper[:100] / math.sqrt(2.)
        assert_allclose(faddeeva_w(-z), 2. * np.exp(-z ** 2) - faddeeva_w(z), rtol=1e-11, atol=1e-12)

    def test_faddeeva_on_imaginary_axis(self):
        # w(3i) = (3/pi) int exp(-t**2)/(t**2 + 9) dt
        value, _ = quad(lambda t: math.exp(-t * t) / (t * t + 9.), -np.inf, np.inf, epsabs=1e-15)
        self.assertAlmostEqual(faddeeva_w(3j), 3. / math.pi * value, places=12)

    def test_agrees_with_quadrature(self):
        for _ in range(100):
            im = self.rng.uniform(0.05, 3.) * self.rng.choice([-1., 1.])
            zeta = complex(self.rng.uniform(-4., 4.), im)
            branch = Branch.UPPER if im > 0 else Branch.LOWER
            exact = plasma_Z(zeta, branch)
            oracle = quadrature_Z(zeta) if abs(im) >= 1. else adaptive_Z(zeta)
            self.assertLess(abs(oracle - exact), 1e-9 * (1. + abs(exact)))
