import unittest

import numpy as np

from oplab.spectra import HermitianOperator, random_hermitian, random_matrix, trace_pairing, \
    schatten_norm
from oplab.kernels import Absolute, IntegerProfile, fourier_weight, random_integer_profile, \
    power_sequence
from oplab.multipliers import ProjectionFamily, KernelMatrix, TrianglePart, TwistMode, \
    corner_embedding, schur_multiply, divided_difference_kernel, triangle_mask, \
    triangular_truncate, profile_kernel, marcinkiewicz_operator, twist, twist_lower, \
    twist_phases, conjugation_unitary, fourier_block, decomposition_integral, \
    peak_unit, SchurMultiplier, TriangularTruncation, ScaledIdentity
from oplab.search import norm_ratio
from oplab.utils import DimensionMismatchException, DomainException


class TestProjectionFamily(unittest.TestCase):

    def test_grouping(self):
        family = ProjectionFamily(HermitianOperator(np.diag([2., 1., 1.])))
        self.assertEqual(len(family), 2)
        np.testing.assert_allclose(family.labels, [1., 2.])
        np.testing.assert_allclose(sum(family.projections()), np.eye(3), atol=1e-12)

    def test_near_coincident(self):
        family = ProjectionFamily(HermitianOperator(np.diag([1., 1. + 1e-11, 3.])))
        self.assertEqual(len(family), 2)
        family = ProjectionFamily(HermitianOperator(np.diag([1., 1. + 1e-11, 3.])), tol=1e-13)
        self.assertEqual(len(family), 3)

    def test_standard(self):
        family = ProjectionFamily.standard(4)
        x = random_matrix(4, 0)
        np.testing.assert_allclose(family.to_basis(x), x)
        np.testing.assert_allclose(family.from_basis(family.to_basis(x)), x)

    def test_direct_sum(self):
        left = ProjectionFamily(random_hermitian(3, 1))
        right = ProjectionFamily(random_hermitian(2, 2))
        both = ProjectionFamily.direct_sum(left, right)
        self.assertEqual(both.dim, 5)
        self.assertEqual(len(both), 5)
        self.assertTrue(np.all(np.diff(both.labels) > 0))


class TestSchurMultiply(unittest.TestCase):

    def test_constant_kernel(self):
        family = ProjectionFamily(random_hermitian(5, 0))
        x = random_matrix(5, 1)
        phi = KernelMatrix.constant(2., family, family)
        np.testing.assert_allclose(schur_multiply(phi, x, family), 2 * x, atol=1e-12)

    def test_standard_is_entrywise(self):
        family = ProjectionFamily.standard(4)
        x = random_matrix(4, 1)
        values = random_matrix(4, 2)
        np.testing.assert_allclose(schur_multiply(KernelMatrix(values), x, family), values * x,
                                   atol=1e-12)

    def test_mismatch(self):
        family = ProjectionFamily.standard(3)
        with self.assertRaises(DimensionMismatchException):
            schur_multiply(KernelMatrix(np.ones((3, 3))), np.zeros((2, 2)), family)
        with self.assertRaises(DimensionMismatchException):
            schur_multiply(KernelMatrix(np.ones((2, 2))), np.zeros((3, 3)), family)
        with self.assertRaises(DimensionMismatchException):
            KernelMatrix(np.ones(3))
        with self.assertRaises(DomainException):
            KernelMatrix([[np.inf]])

    def test_corner(self):
        left = ProjectionFamily(random_hermitian(3, 3))
        right = ProjectionFamily(random_hermitian(3, 4))
        phi = divided_difference_kernel(Absolute(), left, right)
        x = random_matrix(3, 5)
        direct = schur_multiply(phi, x, left, right)
        both = ProjectionFamily.direct_sum(left, right)
        embedded = schur_multiply(phi.corner(), corner_embedding(x), both)
        np.testing.assert_allclose(embedded, corner_embedding(direct), atol=1e-12)

    def test_adjoint(self):
        left = ProjectionFamily(random_hermitian(3, 6))
        right = ProjectionFamily(random_hermitian(3, 7))
        phi = KernelMatrix(random_matrix(3, 8))
        y = random_matrix(3, 9)
        np.testing.assert_allclose(schur_multiply(phi.adjoint(), y, right, left),
                                   schur_multiply(phi, y.conj().T, left, right).conj().T,
                                   atol=1e-12)

    def test_sup(self):
        self.assertEqual(KernelMatrix([[1, -3j], [0, 2]]).sup(), 3.)
        self.assertEqual(KernelMatrix(np.zeros((0, 0))).sup(), 0.)

    def test_map_classes(self):
        family = ProjectionFamily.standard(3)
        x = random_matrix(3, 0)
        np.testing.assert_allclose(SchurMultiplier(KernelMatrix(np.ones((3, 3))), family)(x), x)
        np.testing.assert_allclose(ScaledIdentity(2.)(x), 2 * x)
        np.testing.assert_allclose(TriangularTruncation(family)(x), np.triu(x, 1), atol=1e-15)


    def test_peak_unit(self):
        rng = np.random.default_rng(4)
        family = ProjectionFamily(random_hermitian(5, rng))
        phi = KernelMatrix(rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5)))
        T = SchurMultiplier(phi, family)
        x = T.peak_start()
        for alpha in (1, "4/3", 2, "inf"):
            self.assertAlmostEqual(norm_ratio(T, x, alpha), phi.sup(), places=10)
        truncation = TriangularTruncation(family)
        self.assertAlmostEqual(norm_ratio(truncation, truncation.peak_start(), 1), 1.)
        self.assertIsNone(peak_unit(KernelMatrix(np.zeros((0, 0))), ProjectionFamily.standard(0)))

    def test_alpha_two_contraction_any_kernel(self):
        rng = np.random.default_rng(5)
        for dim in (3, 7, 12):
            family = ProjectionFamily(random_hermitian(dim, rng))
            size = len(family)
            phi = KernelMatrix(rng.uniform(0, 1, (size, size))
                               * np.exp(2j * np.pi * rng.uniform(size=(size, size))))
            x = random_matrix(dim, rng)
            self.assertLessEqual(schatten_norm(schur_multiply(phi, x, family), 2),
                                 schatten_norm(x, 2) + 1e-10)


class TestTriangular(unittest.TestCase):

    def test_masks(self):
        np.testing.assert_equal(triangle_mask(3, "upper"), np.triu(np.ones((3, 3), bool)))
        np.testing.assert_equal(triangle_mask(3, TrianglePart.STRICT_LOWER),
                                np.tril(np.ones((3, 3), bool), -1))
        with self.assertRaises(ValueError):
            triangle_mask(3, "diagonal")

    def test_standard(self):
        family = ProjectionFamily.standard(5)
        x = random_matrix(5, 2)
        np.testing.assert_allclose(triangular_truncate(x, family), np.triu(x, 1), atol=1e-15)
        np.testing.assert_allclose(triangular_truncate(x, family, "lower"), np.tril(x),
                                   atol=1e-15)

    def test_parts_add_up(self):
        family = ProjectionFamily(random_hermitian(6, 3))
        x = random_matrix(6, 4)
        total = triangular_truncate(x, family, TrianglePart.UPPER) \
            + triangular_truncate(x, family, TrianglePart.STRICT_LOWER)
        np.testing.assert_allclose(total, x, atol=1e-12)

    def test_alpha_two_contraction(self):
        family = ProjectionFamily(random_hermitian(8, 5))
        x = random_matrix(8, 6)
        self.assertLessEqual(schatten_norm(triangular_truncate(x, family), 2),
                             schatten_norm(x, 2) + 1e-12)


class TestProfileMultipliers(unittest.TestCase):

    def test_identity_profile_kernel(self):
        family = ProjectionFamily.standard(4)
        phi = profile_kernel(IntegerProfile.identity(4), family)
        np.testing.assert_allclose(phi.values, 1 - np.eye(4))

    def test_profile_window(self):
        family = ProjectionFamily.standard(5)
        with self.assertRaises(DomainException):
            profile_kernel(IntegerProfile.identity(2), family)

    def test_marcinkiewicz(self):
        family = ProjectionFamily.standard(3)
        profile = IntegerProfile.from_increments([1, 1, 0, 2, 1, 1])
        # levels at 0, 1, 2: 0, 2, 3
        table = {n: float(n) for n in range(-3, 4)}
        x = np.ones((3, 3))
        expected = np.array([[0, 2, 3], [-2, 0, 1], [-3, -1, 0]])
        np.testing.assert_allclose(marcinkiewicz_operator(table, profile, family, x), expected,
                                   atol=1e-15)
        with self.assertRaises(DomainException):
            marcinkiewicz_operator({0: 1.}, profile, family, x)

    def test_marcinkiewicz_indicator_of_zero(self):
        family = ProjectionFamily(random_hermitian(5, 6))
        profile = random_integer_profile(5, 7, increments=(1, 2))
        x = random_matrix(5, 8)

        def indicator(n):
            return (np.asarray(n) == 0).astype(float)

        expected = sum(p @ x @ p for p in family.projections())
        np.testing.assert_allclose(marcinkiewicz_operator(indicator, profile, family, x),
                                   expected, atol=1e-12)

    def test_marcinkiewicz_power_sequence(self):
        rng = np.random.default_rng(9)
        for dim in (4, 9):
            family = ProjectionFamily(random_hermitian(dim, rng))
            profile = random_integer_profile(dim, rng)
            x = random_matrix(dim, rng)
            Sx = marcinkiewicz_operator(power_sequence(1.), profile, family, x)
            self.assertLessEqual(schatten_norm(Sx, 2), schatten_norm(x, 2) + 1e-12)

    def test_fourier_blocks(self):
        family = ProjectionFamily(random_hermitian(4, 7))
        profile = IntegerProfile.from_increments([1, 0, 2, 1, 0, 2, 1, 1])
        x = random_matrix(4, 8)
        blocks = [fourier_block(x, profile, family, n) for n in range(-6, 7)]
        np.testing.assert_allclose(sum(blocks), x, atol=1e-12)

    def test_conjugation_unitary(self):
        family = ProjectionFamily.standard(4)
        profile = IntegerProfile.identity(4)
        x = random_matrix(4, 9)
        M = 16
        n = 2
        average = sum(np.exp(2j * np.pi * n * t) * conjugation_unitary(profile, family, t) @ x
                      @ conjugation_unitary(profile, family, t).conj().T
                      for t in np.arange(M) / M) / M
        np.testing.assert_allclose(average, fourier_block(x, profile, family, n), atol=1e-12)


class TestTwists(unittest.TestCase):

    def test_zero_twist(self):
        family = ProjectionFamily(random_hermitian(5, 1))
        profile = random_integer_profile(5, 2, increments=(1, 2))
        x = random_matrix(5, 3)
        np.testing.assert_allclose(twist(x, 0., profile, family),
                                   triangular_truncate(x, family), atol=1e-12)
        y = random_matrix(5, 4)
        np.testing.assert_allclose(twist_lower(y, 0., profile, family),
                                   triangular_truncate(y, family, TrianglePart.STRICT_LOWER),
                                   atol=1e-12)

    def test_flat_levels_vanish(self):
        levels = np.array([0., 0., 2.])
        phases = twist_phases(levels, 1.5, TwistMode.VALUE)
        self.assertEqual(phases[0, 1], 0)
        self.assertAlmostEqual(abs(phases[0, 2]), 1.)
        self.assertEqual(phases[1, 0], 0)
        index = twist_phases(levels, np.array([0., 1.]), TwistMode.INDEX)
        self.assertEqual(index.shape, (2, 3, 3))
        self.assertAlmostEqual(index[1, 0, 2], np.exp(-1j * np.log(2)))

    def test_twist_is_isometric_on_s2(self):
        family = ProjectionFamily.standard(6)
        profile = random_integer_profile(6, 5, increments=(1, 2))
        x = np.triu(random_matrix(6, 6), 1)
        self.assertAlmostEqual(schatten_norm(twist(x, 3.7, profile, family), 2),
                               schatten_norm(x, 2))


    def test_opposite_twists_cancel(self):
        family = ProjectionFamily(random_hermitian(6, 10))
        profile = random_integer_profile(6, 11, increments=(1, 2))
        x = random_matrix(6, 12)
        for s in (0.7, 3.):
            back = twist(twist(x, s, profile, family), -s, profile, family)
            np.testing.assert_allclose(back, triangular_truncate(x, family), atol=1e-12)

    def test_alpha_four_growth_in_s(self):
        rng = np.random.default_rng(13)
        for dim in (4, 8, 16):
            family = ProjectionFamily.standard(dim)
            profile = random_integer_profile(dim, rng, increments=(1, 2))
            x = random_matrix(dim, rng)
            for s in (0.5, 1., 3., 10.):
                self.assertLessEqual(schatten_norm(twist(x, s, profile, family), 4),
                                     10 * (1 + abs(s)) * schatten_norm(x, 4))


class TestDecompositionIntegral(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.g = fourier_weight()

    def test_matches_multiplier(self):
        rng = np.random.default_rng(11)
        for dim in (2, 5, 9):
            family = ProjectionFamily(random_hermitian(dim, rng))
            profile = random_integer_profile(dim, rng, increments=(1, 2))
            x = triangular_truncate(random_matrix(dim, rng), family)
            y = triangular_truncate(random_matrix(dim, rng), family, TrianglePart.STRICT_LOWER)
            direct = trace_pairing(y, schur_multiply(profile_kernel(profile, family), x, family))
            integral = decomposition_integral(self.g, x, y, profile, family)
            self.assertLessEqual(abs(direct - integral),
                                 1e-5 * schatten_norm(x, 2) * schatten_norm(y, 2))
