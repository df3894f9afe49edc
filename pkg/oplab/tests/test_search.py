import unittest

import numpy as np

from oplab.multipliers import ProjectionFamily, KernelMatrix, SchurMultiplier, \
    TriangularTruncation, ScaledIdentity
from oplab.search import NormEstimate, norm_ratio, check_linearity, ascend, estimate_map_norm, \
    _proposal
from oplab.spectra import random_matrix
from oplab.utils import NonlinearMapException


def squared(x):
    return x * x


class TestNormRatio(unittest.TestCase):

    def test_zero(self):
        self.assertEqual(norm_ratio(ScaledIdentity(2.), np.zeros((3, 3)), 2), 0.)

    def test_scaled(self):
        self.assertAlmostEqual(norm_ratio(ScaledIdentity(-2.), random_matrix(3, 0), 1), 2.)


class TestLinearity(unittest.TestCase):

    def test_linear(self):
        check_linearity(TriangularTruncation(ProjectionFamily.standard(4)), 4, 0)

    def test_nonlinear(self):
        with self.assertRaises(NonlinearMapException):
            check_linearity(squared, 3, 0)
        with self.assertRaises(NonlinearMapException):
            estimate_map_norm(squared, 2, 3, trials=2, seed=0, steps=2)


class TestAscend(unittest.TestCase):

    def test_never_decreases(self):
        T = TriangularTruncation(ProjectionFamily.standard(6))
        x0 = random_matrix(6, 1)
        start = norm_ratio(T, x0, 1)
        best, witness = ascend(T, 1, x0, 2, steps=50)
        self.assertGreaterEqual(best, start)
        self.assertAlmostEqual(norm_ratio(T, witness, 1), best)

    def test_concentrating_move(self):
        rng = np.random.default_rng(0)
        x = random_matrix(4, 5)
        peak = np.unravel_index(np.argmax(np.abs(x)), x.shape)
        d = _proposal(x, rng, 2)
        self.assertEqual(d[peak], 0)
        self.assertAlmostEqual(np.linalg.norm(d), 1.)
        rest = x.copy()
        rest[peak] = 0
        np.testing.assert_allclose(d, -rest / np.linalg.norm(rest), atol=1e-15)
        unit = np.zeros((3, 3), dtype=complex)
        unit[1, 2] = 2j
        np.testing.assert_equal(_proposal(unit, rng, 5), np.zeros((3, 3)))

    def test_zero_steps(self):
        T = ScaledIdentity(1.)
        x0 = random_matrix(3, 1)
        best, witness = ascend(T, 2, x0, 0, steps=0)
        np.testing.assert_equal(witness, x0)


class TestEstimateMapNorm(unittest.TestCase):

    def test_scaled_identity(self):
        est = estimate_map_norm(ScaledIdentity(3.), "4/3", 5, trials=3, seed=1, steps=10)
        self.assertIsInstance(est, NormEstimate)
        self.assertAlmostEqual(est.value, 3., places=12)
        self.assertEqual(len(est.ratios), 4)

    def test_reproducible(self):
        T = TriangularTruncation(ProjectionFamily.standard(5))
        a = estimate_map_norm(T, 1, 5, trials=3, seed=7, steps=20)
        b = estimate_map_norm(T, 1, 5, trials=3, seed=7, steps=20)
        self.assertEqual(a.value, b.value)
        np.testing.assert_equal(a.witness, b.witness)

    def test_threads_do_not_change_result(self):
        T = TriangularTruncation(ProjectionFamily.standard(4))
        a = estimate_map_norm(T, 1, 4, trials=3, seed=3, steps=10, threads=1)
        b = estimate_map_norm(T, 1, 4, trials=3, seed=3, steps=10, threads=2)
        self.assertEqual(a.value, b.value)
        self.assertEqual(a.start, b.start)

    def test_truncation_alpha_two(self):
        T = TriangularTruncation(ProjectionFamily.standard(6))
        est = estimate_map_norm(T, 2, 6, trials=4, seed=0, steps=40)
        self.assertLessEqual(est.value, 1 + 1e-12)
        self.assertGreater(est.value, 0.5)

    def test_truncation_alpha_one_grows(self):
        values = []
        for dim in (8, 32):
            T = TriangularTruncation(ProjectionFamily.standard(dim))
            values.append(estimate_map_norm(T, 1, dim, trials=1, seed=0, steps=0).value)
        self.assertGreater(values[0], 1.2)
        self.assertGreater(values[1], values[0] * 1.3)
        self.assertGreaterEqual(values[1], 1.5)

    def test_peak_start(self):
        phi = KernelMatrix(np.random.default_rng(2).uniform(-3, 3, (6, 6)))
        T = SchurMultiplier(phi, ProjectionFamily.standard(6))
        est = estimate_map_norm(T, 2, 6, trials=2, seed=0, steps=0)
        self.assertEqual(len(est.ratios), 4)
        self.assertAlmostEqual(est.ratios[-1], phi.sup(), places=12)
        self.assertAlmostEqual(est.value, phi.sup(), places=12)
        self.assertEqual(est.start, 3)
        plain = estimate_map_norm(T, 2, 6, trials=2, seed=0, steps=0, structured=False)
        self.assertEqual(len(plain.ratios), 2)
        np.testing.assert_equal(plain.ratios, est.ratios[:2])
