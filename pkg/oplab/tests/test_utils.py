import unittest

import numpy as np

from oplab.utils import LabException, DomainException, FourierGridException, \
    QuadratureBudgetException, ConfigException, gauss_legendre, composite_gauss_legendre, \
    apply_rows_chunked, rng_from, spawn_seeds


class TestExceptions(unittest.TestCase):

    def test_message(self):
        self.assertEqual(DomainException("bad value").message(), "bad value")
        self.assertEqual(DomainException().message(), "DomainException")
        self.assertTrue(issubclass(DomainException, LabException))

    def test_attributes(self):
        ex = FourierGridException("coarse", suggested_smax=400., suggested_ds=0.3)
        self.assertEqual(ex.suggested_smax, 400.)
        self.assertEqual(ex.suggested_ds, 0.3)
        self.assertEqual(QuadratureBudgetException("x", achieved=1e-3).achieved, 1e-3)
        self.assertEqual(ConfigException("x").exit_code, 5)
        self.assertEqual(ConfigException("x", 3).exit_code, 3)


class TestQuadrature(unittest.TestCase):

    def test_gauss_legendre_polynomial(self):
        x, w = gauss_legendre(8, -1., 3.)
        self.assertAlmostEqual(np.sum(w), 4.)
        # exact for degree 15
        self.assertAlmostEqual(np.sum(w * x**7), (3.**8 - 1.) / 8, places=8)

    def test_composite_shapes(self):
        edges = np.array([[0., 0.5, 1.], [0., 1., 2.]])
        x, w = composite_gauss_legendre(edges, 4)
        self.assertEqual(x.shape, (2, 8))
        np.testing.assert_allclose(np.sum(w, axis=1), [1., 2.])
        np.testing.assert_allclose(np.sum(w * np.exp(x), axis=1), np.exp([1., 2.]) - 1,
                                   rtol=1e-12)

    def test_composite_kink(self):
        # |x| integrates exactly when 0 is a panel edge
        x, w = composite_gauss_legendre(np.array([-1., 0., 2.]), 2)
        self.assertAlmostEqual(np.sum(w * np.abs(x)), 2.5)


class TestChunked(unittest.TestCase):

    def test_same_result(self):
        a = np.arange(60.).reshape(20, 3)
        expected = np.cumsum(a, axis=1)
        for size in (1, 3, 7, 1000):
            np.testing.assert_equal(
                apply_rows_chunked(a, lambda p: np.cumsum(p, axis=1), chunk_size=size),
                expected)

    def test_empty(self):
        out = apply_rows_chunked(np.zeros((0, 3)), lambda p: p * 2)
        self.assertEqual(out.shape, (0, 3))


class TestSeeds(unittest.TestCase):

    def test_spawn_reproducible(self):
        a = [np.random.default_rng(s).random() for s in spawn_seeds(5, 4)]
        b = [np.random.default_rng(s).random() for s in spawn_seeds(5, 4)]
        self.assertEqual(a, b)
        self.assertEqual(len(set(a)), 4)

    def test_rng_from_generator(self):
        g = np.random.default_rng(1)
        self.assertIs(rng_from(g), g)
        self.assertEqual(rng_from(3).random(), np.random.default_rng(3).random())
