"""
Unit tests for synthetic distributions: sampling, densities and entropies.
"""
import math
import sys
import tempfile
from pathlib import Path
from unittest import TestCase

import numpy as np

REPO_ROOT = Path(__file__).resolve().parent.parent.parent
sys.path.insert(0, str(REPO_ROOT))

from modules.kme.core.errors import InvalidDistributionError
from modules.kme.synth.distributions import (
    gaussian,
    gaussian_mixture,
    log_pdf,
    monte_carlo_entropy,
    pdf,
    random_walk,
    reference_entropy,
    sample,
    true_entropy,
    uniform_box,
    write_samples_csv,
)


class TestSampling(TestCase):

    def test_uniform_within_bounds_and_seeded(self):
        spec = uniform_box([0.0, -1.0], [1.0, 1.0])
        X = sample(spec, 1000, seed=3)
        self.assertEqual(X.shape, (1000, 2))
        self.assertTrue(np.all(X >= [0.0, -1.0]) and np.all(X <= [1.0, 1.0]))
        np.testing.assert_array_equal(X, sample(spec, 1000, seed=3))
        self.assertFalse(np.array_equal(X, sample(spec, 1000, seed=4)))

    def test_gaussian_moments(self):
        X = sample(gaussian([1.0, -2.0], 0.04), 50_000, seed=0)
        np.testing.assert_allclose(X.mean(axis=0), [1.0, -2.0], atol=0.01)
        np.testing.assert_allclose(X.var(axis=0), [0.04, 0.04], rtol=0.05)

    def test_single_component_mixture_matches_gaussian(self):
        mix = gaussian_mixture([(1.0, (0.5, 0.5), 0.02)])
        np.testing.assert_array_equal(sample(mix, 100, seed=9), sample(gaussian([0.5, 0.5], 0.02), 100, seed=9))

    def test_mixture_weights_respected(self):
        mix = gaussian_mixture([(0.25, (-10.0,), 0.01), (0.75, (10.0,), 0.01)])
        X = sample(mix, 20_000, seed=1)
        self.assertAlmostEqual(float(np.mean(X[:, 0] > 0)), 0.75, delta=0.02)

    def test_walk_is_cumulative_sum(self):
        spec = random_walk(0.1, 3, steps=500)
        X = sample(spec, seed=2)
        self.assertEqual(X.shape, (500, 3))
        increments = np.diff(np.vstack([np.zeros(3), X]), axis=0)
        np.testing.assert_allclose(increments.std(), 0.1, rtol=0.1)

    def test_stationary_walk_has_target_variance(self):
        spec = random_walk(0.5, 2, steps=200_000, stationary=True, rho=0.9)
        X = sample(spec, seed=0)
        np.testing.assert_allclose(X[1000:].var(axis=0), [0.25, 0.25], rtol=0.05)

    def test_invalid_n(self):
        with self.assertRaises(InvalidDistributionError):
            sample(gaussian([0.0], 1.0), 0)
        with self.assertRaises(InvalidDistributionError):
            sample(gaussian([0.0], 1.0))


class TestValidation(TestCase):

    def test_bad_specs(self):
        with self.assertRaises(InvalidDistributionError):
            uniform_box([1.0], [0.0])
        with self.assertRaises(InvalidDistributionError):
            gaussian([0.0, 0.0], -1.0)
        with self.assertRaises(InvalidDistributionError):
            gaussian_mixture([(0.5, (0.0,), 0.1), (0.4, (1.0,), 0.1)])
        with self.assertRaises(InvalidDistributionError):
            gaussian_mixture([(0.5, (0.0,), 0.1), (0.5, (1.0, 1.0), 0.1)])
        with self.assertRaises(InvalidDistributionError):
            random_walk(0.0, 2, steps=10)


class TestDensitiesAndEntropy(TestCase):

    def test_uniform(self):
        spec = uniform_box([0.0, 0.0], [2.0, 0.5])
        self.assertAlmostEqual(true_entropy(spec), 0.0, places=12)
        np.testing.assert_allclose(pdf(spec, [[1.0, 0.25], [3.0, 0.0]]), [1.0, 0.0])

    def test_gaussian_closed_form(self):
        spec = gaussian([0.0, 0.0], 0.01)
        self.assertAlmostEqual(true_entropy(spec), math.log(2 * math.pi * math.e * 0.01), places=12)
        self.assertAlmostEqual(true_entropy(spec), -1.767, places=3)
        self.assertAlmostEqual(float(pdf(spec, [[0.0, 0.0]])[0]), 1.0 / (2 * math.pi * 0.01), places=9)

    def test_monte_carlo_matches_closed_form(self):
        spec = gaussian([0.0, 0.0, 0.0], 0.3)
        self.assertAlmostEqual(monte_carlo_entropy(spec, 200_000, seed=1), true_entropy(spec), delta=0.02)

    def test_separated_mixture_entropy(self):
        mix = gaussian_mixture([(0.5, (-5.0, 0.0), 0.01), (0.5, (5.0, 0.0), 0.01)])
        self.assertIsNone(true_entropy(mix))
        expected = math.log(2.0) + math.log(2 * math.pi * math.e * 0.01)
        self.assertAlmostEqual(reference_entropy(mix, seed=0), expected, delta=0.02)

    def test_mixture_log_pdf_is_stable_far_out(self):
        mix = gaussian_mixture([(0.5, (0.0,), 0.001), (0.5, (1.0,), 0.001)])
        self.assertTrue(np.isfinite(log_pdf(mix, [[50.0]])[0]))

    def test_walk_entropy(self):
        self.assertIsNone(reference_entropy(random_walk(1.0, 2, steps=10)))
        stationary = random_walk(0.1, 2, steps=10, stationary=True)
        self.assertAlmostEqual(true_entropy(stationary), math.log(2 * math.pi * math.e * 0.01), places=12)
        with self.assertRaises(InvalidDistributionError):
            log_pdf(random_walk(1.0, 2, steps=10), [[0.0, 0.0]])


class TestSamplesCsv(TestCase):

    def test_write(self):
        X = sample(gaussian([0.0, 0.0], 1.0), 5, seed=0)
        with tempfile.TemporaryDirectory() as tmp:
            path = write_samples_csv(Path(tmp) / 'samples.csv', X)
            lines = path.read_text().strip().splitlines()
        self.assertEqual(lines[0], 'x0,x1')
        self.assertEqual(len(lines), 6)
        self.assertEqual(float(lines[1].split(',')[0]), X[0, 0])
