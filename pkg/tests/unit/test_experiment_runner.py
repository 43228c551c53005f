"""
Tests for the experiment runner helpers that do not need a full sweep.
"""
import math
import sys
from pathlib import Path
from unittest import TestCase

REPO_ROOT = Path(__file__).resolve().parent.parent.parent
sys.path.insert(0, str(REPO_ROOT))

from modules.kme.core.config import InitPolicy, KMEConfig
from modules.kme.scripts.experiment_runner import (
    ExperimentRunner,
    count_inversions,
    density_fit_schedule,
    fit_exponent,
)


class TestDensityFitSchedule(TestCase):

    def test_small_k_keeps_engine_rate(self):
        self.assertEqual(density_fit_schedule(0.05, 10, 100_000), (0.05, 1))
        self.assertEqual(density_fit_schedule(0.05, 4, 2_000), (0.05, 1))

    def test_large_k_shrinks_rate_and_replays(self):
        alpha, passes = density_fit_schedule(0.05, 1000, 90_000)
        self.assertAlmostEqual(alpha, 0.005, places=12)
        self.assertEqual(passes, 9)

        alpha, passes = density_fit_schedule(0.05, 100, 100_000)
        self.assertAlmostEqual(alpha, 0.05 * math.sqrt(0.1), places=12)
        self.assertEqual(passes, 1)


class TestHelpers(TestCase):

    def test_fit_exponent(self):
        self.assertIsNone(fit_exponent([10], [1.0]))
        self.assertAlmostEqual(fit_exponent([10, 100, 1000], [2.0, 20.0, 200.0]), 1.0, places=9)

    def test_count_inversions(self):
        self.assertEqual(count_inversions([3.0, 2.0, 2.5, 1.0]), 1)

    def test_runner_defaults_to_first_points(self):
        runner = ExperimentRunner(KMEConfig(k=4, init=InitPolicy.ZERO))
        self.assertIs(runner.init, InitPolicy.FIRST_POINTS)
        self.assertIs(runner._engine(2).model.init, InitPolicy.FIRST_POINTS)
        self.assertIs(runner.engine_config.init, InitPolicy.ZERO)
