"""
Unit tests for the clustering objective and the entropy lower bound.
"""
import math
import sys
from itertools import product
from pathlib import Path
from unittest import TestCase

import numpy as np

REPO_ROOT = Path(__file__).resolve().parent.parent.parent
sys.path.insert(0, str(REPO_ROOT))

from modules.kme.core.clustering import new_model, rebuild_cache
from modules.kme.core.config import FChoice
from modules.kme.core.errors import InvalidHyperparameterError
from modules.kme.core.objective import (
    ObjectiveSpec,
    apply_f,
    entropy_lower_bound,
    log_unit_ball_volume,
    objective_delta,
    objective_from_distances,
    objective_value,
)
from tests.conftest import random_model

SQRT = ObjectiveSpec(FChoice.SQRT)
LOG = ObjectiveSpec(FChoice.LOG)


def line_model(points, counts=None, kappa=0.0):
    model = new_model(len(points), 1, 0.05, kappa)
    model.centers = np.asarray(points, dtype=np.float64).reshape(-1, 1)
    model.counts = np.asarray(counts or [0] * len(points), dtype=np.int64)
    model.count_sum = int(model.counts.sum())
    return model, rebuild_cache(model)


class TestObjectiveValue(TestCase):

    def test_two_unit_distances(self):
        model, cache = line_model([0.0, 1.0])
        self.assertEqual(objective_value(model, cache, SQRT), 2.0)
        self.assertEqual(objective_value(model, cache, LOG), 0.0)

    def test_collinear_log(self):
        model, cache = line_model([0.0, 1.0, 3.0])
        self.assertAlmostEqual(objective_value(model, cache, LOG), math.log(2.0), places=12)

    def test_clamps(self):
        values = np.array([-0.5, 0.0, 4.0])
        np.testing.assert_array_equal(apply_f(values, SQRT), [0.0, 0.0, 2.0])
        floor = ObjectiveSpec(FChoice.LOG, 1e-6)
        np.testing.assert_allclose(apply_f(values, floor), [math.log(1e-6), math.log(1e-6), math.log(4.0)])

    def test_log_floor_must_be_positive(self):
        with self.assertRaises(InvalidHyperparameterError):
            ObjectiveSpec(FChoice.LOG, 0.0)

    def test_spec_accepts_string_choice(self):
        self.assertIs(ObjectiveSpec('log').f_choice, FChoice.LOG)

    def test_monotone_in_each_distance(self):
        rng = np.random.default_rng(0)
        base = rng.uniform(0.1, 2.0, size=8)
        for spec in (SQRT, LOG):
            for i in range(8):
                bumped = base.copy()
                bumped[i] += 0.01
                self.assertGreater(objective_from_distances(bumped, spec), objective_from_distances(base, spec))

    def test_permutation_invariance(self):
        model, cache = random_model(9, 2, seed=2)
        order = np.random.default_rng(2).permutation(9)
        model.centers = model.centers[order]
        model.counts = model.counts[order]
        shuffled = rebuild_cache(model)
        for spec in (SQRT, LOG):
            self.assertAlmostEqual(
                objective_value(model, shuffled, spec), objective_value(model, cache, spec), places=10
            )

    def test_sqrt_and_log_agree_on_maximizer_at_fixed_budget(self):
        # Enumerate splits of a fixed total distance over three clusters
        rng = np.random.default_rng(5)
        for _ in range(20):
            budget = rng.uniform(1.0, 5.0)
            grid = np.linspace(0.05, 0.9, 18)
            candidates = []
            for a, b in product(grid, grid):
                if a + b < 0.95:
                    candidates.append(np.array([a, b, 1.0 - a - b]) * budget)
            sqrt_values = [objective_from_distances(c, SQRT) for c in candidates]
            log_values = [objective_from_distances(c, LOG) for c in candidates]
            # the sqrt maximizer is also a log maximizer (permutations tie)
            best_sqrt = int(np.argmax(sqrt_values))
            self.assertAlmostEqual(log_values[best_sqrt], max(log_values), places=12)

    def test_delta_only_sums_changed_entries(self):
        before = np.array([0.5, 1.0, 2.0])
        after = np.array([0.5, 4.0, 2.0])
        self.assertEqual(objective_delta(before, after, SQRT), 1.0)
        self.assertAlmostEqual(objective_delta(before, after, LOG), math.log(4.0), places=15)
        self.assertEqual(objective_delta(before, before.copy(), LOG), 0.0)
        self.assertEqual(objective_delta(np.array([1e-20, 1.0]), np.array([1e-30, 1.0]), LOG), 0.0)
        for spec in (SQRT, LOG):
            self.assertAlmostEqual(
                objective_delta(before, after, spec),
                objective_from_distances(after, spec) - objective_from_distances(before, spec),
                places=9,
            )


class TestUnitBallVolume(TestCase):

    def test_low_dimensions(self):
        self.assertAlmostEqual(log_unit_ball_volume(1), math.log(2.0), places=12)
        self.assertAlmostEqual(log_unit_ball_volume(2), math.log(math.pi), places=12)
        self.assertAlmostEqual(log_unit_ball_volume(3), math.log(4.0 * math.pi / 3.0), places=12)

    def test_high_dimension_is_finite(self):
        value = log_unit_ball_volume(64)
        self.assertTrue(math.isfinite(value))
        self.assertLess(value, 0.0)

    def test_zero_dimension_rejected(self):
        with self.assertRaises(InvalidHyperparameterError):
            log_unit_ball_volume(0)


class TestEntropyLowerBound(TestCase):

    def test_two_points_on_a_line(self):
        model, cache = line_model([0.0, 1.0])
        self.assertAlmostEqual(entropy_lower_bound(model, cache), math.log(2.0) - 1.0, places=12)

    def test_scaling_adds_d_log_c(self):
        model, cache = random_model(10, 3, seed=3, kappa=0.0)
        before = entropy_lower_bound(model, cache)
        model.centers = model.centers * 2.5
        after = entropy_lower_bound(model, rebuild_cache(model))
        self.assertAlmostEqual(after - before, 3 * math.log(2.5), places=9)

    def test_consistent_with_log_objective(self):
        model, cache = random_model(15, 4, seed=4)
        expected = (4 / 15) * objective_value(model, cache, LOG) + log_unit_ball_volume(4) - 4
        self.assertEqual(entropy_lower_bound(model, cache), expected)
