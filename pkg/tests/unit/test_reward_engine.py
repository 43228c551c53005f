"""
Unit tests for RewardEngine: peek/commit agreement, purity, telescoping,
replay and checkpoint records.
"""
import sys
from pathlib import Path
from unittest import TestCase

import numpy as np

REPO_ROOT = Path(__file__).resolve().parent.parent.parent
sys.path.insert(0, str(REPO_ROOT))

from modules.kme.core.clustering import rebuild_cache
from modules.kme.core.config import FChoice, InitPolicy, KMEConfig
from modules.kme.core.errors import DimensionMismatchError, NoCommitsError
from modules.kme.core.objective import ObjectiveSpec
from modules.kme.core.reward_engine import RewardEngine
from tests.conftest import make_engine


class TestPeekAndCommit(TestCase):

    def test_peek_equals_commit_on_clone_and_is_pure(self):
        rng = np.random.default_rng(0)
        for case in range(200):
            init = InitPolicy.FIRST_POINTS if case % 2 else InitPolicy.ZERO
            engine = make_engine(k=6, d=2, alpha=0.2, kappa=0.01, init=init)
            engine.spec = ObjectiveSpec(FChoice.LOG if case % 3 == 0 else FChoice.SQRT)
            for s in rng.standard_normal((int(rng.integers(0, 30)), 2)):
                engine.commit_reward(s)

            state = rng.standard_normal(2)
            digest = engine.state_hash()
            peeked = engine.peek_reward(state)
            self.assertEqual(engine.state_hash(), digest)

            clone = engine.clone()
            self.assertEqual(clone.state_hash(), digest)
            self.assertEqual(peeked, clone.commit_reward(state))

    def test_telescoping_both_objectives(self):
        for f_choice in (FChoice.SQRT, FChoice.LOG):
            engine = make_engine(k=20, d=3, alpha=0.1, kappa=1e-3)
            engine.spec = ObjectiveSpec(f_choice)
            start = engine.objective()
            total = 0.0
            for s in np.random.default_rng(1).standard_normal((2000, 3)):
                total += engine.commit_reward(s)
            self.assertLess(abs(total - (engine.objective() - start)), 1e-6)

    def test_cache_stays_coherent(self):
        engine = make_engine(k=10, d=2, alpha=0.3, kappa=0.05)
        for s in np.random.default_rng(2).uniform(-1, 1, size=(300, 2)):
            engine.commit_reward(s)
        oracle = rebuild_cache(engine.model)
        np.testing.assert_allclose(engine.cache.nearest_dist, oracle.nearest_dist, atol=1e-9)

    def test_placeholder_centers_cost_no_rescans(self):
        engine = make_engine(k=30, d=2, init=InitPolicy.FIRST_POINTS)
        for s in np.random.default_rng(8).uniform(-1, 1, size=(28, 2)):
            engine.commit_reward(s)
        self.assertEqual((engine.rescan_count, engine.pathological_count), (0, 0))
        np.testing.assert_allclose(engine.cache.nearest_dist, rebuild_cache(engine.model).nearest_dist, atol=1e-12)

        stacked = make_engine(k=30, d=2)
        stacked.commit_reward([0.3, 0.4])
        self.assertEqual((stacked.rescan_count, stacked.pathological_count), (0, 0))

    def test_dimension_mismatch(self):
        engine = make_engine(d=2)
        with self.assertRaises(DimensionMismatchError):
            engine.peek_reward([1.0, 2.0, 3.0])
        with self.assertRaises(DimensionMismatchError):
            engine.commit_reward([1.0])

    def test_counters(self):
        engine = make_engine(k=4, d=1)
        with self.assertRaises(NoCommitsError):
            engine.pathological_fraction()
        for s in np.linspace(-1, 1, 25):
            engine.commit_reward([s])
        self.assertEqual(engine.commit_count, 25)
        self.assertEqual(engine.model.count_sum, 25)
        self.assertGreaterEqual(engine.pathological_fraction(), 0.0)
        self.assertLessEqual(engine.pathological_fraction(), 1.0)


class TestBatchReplay(TestCase):

    def test_commits_every_state_once(self):
        engine = make_engine(k=5, d=2)
        states = np.random.default_rng(3).standard_normal((64, 2))
        engine.batch_replay(states, shuffle_seed=9)
        self.assertEqual(engine.model.count_sum, 64)
        self.assertEqual(engine.commit_count, 64)

    def test_same_seed_same_state(self):
        states = np.random.default_rng(4).standard_normal((50, 2))
        a, b = make_engine(), make_engine()
        a.batch_replay(states, shuffle_seed=11)
        b.batch_replay(states, shuffle_seed=11)
        self.assertEqual(a.state_hash(), b.state_hash())

    def test_shuffle_order_is_seeded_permutation(self):
        states = np.random.default_rng(5).standard_normal((40, 2))
        replayed = make_engine()
        replayed.batch_replay(states, shuffle_seed=3)
        manual = make_engine()
        for idx in np.random.default_rng(3).permutation(40):
            manual.commit_reward(states[idx])
        self.assertEqual(replayed.state_hash(), manual.state_hash())

    def test_empty_batch_is_noop(self):
        engine = make_engine()
        digest = engine.state_hash()
        engine.batch_replay(np.empty((0, 2)), shuffle_seed=0)
        self.assertEqual(engine.state_hash(), digest)


class TestInspectionAndRecords(TestCase):

    def test_from_config(self):
        config = KMEConfig(k=7, alpha=0.1, kappa=0.0, f='log', log_floor=1e-9, init='first_points')
        engine = RewardEngine.from_config(config, d=3)
        self.assertEqual((engine.model.k, engine.model.d), (7, 3))
        self.assertIs(engine.spec.f_choice, FChoice.LOG)
        self.assertIs(engine.model.init, InitPolicy.FIRST_POINTS)

    def test_objective_override_does_not_change_spec(self):
        engine = make_engine()
        for s in np.random.default_rng(6).standard_normal((30, 2)):
            engine.commit_reward(s)
        sqrt_value = engine.objective()
        engine.objective(FChoice.LOG)
        self.assertIs(engine.spec.f_choice, FChoice.SQRT)
        self.assertEqual(engine.objective(), sqrt_value)

    def test_record_round_trip_is_exact(self):
        engine = make_engine(k=9, d=2, kappa=0.01)
        for s in np.random.default_rng(7).standard_normal((120, 2)):
            engine.commit_reward(s)
        restored = RewardEngine.from_dict(engine.to_dict())
        self.assertEqual(restored.state_hash(), engine.state_hash())
        s = np.array([0.1, -0.2])
        self.assertEqual(restored.peek_reward(s), engine.peek_reward(s))

    def test_clone_is_independent(self):
        engine = make_engine()
        clone = engine.clone()
        clone.commit_reward([1.0, 1.0])
        self.assertEqual(engine.commit_count, 0)
        self.assertEqual(engine.model.count_sum, 0)
