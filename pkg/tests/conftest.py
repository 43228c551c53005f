"""
Pytest fixtures for kme module tests.

Small engines and seeded sample sets so tests run in well under a second each.
"""
import os
import sys
from pathlib import Path

import numpy as np
import pytest

# Ensure modules are importable from repo root
REPO_ROOT = Path(__file__).resolve().parent.parent
if str(REPO_ROOT) not in sys.path:
    sys.path.insert(0, str(REPO_ROOT))

from modules.kme.core.clustering import new_model, rebuild_cache
from modules.kme.core.config import InitPolicy
from modules.kme.core.reward_engine import RewardEngine

SLOW_TESTS_ENABLED = os.getenv("KME_SLOW_TESTS") == "1"


def make_engine(k: int = 8, d: int = 2, alpha: float = 0.05, kappa: float = 1e-4,
                init: InitPolicy = InitPolicy.ZERO) -> RewardEngine:
    """Fresh engine with zero counts."""
    return RewardEngine(new_model(k, d, alpha, kappa, init))


def random_model(k: int, d: int, seed: int = 0, kappa: float = 1e-3, max_count: int = 50):
    """Model with random centers and counts plus its exact cache."""
    rng = np.random.default_rng(seed)
    model = new_model(k, d, 0.1, kappa)
    model.centers = rng.standard_normal((k, d))
    model.counts = rng.integers(0, max_count, size=k).astype(np.int64)
    model.count_sum = int(model.counts.sum())
    return model, rebuild_cache(model)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def small_engine():
    return make_engine()
