"""
k-Means Maximum Entropy Exploration

Intrinsic-reward engine built on additively-weighted online k-means, with
density and entropy estimators, synthetic verification suites and a
sparse-reward exploration harness.
"""

from .kme import (
    RewardEngine,
    KMEConfig,
    ExploreConfig,
    CheckpointManager,
)

__all__ = [
    'RewardEngine',
    'KMEConfig',
    'ExploreConfig',
    'CheckpointManager',
]
