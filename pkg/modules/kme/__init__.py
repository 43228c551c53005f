"""
KME Reward Engine

Online k-means intrinsic rewards, density/entropy estimates and the
exploration loop that consumes them.
"""

from .core.reward_engine import RewardEngine
from .core.config import KMEConfig, ExploreConfig, FChoice, InitPolicy
from .core.checkpoint_manager import CheckpointManager
from .explore.trainer import train, rollout

__all__ = [
    'RewardEngine',
    'KMEConfig',
    'ExploreConfig',
    'FChoice',
    'InitPolicy',
    'CheckpointManager',
    'train',
    'rollout',
]
