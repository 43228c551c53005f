"""
Core Engine Components

Clustering, objective, reward engine, density estimation and the supporting
configuration, checkpoint and sweep helpers.
"""

from .config import KMEConfig, ExploreConfig, EnvConfig, FChoice, InitPolicy, load_explore_config
from .clustering import (
    ClusterModel,
    NeighborCache,
    new_model,
    assign,
    assign_many,
    commit_point,
    weighted_pair_distance,
    rebuild_cache,
    update_cache,
    fit_model,
)
from .objective import ObjectiveSpec, objective_value, log_unit_ball_volume, entropy_lower_bound
from .reward_engine import RewardEngine
from .density import (
    SupportBox,
    MeasureEstimate,
    cluster_measures_mc,
    cluster_measures_grid,
    density_estimate,
    density_estimate_many,
    empirical_support_box,
)
from .checkpoint_manager import CheckpointManager
from .sweep_runner import SweepRunner, SweepResult

__all__ = [
    'KMEConfig',
    'ExploreConfig',
    'EnvConfig',
    'FChoice',
    'InitPolicy',
    'load_explore_config',
    'ClusterModel',
    'NeighborCache',
    'new_model',
    'assign',
    'assign_many',
    'commit_point',
    'weighted_pair_distance',
    'rebuild_cache',
    'update_cache',
    'fit_model',
    'ObjectiveSpec',
    'objective_value',
    'log_unit_ball_volume',
    'entropy_lower_bound',
    'RewardEngine',
    'SupportBox',
    'MeasureEstimate',
    'cluster_measures_mc',
    'cluster_measures_grid',
    'density_estimate',
    'density_estimate_many',
    'empirical_support_box',
    'CheckpointManager',
    'SweepRunner',
    'SweepResult',
]
