"""
Exploration Harness

Sparse-reward environment, CEM policy search and the rollout/replay loop.
"""

from .environment import EnvContract, SparseBoxEnv
from .policy import LinearPolicy, CrossEntropyImprover
from .trainer import Trajectory, TrajectoryRecord, LearningRecord, rollout, train
from .coverage import coverage_metric, CoverageGrid

__all__ = [
    'EnvContract',
    'SparseBoxEnv',
    'LinearPolicy',
    'CrossEntropyImprover',
    'Trajectory',
    'TrajectoryRecord',
    'LearningRecord',
    'rollout',
    'train',
    'coverage_metric',
    'CoverageGrid',
]
