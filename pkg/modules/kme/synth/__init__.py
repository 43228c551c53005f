"""
Synthetic Distributions

Samplers with known densities/entropies for checking the estimators.
"""

from .distributions import (
    DistributionKind,
    DistributionSpec,
    uniform_box,
    gaussian,
    gaussian_mixture,
    random_walk,
    sample,
    pdf,
    true_entropy,
    reference_entropy,
)
from .suite_loader import load_sample_suite, load_walk_grid, WalkGrid

__all__ = [
    'DistributionKind',
    'DistributionSpec',
    'uniform_box',
    'gaussian',
    'gaussian_mixture',
    'random_walk',
    'sample',
    'pdf',
    'true_entropy',
    'reference_entropy',
    'load_sample_suite',
    'load_walk_grid',
    'WalkGrid',
]
