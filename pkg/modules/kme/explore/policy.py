"""
Linear Policies and Cross-Entropy Method Improver

Policies are deterministic linear maps a = W s + b. The improver keeps a
diagonal Gaussian over the flattened (W, b) parameters, samples a population
each batch and refits mean and std on the elite fraction of members ranked by
their discounted augmented return.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from ..core.errors import DimensionMismatchError, InvalidHyperparameterError

logger = logging.getLogger(__name__)

# Batches over which extra_std decays linearly to zero
DEFAULT_EXTRA_DECAY_BATCHES = 100


@dataclass
class LinearPolicy:
    """a = weights @ s + bias"""

    weights: np.ndarray
    bias: np.ndarray

    @property
    def state_dim(self) -> int:
        return self.weights.shape[1]

    @property
    def action_dim(self) -> int:
        return self.weights.shape[0]

    def act(self, state) -> np.ndarray:
        return self.weights @ np.asarray(state, dtype=np.float64) + self.bias

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.weights.ravel(), self.bias])

    @classmethod
    def from_vector(cls, theta, state_dim: int, action_dim: int) -> 'LinearPolicy':
        theta = np.asarray(theta, dtype=np.float64)
        expected = parameter_count(state_dim, action_dim)
        if theta.shape != (expected,):
            raise DimensionMismatchError(
                f"Policy vector has shape {theta.shape}, expected ({expected},)"
            )
        split = action_dim * state_dim
        return cls(theta[:split].reshape(action_dim, state_dim).copy(), theta[split:].copy())


def parameter_count(state_dim: int, action_dim: int) -> int:
    return action_dim * state_dim + action_dim


class CrossEntropyImprover:
    """
    Derivative-free policy search.

    Args:
        state_dim: Policy input dimension
        action_dim: Policy output dimension
        population: Members sampled per batch
        elite_fraction: Share of members used to refit the distribution
        init_std: Initial per-parameter std (mean starts at zero)
        extra_std: Extra exploration std added in quadrature, decaying to zero
        extra_decay_batches: Batches over which extra_std decays
        seed: Seed of the parameter-sampling generator
    """

    def __init__(
        self,
        state_dim: int,
        action_dim: int,
        population: int = 32,
        elite_fraction: float = 0.25,
        init_std: float = 0.005,
        extra_std: float = 0.0,
        extra_decay_batches: int = DEFAULT_EXTRA_DECAY_BATCHES,
        seed: Union[int, np.random.SeedSequence, None] = 0
    ):
        if population < 2:
            raise InvalidHyperparameterError(f"population must be >= 2 (got {population})")
        if not 0.0 < elite_fraction <= 1.0:
            raise InvalidHyperparameterError(f"elite_fraction must be in (0, 1] (got {elite_fraction})")

        self.state_dim = state_dim
        self.action_dim = action_dim
        self.population = population
        self.n_elite = max(1, int(round(population * elite_fraction)))
        self.extra_std = float(extra_std)
        self.extra_decay_batches = max(1, int(extra_decay_batches))

        n_params = parameter_count(state_dim, action_dim)
        self.mean = np.zeros(n_params)
        self.std = np.full(n_params, float(init_std))
        self.batches = 0
        self.best_score = -np.inf
        self.best_params = self.mean.copy()
        self._rng = np.random.default_rng(seed)

    def sample_std(self) -> np.ndarray:
        extra = max(1.0 - self.batches / self.extra_decay_batches, 0.0) * self.extra_std ** 2
        return np.sqrt(self.std ** 2 + extra)

    def sample_population(self) -> np.ndarray:
        """(population, n_params) parameter matrix drawn from the current Gaussian."""
        noise = self._rng.standard_normal((self.population, self.mean.shape[0]))
        return self.mean + noise * self.sample_std()

    def policies(self, params: np.ndarray) -> list:
        return [LinearPolicy.from_vector(theta, self.state_dim, self.action_dim) for theta in params]

    def update(self, params: np.ndarray, scores: Sequence[float]) -> np.ndarray:
        """
        Refit mean and std on the elite members.

        Ties in score keep population order (stable sort).

        Returns:
            Indices of the elite members, best first
        """
        scores = np.asarray(scores, dtype=np.float64)
        if scores.shape != (params.shape[0],):
            raise DimensionMismatchError(
                f"Got {scores.shape[0]} scores for {params.shape[0]} population members"
            )
        elite = np.argsort(-scores, kind='stable')[:self.n_elite]
        elite_params = params[elite]
        self.mean = elite_params.mean(axis=0)
        self.std = elite_params.std(axis=0)
        self.batches += 1

        if scores[elite[0]] > self.best_score:
            self.best_score = float(scores[elite[0]])
            self.best_params = params[elite[0]].copy()

        logger.debug(
            f"CEM batch {self.batches}: elite scores "
            f"[{scores[elite[-1]]:.4g}, {scores[elite[0]]:.4g}], mean std {self.std.mean():.3g}"
        )
        return elite

    def mean_policy(self) -> LinearPolicy:
        return LinearPolicy.from_vector(self.mean, self.state_dim, self.action_dim)
