"""
Intrinsic Reward Engine

Reward = objective after observing a state minus objective before. Peek
computes it without touching state (rollout phase); commit applies the update
(replay phase). Both go through the same cache repair, so their values agree
bit for bit.
"""

import hashlib
import logging
from typing import Any, Dict, Optional, Sequence

import numpy as np

from .clustering import (
    ClusterModel,
    NeighborCache,
    apply_commit,
    new_model,
    plan_commit,
    rebuild_cache,
    repair_cache,
    DEFAULT_PATHOLOGICAL_THRESHOLD,
)
from .config import FChoice, KMEConfig
from .errors import NoCommitsError
from .objective import ObjectiveSpec, entropy_lower_bound, objective_delta, objective_from_distances

logger = logging.getLogger(__name__)


class RewardEngine:
    """
    Cluster model + neighbor cache + objective spec + instrumentation counters.

    Single writer: commit_reward and batch_replay mutate; peek_reward, objective
    and bound are read-only.
    """

    def __init__(
        self,
        model: ClusterModel,
        spec: Optional[ObjectiveSpec] = None,
        cache: Optional[NeighborCache] = None,
        pathological_threshold: float = DEFAULT_PATHOLOGICAL_THRESHOLD
    ):
        """
        Args:
            model: Cluster model (taken over, not copied)
            spec: Objective spec (defaults to sqrt)
            cache: Existing cache coherent with model (rebuilt when omitted)
            pathological_threshold: Rescan fraction that flags an update
        """
        self.model = model
        self.spec = spec or ObjectiveSpec()
        self.cache = cache if cache is not None else rebuild_cache(model)
        self.pathological_threshold = pathological_threshold
        self.commit_count = 0
        self.pathological_count = 0
        self.rescan_count = 0

    @classmethod
    def from_config(cls, config: KMEConfig, d: int) -> 'RewardEngine':
        model = new_model(config.k, d, config.alpha, config.kappa, config.init)
        return cls(
            model,
            ObjectiveSpec(config.f, config.log_floor),
            pathological_threshold=config.pathological_threshold,
        )

    # ===== REWARDS =====

    def _propose(self, s):
        target, new_center = plan_commit(self.model, s)
        repair = repair_cache(
            self.model,
            self.cache,
            target,
            moved_center=new_center,
            moved_count=int(self.model.counts[target]) + 1,
            pathological_threshold=self.pathological_threshold,
        )
        return target, new_center, repair

    def peek_reward(self, s) -> float:
        """
        Objective delta a commit of s would produce; engine state is untouched.

        Raises:
            DimensionMismatchError: If s does not have dimension d
        """
        _, _, repair = self._propose(s)
        return objective_delta(self.cache.nearest_dist, repair.nearest_dist, self.spec)

    def commit_reward(self, s) -> float:
        """
        Commit s (center move, count increment, cache repair, counters) and
        return the objective delta.

        Raises:
            DimensionMismatchError: If s does not have dimension d
        """
        target, new_center, repair = self._propose(s)
        reward = objective_delta(self.cache.nearest_dist, repair.nearest_dist, self.spec)
        apply_commit(self.model, self.cache, target, new_center, repair)

        self.commit_count += 1
        self.rescan_count += repair.rescanned
        if repair.pathological:
            self.pathological_count += 1
            logger.debug(
                f"Pathological commit #{self.commit_count}: cluster {target}, "
                f"{repair.rescanned} rescans"
            )

        return reward

    def batch_replay(self, states: Sequence, shuffle_seed: int) -> None:
        """Commit states in a seeded uniformly shuffled order, discarding rewards."""
        states = np.asarray(states, dtype=np.float64)
        if states.size == 0:
            return
        if states.ndim == 1:
            states = states.reshape(-1, self.model.d)
        order = np.random.default_rng(shuffle_seed).permutation(states.shape[0])
        for idx in order:
            self.commit_reward(states[idx])

    def pathological_fraction(self) -> float:
        """
        Share of commits whose cache repair was flagged pathological.

        Raises:
            NoCommitsError: If nothing has been committed yet
        """
        if self.commit_count == 0:
            raise NoCommitsError("pathological_fraction is undefined before the first commit")
        return self.pathological_count / self.commit_count

    # ===== INSPECTION =====

    def objective(self, f_choice: Optional[FChoice] = None) -> float:
        """L_f for the engine's f, or for f_choice when given."""
        spec = self.spec if f_choice is None else ObjectiveSpec(f_choice, self.spec.log_floor)
        return objective_from_distances(self.cache.nearest_dist, spec)

    def bound(self) -> float:
        return entropy_lower_bound(self.model, self.cache, self.spec.log_floor)

    def state_hash(self) -> str:
        """MD5 over every piece of mutable engine state."""
        digest = hashlib.md5()
        digest.update(np.ascontiguousarray(self.model.centers).tobytes())
        digest.update(np.ascontiguousarray(self.model.counts).tobytes())
        digest.update(np.ascontiguousarray(self.cache.nearest_index).tobytes())
        digest.update(np.ascontiguousarray(self.cache.nearest_dist).tobytes())
        digest.update(
            f"{self.model.count_sum}|{self.model.adopted}|{self.commit_count}|"
            f"{self.pathological_count}|{self.rescan_count}".encode()
        )
        return digest.hexdigest()

    def clone(self) -> 'RewardEngine':
        engine = RewardEngine(
            self.model.copy(),
            self.spec,
            self.cache.copy(),
            self.pathological_threshold,
        )
        engine.commit_count = self.commit_count
        engine.pathological_count = self.pathological_count
        engine.rescan_count = self.rescan_count
        return engine

    # ===== CHECKPOINT RECORD =====

    def to_dict(self) -> Dict[str, Any]:
        return {
            'model': self.model.to_dict(),
            'cache': self.cache.to_dict(),
            'spec': self.spec.to_dict(),
            'pathological_threshold': self.pathological_threshold,
            'counters': {
                'commit_count': self.commit_count,
                'pathological_count': self.pathological_count,
                'rescan_count': self.rescan_count,
            },
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'RewardEngine':
        model = ClusterModel.from_dict(data['model'])
        cache = NeighborCache.from_dict(data['cache']) if data.get('cache') else None
        engine = cls(
            model,
            ObjectiveSpec.from_dict(data['spec']),
            cache,
            float(data.get('pathological_threshold', DEFAULT_PATHOLOGICAL_THRESHOLD)),
        )
        counters = data.get('counters', {})
        engine.commit_count = int(counters.get('commit_count', 0))
        engine.pathological_count = int(counters.get('pathological_count', 0))
        engine.rescan_count = int(counters.get('rescan_count', 0))
        return engine
