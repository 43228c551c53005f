"""
On-Policy Exploration Loop

Each batch:
1. rollout: B environment steps split across the CEM population; intrinsic
   rewards come from peek_reward, so the engine is not modified
2. policy update: CEM refit on discounted augmented returns
3. replay: every visited state is committed once, in a seeded shuffled order

Parameter sampling, environment and replay shuffles draw from separate seed
streams, so a beta=0 run follows exactly the trajectory of a run without an
engine.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Union

import numpy as np

from ..core.checkpoint_manager import CheckpointManager
from ..core.config import ExploreConfig
from ..core.errors import DimensionMismatchError, InvalidHyperparameterError
from ..core.reward_engine import RewardEngine
from .coverage import try_coverage_grid
from .environment import EnvContract, SparseBoxEnv
from .policy import CrossEntropyImprover, LinearPolicy

logger = logging.getLogger(__name__)


@dataclass
class TrajectoryRecord:
    state: np.ndarray
    action: np.ndarray
    extrinsic_r: float
    intrinsic_r: float
    augmented_r: float
    member: int = 0
    episode: int = 0


@dataclass
class Trajectory:
    """Ordered records of one batch plus the beta they were scored with."""

    beta: float
    records: List[TrajectoryRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    def states(self) -> np.ndarray:
        if not self.records:
            return np.empty((0, 0))
        return np.stack([r.state for r in self.records])

    @property
    def extrinsic_return(self) -> float:
        return float(sum(r.extrinsic_r for r in self.records))

    @property
    def intrinsic_return(self) -> float:
        return float(sum(r.intrinsic_r for r in self.records))

    @property
    def augmented_return(self) -> float:
        return float(sum(r.augmented_r for r in self.records))

    def recompute_augmented(self, beta: Optional[float] = None) -> np.ndarray:
        """extrinsic_r + beta * intrinsic_r for every record (default: stored beta)."""
        beta = self.beta if beta is None else beta
        return np.array([r.extrinsic_r + beta * r.intrinsic_r for r in self.records])

    def member_scores(self, population: int, gamma: float) -> np.ndarray:
        """
        Mean discounted augmented return over each member's episodes.

        Members that took no steps score -inf.
        """
        episode_returns = {}
        discount = {}
        for r in self.records:
            key = (r.member, r.episode)
            g = discount.get(key, 1.0)
            episode_returns[key] = episode_returns.get(key, 0.0) + g * r.augmented_r
            discount[key] = g * gamma

        totals = np.zeros(population)
        episodes = np.zeros(population)
        for (member, _), value in episode_returns.items():
            totals[member] += value
            episodes[member] += 1
        return np.where(episodes > 0, totals / np.maximum(episodes, 1), -np.inf)


@dataclass
class LearningRecord:
    batch_index: int
    env_steps: int
    extrinsic_return: float
    intrinsic_return: float
    coverage: float


@dataclass
class TrainResult:
    records: List[LearningRecord]
    improver: CrossEntropyImprover
    engine: Optional[RewardEngine]
    final_coverage: float
    goal_batches: int = 0

    def summary(self) -> dict:
        return {
            'batches': len(self.records),
            'env_steps': self.records[-1].env_steps if self.records else 0,
            'total_extrinsic_return': float(sum(r.extrinsic_return for r in self.records)),
            'batches_with_goal': self.goal_batches,
            'final_coverage': self.final_coverage,
            'best_score': self.improver.best_score if np.isfinite(self.improver.best_score) else None,
            'engine_commits': self.engine.commit_count if self.engine else 0,
        }


def _split_steps(total: int, parts: int) -> List[int]:
    base, extra = divmod(total, parts)
    return [base + (1 if i < extra else 0) for i in range(parts)]


def rollout(
    policy: Union[LinearPolicy, Sequence[LinearPolicy]],
    env: EnvContract,
    engine: Optional[RewardEngine],
    B: int,
    beta: float
) -> Trajectory:
    """
    Collect B steps. A sequence of policies splits B between its members, each
    starting from a fresh reset; episodes reset internally when done.

    Raises:
        DimensionMismatchError: If the engine dimension differs from env.state_dim
    """
    if B < 0:
        raise InvalidHyperparameterError(f"B must be >= 0 (got {B})")
    if engine is not None and engine.model.d != env.state_dim:
        raise DimensionMismatchError(
            f"Engine has d={engine.model.d}, environment state_dim={env.state_dim}"
        )
    policies = [policy] if isinstance(policy, LinearPolicy) else list(policy)

    trajectory = Trajectory(beta=beta)
    for member, (member_policy, steps) in enumerate(zip(policies, _split_steps(B, len(policies)))):
        if steps == 0:
            continue
        state = env.reset()
        episode = 0
        for _ in range(steps):
            action = member_policy.act(state)
            next_state, extrinsic, done = env.step(action)
            intrinsic = engine.peek_reward(next_state) if engine is not None else 0.0
            trajectory.records.append(TrajectoryRecord(
                state=next_state,
                action=np.asarray(action, dtype=np.float64),
                extrinsic_r=float(extrinsic),
                intrinsic_r=float(intrinsic),
                augmented_r=float(extrinsic) + beta * float(intrinsic),
                member=member,
                episode=episode,
            ))
            if done:
                state = env.reset()
                episode += 1
            else:
                state = next_state
    return trajectory


def train(
    config: ExploreConfig,
    env: Optional[EnvContract] = None,
    engine: Optional[RewardEngine] = None,
    use_engine: bool = True,
    checkpoint_manager: Optional[CheckpointManager] = None
) -> TrainResult:
    """
    Run t_max batches of rollout, policy update and replay.

    Args:
        config: Exploration configuration
        env: Environment (SparseBoxEnv from config.env when omitted)
        engine: Existing engine, e.g. resumed from a checkpoint
        use_engine: False runs the extrinsic-only baseline with no engine
        checkpoint_manager: Saves the engine every checkpoint_frequency batches and after the last one
    """
    env = env if env is not None else SparseBoxEnv.from_config(config.env)
    if use_engine and engine is None:
        engine = RewardEngine.from_config(config.engine, env.state_dim)
    if not use_engine:
        engine = None

    cem_seq, replay_seq = np.random.SeedSequence(config.seed).spawn(2)
    improver = CrossEntropyImprover(
        env.state_dim,
        env.action_dim,
        population=config.population,
        elite_fraction=config.elite_fraction,
        init_std=config.init_std,
        extra_std=config.extra_std,
        seed=cem_seq,
    )
    replay_rng = np.random.default_rng(replay_seq)

    box = env.box if hasattr(env, 'box') else None
    grid = try_coverage_grid(box, config.cells_per_axis) if box is not None else None
    if grid is None:
        logger.warning("⚠️  Coverage grid unavailable for this environment; coverage reported as NaN")

    logger.info(
        f"🚀 Exploring: {config.t_max} batches x B={config.batch_size}, beta={config.beta}, "
        f"engine={'on' if engine is not None else 'off'}"
    )

    records = []
    env_steps = 0
    goal_batches = 0
    for batch_index in range(config.t_max):
        params = improver.sample_population()
        trajectory = rollout(improver.policies(params), env, engine, config.batch_size, config.beta)
        improver.update(params, trajectory.member_scores(config.population, config.gamma))

        states = trajectory.states()
        shuffle_seed = int(replay_rng.integers(2 ** 63))
        if engine is not None:
            engine.batch_replay(states, shuffle_seed)

        env_steps += len(trajectory)
        coverage = grid.add(states) if grid is not None else float('nan')
        if trajectory.extrinsic_return > 0:
            goal_batches += 1
        records.append(LearningRecord(
            batch_index=batch_index,
            env_steps=env_steps,
            extrinsic_return=trajectory.extrinsic_return,
            intrinsic_return=trajectory.intrinsic_return,
            coverage=coverage,
        ))
        logger.debug(
            f"Batch {batch_index}: extrinsic {trajectory.extrinsic_return:.3g}, "
            f"intrinsic {trajectory.intrinsic_return:.3g}, coverage {coverage:.3f}"
        )

        if (
            checkpoint_manager is not None
            and engine is not None
            and (
                (batch_index + 1) % config.checkpoint_frequency == 0
                or batch_index == config.t_max - 1
            )
        ):
            checkpoint_manager.save_checkpoint(
                engine, {'batch_index': batch_index, 'env_steps': env_steps, 'seed': config.seed}
            )

        if (batch_index + 1) % max(1, config.t_max // 10) == 0:
            logger.info(
                f"📊 Batch {batch_index + 1}/{config.t_max}: coverage {coverage:.3f}, "
                f"goal reached in {goal_batches} batch(es)"
            )

    final_coverage = grid.coverage() if grid is not None else float('nan')
    logger.info(f"✅ Exploration done: {env_steps} steps, final coverage {final_coverage:.3f}")
    return TrainResult(records, improver, engine, final_coverage, goal_batches)
