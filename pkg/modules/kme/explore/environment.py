"""
Exploration Environments

EnvContract is the minimal surface the exploration loop needs. SparseBoxEnv is
a continuous point-mass in [-1, 1]^d that pays 1 only inside a small goal ball.
"""

import logging
from typing import Optional, Protocol, Sequence, Tuple, runtime_checkable

import numpy as np

from ..core.config import EnvConfig
from ..core.density import SupportBox
from ..core.errors import DimensionMismatchError, InvalidHyperparameterError

logger = logging.getLogger(__name__)

BOX_LOW = -1.0
BOX_HIGH = 1.0


@runtime_checkable
class EnvContract(Protocol):
    """reset() -> state, step(action) -> (state, extrinsic reward, done)."""

    state_dim: int
    action_dim: int

    def reset(self) -> np.ndarray:
        ...

    def step(self, action) -> Tuple[np.ndarray, float, bool]:
        ...


class SparseBoxEnv:
    """
    Point mass moving by velocity actions inside [-1, 1]^d.

    - starts at the origin
    - actions are clamped to max_speed in Euclidean norm
    - positions are clipped to the box
    - reward 1.0 iff ||state - goal|| <= goal_radius, which also ends the episode
    - episodes time out after max_episode_steps
    """

    def __init__(
        self,
        d: int = 2,
        goal: Optional[Sequence[float]] = None,
        goal_radius: float = 0.1,
        max_episode_steps: int = 64,
        max_speed: float = 0.05
    ):
        if d < 1:
            raise InvalidHyperparameterError(f"d must be >= 1 (got {d})")
        if goal_radius <= 0 or max_speed <= 0 or max_episode_steps < 1:
            raise InvalidHyperparameterError(
                "goal_radius and max_speed must be > 0, max_episode_steps >= 1"
            )
        goal = np.full(d, 0.9) if goal is None else np.asarray(goal, dtype=np.float64)
        if goal.shape != (d,):
            raise DimensionMismatchError(f"goal has shape {goal.shape}, expected ({d},)")

        self.state_dim = d
        self.action_dim = d
        self.goal = goal
        self.goal_radius = float(goal_radius)
        self.max_episode_steps = int(max_episode_steps)
        self.max_speed = float(max_speed)
        self.start = np.zeros(d)

        self._state = self.start.copy()
        self._steps = 0

    @classmethod
    def from_config(cls, config: EnvConfig) -> 'SparseBoxEnv':
        return cls(
            d=config.dim,
            goal=config.goal,
            goal_radius=config.goal_radius,
            max_episode_steps=config.max_episode_steps,
            max_speed=config.max_speed,
        )

    @property
    def box(self) -> SupportBox:
        return SupportBox(np.full(self.state_dim, BOX_LOW), np.full(self.state_dim, BOX_HIGH))

    def reset(self) -> np.ndarray:
        self._state = self.start.copy()
        self._steps = 0
        return self._state.copy()

    def clamp_action(self, action) -> np.ndarray:
        action = np.asarray(action, dtype=np.float64).reshape(-1)
        if action.shape[0] != self.action_dim:
            raise DimensionMismatchError(
                f"Action has dimension {action.shape[0]}, expected {self.action_dim}"
            )
        if not np.all(np.isfinite(action)):
            return np.zeros(self.action_dim)
        speed = float(np.linalg.norm(action))
        if speed > self.max_speed:
            action = action * (self.max_speed / speed)
        return action

    def in_goal(self, state) -> bool:
        return bool(np.linalg.norm(np.asarray(state) - self.goal) <= self.goal_radius)

    def step(self, action) -> Tuple[np.ndarray, float, bool]:
        velocity = self.clamp_action(action)
        self._state = np.clip(self._state + velocity, BOX_LOW, BOX_HIGH)
        self._steps += 1

        reward = 1.0 if self.in_goal(self._state) else 0.0
        done = reward > 0 or self._steps >= self.max_episode_steps
        return self._state.copy(), reward, done
