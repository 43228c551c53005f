"""
Clustering Objective and Entropy Lower Bound

L_f = sum_i f(M_i) over the cached weighted nearest distances M, with
f = sqrt (clamped at 0) or f = log (clamped at log_floor). The entropy lower
bound always uses the log form:

    (d / k) * sum_i log M_i + log(unit ball volume in d dims) - d
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .clustering import ClusterModel, NeighborCache
from .config import FChoice
from .errors import InvalidHyperparameterError

DEFAULT_LOG_FLOOR = 1e-12


@dataclass(frozen=True)
class ObjectiveSpec:
    """Objective transform and the clamp used by the log variant."""

    f_choice: FChoice = FChoice.SQRT
    log_floor: float = DEFAULT_LOG_FLOOR

    def __post_init__(self):
        if not isinstance(self.f_choice, FChoice):
            object.__setattr__(self, 'f_choice', FChoice(str(self.f_choice).lower()))
        if not (self.log_floor > 0 and math.isfinite(self.log_floor)):
            raise InvalidHyperparameterError(f"log_floor must be a positive finite real (got {self.log_floor})")

    def to_dict(self):
        return {'f_choice': self.f_choice.value, 'log_floor': self.log_floor}

    @classmethod
    def from_dict(cls, data) -> 'ObjectiveSpec':
        return cls(FChoice(data['f_choice']), float(data['log_floor']))


def apply_f(values: np.ndarray, spec: ObjectiveSpec) -> np.ndarray:
    """Elementwise f with the domain clamps applied."""
    values = np.asarray(values, dtype=np.float64)
    if spec.f_choice is FChoice.SQRT:
        return np.sqrt(np.maximum(values, 0.0))
    return np.log(np.maximum(values, spec.log_floor))


def objective_from_distances(nearest_dist: np.ndarray, spec: ObjectiveSpec) -> float:
    return float(np.sum(apply_f(nearest_dist, spec)))


def objective_delta(before: np.ndarray, after: np.ndarray, spec: ObjectiveSpec) -> float:
    """L_f(after) - L_f(before), summed over the entries that differ only."""
    changed = np.flatnonzero(after != before)
    return float(np.sum(apply_f(after[changed], spec)) - np.sum(apply_f(before[changed], spec)))


def objective_value(model: ClusterModel, cache: NeighborCache, spec: ObjectiveSpec) -> float:
    """Sum of f over the cached weighted nearest distances (model kept for API symmetry)."""
    return objective_from_distances(cache.nearest_dist, spec)


def log_unit_ball_volume(d: int) -> float:
    """
    log(pi^(d/2) / Gamma(d/2 + 1)), via log-gamma so large d does not overflow.

    Raises:
        InvalidHyperparameterError: If d < 1
    """
    if int(d) != d or d < 1:
        raise InvalidHyperparameterError(f"d must be an integer >= 1 (got {d})")
    return 0.5 * d * math.log(math.pi) - float(gammaln(0.5 * d + 1.0))


def entropy_lower_bound(
    model: ClusterModel,
    cache: NeighborCache,
    log_floor: float = DEFAULT_LOG_FLOOR
) -> float:
    """Approximate lower bound on the differential entropy of the clustered data."""
    log_objective = objective_from_distances(cache.nearest_dist, ObjectiveSpec(FChoice.LOG, log_floor))
    return (model.d / model.k) * log_objective + log_unit_ball_volume(model.d) - model.d
