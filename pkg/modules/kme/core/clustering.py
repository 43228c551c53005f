"""
Additively-Weighted Online K-Means

Cluster model (centers, counts) with count-based balancing weights and the
incrementally maintained closest-neighbor cache used by the reward engine.

Weighted distance between clusters i and j:
    ||mu_i - mu_j|| + kappa * (n_j - n_i)
Assignment of a state s:
    argmin_i ||mu_i - s|| - kappa * (mean(n) - n_i)

Ties resolve to the lowest index everywhere (np.argmin semantics).
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np

from .config import InitPolicy, validate_engine_hyperparameters
from .errors import DimensionMismatchError, InvalidHyperparameterError, InvalidStateError

logger = logging.getLogger(__name__)

DEFAULT_PATHOLOGICAL_THRESHOLD = 0.10

# Rows per chunk for vectorised assignment (bounds the (rows, k, d) temporary)
ASSIGN_CHUNK_SIZE = 2048


@dataclass
class ClusterModel:
    """
    Summary of visited states.

    centers is a (k, d) float64 matrix, counts a (k,) int64 vector. count_sum is
    kept as a Python int so it never overflows and always equals counts.sum().
    adopted tracks how many centers have been seeded under FIRST_POINTS.
    """

    k: int
    d: int
    alpha: float
    kappa: float
    init: InitPolicy
    centers: np.ndarray
    counts: np.ndarray
    count_sum: int = 0
    adopted: int = 0

    def mean_count(self) -> float:
        return self.count_sum / self.k

    def weights(self) -> np.ndarray:
        """w_i = kappa * (mean(n) - n_i), recomputed from the current counts."""
        return self.kappa * (self.mean_count() - self.counts)

    def in_adoption_phase(self) -> bool:
        return self.init is InitPolicy.FIRST_POINTS and self.adopted < self.k

    def copy(self) -> 'ClusterModel':
        return ClusterModel(
            k=self.k,
            d=self.d,
            alpha=self.alpha,
            kappa=self.kappa,
            init=self.init,
            centers=self.centers.copy(),
            counts=self.counts.copy(),
            count_sum=self.count_sum,
            adopted=self.adopted,
        )

    def to_dict(self) -> Dict[str, Any]:
        """Snapshot record: hyperparameters, row-major centers and counts."""
        return {
            'k': self.k,
            'd': self.d,
            'alpha': self.alpha,
            'kappa': self.kappa,
            'init': self.init.value,
            'adopted': self.adopted,
            'centers': self.centers.ravel().tolist(),
            'counts': [int(n) for n in self.counts],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ClusterModel':
        """
        Restore a snapshot produced by to_dict.

        Raises:
            InvalidHyperparameterError: If hyperparameters or array shapes are invalid
        """
        model = new_model(
            int(data['k']),
            int(data['d']),
            float(data['alpha']),
            float(data['kappa']),
            InitPolicy(data.get('init', InitPolicy.ZERO.value)),
        )
        centers = np.asarray(data['centers'], dtype=np.float64)
        counts = np.asarray(data['counts'], dtype=np.int64)
        if centers.size != model.k * model.d or counts.shape != (model.k,):
            raise InvalidHyperparameterError(
                f"Snapshot arrays do not match k={model.k}, d={model.d} "
                f"(centers: {centers.size} values, counts: {counts.shape})"
            )
        if not np.all(np.isfinite(centers)) or np.any(counts < 0):
            raise InvalidHyperparameterError("Snapshot has non-finite centers or negative counts")
        model.centers = centers.reshape(model.k, model.d)
        model.counts = counts
        model.count_sum = int(sum(int(n) for n in counts))
        model.adopted = int(data.get('adopted', 0))
        return model


@dataclass
class NeighborCache:
    """
    Per-cluster weighted-closest other cluster (m) and its weighted distance (M).
    """

    nearest_index: np.ndarray
    nearest_dist: np.ndarray

    def copy(self) -> 'NeighborCache':
        return NeighborCache(self.nearest_index.copy(), self.nearest_dist.copy())

    def to_dict(self) -> Dict[str, Any]:
        return {
            'nearest_index': [int(i) for i in self.nearest_index],
            'nearest_dist': self.nearest_dist.tolist(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'NeighborCache':
        return cls(
            np.asarray(data['nearest_index'], dtype=np.int64),
            np.asarray(data['nearest_dist'], dtype=np.float64),
        )


@dataclass
class RepairResult:
    """Outcome of a cache repair around one moved cluster (not yet applied)."""

    nearest_index: np.ndarray
    nearest_dist: np.ndarray
    rescanned: int
    pathological: bool


# ===== CONSTRUCTION =====

def new_model(
    k: int,
    d: int,
    alpha: float,
    kappa: float,
    init: InitPolicy = InitPolicy.ZERO
) -> ClusterModel:
    """
    Create an empty model with all counts at zero.

    ZERO places every center at the origin; FIRST_POINTS leaves them at the
    origin until the first k committed points are adopted verbatim.

    Raises:
        InvalidHyperparameterError: If k < 2, d < 1, alpha outside (0, 1),
            kappa < 0 or any value is not finite
    """
    validate_engine_hyperparameters(k, alpha, kappa)
    if int(d) != d or d < 1:
        raise InvalidHyperparameterError(f"d must be an integer >= 1 (got {d})")
    k, d = int(k), int(d)
    return ClusterModel(
        k=k,
        d=d,
        alpha=float(alpha),
        kappa=float(kappa),
        init=InitPolicy(init),
        centers=np.zeros((k, d), dtype=np.float64),
        counts=np.zeros(k, dtype=np.int64),
    )


# ===== DISTANCES AND ASSIGNMENT =====

def _row_distances(centers: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Euclidean distance from x to every center."""
    diff = centers - x
    return np.sqrt(np.einsum('ij,ij->i', diff, diff))


def _as_state(model: ClusterModel, s) -> np.ndarray:
    state = np.asarray(s, dtype=np.float64)
    if state.ndim == 0:
        state = state.reshape(1)
    if state.shape != (model.d,):
        raise DimensionMismatchError(
            f"State has shape {state.shape}, expected ({model.d},)"
        )
    if not np.all(np.isfinite(state)):
        raise InvalidStateError("State contains non-finite values")
    return state


def _as_states(model: ClusterModel, X) -> np.ndarray:
    states = np.asarray(X, dtype=np.float64)
    if states.ndim == 1 and model.d == 1:
        states = states.reshape(-1, 1)
    if states.ndim != 2 or states.shape[1] != model.d:
        raise DimensionMismatchError(
            f"States have shape {states.shape}, expected (n, {model.d})"
        )
    return states


def assign_many(model: ClusterModel, X, chunk_size: int = ASSIGN_CHUNK_SIZE) -> np.ndarray:
    """
    Assign every row of X to its weighted-closest cluster.

    Returns:
        (n,) int64 array of cluster indices
    """
    states = _as_states(model, X)
    weights = model.weights()
    labels = np.empty(states.shape[0], dtype=np.int64)
    for start in range(0, states.shape[0], chunk_size):
        block = states[start:start + chunk_size]
        diff = block[:, np.newaxis, :] - model.centers[np.newaxis, :, :]
        scores = np.sqrt(np.einsum('ijk,ijk->ij', diff, diff)) - weights
        labels[start:start + chunk_size] = np.argmin(scores, axis=1)
    return labels


def assign(model: ClusterModel, s) -> int:
    """
    Index minimizing ||mu_i - s|| - kappa * (mean(n) - n_i); lowest index on ties.

    Raises:
        DimensionMismatchError: If s does not have dimension d
    """
    return _assign_state(model, _as_state(model, s))


def _assign_state(model: ClusterModel, state: np.ndarray) -> int:
    return int(np.argmin(_row_distances(model.centers, state) - model.weights()))


def weighted_pair_distance(model: ClusterModel, i: int, j: int) -> float:
    """
    ||mu_i - mu_j|| + kappa * (n_j - n_i).

    Raises:
        InvalidStateError: If i == j or either index is out of range
    """
    if i == j:
        raise InvalidStateError(f"weighted_pair_distance needs two distinct clusters (got i=j={i})")
    for idx in (i, j):
        if not 0 <= idx < model.k:
            raise InvalidStateError(f"Cluster index {idx} out of range for k={model.k}")
    diff = model.centers[i] - model.centers[j]
    return float(np.sqrt(diff @ diff) + model.kappa * (int(model.counts[j]) - int(model.counts[i])))


def _weighted_row(model: ClusterModel, i: int) -> np.ndarray:
    """Weighted distances from cluster i to every cluster, +inf at i."""
    row = _row_distances(model.centers, model.centers[i]) + model.kappa * (model.counts - model.counts[i])
    row[i] = np.inf
    return row


# ===== NEIGHBOR CACHE =====

def rebuild_cache(model: ClusterModel) -> NeighborCache:
    """Exact O(k^2 d) computation of the closest-neighbor cache."""
    nearest_index = np.empty(model.k, dtype=np.int64)
    nearest_dist = np.empty(model.k, dtype=np.float64)
    for i in range(model.k):
        row = _weighted_row(model, i)
        j = int(np.argmin(row))
        nearest_index[i] = j
        nearest_dist[i] = row[j]
    return NeighborCache(nearest_index, nearest_dist)


def _twin_fallback(
    model: ClusterModel,
    moved: int,
    old_center: np.ndarray,
    old_count: int,
    rows: np.ndarray
) -> np.ndarray:
    """
    Lowest-index cluster other than each row that sits exactly where `moved`
    was (same center, same count), or -1.

    Such a twin is at the old cached distance, so an invalidated row can point
    at it without a rescan.
    """
    same = (model.counts == old_count) & np.all(model.centers == old_center, axis=1)
    same[moved] = False
    twins = np.flatnonzero(same)
    if twins.size == 0:
        return np.full(rows.size, -1, dtype=np.int64)
    second = twins[1] if twins.size > 1 else -1
    return np.where(rows == twins[0], second, twins[0]).astype(np.int64)


def repair_cache(
    model: ClusterModel,
    cache: NeighborCache,
    moved: int,
    moved_center: Optional[np.ndarray] = None,
    moved_count: Optional[int] = None,
    pathological_threshold: float = DEFAULT_PATHOLOGICAL_THRESHOLD
) -> RepairResult:
    """
    Compute the cache after cluster `moved` takes center moved_center and count
    moved_count, without touching model or cache.

    When the overrides are omitted the model's own row is used (post-commit
    repair). Only the moved row and rows whose cached nearest was the moved
    cluster and got worse are rescanned in full; with the overrides given, such
    a row falls back to a cluster identical to the old `moved` when one exists.
    """
    proposal = moved_center is not None
    if moved_center is None:
        moved_center = model.centers[moved]
    if moved_count is None:
        moved_count = int(model.counts[moved])

    kappa = model.kappa
    counts = model.counts
    old_index = cache.nearest_index
    old_dist = cache.nearest_dist

    # ||mu_j - c'|| for every j, shared by the moved row and every patched entry
    dist_new = _row_distances(model.centers, moved_center)
    shift = kappa * (counts - moved_count)

    # Entry (i, moved) for every other row i
    candidate = dist_new - shift
    candidate[moved] = np.inf
    take = (candidate < old_dist) | ((candidate == old_dist) & (moved <= old_index))
    nearest_index = np.where(take, moved, old_index)
    nearest_dist = np.where(take, candidate, old_dist)

    # Moved row: full O(kd) scan
    row = dist_new + shift
    row[moved] = np.inf
    j = int(np.argmin(row))
    nearest_index[moved] = j
    nearest_dist[moved] = row[j]

    rescan = np.flatnonzero((old_index == moved) & ~take)
    if proposal and rescan.size:
        fallback = _twin_fallback(model, moved, model.centers[moved], int(counts[moved]), rescan)
        redirect = fallback >= 0
        nearest_index[rescan[redirect]] = fallback[redirect]
        nearest_dist[rescan[redirect]] = old_dist[rescan[redirect]]
        rescan = rescan[~redirect]

    for i in rescan:
        row = _row_distances(model.centers, model.centers[i]) + kappa * (counts - counts[i])
        row[moved] = candidate[i]
        row[i] = np.inf
        j = int(np.argmin(row))
        nearest_index[i] = j
        nearest_dist[i] = row[j]

    rescanned = int(rescan.size)
    return RepairResult(
        nearest_index=nearest_index,
        nearest_dist=nearest_dist,
        rescanned=rescanned,
        pathological=rescanned > pathological_threshold * model.k,
    )


def update_cache(
    model: ClusterModel,
    cache: NeighborCache,
    moved: int,
    pathological_threshold: float = DEFAULT_PATHOLOGICAL_THRESHOLD
) -> bool:
    """
    Repair cache in place after `moved` was updated in model.

    Returns:
        True if the repair rescanned more than pathological_threshold * k rows
    """
    result = repair_cache(model, cache, moved, pathological_threshold=pathological_threshold)
    cache.nearest_index = result.nearest_index
    cache.nearest_dist = result.nearest_dist
    if result.pathological:
        logger.debug(f"Pathological update: cluster {moved} forced {result.rescanned} rescans")
    return result.pathological


# ===== COMMIT =====

def plan_commit(model: ClusterModel, s) -> Tuple[int, np.ndarray]:
    """
    Target cluster and its post-update center for state s (no mutation).

    Under FIRST_POINTS the first k states are adopted verbatim as centers.
    """
    state = _as_state(model, s)
    if model.in_adoption_phase():
        return model.adopted, state.copy()
    target = _assign_state(model, state)
    return target, model.alpha * state + (1.0 - model.alpha) * model.centers[target]


def commit_point(
    model: ClusterModel,
    cache: NeighborCache,
    s,
    pathological_threshold: float = DEFAULT_PATHOLOGICAL_THRESHOLD
) -> Tuple[int, bool]:
    """
    Assign s, move the winning center to alpha*s + (1-alpha)*mu, increment its
    count and repair the cache.

    Returns:
        (cluster index, pathological flag)

    Raises:
        DimensionMismatchError: If s does not have dimension d
    """
    target, new_center = plan_commit(model, s)
    repair = repair_cache(
        model, cache, target,
        moved_center=new_center,
        moved_count=int(model.counts[target]) + 1,
        pathological_threshold=pathological_threshold,
    )
    apply_commit(model, cache, target, new_center, repair)
    if repair.pathological:
        logger.debug(f"Pathological update: cluster {target} forced {repair.rescanned} rescans")
    return target, repair.pathological


def apply_commit(
    model: ClusterModel,
    cache: NeighborCache,
    target: int,
    new_center: np.ndarray,
    repair: RepairResult
) -> None:
    """Write a planned commit and its precomputed repair into model and cache."""
    if model.in_adoption_phase():
        model.adopted += 1
    model.centers[target] = new_center
    model.counts[target] += 1
    model.count_sum += 1
    cache.nearest_index = repair.nearest_index
    cache.nearest_dist = repair.nearest_dist


def fit_model(
    samples,
    k: int,
    alpha: float,
    kappa: float,
    init: InitPolicy = InitPolicy.ZERO,
    passes: int = 1,
    shuffle_seed=None
) -> Tuple[ClusterModel, NeighborCache]:
    """
    Stream samples through a fresh model.

    The first pass is in order; each later pass streams a permutation drawn
    from shuffle_seed.
    """
    if passes < 1:
        raise InvalidHyperparameterError(f"passes must be >= 1 (got {passes})")
    X = np.asarray(samples, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    model = new_model(k, X.shape[1], alpha, kappa, init)
    cache = rebuild_cache(model)
    rng = np.random.default_rng(shuffle_seed)
    for pass_index in range(passes):
        order = rng.permutation(X.shape[0]) if pass_index else np.arange(X.shape[0])
        for i in order:
            commit_point(model, cache, X[i])
    logger.debug(f"Fitted k={k} model on {X.shape[0]} samples x {passes} pass(es)")
    return model, cache
