"""
Experiment Runner

One method per command-line experiment. Each returns an ExperimentReport
(columns, rows, summary) that the report writer turns into files. Multi-seed
runs fan out through SweepRunner with one engine per seed.
"""

import logging
import math
import time
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..core.checkpoint_manager import CheckpointManager
from ..core.clustering import assign_many, fit_model
from ..core.config import ExploreConfig, FChoice, InitPolicy, KMEConfig
from ..core.density import (
    SupportBox,
    cluster_measures_grid,
    cluster_measures_mc,
    empirical_support_box,
    write_cluster_table,
)
from ..core.errors import (
    EntropyUnavailableError,
    InvalidHyperparameterError,
    SweepFailedError,
    UnsupportedDimensionError,
)
from ..core.objective import entropy_lower_bound
from ..core.reward_engine import RewardEngine
from ..core.sweep_runner import SweepRunner
from ..explore.trainer import train
from ..synth.distributions import (
    DistributionKind,
    DistributionSpec,
    gaussian,
    pdf,
    random_walk,
    reference_entropy,
    sample,
    true_entropy,
    uniform_box,
)
from ..synth.suite_loader import WalkGrid

logger = logging.getLogger(__name__)

DENSITY_KS = (10, 100, 1000)
BENCH_KS = (50, 100, 300, 1000)
BENCH_DIM = 64
BENCH_FLOOR_K = 2
BENCH_WALK_SIGMA = 0.1
BOUND_BAND = (-3.0, 0.3)
DENSITY_REFERENCE_K = 10
DENSITY_VISITS_PER_CELL = 4


@dataclass
class ExperimentReport:
    command: str
    columns: List[str]
    rows: List[Dict[str, Any]] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)


def unit_square() -> DistributionSpec:
    return uniform_box([0.0, 0.0], [1.0, 1.0], name="unit_square")


def default_bound_distributions() -> List[DistributionSpec]:
    """Uniform [0,1]^2 (H = 0) and isotropic Gaussian with sigma = 0.1 in d = 2."""
    return [unit_square(), gaussian([0.0, 0.0], 0.01, name="gaussian_s0.1")]


def strictly_decreasing(values: Sequence[float]) -> bool:
    return all(a > b for a, b in zip(values, values[1:]))


def count_inversions(values: Sequence[float]) -> int:
    """Adjacent pairs where the sequence goes up."""
    return sum(1 for a, b in zip(values, values[1:]) if b > a)


def fit_exponent(ks: Sequence[float], times: Sequence[float]) -> Optional[float]:
    """Slope of log(time) against log(k), None with fewer than two points."""
    if len(ks) < 2:
        return None
    slope, _ = np.polyfit(np.log(np.asarray(ks, dtype=float)), np.log(np.asarray(times, dtype=float)), 1)
    return float(slope)


def density_fit_schedule(alpha: float, k: int, n: int) -> Tuple[float, int]:
    """
    (alpha, passes) for a density fit with k clusters on n samples.

    Above DENSITY_REFERENCE_K the rate shrinks as 1/sqrt(k) so center jitter
    stays below the cell size, and the data is replayed until each cell has
    seen about DENSITY_VISITS_PER_CELL / alpha updates.
    """
    scaled = alpha * min(1.0, math.sqrt(DENSITY_REFERENCE_K / k))
    passes = max(1, math.ceil(DENSITY_VISITS_PER_CELL * k / (scaled * max(n, 1))))
    return scaled, passes


class ExperimentRunner:
    """
    Runs experiments against a shared engine hyperparameter block.

    Args:
        engine_config: Hyperparameters every engine is built from
        seeds: Seeds to run (one independent job per seed)
        workers: Parallel workers for multi-seed sweeps
        record_every: Curve sampling period in commits (final step always recorded)
        init: Center initialization for every engine the experiments build
    """

    def __init__(
        self,
        engine_config: KMEConfig,
        seeds: Sequence[int] = (0,),
        workers: int = 1,
        record_every: int = 100,
        init: InitPolicy = InitPolicy.FIRST_POINTS
    ):
        if record_every < 1:
            raise InvalidHyperparameterError(f"record_every must be >= 1 (got {record_every})")
        self.engine_config = engine_config
        self.seeds = sorted(set(int(s) for s in seeds)) or [0]
        self.sweeper = SweepRunner(max_workers=workers)
        self.record_every = record_every
        self.init = init

    # ===== SHARED =====

    def _sweep(self, job: Callable[[int], Any], label: str) -> List[Any]:
        sweep = self.sweeper.run(job, self.seeds, label)
        if not sweep.ok:
            seed, message = sorted(sweep.failures.items())[0]
            raise SweepFailedError(
                f"{label}: {len(sweep.failures)} seed(s) failed, first (seed {seed}): {message}"
            )
        return sweep.ordered()

    def _engine(self, d: int) -> RewardEngine:
        return RewardEngine.from_config(replace(self.engine_config, init=self.init), d)

    def _stream(self, engine: RewardEngine, X: np.ndarray, base_row: Dict[str, Any]) -> List[Dict[str, Any]]:
        """Commit X in order, recording the objective curve."""
        rows = []
        n = X.shape[0]
        for t in range(n):
            engine.commit_reward(X[t])
            step = t + 1
            if step % self.record_every == 0 or step == n:
                rows.append({
                    **base_row,
                    'step': step,
                    'objective_sqrt': engine.objective(FChoice.SQRT),
                    'objective_log': engine.objective(FChoice.LOG),
                    'bound': engine.bound(),
                })
        return rows

    # ===== ENTROPY ORDERING =====

    def entropy_sample(self, suite: Sequence[DistributionSpec], n: int = 20_000) -> ExperimentReport:
        """
        Stream n samples of every suite distribution through a fresh engine.

        The final bound is the entropy estimate; ordering_preserved checks it is
        strictly decreasing in suite order.
        """
        if n < 0:
            raise InvalidHyperparameterError(f"n must be >= 0 (got {n})")
        suite = list(suite)

        def job(seed: int) -> Dict[str, Any]:
            children = np.random.SeedSequence(seed).spawn(len(suite))
            rows, finals, pathological, commits = [], [], 0, 0
            for spec, child in zip(suite, children):
                engine = self._engine(spec.d)
                if n > 0:
                    rows.extend(self._stream(engine, sample(spec, n, child), {'seed': seed, 'distribution': spec.label}))
                finals.append({
                    'distribution': spec.label,
                    'estimate': engine.bound(),
                    'objective_sqrt': engine.objective(FChoice.SQRT),
                    'objective_log': engine.objective(FChoice.LOG),
                    'true_entropy': reference_entropy(spec, seed=seed),
                })
                pathological += engine.pathological_count
                commits += engine.commit_count
            return {
                'rows': rows,
                'finals': finals,
                'ordering_preserved': n > 0 and strictly_decreasing([f['estimate'] for f in finals]),
                'pathological_fraction': pathological / commits if commits else None,
            }

        results = self._sweep(job, "entropy-sample")
        per_seed = {
            seed: {k: v for k, v in result.items() if k != 'rows'}
            for seed, result in zip(self.seeds, results)
        }
        preserved = sum(1 for r in results if r['ordering_preserved'])
        return ExperimentReport(
            command='entropy-sample',
            columns=['seed', 'distribution', 'step', 'objective_sqrt', 'objective_log', 'bound'],
            rows=[row for r in results for row in r['rows']],
            summary={
                'order': [spec.label for spec in suite],
                'per_seed': per_seed,
                'seeds_ordering_preserved': preserved,
                'seeds': len(self.seeds),
            },
        )

    def entropy_walk(self, grid: WalkGrid) -> ExperimentReport:
        """One walk per (d, sigma); within each d the estimates should increase with sigma."""
        specs = grid.specs()

        def job(seed: int) -> Dict[str, Any]:
            children = np.random.SeedSequence(seed).spawn(len(specs))
            rows, finals = [], {}
            for spec, child in zip(specs, children):
                engine = self._engine(spec.d)
                if grid.steps > 0:
                    X = sample(spec, grid.steps, child)
                    rows.extend(self._stream(engine, X, {'seed': seed, 'd': spec.d, 'sigma': spec.sigma}))
                finals.setdefault(spec.d, []).append((spec.sigma, engine.bound()))

            ordering = {}
            for d, pairs in finals.items():
                estimates = [estimate for _, estimate in sorted(pairs)]
                ordering[d] = grid.steps > 0 and strictly_decreasing(estimates[::-1])
            return {
                'rows': rows,
                'finals': {d: {f"{sigma:g}": est for sigma, est in pairs} for d, pairs in finals.items()},
                'ordering_preserved': ordering,
            }

        results = self._sweep(job, "entropy-walk")
        return ExperimentReport(
            command='entropy-walk',
            columns=['seed', 'd', 'sigma', 'step', 'objective_sqrt', 'objective_log', 'bound'],
            rows=[row for r in results for row in r['rows']],
            summary={
                'grid': grid.to_dict(),
                'per_seed': {
                    seed: {k: v for k, v in r.items() if k != 'rows'}
                    for seed, r in zip(self.seeds, results)
                },
                'seeds_ordering_preserved': {
                    d: sum(1 for r in results if r['ordering_preserved'].get(d))
                    for d in grid.dims
                },
            },
        )

    # ===== ESTIMATOR CHECKS =====

    def density_check(
        self,
        spec: Optional[DistributionSpec] = None,
        ks: Sequence[int] = DENSITY_KS,
        n: int = 100_000,
        mc_samples: int = 1_000_000,
        points_per_axis: int = 5,
        oracle: str = 'mc',
        init: Optional[InitPolicy] = None,
        cluster_table: Optional[str] = None
    ) -> ExperimentReport:
        """
        Relative error of the Voronoi density estimate against the true pdf on
        an interior evaluation grid, for each k.

        Raises:
            UnsupportedDimensionError: If d > 2
        """
        spec = spec or unit_square()
        if spec.d > 2:
            raise UnsupportedDimensionError(f"density-check supports d <= 2 (got d={spec.d})")
        if spec.kind is DistributionKind.RANDOM_WALK and not spec.stationary:
            raise EntropyUnavailableError(f"'{spec.label}' has no density to check against")
        if oracle not in ('mc', 'grid'):
            raise InvalidHyperparameterError(f"Unknown oracle '{oracle}'. Valid values: mc, grid")
        ks = sorted(set(int(k) for k in ks))
        init = init or self.init

        def job(seed: int) -> Dict[str, Any]:
            sample_seq, measure_seq, shuffle_seq = np.random.SeedSequence(seed).spawn(3)
            X = sample(spec, n, sample_seq)
            if spec.kind is DistributionKind.UNIFORM_BOX:
                box = SupportBox(spec.lower, spec.upper)
            else:
                box = empirical_support_box(X)
            points = box.interior_grid(points_per_axis)
            truth = pdf(spec, points)
            measure_seeds = measure_seq.generate_state(len(ks))
            shuffle_seeds = shuffle_seq.generate_state(len(ks))

            rows, medians = [], []
            for k, measure_seed, shuffle_seed in zip(ks, measure_seeds, shuffle_seeds):
                alpha, passes = density_fit_schedule(self.engine_config.alpha, k, X.shape[0])
                model, _ = fit_model(
                    X, k, alpha, self.engine_config.kappa, init,
                    passes=passes, shuffle_seed=int(shuffle_seed),
                )
                if oracle == 'grid':
                    measures = cluster_measures_grid(model, box)
                else:
                    measures = cluster_measures_mc(model, box, mc_samples, seed=int(measure_seed))

                cell_measure = measures.measures[assign_many(model, points)]
                valid = cell_measure > 0
                estimate = np.where(valid, 1.0 / (model.k * np.where(valid, cell_measure, 1.0)), np.nan)
                errors = np.abs(estimate[valid] - truth[valid]) / truth[valid]
                quantiles = np.quantile(errors, [0.1, 0.5, 0.9]) if errors.size else [np.nan] * 3
                medians.append(float(quantiles[1]))
                rows.append({
                    'seed': seed,
                    'k': k,
                    'alpha': alpha,
                    'passes': passes,
                    'q10': float(quantiles[0]),
                    'median': float(quantiles[1]),
                    'q90': float(quantiles[2]),
                    'max': float(errors.max()) if errors.size else np.nan,
                    'zero_measure_points': int(np.sum(~valid)),
                    'empty_cells': int(np.sum(measures.cell_counts == 0)),
                })
                if cluster_table and seed == self.seeds[0] and k == ks[-1]:
                    write_cluster_table(cluster_table, model, measures)

            return {
                'rows': rows,
                'medians': medians,
                'inversions': count_inversions(medians),
            }

        results = self._sweep(job, "density-check")
        return ExperimentReport(
            command='density-check',
            columns=['seed', 'k', 'alpha', 'passes', 'q10', 'median', 'q90', 'max', 'zero_measure_points', 'empty_cells'],
            rows=[row for r in results for row in r['rows']],
            summary={
                'distribution': spec.to_dict(),
                'ks': ks,
                'oracle': oracle,
                'median_by_seed': {seed: r['medians'] for seed, r in zip(self.seeds, results)},
                'total_inversions': sum(r['inversions'] for r in results),
                'seeds_non_increasing': sum(1 for r in results if r['inversions'] == 0),
                'largest_k_median': float(np.nanmean([r['medians'][-1] for r in results])) if ks else None,
            },
        )

    def bound_check(
        self,
        distributions: Optional[Sequence[DistributionSpec]] = None,
        n: int = 50_000,
        init: Optional[InitPolicy] = None
    ) -> ExperimentReport:
        """
        (bound, true entropy, gap) from a fit on n samples, per distribution and seed.

        The bound carries no log k term, so in_band tests gap + log k against
        BOUND_BAND.

        Raises:
            EntropyUnavailableError: If a distribution has no closed-form entropy
        """
        distributions = list(distributions or default_bound_distributions())
        entropies = {}
        for spec in distributions:
            h = true_entropy(spec)
            if h is None:
                raise EntropyUnavailableError(
                    f"'{spec.label}' ({spec.kind.value}) has no closed-form entropy"
                )
            entropies[spec.label] = h
        init = init or self.init
        low, high = BOUND_BAND

        def job(seed: int) -> List[Dict[str, Any]]:
            children = np.random.SeedSequence(seed).spawn(len(distributions))
            rows = []
            for spec, child in zip(distributions, children):
                model, cache = fit_model(
                    sample(spec, n, child),
                    self.engine_config.k, self.engine_config.alpha, self.engine_config.kappa, init,
                )
                bound = entropy_lower_bound(model, cache, self.engine_config.log_floor)
                h = entropies[spec.label]
                gap = bound - h
                shifted = gap + math.log(model.k)
                rows.append({
                    'seed': seed,
                    'distribution': spec.label,
                    'bound': bound,
                    'true_entropy': h,
                    'gap': gap,
                    'gap_plus_log_k': shifted,
                    'in_band': bool(low <= shifted <= high),
                })
            return rows

        rows = [row for result in self._sweep(job, "bound-check") for row in result]
        gaps = [row['gap'] for row in rows]
        return ExperimentReport(
            command='bound-check',
            columns=['seed', 'distribution', 'bound', 'true_entropy', 'gap', 'gap_plus_log_k', 'in_band'],
            rows=rows,
            summary={
                'band': list(BOUND_BAND),
                'all_in_band': all(row['in_band'] for row in rows),
                'min_gap': min(gaps) if gaps else None,
                'max_gap': max(gaps) if gaps else None,
                'min_gap_plus_log_k': min((row['gap_plus_log_k'] for row in rows), default=None),
                'max_gap_plus_log_k': max((row['gap_plus_log_k'] for row in rows), default=None),
            },
        )

    # ===== EXPLORATION =====

    def explore(
        self,
        config: ExploreConfig,
        use_engine: bool = True,
        baseline: bool = False,
        checkpoint: Optional[str] = None,
        resume_engine: Optional[str] = None
    ) -> ExperimentReport:
        """
        Run train() per seed. With baseline=True every seed also runs without
        an engine so the coverage ratio can be reported.
        """
        config = replace(config, engine=replace(self.engine_config, init=self.init))
        resumed = None
        if resume_engine:
            resumed = CheckpointManager(resume_engine).load_engine()
            if resumed is None:
                raise FileNotFoundError(f"No engine checkpoint at {resume_engine}")

        def checkpoint_for(seed: int) -> Optional[CheckpointManager]:
            if not checkpoint or not use_engine:
                return None
            if len(self.seeds) == 1:
                return CheckpointManager(checkpoint)
            path = CheckpointManager(checkpoint).checkpoint_file
            return CheckpointManager(path.with_name(f"{path.stem}_seed{seed}{path.suffix}"))

        def job(seed: int) -> Dict[str, Any]:
            seeded = replace(config, seed=seed)
            variants = [('kme' if use_engine else 'baseline', use_engine)]
            if baseline and use_engine:
                variants.append(('baseline', False))
            rows, summaries = [], {}
            for variant, with_engine in variants:
                engine = resumed.clone() if (resumed is not None and with_engine) else None
                result = train(
                    seeded,
                    engine=engine,
                    use_engine=with_engine,
                    checkpoint_manager=checkpoint_for(seed) if with_engine else None,
                )
                summaries[variant] = result.summary()
                rows.extend(
                    {'seed': seed, 'variant': variant, **vars(record)} for record in result.records
                )
            return {'rows': rows, 'summaries': summaries}

        results = self._sweep(job, "explore")
        per_seed = {seed: r['summaries'] for seed, r in zip(self.seeds, results)}
        summary: Dict[str, Any] = {'per_seed': per_seed}
        if baseline and use_engine:
            ratios = []
            for summaries in per_seed.values():
                base = summaries['baseline']['final_coverage']
                ratios.append(summaries['kme']['final_coverage'] / base if base > 0 else None)
            summary['coverage_ratio'] = ratios
            summary['seeds_kme_reached_goal'] = sum(
                1 for s in per_seed.values() if s['kme']['total_extrinsic_return'] > 0
            )
            summary['seeds_baseline_reached_goal'] = sum(
                1 for s in per_seed.values() if s['baseline']['total_extrinsic_return'] > 0
            )
        return ExperimentReport(
            command='explore',
            columns=['seed', 'variant', 'batch_index', 'env_steps', 'extrinsic_return', 'intrinsic_return', 'coverage'],
            rows=[row for r in results for row in r['rows']],
            summary=summary,
        )

    # ===== BENCHMARK =====

    def _time_commits(self, k: int, d: int, X: np.ndarray, warmup: int) -> Dict[str, Any]:
        config = replace(self.engine_config, k=int(k), init=InitPolicy.FIRST_POINTS)
        engine = RewardEngine.from_config(config, d)
        for s in X[:warmup]:
            engine.commit_reward(s)

        pathological_before = engine.pathological_count
        rescans_before = engine.rescan_count
        start = time.perf_counter()
        for s in X[warmup:]:
            engine.commit_reward(s)
        elapsed = time.perf_counter() - start
        n = X.shape[0] - warmup
        return {
            'k': int(k),
            'd': d,
            'commits': n,
            'seconds': elapsed,
            'commits_per_sec': n / elapsed if elapsed > 0 else None,
            'mean_commit_us': 1e6 * elapsed / n,
            'pathological_fraction': (engine.pathological_count - pathological_before) / n,
            'mean_rescans': (engine.rescan_count - rescans_before) / n,
        }

    def bench(
        self,
        ks: Sequence[int] = BENCH_KS,
        d: int = BENCH_DIM,
        n: int = 2_000,
        warmup_factor: int = 2,
        sigma: float = BENCH_WALK_SIGMA
    ) -> ExperimentReport:
        """
        Commit throughput per k on a d-dimensional Gaussian random walk.

        Every engine adopts its first k points and commits warmup_factor * k
        points untimed before n timed commits. A k=2 engine on the same walk
        gives the per-call floor; marginal_exponent is fitted on the time
        above it. Timings vary between runs; all other columns are
        reproducible from the seed.
        """
        if n < 0:
            raise InvalidHyperparameterError(f"n must be >= 0 (got {n})")
        seed = self.seeds[0]
        rows = []
        floor_us = None
        if n > 0:
            children = np.random.SeedSequence(seed).spawn(len(ks) + 1)
            warmup = warmup_factor * BENCH_FLOOR_K
            X = sample(random_walk(sigma, d, warmup + n), seed=children[-1])
            floor_us = self._time_commits(BENCH_FLOOR_K, d, X, warmup)['mean_commit_us']
            for k, child in zip(ks, children):
                warmup = warmup_factor * int(k)
                X = sample(random_walk(sigma, d, warmup + n), seed=child)
                rows.append(self._time_commits(int(k), d, X, warmup))
                logger.info(f"📊 bench k={k}: {rows[-1]['commits_per_sec'] or 0:.0f} commits/s")

        marginal_exponent = None
        if rows and all(r['mean_commit_us'] > floor_us for r in rows):
            marginal_exponent = fit_exponent([r['k'] for r in rows], [r['mean_commit_us'] - floor_us for r in rows])
        return ExperimentReport(
            command='bench',
            columns=['k', 'd', 'commits', 'seconds', 'commits_per_sec', 'mean_commit_us',
                     'pathological_fraction', 'mean_rescans'],
            rows=rows,
            summary={
                'seed': seed,
                'workload': {'kind': 'random_walk', 'sigma': sigma, 'warmup_factor': warmup_factor},
                'floor_commit_us': floor_us,
                'fitted_exponent': fit_exponent([r['k'] for r in rows], [r['mean_commit_us'] for r in rows]),
                'marginal_exponent': marginal_exponent,
                'max_pathological_fraction': max((r['pathological_fraction'] for r in rows), default=None),
            },
        )
