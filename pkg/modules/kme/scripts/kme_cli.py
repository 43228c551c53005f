#!/usr/bin/env python3
"""
KME Command-Line Interface

Seeded, file-based experiments for the k-means entropy reward engine.

Usage:
    python kme_cli.py entropy-sample --seeds 0 1 2 3 4 --out results/sample.csv
    python kme_cli.py entropy-walk --dims 2 4 64 --sigmas 0.01 0.1 1.0 --steps 100000
    python kme_cli.py density-check --ks 10 100 1000 --format json --out results/density.json
    python kme_cli.py bound-check --seeds 0 1 2 3 4
    python kme_cli.py explore --beta 0.01 --baseline --t-max 200
    python kme_cli.py bench --ks 50 100 300 1000 --dim 64
"""

import sys
import argparse
import logging
from dataclasses import replace
from pathlib import Path
from typing import Any, Dict, List, Optional

# Add repository root to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent.parent.parent))

from modules.kme.core.config import ExploreConfig, FChoice, InitPolicy, KMEConfig, load_explore_config
from modules.kme.core.errors import KMEError
from modules.kme.scripts.experiment_runner import (
    BENCH_DIM,
    BENCH_KS,
    DENSITY_KS,
    ExperimentReport,
    ExperimentRunner,
    default_bound_distributions,
    unit_square,
)
from modules.kme.scripts.report_writer import OUTPUT_FORMATS, ReportWriter
from modules.kme.synth.distributions import DistributionSpec
from modules.kme.synth.suite_loader import (
    load_sample_suite,
    load_walk_grid,
    select_distributions,
)

logging.basicConfig(
    level=logging.INFO,
    format='%(levelname)s: %(message)s'
)
logger = logging.getLogger(__name__)

# Flags that never change results and stay out of the echoed config
_UNECHOED = {'verbose', 'out', 'workers', 'format'}


def _add_engine_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group('engine hyperparameters')
    group.add_argument('--k', type=int, help='Number of clusters (default from config/kme.yaml)')
    group.add_argument('--alpha', type=float, help='Center learning rate in (0, 1)')
    group.add_argument('--kappa', type=float, help='Count-balancing strength (>= 0)')
    group.add_argument('--f', choices=[c.value for c in FChoice], help='Reward transform')
    group.add_argument('--init', choices=[p.value for p in InitPolicy], help='Center initialization policy (experiments default to first_points)')


def _add_run_flags(parser: argparse.ArgumentParser, default_n: Optional[int]) -> None:
    parser.add_argument('--seed', type=int, default=0, help='Seed (default: 0)')
    parser.add_argument('--seeds', type=int, nargs='+', help='Run one job per seed (overrides --seed)')
    parser.add_argument('--workers', type=int, default=1, help='Parallel workers for --seeds (default: 1)')
    if default_n is not None:
        parser.add_argument('--n', type=int, default=default_n, help=f'Samples/commits (default: {default_n})')
    parser.add_argument('--out', type=Path, help='Output file (default: results/<command>.<format>)')
    parser.add_argument('--format', choices=OUTPUT_FORMATS, default='csv', help='Output format (default: csv)')
    parser.add_argument('--record-every', type=int, default=100, help='Curve sampling period in commits')
    parser.add_argument('--verbose', action='store_true', help='Debug logging')
    _add_engine_flags(parser)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description='k-means maximum entropy exploration experiments'
    )
    subparsers = parser.add_subparsers(dest='command', help='Experiment to run')

    sample_parser = subparsers.add_parser('entropy-sample', help='Entropy ordering on the 2-D sample suite')
    _add_run_flags(sample_parser, 20_000)
    sample_parser.add_argument('--distributions', nargs='+', help='Subset of suite names (default: all)')
    sample_parser.add_argument('--suites', type=Path, help='Suites YAML (default: config/suites.yaml)')

    walk_parser = subparsers.add_parser('entropy-walk', help='Entropy ordering on random walks')
    _add_run_flags(walk_parser, None)
    walk_parser.add_argument('--dims', type=int, nargs='+', help='Walk dimensions')
    walk_parser.add_argument('--sigmas', type=float, nargs='+', help='Walk step std values')
    walk_parser.add_argument('--steps', type=int, help='Steps per walk')
    walk_parser.add_argument('--stationary', action='store_true', help='Use the stationary AR(1) walk')
    walk_parser.add_argument('--rho', type=float, help='AR(1) coefficient for --stationary')
    walk_parser.add_argument('--suites', type=Path, help='Suites YAML (default: config/suites.yaml)')

    density_parser = subparsers.add_parser('density-check', help='Voronoi density estimate convergence')
    _add_run_flags(density_parser, 100_000)
    density_parser.add_argument('--distribution', default='unit_square', help='Distribution name')
    density_parser.add_argument('--ks', type=int, nargs='+', default=list(DENSITY_KS), help='Cluster counts')
    density_parser.add_argument('--mc-samples', type=int, default=1_000_000, help='Monte-Carlo measure samples')
    density_parser.add_argument('--oracle', choices=['mc', 'grid'], default='mc', help='Cell measure oracle')
    density_parser.add_argument('--cluster-table', type=Path, help='Write per-cluster CSV for the largest k')
    density_parser.add_argument('--suites', type=Path, help='Suites YAML (default: config/suites.yaml)')

    bound_parser = subparsers.add_parser('bound-check', help='Entropy lower bound against closed forms')
    _add_run_flags(bound_parser, 50_000)
    bound_parser.add_argument('--distributions', nargs='+', help='Distribution names (default: unit_square gaussian_s0.1)')
    bound_parser.add_argument('--suites', type=Path, help='Suites YAML (default: config/suites.yaml)')

    explore_parser = subparsers.add_parser('explore', help='Sparse-reward exploration with the KME bonus')
    _add_run_flags(explore_parser, None)
    explore_parser.add_argument('--config', type=Path, help='ExploreConfig JSON/YAML file')
    explore_parser.add_argument('--beta', type=float, help='Intrinsic reward scale')
    explore_parser.add_argument('--batch', type=int, help='Steps per batch (B)')
    explore_parser.add_argument('--t-max', type=int, help='Number of batches')
    explore_parser.add_argument('--no-engine', action='store_true', help='Extrinsic reward only, no engine')
    explore_parser.add_argument('--baseline', action='store_true', help='Also run the no-engine baseline per seed')
    explore_parser.add_argument('--checkpoint', type=Path, help='Save the engine here periodically')
    explore_parser.add_argument('--resume-engine', type=Path, help='Start from an engine checkpoint')

    bench_parser = subparsers.add_parser('bench', help='Commit throughput against k')
    _add_run_flags(bench_parser, 2_000)
    bench_parser.add_argument('--ks', type=int, nargs='+', default=list(BENCH_KS), help='Cluster counts')
    bench_parser.add_argument('--dim', type=int, default=BENCH_DIM, help=f'State dimension (default: {BENCH_DIM})')

    return parser


def engine_config_from_args(args: argparse.Namespace, base: Optional[KMEConfig] = None) -> KMEConfig:
    """Engine block from config defaults, overridden by any flags given."""
    base = base or KMEConfig()
    overrides = {
        name: getattr(args, name)
        for name in ('k', 'alpha', 'kappa', 'f', 'init')
        if getattr(args, name, None) is not None
    }
    return replace(base, **overrides)


def experiment_init(args: argparse.Namespace, engine_config: KMEConfig) -> InitPolicy:
    """The --init policy when given, first_points otherwise."""
    return engine_config.init if getattr(args, 'init', None) else InitPolicy.FIRST_POINTS


def _distribution_catalog(suites_path: Optional[Path]) -> Dict[str, DistributionSpec]:
    catalog = {spec.label: spec for spec in default_bound_distributions()}
    catalog.update({spec.label: spec for spec in load_sample_suite(suites_path)})
    return catalog


def _lookup(names: List[str], suites_path: Optional[Path]) -> List[DistributionSpec]:
    return select_distributions(list(_distribution_catalog(suites_path).values()), names)


def run_command(args: argparse.Namespace) -> ExperimentReport:
    """Dispatch a parsed command line to the experiment runner."""
    explore_config = None
    if args.command == 'explore':
        explore_config = load_explore_config(args.config) if args.config else ExploreConfig()
        engine_config = engine_config_from_args(args, explore_config.engine)
    else:
        engine_config = engine_config_from_args(args)

    runner = ExperimentRunner(
        engine_config,
        seeds=args.seeds if args.seeds else [args.seed],
        workers=args.workers,
        record_every=args.record_every,
        init=experiment_init(args, engine_config),
    )

    if args.command == 'entropy-sample':
        suite = select_distributions(load_sample_suite(args.suites), args.distributions)
        return runner.entropy_sample(suite, n=args.n)

    if args.command == 'entropy-walk':
        grid = load_walk_grid(args.suites)
        grid = replace(
            grid,
            dims=args.dims or grid.dims,
            sigmas=args.sigmas or grid.sigmas,
            steps=grid.steps if args.steps is None else args.steps,
            stationary=args.stationary or grid.stationary,
            rho=grid.rho if args.rho is None else args.rho,
        )
        return runner.entropy_walk(grid)

    if args.command == 'density-check':
        if args.distribution == 'unit_square':
            spec = unit_square()
        else:
            spec = _lookup([args.distribution], args.suites)[0]
        return runner.density_check(
            spec,
            ks=args.ks,
            n=args.n,
            mc_samples=args.mc_samples,
            oracle=args.oracle,
            cluster_table=str(args.cluster_table) if args.cluster_table else None,
        )

    if args.command == 'bound-check':
        distributions = _lookup(args.distributions, args.suites) if args.distributions else None
        return runner.bound_check(distributions, n=args.n)

    if args.command == 'explore':
        overrides = {}
        if args.beta is not None:
            overrides['beta'] = args.beta
        if args.batch is not None:
            overrides['batch_size'] = args.batch
        if args.t_max is not None:
            overrides['t_max'] = args.t_max
        explore_config = replace(explore_config, **overrides)
        return runner.explore(
            explore_config,
            use_engine=not args.no_engine,
            baseline=args.baseline,
            checkpoint=str(args.checkpoint) if args.checkpoint else None,
            resume_engine=str(args.resume_engine) if args.resume_engine else None,
        )

    return runner.bench(ks=args.ks, d=args.dim, n=args.n)


def effective_config(args: argparse.Namespace) -> Dict[str, Any]:
    """Everything that determines the results, for the output header."""
    echoed = {
        key: (str(value) if isinstance(value, Path) else value)
        for key, value in sorted(vars(args).items())
        if key not in _UNECHOED and value is not None
    }
    base = load_explore_config(args.config).engine if getattr(args, 'config', None) else None
    engine_config = engine_config_from_args(args, base)
    echoed['engine'] = {**engine_config.to_dict(), 'init': experiment_init(args, engine_config).value}
    return echoed


def main(argv: Optional[List[str]] = None) -> int:
    """CLI entry point; returns the process exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return 1

    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)

    out = args.out or Path('results') / f"{args.command}.{args.format}"
    try:
        config = effective_config(args)
        logger.info(f"🚀 {args.command}: {config}")
        report = run_command(args)
        ReportWriter(out, args.format, config).write(report.columns, report.rows, report.summary)
    except (KMEError, ValueError, OSError) as e:
        logger.error(f"❌ {args.command} failed: {e}")
        return 1

    logger.info(f"✅ {args.command} complete → {out}")
    return 0


if __name__ == '__main__':
    sys.exit(main())
