"""
Sweep Runner for Multi-Seed Experiments

Runs one independent job per seed in a thread pool. Every job builds its own
engine, so jobs share nothing mutable; results are returned in seed order
regardless of completion order or worker count.
"""

import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Sequence

logger = logging.getLogger(__name__)


@dataclass
class SweepResult:
    """Per-seed results plus the seeds whose job raised."""

    results: Dict[int, Any] = field(default_factory=dict)
    failures: Dict[int, str] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures

    def ordered(self) -> List[Any]:
        return [self.results[seed] for seed in sorted(self.results)]


class SweepRunner:
    """
    Executes a job function across seeds in parallel.

    Responsibilities:
    - Fan seeds out to a ThreadPoolExecutor
    - Collect results keyed by seed
    - Log and record failures without aborting the remaining seeds
    """

    def __init__(self, max_workers: int = 4):
        """
        Args:
            max_workers: Maximum parallel workers (1 runs inline, in seed order)
        """
        self.max_workers = max(1, int(max_workers))

    def run(self, job: Callable[[int], Any], seeds: Sequence[int], label: str = "sweep") -> SweepResult:
        """
        Run job(seed) for every seed.

        Args:
            job: Callable taking a seed and returning a result
            seeds: Seeds to run (duplicates are collapsed)
            label: Name used in log messages

        Returns:
            SweepResult with results and failures keyed by seed
        """
        unique_seeds = sorted(set(int(s) for s in seeds))
        sweep = SweepResult()
        if not unique_seeds:
            logger.info(f"📊 {label}: no seeds, skipping")
            return sweep

        logger.info(f"📊 {label}: {len(unique_seeds)} seed(s) on {self.max_workers} worker(s)")

        if self.max_workers == 1:
            for seed in unique_seeds:
                self._collect(sweep, seed, label, lambda s=seed: job(s))
        else:
            with ThreadPoolExecutor(max_workers=self.max_workers) as executor:
                futures = {executor.submit(job, seed): seed for seed in unique_seeds}
                for task in as_completed(futures):
                    self._collect(sweep, futures[task], label, task.result)

        if sweep.failures:
            logger.error(
                f"❌ {label}: {len(sweep.failures)}/{len(unique_seeds)} seed(s) failed: "
                f"{sorted(sweep.failures)}"
            )
        else:
            logger.info(f"✅ {label}: all {len(unique_seeds)} seed(s) complete")
        return sweep

    @staticmethod
    def _collect(sweep: SweepResult, seed: int, label: str, fetch: Callable[[], Any]) -> None:
        try:
            sweep.results[seed] = fetch()
            logger.debug(f"{label}: seed {seed} done")
        except Exception as e:
            sweep.failures[seed] = str(e)
            logger.error(f"❌ {label}: seed {seed} failed: {e}")
