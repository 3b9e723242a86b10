"""Deterministic partitioning of Monte-Carlo trials across worker threads.

Trials are cut into fixed-size chunks and every chunk gets its own child of
``SeedSequence(seed)``.  The chunking depends on the trial count only, never on
the number of workers, and outcomes are merged in chunk order, so a report is
identical for any worker count.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ChunkPlan:
    index: int
    count: int
    seed_sequence: np.random.SeedSequence

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed_sequence)


@dataclass
class ChunkOutcome:
    """Partial result of one chunk; merged with :func:`merge_outcomes`."""

    samples: int = 0
    violations: int = 0
    worst_margin: Optional[float] = None
    witness: Optional[Dict[str, Any]] = None
    series: List[float] = field(default_factory=list)
    minima: Dict[str, float] = field(default_factory=dict)
    maxima: Dict[str, float] = field(default_factory=dict)

    def note_min(self, key: str, value: float) -> None:
        value = float(value)
        if key not in self.minima or value < self.minima[key]:
            self.minima[key] = value

    def note_max(self, key: str, value: float) -> None:
        value = float(value)
        if key not in self.maxima or value > self.maxima[key]:
            self.maxima[key] = value


ChunkKernel = Callable[[np.random.Generator, int], ChunkOutcome]


def plan_chunks(seed: int, trials: int, chunk_size: int) -> List[ChunkPlan]:
    if trials <= 0:
        return []
    count = -(-trials // chunk_size)
    children = np.random.SeedSequence(seed).spawn(count)
    plans = []
    for index, child in enumerate(children):
        size = min(chunk_size, trials - index * chunk_size)
        plans.append(ChunkPlan(index=index, count=size, seed_sequence=child))
    return plans


def merge_outcomes(
    outcomes: Sequence[ChunkOutcome], *, series_cap: Optional[int] = None
) -> ChunkOutcome:
    merged = ChunkOutcome()
    for outcome in outcomes:
        merged.samples += outcome.samples
        merged.violations += outcome.violations
        if outcome.worst_margin is not None and (
            merged.worst_margin is None or outcome.worst_margin < merged.worst_margin
        ):
            merged.worst_margin = outcome.worst_margin
        if merged.witness is None and outcome.witness is not None:
            merged.witness = outcome.witness
        merged.series.extend(outcome.series)
        for key, value in outcome.minima.items():
            merged.note_min(key, value)
        for key, value in outcome.maxima.items():
            merged.note_max(key, value)
    if series_cap is not None:
        del merged.series[series_cap:]
    return merged


def run_partitioned(
    kernel: ChunkKernel,
    *,
    seed: int,
    trials: int,
    chunk_size: int,
    workers: int = 1,
    series_cap: Optional[int] = None,
) -> ChunkOutcome:
    """Run ``kernel(rng, count)`` over all chunks and merge in chunk order."""
    plans = plan_chunks(seed, trials, chunk_size)

    def _run(plan: ChunkPlan) -> ChunkOutcome:
        logger.debug("chunk start | index=%s | count=%s", plan.index, plan.count)
        return kernel(plan.rng(), plan.count)

    if workers <= 1 or len(plans) <= 1:
        outcomes = [_run(plan) for plan in plans]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run, plans))
    return merge_outcomes(outcomes, series_cap=series_cap)


__all__ = [
    "ChunkKernel",
    "ChunkOutcome",
    "ChunkPlan",
    "merge_outcomes",
    "plan_chunks",
    "run_partitioned",
]
