import numpy as np

from lie_domains.utils.partition import (
    ChunkOutcome,
    merge_outcomes,
    plan_chunks,
    run_partitioned,
)


def _uniform_kernel(rng: np.random.Generator, count: int) -> ChunkOutcome:
    values = rng.uniform(size=count)
    outcome = ChunkOutcome(samples=count, violations=int((values > 0.999).sum()))
    outcome.worst_margin = float(0.999 - values.max())
    outcome.note_max("value", values.max())
    outcome.note_min("value", values.min())
    outcome.series = values.tolist()
    return outcome


def test_plan_chunks_sizes() -> None:
    assert [plan.count for plan in plan_chunks(0, 10, 4)] == [4, 4, 2]
    assert [plan.index for plan in plan_chunks(0, 10, 4)] == [0, 1, 2]
    assert plan_chunks(0, 0, 4) == []


# 测试：分块划分只取决于种子与试验次数，与 worker 数无关。
def test_run_partitioned_is_independent_of_workers() -> None:
    serial = run_partitioned(_uniform_kernel, seed=42, trials=10_000, chunk_size=1_500)
    threaded = run_partitioned(
        _uniform_kernel, seed=42, trials=10_000, chunk_size=1_500, workers=4
    )
    assert serial.samples == threaded.samples == 10_000
    assert serial.series == threaded.series
    assert serial.maxima == threaded.maxima
    assert serial.worst_margin == threaded.worst_margin

    reseeded = run_partitioned(_uniform_kernel, seed=43, trials=10_000, chunk_size=1_500)
    assert reseeded.series != serial.series


def test_merge_outcomes_keeps_first_witness_and_caps_series() -> None:
    first = ChunkOutcome(samples=3, worst_margin=0.5, series=[1.0, 2.0, 3.0])
    second = ChunkOutcome(
        samples=2, violations=1, worst_margin=-0.1, witness={"chunk": 1}, series=[4.0, 5.0]
    )
    third = ChunkOutcome(samples=1, violations=1, witness={"chunk": 2}, series=[6.0])
    first.note_min("x", 2.0)
    second.note_min("x", -1.0)
    third.note_max("y", 7.0)

    merged = merge_outcomes([first, second, third], series_cap=4)
    assert merged.samples == 6
    assert merged.violations == 2
    assert merged.worst_margin == -0.1
    assert merged.witness == {"chunk": 1}
    assert merged.series == [1.0, 2.0, 3.0, 4.0]
    assert merged.minima == {"x": -1.0}
    assert merged.maxima == {"y": 7.0}
