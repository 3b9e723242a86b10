"""Run a short pass of every verification suite and print one line per report."""

from __future__ import annotations

import argparse
import asyncio
import pathlib
import sys
from typing import Iterable, Optional

PROJECT_ROOT = pathlib.Path(__file__).resolve().parents[1]
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

from lie_domains.core.orchestrator import VerificationOrchestrator
from lie_domains.data_access.models import RunConfig, SuiteName

# reduced sample counts for a quick demo; the CLI runs the full sizes
DEMO_TRIALS = {
    SuiteName.VERIFY_LEMMA: 20_000,
    SuiteName.VERIFY_CLAIM: 20_000,
    SuiteName.VERIFY_TOTALLY_REAL: 200,
    SuiteName.VERIFY_FREE: 20,
    SuiteName.PROBE_PROPER: 8,
    SuiteName.VERIFY_LEVI: 20,
    SuiteName.COVER_DEMO: 20,
    SuiteName.FIND_PHI2_ZERO: 20_000,
    SuiteName.HEISENBERG: 5_000,
}


async def _run(argv: Optional[Iterable[str]] = None) -> int:
    parser = argparse.ArgumentParser(description="Quick pass over all verification suites")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--workers", type=int, default=2)
    args = parser.parse_args(list(argv) if argv is not None else None)

    orchestrator = VerificationOrchestrator()
    failed = 0
    for suite in SuiteName:
        config = RunConfig(
            command=suite,
            seed=args.seed,
            trials=DEMO_TRIALS.get(suite),
            workers=args.workers,
        )
        bundle = await orchestrator.run(config)
        for report in bundle.reports:
            verdict = "PASS" if report.passed else ("WARN" if report.heuristic else "FAIL")
            print(
                f"{suite.value:<20} {report.name:<28} {verdict} "
                f"samples={report.samples} worst_margin={report.worst_margin}"
            )
        failed += not bundle.overall_pass
    return 1 if failed else 0


def main(argv: Optional[Iterable[str]] = None) -> int:
    return asyncio.run(_run(argv))


if __name__ == "__main__":
    raise SystemExit(main())
