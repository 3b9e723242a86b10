"""
lie-domains 命令行入口。

每个子命令运行一组验证检查，并把报告集合（ReportBundle）写出为 JSON 或 CSV：

- verify-lemma / verify-claim：|ψ(gh)| 的下界及其内部不等式（Monte-Carlo）。
- verify-winding：各候选特征标沿生成环路的绕数。
- verify-totally-real / verify-free / probe-proper：轨道几何。
- verify-levi：轨道管状邻域边界的 Levi 形式。
- cover-demo：覆盖群提升的群律、甲板变换与 k 叶覆盖。
- find-phi2-zero：(a+ic)² 在 h 接近单位元时的零点。
- heisenberg：Heisenberg 商群的区域成员、常数 C 与有界嵌入审计。

退出码：0 全部通过；1 存在失败检查（见证写入报告）；2 参数组合无效。

环境变量：
- LIE_DOMAINS_LOG_LEVEL：根 logger 的级别（默认 INFO），日志写到 stderr。
"""

from __future__ import annotations

import argparse
import asyncio
import logging
import os
import sys
from pathlib import Path
from typing import Iterable, Optional

from pydantic import ValidationError

from .core.orchestrator import ConfigError, VerificationOrchestrator
from .data_access.models import OutputFormat, RunConfig, SuiteName
from .data_access.report_writer import render, write_bundle

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2


def configure_logging() -> None:
    level_name = os.getenv("LIE_DOMAINS_LOG_LEVEL", "INFO").upper()
    level = getattr(logging, level_name, None)
    if not isinstance(level, int):
        level = logging.INFO
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lie-domains",
        description="Numerical verification of Lie group actions on complex domains",
    )
    parser.add_argument(
        "command",
        choices=[suite.value for suite in SuiteName],
        help="Verification suite to run",
    )
    parser.add_argument("--seed", type=int, default=0, help="Base seed for all samplers")
    parser.add_argument(
        "--trials", type=int, default=None, help="Override the suite's sample count"
    )
    parser.add_argument("--eps", type=float, default=None, help="Lower bound tested for |ψ|")
    parser.add_argument(
        "--delta",
        type=float,
        default=None,
        help="Radius of the perturbation |h - I| < delta (lemma suites need delta < 1/3)",
    )
    parser.add_argument("--iwasawa-T", dest="iwasawa_T", type=float, default=None)
    parser.add_argument("--iwasawa-N", dest="iwasawa_N", type=float, default=None)
    parser.add_argument("--tube-radius", dest="tube_radius", type=float, default=None)
    parser.add_argument("--k", type=int, default=2, help="Number of sheets for cover-demo")
    parser.add_argument(
        "--out", type=Path, default=None, help="Write the bundle here instead of stdout"
    )
    parser.add_argument(
        "--format",
        choices=[fmt.value for fmt in OutputFormat],
        default=OutputFormat.JSON.value,
    )
    parser.add_argument("--workers", type=int, default=None, help="Worker threads")
    return parser


def run_config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=SuiteName(args.command),
        seed=args.seed,
        trials=args.trials,
        iwasawa_T=args.iwasawa_T,
        iwasawa_N=args.iwasawa_N,
        eps=args.eps,
        delta=args.delta,
        tube_radius=args.tube_radius,
        k=args.k,
        out=args.out,
        format=OutputFormat(args.format),
        workers=args.workers,
    )


async def _run(argv: Optional[Iterable[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(list(argv) if argv is not None else None)
    try:
        config = run_config_from_args(args)
        bundle = await VerificationOrchestrator().run(config)
    except (ConfigError, ValidationError) as exc:
        logger.error("Invalid configuration | error=%s", exc)
        print(f"lie-domains: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if config.out is not None:
        write_bundle(bundle, config.out, config.format)
    else:
        sys.stdout.write(render(bundle, config.format))
        sys.stdout.write("\n")
    return EXIT_OK if bundle.overall_pass else EXIT_FAILED


def main(argv: Optional[Iterable[str]] = None) -> int:
    configure_logging()
    return asyncio.run(_run(argv))


if __name__ == "__main__":
    raise SystemExit(main())
