"""Orchestrator: resolve a :class:`RunConfig` against the YAML settings and run
one verification suite.

Each subcommand maps to a suite of checks from ``lie_domains.logic_modules``.
Suites are CPU-bound and run in a worker thread through ``asyncio.to_thread``;
Monte-Carlo checks partition their trials internally, so the bundle does not
depend on the worker count.
"""

from __future__ import annotations

import asyncio
import logging
import time
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional

import numpy as np

from .. import __version__
from ..data_access.models import (
    LEMMA_SUITES,
    ReportBundle,
    RunConfig,
    SuiteName,
    VerificationReport,
)
from ..logic_modules.covering_lift import (
    PHI_LOWER_BOUND,
    cover_algebra_report,
    re_log_phi_lower_bound,
    sample_lifted_points,
    sheet_report,
)
from ..logic_modules.heisenberg import (
    constant_audit,
    embedding_audit,
    membership_audit,
    orbit_rank_audit,
)
from ..logic_modules.lemma_checks import (
    CLAIM_EPS_MAX,
    LEMMA_DELTA_MAX,
    check_lemma,
    check_lemma_claim,
    check_windings,
    phi_square_zero_report,
)
from ..logic_modules.mat_groups import Triple
from ..logic_modules.orbit_geometry import (
    check_freeness,
    check_totally_real,
    properness_probe,
)
from ..logic_modules.tube_geometry import (
    TubeSpec,
    levi_form_check,
    levi_oracles_report,
    levi_radius_probe,
)
from ..utils.settings import VerifyConfig, get_verify_config

logger = logging.getLogger(__name__)


class ConfigError(ValueError):
    """Flags that are individually valid but do not combine into a runnable suite."""

    def __init__(self, field: str, value: object, reason: str) -> None:
        super().__init__(f"invalid {field}={value!r}: {reason}")
        self.field = field
        self.value = value
        self.reason = reason


@dataclass(frozen=True)
class ResolvedRun:
    """RunConfig 与 YAML 默认值合并后的有效参数。"""

    config: RunConfig
    settings: VerifyConfig
    base: Triple
    delta: float
    eps: float
    T: float
    N: float
    workers: int
    tube_radius: float

    def trials(self, default: int) -> int:
        return self.config.trials if self.config.trials is not None else default

    @property
    def seed(self) -> int:
        return self.config.seed


SuiteRunner = Callable[[ResolvedRun], List[VerificationReport]]


class VerificationOrchestrator:
    """调度验证套件：参数校验、线程内执行、报告聚合。"""

    def __init__(self, settings: Optional[VerifyConfig] = None) -> None:
        self.settings = settings or get_verify_config()
        self._suites: Dict[SuiteName, SuiteRunner] = {
            SuiteName.VERIFY_LEMMA: self._suite_lemma,
            SuiteName.VERIFY_CLAIM: self._suite_claim,
            SuiteName.VERIFY_WINDING: self._suite_winding,
            SuiteName.VERIFY_TOTALLY_REAL: self._suite_totally_real,
            SuiteName.VERIFY_FREE: self._suite_free,
            SuiteName.PROBE_PROPER: self._suite_proper,
            SuiteName.VERIFY_LEVI: self._suite_levi,
            SuiteName.COVER_DEMO: self._suite_cover,
            SuiteName.FIND_PHI2_ZERO: self._suite_phi2_zero,
            SuiteName.HEISENBERG: self._suite_heisenberg,
        }

    # ------------------------------------------------------------------
    # validation
    # ------------------------------------------------------------------
    def validate(self, config: RunConfig) -> ResolvedRun:
        """Merge flags over the settings and enforce the cross-field rules."""
        settings = self.settings
        base = Triple(*settings.geometry.base_points())

        if config.command is SuiteName.COVER_DEMO:
            default_delta = settings.cover.near_identity_delta
        else:
            default_delta = settings.lemma.delta
        delta = config.delta if config.delta is not None else default_delta
        if config.command in LEMMA_SUITES and not 0.0 < delta < LEMMA_DELTA_MAX:
            raise ConfigError("delta", delta, "lemma runs need 0 < delta < 1/3")

        tube_radius = (
            config.tube_radius if config.tube_radius is not None else settings.tube.radius
        )
        limit = 0.5 * base.min_pairwise_distance()
        if not 0.0 < tube_radius < limit:
            raise ConfigError(
                "tube_radius", tube_radius, f"must lie in (0, {limit:g}) for the base triple"
            )

        if config.k < 2:
            raise ConfigError("k", config.k, "sheet covers need k >= 2")

        eps = config.eps if config.eps is not None else settings.lemma.eps
        if config.command is SuiteName.VERIFY_CLAIM and not 0.0 < eps <= CLAIM_EPS_MAX:
            raise ConfigError("eps", eps, f"claim runs need 0 < eps <= {CLAIM_EPS_MAX}")

        return ResolvedRun(
            config=config,
            settings=settings,
            base=base,
            delta=delta,
            eps=eps,
            T=config.iwasawa_T if config.iwasawa_T is not None else settings.sampling.iwasawa_T,
            N=config.iwasawa_N if config.iwasawa_N is not None else settings.sampling.iwasawa_N,
            workers=config.workers if config.workers is not None else settings.sampling.workers,
            tube_radius=tube_radius,
        )

    # ------------------------------------------------------------------
    # execution
    # ------------------------------------------------------------------
    async def run(self, config: RunConfig) -> ReportBundle:
        run = self.validate(config)
        runner = self._suites[config.command]
        started = time.perf_counter()
        logger.info(
            "Suite started | command=%s | seed=%s | workers=%s",
            config.command.value,
            config.seed,
            run.workers,
        )
        try:
            reports = await asyncio.to_thread(runner, run)
        except Exception:
            logger.exception(
                "Suite crashed | command=%s | seed=%s", config.command.value, config.seed
            )
            raise
        bundle = ReportBundle.assemble(tool_version=__version__, config=config, reports=reports)
        logger.info(
            "Suite finished | command=%s | reports=%s | overall_pass=%s | elapsed_ms=%.1f",
            config.command.value,
            len(reports),
            bundle.overall_pass,
            (time.perf_counter() - started) * 1000.0,
        )
        for report in reports:
            if not report.passed:
                logger.warning(
                    "Report failed | name=%s | worst_margin=%s | heuristic=%s",
                    report.name,
                    report.worst_margin,
                    report.heuristic,
                )
        return bundle

    def _partition_kwargs(self, run: ResolvedRun) -> dict:
        return {
            "workers": run.workers,
            "chunk_size": run.settings.sampling.chunk_size,
            "series_cap": run.settings.report.csv_max_rows,
        }

    # ------------------------------------------------------------------
    # suites
    # ------------------------------------------------------------------
    def _suite_lemma(self, run: ResolvedRun) -> List[VerificationReport]:
        return [
            check_lemma(
                run.eps,
                run.delta,
                run.trials(run.settings.lemma.trials),
                run.T,
                run.N,
                run.seed,
                **self._partition_kwargs(run),
            )
        ]

    def _suite_claim(self, run: ResolvedRun) -> List[VerificationReport]:
        return [
            check_lemma_claim(
                run.eps,
                run.trials(run.settings.lemma.claim_trials),
                run.seed,
                **self._partition_kwargs(run),
            )
        ]

    def _suite_winding(self, run: ResolvedRun) -> List[VerificationReport]:
        return [check_windings(run.settings.continuation.path_samples, run.seed)]

    def _suite_totally_real(self, run: ResolvedRun) -> List[VerificationReport]:
        samples = run.trials(run.settings.geometry.random_triples)
        return [check_totally_real(samples, run.seed, base=run.base)]

    def _suite_free(self, run: ResolvedRun) -> List[VerificationReport]:
        samples = run.trials(run.settings.geometry.free_triples)
        return [check_freeness(samples, run.seed, T=run.T, N=run.N, base=run.base)]

    def _suite_proper(self, run: ResolvedRun) -> List[VerificationReport]:
        geometry = run.settings.geometry
        return [
            properness_probe(
                run.base,
                run.trials(geometry.proper_rays),
                run.seed,
                s_max=geometry.proper_s_max,
            )
        ]

    def _suite_levi(self, run: ResolvedRun) -> List[VerificationReport]:
        tube = run.settings.tube
        spec = TubeSpec(base=run.base, radius=run.tube_radius)
        return [
            levi_oracles_report(tube.fd_step),
            levi_form_check(
                spec,
                run.trials(tube.levi_samples),
                run.seed,
                step=tube.fd_step,
                T=tube.levi_T,
                N=tube.levi_N,
            ),
            levi_radius_probe(run.base, step=tube.fd_step, seed=run.seed),
        ]

    def _suite_cover(self, run: ResolvedRun) -> List[VerificationReport]:
        cover = run.settings.cover
        instances = run.trials(cover.instances)
        ks = sorted({2, 3, run.config.k})
        # the certified bound on |φ| is eps²/4 once |ψ| > eps
        phi_bound = run.eps**2 / 4.0 if run.config.eps is not None else PHI_LOWER_BOUND
        rng = np.random.default_rng(np.random.SeedSequence(run.seed).spawn(1)[0])
        points = sample_lifted_points(rng, cover.bound_samples, delta=run.delta)
        return [
            cover_algebra_report(instances, run.seed, delta=run.delta),
            sheet_report(ks, max(1, instances // len(ks)), run.seed, delta=run.delta),
            re_log_phi_lower_bound(points, phi_bound, seed=run.seed),
        ]

    def _suite_phi2_zero(self, run: ResolvedRun) -> List[VerificationReport]:
        lemma = run.settings.lemma
        return [
            phi_square_zero_report(run.delta, run.seed),
            check_lemma(
                run.eps,
                lemma.contrast_delta,
                run.trials(lemma.contrast_trials),
                run.T,
                run.N,
                run.seed,
                name="phi_main_contrast",
                **self._partition_kwargs(run),
            ),
        ]

    def _suite_heisenberg(self, run: ResolvedRun) -> List[VerificationReport]:
        heis = run.settings.heisenberg
        audit_samples = run.trials(heis.audit_samples)
        membership_points = min(heis.membership_points, audit_samples)
        map_samples = min(heis.map_samples, audit_samples)
        box = {"a_range": heis.a_range, "b_range": heis.b_range}
        return [
            membership_audit(membership_points, run.seed, **box),
            constant_audit(audit_samples, run.seed, **box, **self._partition_kwargs(run)),
            embedding_audit(
                map_samples,
                run.seed,
                injectivity_pairs=min(10_000, map_samples),
                **box,
            ),
            orbit_rank_audit(min(1000, membership_points), run.seed),
        ]


__all__ = ["ConfigError", "ResolvedRun", "VerificationOrchestrator"]
