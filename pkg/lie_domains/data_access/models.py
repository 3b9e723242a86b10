"""定义验证运行与报告的 Pydantic 数据结构。

报告是 CLI 的输出单元：每个 :class:`VerificationReport` 对应一次检查，
多个报告聚合为 :class:`ReportBundle` 并写出为 JSON 或 CSV。
"""

from __future__ import annotations

from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

from pydantic import BaseModel, ConfigDict, Field, model_validator


class SuiteName(str, Enum):
    """CLI 子命令枚举，每个子命令对应一组验证报告。"""

    VERIFY_LEMMA = "verify-lemma"
    VERIFY_CLAIM = "verify-claim"
    VERIFY_WINDING = "verify-winding"
    VERIFY_TOTALLY_REAL = "verify-totally-real"
    VERIFY_FREE = "verify-free"
    PROBE_PROPER = "probe-proper"
    VERIFY_LEVI = "verify-levi"
    COVER_DEMO = "cover-demo"
    FIND_PHI2_ZERO = "find-phi2-zero"
    HEISENBERG = "heisenberg"


# Suites whose Monte-Carlo bounds are stated for 0 < delta < 1/3.
LEMMA_SUITES = frozenset(
    {SuiteName.VERIFY_LEMMA, SuiteName.FIND_PHI2_ZERO, SuiteName.COVER_DEMO}
)


class OutputFormat(str, Enum):
    JSON = "json"
    CSV = "csv"


class RunConfig(BaseModel):
    """一次 CLI 运行的完整参数；未指定的字段由 ``verify_settings.yaml`` 补齐。"""

    command: SuiteName
    seed: int = Field(default=0, ge=0, lt=2**64)
    trials: Optional[int] = Field(default=None, ge=1)
    iwasawa_T: Optional[float] = Field(default=None, gt=0.0)
    iwasawa_N: Optional[float] = Field(default=None, ge=0.0)
    eps: Optional[float] = Field(default=None, gt=0.0)
    delta: Optional[float] = None
    tube_radius: Optional[float] = None
    k: int = 2
    out: Optional[Path] = None
    format: OutputFormat = OutputFormat.JSON
    workers: Optional[int] = Field(default=None, ge=1)


class VerificationReport(BaseModel):
    """单次验证的结构化结果：是否通过、最差余量、样本数与失败见证。"""

    model_config = ConfigDict(populate_by_name=True)

    name: str
    passed: bool = Field(alias="pass")
    samples: int = Field(default=0, ge=0)
    worst_margin: Optional[float] = None
    witness: Optional[Dict[str, Any]] = None
    seed: Optional[int] = None
    wall_time_ms: float = 0.0
    # heuristic probes never flip the bundle verdict
    heuristic: bool = False
    details: Dict[str, Any] = Field(default_factory=dict)
    # per-sample values for CSV export; not part of the JSON record
    series: List[float] = Field(default_factory=list, exclude=True)

    @model_validator(mode="after")
    def _failure_has_witness(self) -> "VerificationReport":
        if not self.passed and self.witness is None:
            raise ValueError(f"report {self.name!r} failed without a witness")
        return self

    def to_record(self) -> Dict[str, Any]:
        return self.model_dump(mode="json", by_alias=True)


class ReportBundle(BaseModel):
    """一次运行的报告集合，附带工具版本与配置回显（不含 workers，报告与线程数无关）。"""

    tool_version: str
    config: Dict[str, Any]
    reports: List[VerificationReport] = Field(default_factory=list)
    overall_pass: bool
    generated_at: datetime = Field(
        default_factory=lambda: datetime.now(timezone.utc)
    )

    @classmethod
    def assemble(
        cls,
        *,
        tool_version: str,
        config: RunConfig,
        reports: Sequence[VerificationReport],
    ) -> "ReportBundle":
        overall = all(report.passed for report in reports if not report.heuristic)
        return cls(
            tool_version=tool_version,
            config=config.model_dump(mode="json", exclude={"workers"}),
            reports=list(reports),
            overall_pass=overall,
        )

    def to_record(self) -> Dict[str, Any]:
        record = self.model_dump(mode="json", exclude={"reports"})
        record["reports"] = [report.to_record() for report in self.reports]
        return record

    def canonical_record(self) -> Dict[str, Any]:
        """Record without wall-clock fields; equal for equal config and seed."""
        record = self.to_record()
        record.pop("generated_at", None)
        for report in record["reports"]:
            report.pop("wall_time_ms", None)
        return record


def complex_to_pair(value: complex) -> List[float]:
    value = complex(value)
    return [float(value.real), float(value.imag)]


def complexes_to_reals(values: Iterable[complex]) -> List[float]:
    """Interleave (re, im) of each value; a 2x2 matrix row-major gives 8 reals."""
    out: List[float] = []
    for value in values:
        out.extend(complex_to_pair(value))
    return out
