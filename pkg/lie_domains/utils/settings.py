"""提供验证套件所需的配置模型与读取工具。

配置文件位于仓库根目录 ``config/verify_settings.yaml``，按套件分组：
采样范围（Iwasawa 坐标）、解析延拓参数、引理常数、管状邻域参数、
Heisenberg 商群的采样区间以及报告导出选项。命令行参数会覆盖这里的默认值。
"""

from __future__ import annotations

from functools import lru_cache
from pathlib import Path
from typing import List, Optional, Tuple

import yaml
from pydantic import BaseModel, Field


class SamplingConfig(BaseModel):
    """G = PSL(2,R) 的 Iwasawa 采样范围与分块并行参数。"""

    iwasawa_T: float = Field(default=5.0, gt=0.0)
    iwasawa_N: float = Field(default=5.0, ge=0.0)
    # 每个分块的试验次数；分块划分与 worker 数无关，保证结果可重现
    chunk_size: int = Field(default=50_000, ge=1)
    workers: int = Field(default=4, ge=1)


class ContinuationConfig(BaseModel):
    """log φ 沿群路径解析延拓的离散化参数。"""

    path_samples: int = Field(default=64, ge=2)
    refinement_budget: int = Field(
        default=20, ge=0, description="Maximum number of bisection doublings per step"
    )
    branch_floor: float = Field(default=1e-8, gt=0.0)


class LemmaConfig(BaseModel):
    """引理（|φ(gh)| 有下界）及其内部断言的常数。"""

    eps: float = Field(default=1.0 / 3.0, gt=0.0)
    delta: float = Field(default=0.3, gt=0.0)
    trials: int = Field(default=1_000_000, ge=1)
    claim_trials: int = Field(default=100_000, ge=1)
    contrast_delta: float = Field(default=0.1, gt=0.0)
    contrast_trials: int = Field(default=100_000, ge=1)


class GeometryConfig(BaseModel):
    """轨道几何检查：基点三元组与随机样本规模。"""

    # (re, im) pairs for the fixed base triple ζ
    base_triple: List[Tuple[float, float]] = Field(
        default_factory=lambda: [(0.0, 1.0), (1.0, 1.0), (0.0, 2.0)]
    )
    random_triples: int = Field(default=1000, ge=1)
    free_triples: int = Field(default=100, ge=1)
    proper_rays: int = Field(default=16, ge=1)
    proper_s_max: float = Field(default=12.0, gt=0.0)

    def base_points(self) -> Tuple[complex, complex, complex]:
        z1, z2, z3 = (complex(re, im) for re, im in self.base_triple)
        return z1, z2, z3


class TubeConfig(BaseModel):
    """轨道管状邻域与 Levi 形式检查的参数。"""

    radius: float = Field(default=0.05, gt=0.0)
    levi_samples: int = Field(default=200, ge=1)
    fd_step: float = Field(default=1e-4, gt=0.0)
    starts: int = Field(default=8, ge=1)
    # Iwasawa ranges for boundary base points of the tube
    levi_T: float = Field(default=0.5, gt=0.0)
    levi_N: float = Field(default=1.0, ge=0.0)


class CoverConfig(BaseModel):
    """覆盖群提升演示的样本规模。"""

    instances: int = Field(default=1000, ge=1)
    bound_samples: int = Field(default=10_000, ge=1)
    near_identity_delta: float = Field(default=0.05, gt=0.0)


class HeisenbergConfig(BaseModel):
    """Heisenberg 商群 G = R×R×T 的采样区间与审计规模。"""

    a_range: float = Field(default=3.0, gt=0.0)
    b_range: float = Field(default=3.0, gt=0.0)
    membership_points: int = Field(default=10_000, ge=1)
    audit_samples: int = Field(default=1_000_000, ge=1)
    map_samples: int = Field(default=100_000, ge=1)


class ReportConfig(BaseModel):
    """报告导出选项。"""

    csv_max_rows: int = Field(
        default=10_000, ge=0, description="Per-report cap on CSV sample rows"
    )


class VerifyConfig(BaseModel):
    """完整的验证配置对象，聚合各套件的参数。"""

    sampling: SamplingConfig = Field(default_factory=SamplingConfig)
    continuation: ContinuationConfig = Field(default_factory=ContinuationConfig)
    lemma: LemmaConfig = Field(default_factory=LemmaConfig)
    geometry: GeometryConfig = Field(default_factory=GeometryConfig)
    tube: TubeConfig = Field(default_factory=TubeConfig)
    cover: CoverConfig = Field(default_factory=CoverConfig)
    heisenberg: HeisenbergConfig = Field(default_factory=HeisenbergConfig)
    report: ReportConfig = Field(default_factory=ReportConfig)


def _load_yaml_config(path: Path) -> dict:
    """读取并解析给定路径的 YAML 配置文件。"""
    with path.open("r", encoding="utf-8") as handle:
        return yaml.safe_load(handle) or {}


def load_verify_config(config_path: Optional[Path] = None) -> VerifyConfig:
    """从 YAML 文件加载验证配置。

    Parameters
    ----------
    config_path:
        可选的 YAML 配置文件路径。若未指定，则默认读取仓库根目录下
        ``config/verify_settings.yaml``；文件不存在时返回全部默认值。
    """

    if config_path is None:
        config_path = (
            Path(__file__).resolve().parents[2] / "config" / "verify_settings.yaml"
        )
    if not config_path.exists():
        return VerifyConfig()

    raw = _load_yaml_config(config_path)
    return VerifyConfig.model_validate(raw)


@lru_cache(maxsize=1)
def get_verify_config(config_path: Optional[Path] = None) -> VerifyConfig:
    """返回解析后的 :class:`VerifyConfig`，并使用 LRU 缓存避免重复读取。"""

    return load_verify_config(config_path=config_path)
