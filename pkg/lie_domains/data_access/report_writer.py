"""把 :class:`ReportBundle` 写出为 JSON 或 CSV。

JSON 以稳定的键顺序和 UTF-8 编码输出；CSV 每行一个样本值
``(report, index, value)``，没有样本序列的报告写一行汇总。
"""

from __future__ import annotations

import csv
import io
import json
import logging
from pathlib import Path
from typing import Optional

from ..utils.settings import get_verify_config
from .models import OutputFormat, ReportBundle

logger = logging.getLogger(__name__)

CSV_HEADER = ("report", "index", "value", "pass", "worst_margin")


def render_json(bundle: ReportBundle) -> str:
    return json.dumps(bundle.to_record(), sort_keys=True, indent=2, ensure_ascii=False)


def render_csv(bundle: ReportBundle, *, max_rows: Optional[int] = None) -> str:
    if max_rows is None:
        max_rows = get_verify_config().report.csv_max_rows
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for report in bundle.reports:
        margin = "" if report.worst_margin is None else repr(report.worst_margin)
        verdict = "true" if report.passed else "false"
        if not report.series:
            writer.writerow((report.name, "", "", verdict, margin))
            continue
        for index, value in enumerate(report.series[:max_rows]):
            writer.writerow((report.name, index, repr(float(value)), verdict, margin))
    return buffer.getvalue()


def render(bundle: ReportBundle, fmt: OutputFormat) -> str:
    if fmt is OutputFormat.CSV:
        return render_csv(bundle)
    return render_json(bundle)


def write_bundle(bundle: ReportBundle, path: Path, fmt: OutputFormat = OutputFormat.JSON) -> Path:
    """写出报告集合；父目录不存在时自动创建。"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render(bundle, fmt), encoding="utf-8")
    logger.info(
        "Report bundle written | path=%s | format=%s | reports=%s",
        path,
        fmt.value,
        len(bundle.reports),
    )
    return path
