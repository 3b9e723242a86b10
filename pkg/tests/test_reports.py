import csv
import io
import json

import pytest
from pydantic import ValidationError

from lie_domains.data_access.models import (
    OutputFormat,
    ReportBundle,
    RunConfig,
    SuiteName,
    VerificationReport,
    complexes_to_reals,
)
from lie_domains.data_access.report_writer import (
    CSV_HEADER,
    render_csv,
    render_json,
    write_bundle,
)


def _bundle(*reports: VerificationReport) -> ReportBundle:
    return ReportBundle.assemble(
        tool_version="test",
        config=RunConfig(command=SuiteName.VERIFY_LEMMA, seed=4),
        reports=list(reports),
    )


def _passing(name: str = "lemma", series=None) -> VerificationReport:
    return VerificationReport(
        name=name, passed=True, samples=3, worst_margin=0.25, series=series or []
    )


def test_failed_report_requires_a_witness() -> None:
    with pytest.raises(ValidationError):
        VerificationReport(name="lemma", passed=False)
    report = VerificationReport.model_validate(
        {"name": "lemma", "pass": False, "witness": {"g": [1.0]}}
    )
    assert not report.passed


# 测试：启发式报告失败不影响总判定，非启发式报告失败则判定为失败。
def test_overall_pass_ignores_heuristic_reports() -> None:
    probe = VerificationReport(
        name="probe", passed=False, heuristic=True, witness={"ray": [0.0, 1.0, 0.0]}
    )
    assert _bundle(_passing(), probe).overall_pass
    failed = VerificationReport(name="lemma", passed=False, witness={"g": []})
    assert not _bundle(failed, _passing("other")).overall_pass


def test_json_record_uses_pass_alias_and_drops_series() -> None:
    bundle = _bundle(_passing(series=[0.1, 0.2]))
    record = json.loads(render_json(bundle))
    report = record["reports"][0]
    assert report["pass"] is True
    assert "passed" not in report
    assert "series" not in report
    assert record["config"]["command"] == "verify-lemma"

    canonical = bundle.canonical_record()
    assert "generated_at" not in canonical
    assert "wall_time_ms" not in canonical["reports"][0]


def test_csv_rows_follow_the_series() -> None:
    bundle = _bundle(_passing("a", series=[0.5, 1.5, 2.5]), _passing("b"))
    rows = list(csv.reader(io.StringIO(render_csv(bundle, max_rows=2))))
    assert tuple(rows[0]) == CSV_HEADER
    assert rows[1:] == [
        ["a", "0", "0.5", "true", "0.25"],
        ["a", "1", "1.5", "true", "0.25"],
        ["b", "", "", "true", "0.25"],
    ]


def test_write_bundle_creates_parent_directories(tmp_path) -> None:
    path = write_bundle(_bundle(_passing()), tmp_path / "a" / "b" / "out.csv", OutputFormat.CSV)
    assert path.read_text(encoding="utf-8").startswith("report,index,value")


def test_complexes_to_reals_interleaves() -> None:
    assert complexes_to_reals([1 + 2j, -3j]) == [1.0, 2.0, 0.0, -3.0]
