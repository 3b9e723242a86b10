import csv
import json

import pytest

from lie_domains.main import EXIT_CONFIG, EXIT_FAILED, EXIT_OK, build_parser, main


# 测试：lemma 套件的 delta 超出 (0, 1/3) 时以退出码 2 结束，且不写出报告。
def test_invalid_delta_exits_with_config_error(tmp_path) -> None:
    out = tmp_path / "report.json"
    code = main(["verify-lemma", "--delta", "0.4", "--out", str(out)])
    assert code == EXIT_CONFIG
    assert not out.exists()


def test_invalid_field_values_exit_with_config_error() -> None:
    assert main(["verify-claim", "--trials", "0"]) == EXIT_CONFIG
    assert main(["cover-demo", "--k", "1"]) == EXIT_CONFIG


# 测试：verify-claim 的 eps 超过 0.373 时以退出码 2 结束，而不是抛出异常。
def test_claim_eps_out_of_range_exits_with_config_error(tmp_path) -> None:
    out = tmp_path / "claim.json"
    code = main(["verify-claim", "--eps", "0.5", "--trials", "10", "--out", str(out)])
    assert code == EXIT_CONFIG
    assert not out.exists()


def test_unknown_command_is_rejected_by_the_parser() -> None:
    with pytest.raises(SystemExit):
        build_parser().parse_args(["verify-everything"])


# 测试：--out 写出 JSON 报告集合，字段包括 pass、工具版本与配置回显。
def test_json_bundle_written_to_file(tmp_path) -> None:
    out = tmp_path / "nested" / "claim.json"
    code = main(["verify-claim", "--trials", "2000", "--seed", "5", "--out", str(out)])
    assert code == EXIT_OK

    record = json.loads(out.read_text(encoding="utf-8"))
    assert record["overall_pass"] is True
    assert record["tool_version"]
    assert record["config"]["seed"] == 5
    assert record["config"]["trials"] == 2000
    report = record["reports"][0]
    assert report["pass"] is True
    assert report["samples"] == 2000
    assert "series" not in report


def test_failing_bundle_exits_with_one(tmp_path) -> None:
    out = tmp_path / "lemma.json"
    code = main(["verify-lemma", "--eps", "10", "--trials", "500", "--out", str(out)])
    assert code == EXIT_FAILED
    record = json.loads(out.read_text(encoding="utf-8"))
    assert record["overall_pass"] is False
    assert record["reports"][0]["witness"] is not None


def test_csv_bundle(tmp_path) -> None:
    out = tmp_path / "rank.csv"
    code = main(
        ["verify-totally-real", "--trials", "20", "--format", "csv", "--out", str(out)]
    )
    assert code == EXIT_OK

    with out.open(encoding="utf-8", newline="") as handle:
        rows = list(csv.reader(handle))
    assert rows[0] == ["report", "index", "value", "pass", "worst_margin"]
    # the base triple plus twenty random triples
    assert len(rows) == 1 + 21
    assert {row[0] for row in rows[1:]} == {"totally_real_rank"}
    assert all(float(row[2]) > 0.0 for row in rows[1:])


def test_bundle_goes_to_stdout_without_out(capsys) -> None:
    code = main(["verify-winding", "--seed", "2"])
    assert code == EXIT_OK
    record = json.loads(capsys.readouterr().out)
    assert record["reports"][0]["name"] == "windings"
