import csv
import io
import json
import math
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from src.miespec.models import OutputFormat, ReportItem, ReportStatus, VerificationReport
from src.miespec.report_writer import (
    export_report,
    load_report,
    report_lines,
    report_statistics,
    write_csv,
    write_report,
    write_sections,
)


@pytest.fixture
def report():
    items = [
        ReportItem(name="energy_fd[x]", paper_form="E", computed=-0.5000000001, oracle=-0.5,
                   rel_error=2e-10, tolerance=1e-6, status=ReportStatus.MATCH),
        ReportItem(name="typo.epsilon_factor", paper_form="eps = mu A/(hbar^2 K)", computed=1.0, oracle=1.0,
                   rel_error=0.0, tolerance=1e-8, status=ReportStatus.PAPER_TYPO_FLAGGED,
                   corrected_form="eps = 2 mu A/(hbar^2 K)", literal=0.5),
    ]
    result = VerificationReport(metadata={"generator": "test"}, items=items)
    result.metadata["counts"] = result.counts()
    return result


def test_counts_and_statistics(report):
    assert report.counts() == {"match": 1, "paper_typo_flagged": 1, "mismatch": 0}
    stats = report_statistics(report)
    assert stats["total_items"] == 2
    assert stats["typo_probes"] == 1
    assert stats["worst_item"] == "energy_fd[x]"
    assert stats["worst_ratio"] == pytest.approx(2e-4)


def test_statistics_of_empty_report():
    stats = report_statistics(VerificationReport())
    assert stats["worst_item"] is None
    assert stats["total_items"] == 0


@pytest.mark.parametrize("suffix", [".json", ".jsonl"])
def test_export_and_load(report, tmp_path, suffix):
    path = str(tmp_path / f"report{suffix}")
    export_report(report, path)
    loaded = load_report(path)
    assert loaded.items == report.items
    assert loaded.metadata["generator"] == "test"


def test_json_lines_layout(report, tmp_path):
    path = tmp_path / "report.jsonl"
    export_report(report, str(path))
    lines = path.read_text().splitlines()
    assert len(lines) == 3
    assert json.loads(lines[0]) == {"metadata": report.metadata}
    assert json.loads(lines[2])["literal"] == 0.5
    assert len(report_lines(report)) == 3


def test_load_missing_report(tmp_path):
    with pytest.raises(OSError):
        load_report(str(tmp_path / "nope.json"))


def test_report_as_csv(report):
    out = io.StringIO()
    write_report(report, OutputFormat.CSV, out)
    rows = list(csv.DictReader(io.StringIO(out.getvalue())))
    assert [row["status"] for row in rows] == ["match", "paper_typo_flagged"]
    assert float(rows[0]["computed"]) == -0.5000000001
    assert rows[0]["literal"] == ""
    assert rows[1]["corrected_form"] == "eps = 2 mu A/(hbar^2 K)"


def test_report_as_table_ends_with_counts(report):
    out = io.StringIO()
    write_report(report, OutputFormat.TABLE, out)
    assert out.getvalue().rstrip().splitlines()[-1] == "match: 1, paper_typo_flagged: 1, mismatch: 0"


def test_csv_sections_are_separated():
    out = io.StringIO()
    write_csv({"rows": [{"a": 1, "b": 0.1}], "norms": [{"norm": 1.0}]}, out)
    assert out.getvalue() == "a,b\n1,0.1\n\nnorm\n1.0\n"


def test_json_sections_carry_the_command():
    out = io.StringIO()
    write_sections({"rows": [{"flag": True}]}, OutputFormat.JSON, out, "spectrum")
    assert json.loads(out.getvalue()) == {"command": "spectrum", "rows": [{"flag": True}]}


def test_empty_table():
    out = io.StringIO()
    write_sections({"rows": []}, OutputFormat.TABLE, out)
    assert out.getvalue() == "(no rows)\n"


def _reject_constant(token):
    raise ValueError(f"non-standard JSON constant {token}")


@pytest.fixture
def broken_report():
    item = ReportItem(name="energy_fd[broken]", paper_form="E", computed=float("nan"), oracle=float("inf"),
                      rel_error=1.0, tolerance=1e-6, status=ReportStatus.MISMATCH, literal=float("-inf"))
    return VerificationReport(metadata={"generator": "test", "worst": float("nan")}, items=[item])


@pytest.mark.parametrize("suffix", [".json", ".jsonl"])
def test_non_finite_values_export_as_strict_json(broken_report, tmp_path, suffix):
    path = tmp_path / f"report{suffix}"
    export_report(broken_report, str(path))
    text = path.read_text()
    chunks = text.splitlines() if suffix == ".jsonl" else [text]
    for chunk in chunks:
        json.loads(chunk, parse_constant=_reject_constant)
    loaded = load_report(str(path))
    item = loaded.items[0]
    assert math.isnan(item.computed)
    assert item.oracle == math.inf
    assert item.literal == -math.inf
    assert loaded.metadata["worst"] == "nan"


def test_non_finite_values_in_json_output(broken_report):
    out = io.StringIO()
    write_report(broken_report, OutputFormat.JSON, out)
    doc = json.loads(out.getvalue(), parse_constant=_reject_constant)
    assert doc["items"][0]["computed"] == "nan"
    assert doc["items"][0]["oracle"] == "inf"
    assert doc["items"][0]["status"] == "mismatch"
