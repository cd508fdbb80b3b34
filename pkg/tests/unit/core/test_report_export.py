# tests/unit/core/test_report_export.py
import json
import math

import pytest

from osim.core.exceptions import ParamOutOfDomainError
from osim.core.report_export import CSV_HEADER, canonical_json, csv_summary, export_report, write_index, write_report
from osim.models.report_models import BatchIndex, IndexEntry, Report, ScenarioMethod
from osim.models.verdict_models import OrderRelation, VerdictStatus


@pytest.fixture
def report() -> Report:
    return Report(
        tool_version="0.3.0",
        scenario="T5.4a",
        title="DGOS: univariate hr comparisons",
        statement="X(i,n) <=hr X(i+1,n), i = 1..n-1",
        relation=OrderRelation.HR,
        method=ScenarioMethod.MONTE_CARLO,
        seed=42,
        N=20000,
        config={"seed": 42, "scenario": "T5.4a", "N": 20000},
        verdict=VerdictStatus.HOLDS,
        max_violation=0.0,
        tolerance=0.1,
    )


def test_canonical_json_sorts_keys_and_keeps_precision():
    text = canonical_json({"b": 0.1, "a": [1, True, None], "c": float("nan")})
    assert text.endswith("\n")
    assert text.index('"a"') < text.index('"b"') < text.index('"c"')
    assert "0.10000000000000001" in text
    data = json.loads(text)
    assert data["a"] == [1, True, None]
    assert data["c"] is None
    print("\n[PASSED] test_canonical_json_sorts_keys_and_keeps_precision")


def test_canonical_json_round_trips_floats_exactly():
    value = math.pi / 7.0
    assert json.loads(canonical_json({"x": value}))["x"] == value
    print("\n[PASSED] test_canonical_json_round_trips_floats_exactly")


def test_export_report_is_stable(report):
    first = export_report(report, "json")
    assert first == export_report(report.model_copy(deep=True), "json")
    decoded = json.loads(first)
    assert decoded["scenario"] == "T5.4a"
    assert decoded["verdict"] == "HOLDS"
    assert "wall_time" not in decoded
    print("\n[PASSED] test_export_report_is_stable")


def test_csv_summary(report):
    lines = export_report(report, "csv_summary").decode("utf-8").splitlines()
    assert lines[0].split(",") == CSV_HEADER
    assert lines[1] == "T5.4a,HOLDS,0,0.10000000000000001,42,20000"
    inconclusive = report.model_copy(update={"verdict": VerdictStatus.INCONCLUSIVE, "max_violation": None,
                                             "tolerance": None})
    assert csv_summary([inconclusive]).splitlines()[1] == "T5.4a,INCONCLUSIVE,,,42,20000"
    print("\n[PASSED] test_csv_summary")


def test_export_report_unknown_format(report):
    with pytest.raises(ParamOutOfDomainError):
        export_report(report, "xml")
    print("\n[PASSED] test_export_report_unknown_format")


def test_write_report_and_index(report, tmp_path):
    path = write_report(report, tmp_path / "out" / "T5.4a.json")
    assert path.read_bytes() == export_report(report, "json")
    index = BatchIndex(
        tool_version="0.3.0",
        exit_code=0,
        entries=[IndexEntry(scenario="T5.4a", status=VerdictStatus.HOLDS, report_path="T5.4a.json", wall_time=1.5)],
    )
    index_path = write_index(index, tmp_path / "out", [report])
    assert json.loads(index_path.read_text(encoding="utf-8"))["entries"][0]["wall_time"] == 1.5
    assert (tmp_path / "out" / "summary.csv").read_text(encoding="utf-8").startswith(",".join(CSV_HEADER))
    print("\n[PASSED] test_write_report_and_index")
