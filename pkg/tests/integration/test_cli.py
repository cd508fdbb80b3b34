# tests/integration/test_cli.py
import csv
import json

import pytest

from osim.cli import main
from osim.core.harness import EXIT_INCONCLUSIVE


def test_list_prints_the_catalog(capsys):
    assert main(["list", "--json"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 37
    assert json.loads(lines[0])["id"] == "T4.1a"
    print("\n[PASSED] test_list_prints_the_catalog")


def test_gen_check_prints_json_lines(capsys):
    assert main(["gen", "check", "--name", "clayton", "--params", "1", "--condition", "R_RATIO_POS_INC"]) == 0
    line = json.loads(capsys.readouterr().out.strip())
    assert line["condition"] == "R_RATIO_POS_INC"
    assert line["status"] == "VIOLATED"
    assert line["worst_violation"] > 0
    print("\n[PASSED] test_gen_check_prints_json_lines")


def test_gen_check_every_condition_for_double_exponential(capsys):
    assert main(["gen", "check", "--name", "ex61", "--params", "0.5", "--n", "3"]) == 0
    lines = [json.loads(line) for line in capsys.readouterr().out.strip().splitlines()]
    assert len(lines) == 6
    statuses = {line["condition"]: line["status"] for line in lines}
    assert statuses["R_RATIO_POS_INC"] == "HOLDS"
    assert statuses["R_RATIO_INC"] == "HOLDS"
    print("\n[PASSED] test_gen_check_every_condition_for_double_exponential")


def test_gen_check_gr_needs_dimension(capsys):
    assert main(["gen", "check", "--name", "gumbel", "--params", "2", "--condition", "GR_DIFF_POS_INC"]) == 1
    assert "--n" in capsys.readouterr().err
    print("\n[PASSED] test_gen_check_gr_needs_dimension")


def test_sample_writes_ordered_csv(tmp_path):
    model = tmp_path / "model.json"
    model.write_text(json.dumps({
        "generator": {"name": "gumbel", "params": [2.0]},
        "distributions": [{"name": "exponential", "params": [1.0]}],
        "model": {"type": "dgos", "n": 3, "k": 1.0, "m": [0.0, 0.0]},
    }), encoding="utf-8")
    out = tmp_path / "draws.csv"
    assert main(["sample", "--model", str(model), "--draws", "200", "--seed", "1", "--out", str(out)]) == 0
    with out.open(encoding="utf-8") as handle:
        rows = list(csv.reader(handle))
    assert rows[0] == ["x1", "x2", "x3"]
    assert len(rows) == 201
    values = [[float(v) for v in row] for row in rows[1:]]
    assert all(a <= b <= c for a, b, c in values)

    again = tmp_path / "again.csv"
    main(["sample", "--model", str(model), "--draws", "200", "--seed", "1", "--out", str(again)])
    assert again.read_bytes() == out.read_bytes()
    print("\n[PASSED] test_sample_writes_ordered_csv")


def test_sample_needs_a_model_block(tmp_path, capsys):
    model = tmp_path / "model.json"
    model.write_text(json.dumps({"generator": {"name": "gumbel", "params": [2.0]}}), encoding="utf-8")
    assert main(["sample", "--model", str(model), "--draws", "200"]) == 1
    assert "distributions" in capsys.readouterr().err
    print("\n[PASSED] test_sample_needs_a_model_block")


def test_verify_with_config_file(tmp_path, capsys):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"seed": 0, "generator": {"name": "clayton", "params": [2.0]}}), encoding="utf-8")
    out = tmp_path / "reports"
    code = main(["verify", "--scenario", "T4.1b", "--config", str(config), "--out", str(out), "--workers", "1"])
    assert code == EXIT_INCONCLUSIVE
    assert "T4.1b: INCONCLUSIVE" in capsys.readouterr().out
    report = json.loads((out / "T4.1b.json").read_text(encoding="utf-8"))
    assert report["failing_hypothesis"] == "R_RATIO_POS_INC"
    assert (out / "index.json").exists()
    print("\n[PASSED] test_verify_with_config_file")


def test_verify_reports_config_errors(tmp_path, capsys):
    code = main(["verify", "--scenario", "T4.1b", "--config", str(tmp_path / "missing.json")])
    assert code == 1
    assert "cannot read config" in capsys.readouterr().err
    print("\n[PASSED] test_verify_reports_config_errors")


def test_unknown_subcommand_exits():
    with pytest.raises(SystemExit):
        main(["explode"])
    print("\n[PASSED] test_unknown_subcommand_exits")
