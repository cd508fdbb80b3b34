# tests/unit/models/test_config_models.py
import pytest

from osim.core.exceptions import ConfigParseError
from osim.models.config_models import (
    BatchConfig,
    DistributionRef,
    ExperimentConfig,
    is_batch,
    parse_batch,
    parse_experiment,
    read_config_file,
)


def test_parse_experiment_defaults():
    config = parse_experiment({"scenario": "T5.4a", "seed": 1})
    assert isinstance(config, ExperimentConfig)
    assert config.N >= 1000
    assert config.gr_n == "larger"
    assert not config.reverse
    assert config.grids.u_points == 9
    print("\n[PASSED] test_parse_experiment_defaults")


@pytest.mark.parametrize(
    "data, field",
    [
        ({"scenario": "T5.4a"}, "seed"),
        ({"scenario": "T5.4a", "seed": 1, "N": 10}, "N"),
        ({"scenario": "T5.4a", "seed": 1, "colour": "red"}, "colour"),
        ({"scenario": "T5.4a", "seed": 1, "model": {"type": "gos"}}, "model.type"),
        ({"scenario": "T5.4a", "seed": 1, "grids": {"u_points": 2}}, "grids.u_points"),
    ],
)
def test_parse_experiment_names_the_offending_field(data, field):
    with pytest.raises(ConfigParseError) as exc_info:
        parse_experiment(data)
    assert exc_info.value.field == field
    print(f"\n[PASSED] test_parse_experiment_names_the_offending_field: {field}")


def test_distribution_ref_needs_exactly_one_form():
    assert DistributionRef(name="exponential", params=[1.0]).phr is None
    nested = DistributionRef.model_validate({"phr": {"baseline": {"name": "weibull", "params": [0.5]}, "alpha": 2}})
    assert nested.phr.baseline.name == "weibull"
    with pytest.raises(ConfigParseError) as exc_info:
        parse_experiment({"seed": 1, "distributions": [{}]})
    assert exc_info.value.field.startswith("distributions.0")
    print("\n[PASSED] test_distribution_ref_needs_exactly_one_form")


def test_batch_expands_to_catalog_or_runs():
    batch = BatchConfig(seed=5, N=5000)
    configs = batch.experiments(["T4.1a", "T4.1b"])
    assert [c.scenario for c in configs] == ["T4.1a", "T4.1b"]
    assert all(c.seed == 5 and c.N == 5000 for c in configs)

    runs = parse_batch({"seed": 5, "runs": [{"scenario": "T5.3a", "N": 2000}]}).experiments(["ignored"])
    assert runs[0].scenario == "T5.3a"
    assert runs[0].N == 2000
    print("\n[PASSED] test_batch_expands_to_catalog_or_runs")


def test_batch_run_without_scenario():
    with pytest.raises(ConfigParseError) as exc_info:
        parse_batch({"seed": 5, "runs": [{"N": 2000}]}).experiments([])
    assert exc_info.value.field == "runs[0].scenario"
    print("\n[PASSED] test_batch_run_without_scenario")


def test_is_batch():
    assert is_batch({"seed": 1})
    assert is_batch({"seed": 1, "runs": []})
    assert not is_batch({"seed": 1, "scenario": "T4.1a"})
    print("\n[PASSED] test_is_batch")


def test_read_config_file_reports_json_errors(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"seed": 1,\n "scenario": }', encoding="utf-8")
    with pytest.raises(ConfigParseError) as exc_info:
        read_config_file(path)
    assert exc_info.value.field == "line 2"

    listed = tmp_path / "list.json"
    listed.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(ConfigParseError):
        read_config_file(listed)
    with pytest.raises(ConfigParseError):
        read_config_file(tmp_path / "missing.json")
    print("\n[PASSED] test_read_config_file_reports_json_errors")
