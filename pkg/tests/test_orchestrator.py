import yaml

from src.core.base import ExperimentStatus
from src.core.config import ConfigManager
from src.core.orchestrator import Laboratory


def make_lab(write_config, **data):
    return Laboratory(ConfigManager(write_config(data)))


def test_classify_exponential(write_config):
    result = make_lab(write_config, weight="exponential:1").run("classify")
    assert result.status == ExperimentStatus.PASSED
    assert result.exit_code == 0
    text = result.report.render()
    assert "record verdict property=chaotic verdict=holds" in text
    assert "record admissible M=1 omega=1" in text
    assert "tolerance.slack_constant: 32" in text
    assert "  lemma_coherent: yes" in text


def test_classify_constant_on_c0(write_config):
    result = make_lab(write_config, weight="constant:1", space="c0").run("classify")
    assert result.status == ExperimentStatus.PASSED
    assert "record verdict property=hypercyclic verdict=fails" in result.report.render()


def test_unknown_experiment(write_config):
    result = make_lab(write_config).run("sweep")
    assert result.status == ExperimentStatus.CONFIG_ERROR
    assert result.exit_code == 4


def test_construct_small(write_config, small_run, tmp_path):
    out = tmp_path / "construct.report"
    lab = make_lab(write_config, **small_run, out=str(out))
    result = lab.run("construct", out)
    assert result.status == ExperimentStatus.PASSED
    text = out.read_text()
    assert "record level l=1" in text
    assert "  all_budgets_met: yes" in text
    vector = yaml.safe_load(out.with_suffix(".vector.yaml").read_text())
    assert vector["family"]["period"] == lab.vector().family.period
    assert vector["vector"]["step"] == "1/8"
    assert vector["weight"] == {"kind": "exponential", "params": [1.0], "certificate": {"M": 1.0, "omega": 1.0}}
    assert vector["space"] == "L^1"


def test_construct_needs_integrable_weight(write_config, small_run):
    result = make_lab(write_config, **dict(small_run, weight="rational")).run("construct")
    assert result.status == ExperimentStatus.HYPOTHESIS_VIOLATION
    assert result.exit_code == 3
    assert "integrable" in result.message


def test_orbit_small(write_config, small_run):
    lab = make_lab(write_config, **small_run)
    result = lab.run("orbit")
    assert result.status == ExperimentStatus.PASSED
    text = result.report.render()
    assert text.count("record window") == 3
    assert "transfer_holds: yes" in text
    # the vector is built once and shared
    assert lab.vector() is lab.vector()


def test_orbit_level_beyond_targets(write_config, small_run):
    result = make_lab(write_config, **dict(small_run, orbit={"level": 2})).run("orbit")
    assert result.status == ExperimentStatus.CONFIG_ERROR


def test_periodic(write_config, small_run, tmp_path):
    out = tmp_path / "periodic.report"
    result = make_lab(write_config, **dict(small_run, out=str(out))).run("periodic", out)
    assert result.status == ExperimentStatus.PASSED
    assert out.read_text().count("record truncation") == 10
    assert "defects_within_bounds: yes" in out.read_text()
    assert out.with_suffix(".periodic.yaml").exists()


def test_periodic_on_c0_needs_vanishing_target(write_config, small_run):
    result = make_lab(write_config, **dict(small_run, space="c0")).run("periodic")
    assert result.status == ExperimentStatus.HYPOTHESIS_VIOLATION


def test_reports_are_deterministic(write_config, small_run):
    first = make_lab(write_config, **small_run).run("construct").report.render()
    second = make_lab(write_config, **small_run).run("construct").report.render()
    assert first == second


def test_config_hash_ignores_runtime_keys(write_config, small_run):
    quiet = make_lab(write_config, **small_run)
    loud = make_lab(write_config, **dict(small_run, log_level="DEBUG", out="x.report"))
    other = make_lab(write_config, **dict(small_run, horizon=301))
    assert quiet.config_hash() == loud.config_hash()
    assert quiet.config_hash() != other.config_hash()


def test_classify_table_without_tail(write_config):
    table = {"kind": "sampled", "step": 0.5, "values": [1.0, 0.8, 0.6, 0.5, 0.4]}
    result = make_lab(write_config, weight=table).run("classify")
    assert result.status == ExperimentStatus.PASSED
    text = result.report.render()
    assert "weight: sampled" in text
    assert "record verdict property=hypercyclic verdict=inconclusive" in text
    assert "record necessary stride=24 terms=1 domain_end=2 skipped=yes" in text
