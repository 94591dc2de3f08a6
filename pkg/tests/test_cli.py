import logging

import pytest
import yaml

from src.cli.main import main


@pytest.fixture(autouse=True)
def restore_logging():
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


def test_no_command_prints_help(capsys):
    assert main([]) == 1
    assert "classify" in capsys.readouterr().out


def test_classify_writes_report_to_stdout(write_config, capsys):
    path = write_config({"weight": "exponential:1"})
    assert main(["--config", str(path), "classify"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("# fhclab report v1")
    assert "summary" in out


def test_flags_override_the_file(write_config, small_run, tmp_path):
    path = write_config(small_run)
    out = tmp_path / "report.txt"
    assert main(["--config", str(path), "classify", "--weight", "rational", "--out", str(out)]) == 0
    text = out.read_text()
    assert "experiment: classify" in text
    assert "weight: rational" in text


def test_hypothesis_violation_exit_code(write_config, small_run):
    path = write_config(small_run)
    assert main(["--config", str(path), "construct", "--weight", "constant:1"]) == 3


def test_missing_config_is_a_config_error(tmp_path, capsys):
    assert main(["--config", str(tmp_path / "absent.yaml"), "classify"]) == 4
    assert "Configuration error" in capsys.readouterr().err


def test_invalid_config_is_a_config_error(write_config):
    path = write_config({"horizon": -5})
    assert main(["--config", str(path), "classify"]) == 4


def test_config_validate(write_config):
    assert main(["--config", str(write_config({})), "config", "--validate"]) == 0
    assert main(["--config", str(write_config({"space": "l2"})), "config", "--validate"]) == 4


def test_config_init(tmp_path):
    path = tmp_path / "fresh.yaml"
    assert main(["--config", str(path), "config", "--init"]) == 0
    assert yaml.safe_load(path.read_text())["weight"] == "exponential:1"
    assert main(["--config", str(path), "config", "--init"]) == 1
    assert main(["--config", str(path), "config", "--init", "--force"]) == 0


def test_config_show(write_config, capsys):
    assert main(["--config", str(write_config({"horizon": 77})), "config"]) == 0
    assert "horizon: 77" in capsys.readouterr().out


def test_empty_targets_exit_code(write_config, capsys):
    assert main(["--config", str(write_config({"targets": []})), "classify"]) == 4
    err = capsys.readouterr().err
    assert "at least one target" in err
    assert "orbit.level" not in err
