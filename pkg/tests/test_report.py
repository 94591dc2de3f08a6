import math

import numpy as np
import pytest
import yaml

from src.core.base import Verdict
from src.utils.report import Report, config_hash, format_value, write_yaml


@pytest.mark.parametrize("value, text", [
    (True, "yes"),
    (np.bool_(False), "no"),
    (3, "3"),
    (np.int64(7), "7"),
    (1 / 3, "0.333333333333"),
    (math.inf, "inf"),
    (-math.inf, "-inf"),
    (math.nan, "nan"),
    (None, "-"),
    (Verdict.HOLDS, "holds"),
    ((1.0, 2.5), "[1,2.5]"),
    ("two words", "two_words"),
])
def test_format_value(value, text):
    assert format_value(value) == text


def test_render_layout():
    report = Report("construct", {"config_hash": "abc", "horizon": 2000})
    report.add("level", l=1, max_error=0.25, passed=True)
    report.set_summary(status=Verdict.HOLDS)
    lines = report.render().splitlines()
    assert lines[0] == "# fhclab report v1"
    assert lines[1] == "experiment: construct"
    assert "horizon: 2000" in lines
    assert "record level l=1 max_error=0.25 passed=yes" in lines
    assert lines[-2:] == ["summary", "  status: holds"]


def test_identical_reports_are_byte_identical(tmp_path):
    paths = []
    for name in ("a.report", "b.report"):
        report = Report("orbit", {"eps": 0.55})
        report.add("window", start=0.0, end=100.0, hit_measure=12.5)
        paths.append(report.write(tmp_path / name))
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_config_hash_is_order_independent():
    assert config_hash({"a": 1, "b": [1, 2]}) == config_hash({"b": [1, 2], "a": 1})
    assert config_hash({"a": 1}) != config_hash({"a": 2})
    assert len(config_hash({})) == 64


def test_write_yaml(tmp_path):
    path = write_yaml({"values": [np.float64(0.5)], "n": np.int64(3)}, tmp_path / "out" / "v.yaml")
    assert yaml.safe_load(path.read_text()) == {"values": [0.5], "n": 3}
