"""Shared fixtures for the fhclab test suite."""

import pytest
import yaml

from src.core.config import ConfigManager
from src.core.gridfn import GridFunction, SpaceSpec
from src.core.weights import Weight


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: full-size construction runs (deselect with -m 'not slow')")


@pytest.fixture(autouse=True, scope="session")
def no_user_config():
    """Keep user config files out of the tests."""
    with pytest.MonkeyPatch.context() as mp:
        mp.setattr(ConfigManager, "DEFAULT_CONFIG_PATHS", [])
        yield


@pytest.fixture
def exp_l1():
    return SpaceSpec.lp(Weight.exponential(1.0), 1.0)


@pytest.fixture
def exp_c0():
    return SpaceSpec.c0(Weight.exponential(1.0))


@pytest.fixture
def chi01():
    return GridFunction.indicator(0.0, 1.0, 32)


@pytest.fixture
def write_config(tmp_path):
    """Write a config mapping to a YAML file and return its path."""

    def _write(data, name="config.yaml"):
        path = tmp_path / name
        path.write_text(yaml.safe_dump(data, default_flow_style=False))
        return path

    return _write


@pytest.fixture
def small_run():
    """A construction small enough for unit tests: one target on a coarse grid."""
    return {
        "weight": "exponential:1",
        "space": "lp",
        "p": 1.0,
        "grid_step": "1/8",
        "horizon": 300,
        "targets": ["chi(0,1)"],
        "step": "1/8",
    }
