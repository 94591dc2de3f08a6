"""Full-size construction: three indicator targets on the 1/32 grid."""

import pytest

from src.core.density import lower_density_discrete
from src.core.fhc import build_vector, density_transfer, orbit_hit_density, verify_returns
from src.core.gridfn import GridFunction, SpaceSpec
from src.core.weights import Weight

pytestmark = pytest.mark.slow


@pytest.fixture(scope="module")
def vector():
    space = SpaceSpec.lp(Weight.exponential(1.0), 1.0)
    targets = [GridFunction.parse(text, 32) for text in ("chi(0,1)", "chi(0,2)", "chi(1,2)")]
    return build_vector(targets, space, 2000)


def test_family_parameters(vector):
    assert vector.family.nu == (1, 2, 4)
    assert vector.family.gap == 8
    assert vector.family.period == 24


def test_every_level_meets_its_budget(vector):
    levels = verify_returns(vector, check_horizon=1900, workers=2)
    assert len(levels) == 3
    for lv in levels:
        assert lv.passed
        assert lv.max_error < 4.0 / 2 ** lv.level
        assert lv.decomposition_defect < 1e-9


def test_third_level_is_hit_with_positive_density(vector):
    scan = orbit_hit_density(vector.x, vector.smoothed[2], 0.55, vector.space, 1900.0, 1 / 8,
                             tail_window=100, workers=2)
    assert scan.discrete.estimate >= 0.8 / 24
    assert scan.continuous.estimate > 0


@pytest.mark.parametrize("level", [1, 2, 3])
def test_family_densities_match_the_period(vector, level):
    members = vector.family.level_set(level, 2000)
    estimate = lower_density_discrete(members, 2000).estimate
    assert abs(estimate - 1 / 24) <= 2 / 2000


@pytest.mark.parametrize("level", [1, 2])
def test_integer_returns_have_positive_density(vector, level):
    eps = 4.0 / 2 ** level + 0.05
    scan = orbit_hit_density(vector.x, vector.smoothed[level - 1], eps, vector.space, 2000.0, 1.0,
                             tail_window=100, workers=2)
    assert scan.discrete.estimate >= 0.8 / vector.family.period


def test_density_transfer_on_the_first_level(vector):
    transfer = density_transfer(vector.x, vector.smoothed[0], 2.05, vector.space, 2000.0, 1 / 8,
                                tail_window=100, workers=2)
    assert transfer.delta_hat > 0
    assert transfer.continuous.estimate >= transfer.delta_hat * transfer.discrete.estimate - 0.01
    assert transfer.holds
