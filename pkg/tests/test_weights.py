import logging
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src.core.base import Certificate, Convergence, Verdict, Violation
from src.core.errors import ConfigError, DensityError, WeightDomainError
from src.core.weights import (Weight, check_admissible, eval_weight, integral_test, local_bounds, log_weight,
                              series_test, syndetic_tests)
from src.weights import ExponentialProfile, SampledProfile
from src.weights.sinlog import peak_points, valley_points


def test_eval_closed_forms():
    assert eval_weight(Weight.exponential(1.0), 1.0) == pytest.approx(math.exp(-1))
    assert eval_weight(Weight.rational(), 3.0) == pytest.approx(0.25)
    assert eval_weight(Weight.constant(1.0), 17.5) == 1.0
    with pytest.raises(WeightDomainError):
        eval_weight(Weight.exponential(1.0), -1.0)


def test_sinlog_peaks_and_valleys():
    w = Weight.sinlog()
    assert peak_points(1)[0] == 111
    assert log_weight(w, 111.0) > 110.0
    valley = float(valley_points(2)[1])
    assert valley == 2575.0
    assert log_weight(w, valley) < -2574.0
    # phi(s) = s - 1 on [0, 1]
    assert log_weight(w, 0.0) == pytest.approx(1.0)


def test_sampled_weight_interpolates_and_refuses_beyond_table():
    w = Weight.from_descriptor({"kind": "sampled", "step": 0.5, "values": [1.0, 0.5, 0.25]})
    assert eval_weight(w, 0.25) == pytest.approx(0.75)
    assert w.profile.integral(0.0, 1.0) == pytest.approx(0.5 * 0.75 + 0.5 * 0.375)
    with pytest.raises(WeightDomainError):
        eval_weight(w, 2.0)


def test_sampled_weight_with_tail():
    w = Weight.from_descriptor({"kind": "sampled", "step": 1.0, "values": [1.0, 0.5],
                                "tail": {"kind": "exponential", "a": 1.0}})
    assert eval_weight(w, 3.0) == pytest.approx(math.exp(-3))
    assert integral_test(w, 10.0).verdict == Convergence.CONVERGES


def test_from_descriptor():
    assert Weight.from_descriptor("exponential:2").profile.a == 2.0
    assert Weight.from_descriptor("sinlog").certificate == Certificate(1.0, math.sqrt(2.0))
    declared = Weight.from_descriptor({"kind": "rational", "certificate": {"M": 2, "omega": 1}})
    assert declared.certificate == Certificate(2.0, 1.0)
    for bad in ["bogus", "exponential:x", "exponential:-1", {"kind": "sampled", "values": [1, 2]},
                {"kind": "rational", "certificate": {"M": 0.5, "omega": 1}},
                {"kind": "sampled", "step": 1.0, "values": [1.0, 0.5], "tail": {"kind": "sinlog"}}]:
        with pytest.raises(ConfigError):
            Weight.from_descriptor(bad)


def test_declared_certificates_verify():
    assert check_admissible(Weight.exponential(1.0), 50.0, 1.0, 0.05) == Certificate(1.0, 1.0)
    assert check_admissible(Weight.constant(1.0), 50.0, 1.0, 0.05) == Certificate(1.0, 0.0)
    assert isinstance(check_admissible(Weight.sinlog(), 200.0, 1.0, 0.05), Certificate)


def test_certificate_is_estimated_without_declaration():
    cert = check_admissible(Weight(ExponentialProfile(2.0)), 20.0, 1.0, 0.05)
    assert cert.omega == pytest.approx(2.0, abs=1e-9)
    assert cert.M == pytest.approx(1.0, abs=1e-9)
    rational = check_admissible(Weight(Weight.rational().profile), 100.0, 1.0, 0.05)
    assert rational.omega <= 1.0 + 1e-12


def test_violations_are_witnessed():
    too_small = Weight(ExponentialProfile(2.0), Certificate(1.0, 1.0))
    found = check_admissible(too_small, 10.0, 1.0, 0.05)
    assert isinstance(found, Violation)
    assert found.t == pytest.approx(1.0)

    cliff = Weight(SampledProfile(0.05, [1.0] + [1e-30] * 10, ExponentialProfile(1.0)))
    found = check_admissible(cliff, 0.2, 0.1, 0.05)
    assert isinstance(found, Violation)
    assert "exceeds" in found.reason


def test_local_bounds():
    exp = local_bounds(Weight.exponential(1.0), 1.0, 10.0)
    assert exp.A == pytest.approx(math.exp(-1), rel=1e-9)
    assert exp.B == pytest.approx(math.e, rel=1e-9)
    const = local_bounds(Weight.constant(1.0), 5.0, 20.0)
    assert (const.A, const.B) == (1.0, 1.0)
    rational = local_bounds(Weight.rational(), 1.0, 100.0)
    assert rational.A >= 0.5 - 1e-12
    assert rational.B <= 2.0 + 1e-12


def test_integral_test():
    exp = integral_test(Weight.exponential(1.0), 50.0)
    assert exp.verdict == Convergence.CONVERGES
    assert exp.value == pytest.approx(1.0, abs=1e-9)
    assert integral_test(Weight.rational(), 1000.0).verdict == Convergence.DIVERGES
    assert integral_test(Weight.constant(1.0), 1000.0).verdict == Convergence.DIVERGES
    # the peak near s = 111 alone exceeds the divergence threshold
    assert integral_test(Weight.sinlog(), 2000.0).verdict == Convergence.DIVERGES


def test_integral_without_tail_is_inconclusive():
    w = Weight.from_descriptor({"kind": "sampled", "step": 1.0, "values": [1.0, 0.5, 0.25]})
    result = integral_test(w, 10.0)
    assert result.verdict == Convergence.INCONCLUSIVE
    assert result.partial == pytest.approx(0.75 + 0.375)


def test_series_test():
    exp = series_test(Weight.exponential(1.0), 0.0, 1.0, 1000)
    assert exp.verdict == Convergence.CONVERGES
    assert exp.value == pytest.approx(1.0 / (math.e - 1.0), abs=1e-9)
    assert series_test(Weight.rational(), 0.0, 1.0, 1000).verdict == Convergence.DIVERGES
    assert series_test(Weight.constant(1.0), 0.0, 1.0, 1000).verdict == Convergence.DIVERGES
    with pytest.raises(ValueError):
        series_test(Weight.exponential(1.0), 0.0, 0.0)


def test_syndetic_tests():
    evens = syndetic_tests(Weight.exponential(1.0), range(2, 1001, 2), 1000, declared_bound=2)
    assert evens.series == Convergence.CONVERGES
    assert evens.bounded == Verdict.HOLDS
    assert evens.global_bound < math.inf

    thirds = syndetic_tests(Weight.constant(1.0), range(3, 1001, 3), 1000, declared_bound=3)
    assert thirds.series == Convergence.DIVERGES
    assert thirds.sup_value == 1.0

    peaks = syndetic_tests(Weight.sinlog(), peak_points(2), 60000)
    assert peaks.bounded == Verdict.FAILS

    with pytest.raises(DensityError):
        syndetic_tests(Weight.exponential(1.0), [10, 50], 100, declared_bound=5)


def test_cell_masses_are_cached_and_read_only():
    profile = Weight.exponential(1.0).profile
    masses = profile.cell_masses(32, 64)
    assert masses is profile.cell_masses(32, 64)
    assert not masses.flags.writeable
    assert float(np.sum(masses)) == pytest.approx(1 - math.exp(-2), rel=1e-12)


CERTIFIED = [Weight.exponential(1.0), Weight.exponential(0.5), Weight.rational(), Weight.constant(2.0),
             Weight.sinlog()]


def test_unbounded_weight_is_not_bounded_on_a_syndetic_set():
    report = syndetic_tests(Weight.sinlog(), range(0, 1001), 1000, declared_bound=1)
    assert report.bounded == Verdict.FAILS
    assert report.series == Convergence.DIVERGES
    assert report.global_bound is None


def test_finite_prefix_alone_does_not_prove_boundedness():
    # sup over D up to 20 is finite, but nothing bounds sinlog past it
    report = syndetic_tests(Weight.sinlog(), range(0, 21), 20, declared_bound=1)
    assert report.bounded == Verdict.INCONCLUSIVE
    assert report.global_bound is None
    table = Weight.from_descriptor({"kind": "sampled", "step": 1.0, "values": [1.0, 0.5, 0.25, 0.2]})
    assert syndetic_tests(table, range(0, 4), 3, declared_bound=1).bounded == Verdict.INCONCLUSIVE


def test_rational_weight_is_bounded_on_a_syndetic_set():
    report = syndetic_tests(Weight.rational(), range(5, 501, 5), 500, declared_bound=5)
    assert report.bounded == Verdict.HOLDS
    assert report.global_bound >= 1.0


@pytest.mark.parametrize("w", CERTIFIED, ids=lambda w: w.kind)
@given(step=st.sampled_from([0.013, 0.02, 0.037, 0.05, 0.125]),
       tau=st.floats(min_value=0.0, max_value=100.0), t=st.floats(min_value=0.0, max_value=1.0))
@settings(max_examples=50, deadline=None)
def test_declared_certificates_hold_off_the_grid(w, step, tau, t):
    cert = check_admissible(w, 100.0, 1.0, step)
    assert cert == w.certificate
    drop = log_weight(w, tau) - log_weight(w, tau + t)
    assert drop <= math.log(cert.M) + cert.omega * t + 1e-9 * max(1.0, tau)


@given(a=st.floats(min_value=0.1, max_value=5.0), tau=st.floats(min_value=0.0, max_value=20.0),
       t=st.floats(min_value=0.0, max_value=1.0))
@settings(max_examples=100, deadline=None)
def test_estimated_certificate_holds_off_the_grid(a, tau, t):
    w = Weight(ExponentialProfile(a))
    cert = check_admissible(w, 20.0, 1.0, 0.05)
    drop = log_weight(w, tau) - log_weight(w, tau + t)
    assert drop <= math.log(cert.M) + cert.omega * t + 1e-9 * max(1.0, tau)


@pytest.mark.parametrize("w", [Weight.exponential(1.0), Weight.rational(), Weight.constant(2.0),
                               Weight.sinlog()], ids=lambda w: w.kind)
def test_local_bounds_hold_on_a_finer_grid(w):
    bounds = local_bounds(w, 1.0, 4.0, grid_step=0.01)
    logs = w.profile.log_value(np.arange(5001) * 0.001)
    sigma = np.arange(4001)[:, None]
    inside = logs[sigma + np.arange(1001)[None, :]]
    assert np.min(inside - logs[sigma]) >= math.log(bounds.A) - 1e-9
    assert np.max(inside - logs[sigma + 1000]) <= math.log(bounds.B) + 1e-9


def test_describe_carries_the_certificate():
    assert Weight.exponential(2.0).describe()["certificate"] == {"M": 1.0, "omega": 2.0}
    assert "certificate" not in Weight(ExponentialProfile(2.0)).describe()


def test_weight_warnings_go_to_the_profile_logger(caplog):
    w = Weight.from_descriptor({"kind": "sampled", "step": 1.0, "values": [1.0, 0.5, 0.25]})
    with caplog.at_level(logging.WARNING, logger="fhclab.weights.sampled"):
        integral_test(w, 10.0)
    messages = [r.getMessage() for r in caplog.records if r.name == "fhclab.weights.sampled"]
    assert any(m.startswith("[sampled] no tail") for m in messages)
