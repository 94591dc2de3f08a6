import math

import numpy as np
import pytest

from src.core.base import Certificate, Convergence, Verdict
from src.core.classify import (c0_necessary_scan, classify, lemma_chain, necessary_budget,
                               necessary_condition_scan)
from src.core.errors import AdmissibilityError
from src.core.gridfn import SpaceSpec
from src.core.weights import Weight
from src.weights import ExponentialProfile
from src.weights.sinlog import peak_points


def verdicts(result):
    return dict(result.rows())


def test_exponential_on_l1():
    result = classify(SpaceSpec.lp(Weight.exponential(1.0)), 2000)
    rows = verdicts(result)
    assert rows["hypercyclic"] == Verdict.HOLDS
    assert rows["chaotic"] == Verdict.HOLDS
    assert rows["fhc_criterion"] == Verdict.HOLDS
    assert rows["fhc_necessary"] == Verdict.HOLDS
    assert rows["operator_criterion"] == Verdict.HOLDS
    assert result.lemma_chain.coherent
    assert result.certificate == Certificate(1.0, 1.0)


def test_rational_on_l1():
    rows = verdicts(classify(SpaceSpec.lp(Weight.rational()), 2000))
    assert rows["hypercyclic"] == Verdict.HOLDS
    assert rows["chaotic"] == Verdict.FAILS
    assert rows["fhc_criterion"] == Verdict.FAILS


def test_constant_is_not_hypercyclic():
    assert verdicts(classify(SpaceSpec.lp(Weight.constant(1.0)), 2000))["hypercyclic"] == Verdict.FAILS
    assert verdicts(classify(SpaceSpec.c0(Weight.constant(1.0)), 2000))["hypercyclic"] == Verdict.FAILS


def test_sinlog_is_hypercyclic_but_unbounded():
    result = classify(SpaceSpec.lp(Weight.sinlog()), 2000)
    rows = verdicts(result)
    assert rows["hypercyclic"] == Verdict.HOLDS
    assert rows["fhc_necessary"] == Verdict.FAILS
    assert rows["chaotic"] == Verdict.FAILS
    assert result.fhc_necessary.evidence["max_log_rho"] > math.log(1e12)
    assert result.lemma_chain.coherent


def test_c0_uses_the_limit_for_chaos():
    rows = verdicts(classify(SpaceSpec.c0(Weight.exponential(1.0)), 2000))
    assert rows["chaotic"] == Verdict.HOLDS
    assert rows["fhc_criterion"] == Verdict.HOLDS
    rows = verdicts(classify(SpaceSpec.c0(Weight.sinlog()), 2000))
    assert rows["chaotic"] == Verdict.FAILS


def test_inadmissible_weight_is_refused():
    broken = Weight(ExponentialProfile(2.0), Certificate(1.0, 1.0))
    with pytest.raises(AdmissibilityError):
        classify(SpaceSpec.lp(broken), 100)


def test_lemma_chain_for_exponential():
    chain = lemma_chain(Weight.exponential(1.0), 1000)
    assert chain.integral.value == pytest.approx(1.0, abs=1e-9)
    assert chain.series[0].value == pytest.approx(1 / (math.e - 1), abs=1e-9)
    assert all(s.verdict == Convergence.CONVERGES for s in chain.series)
    assert chain.coherent


def test_lemma_chain_for_divergent_weights():
    for w in (Weight.rational(), Weight.constant(1.0)):
        chain = lemma_chain(w, 1000)
        assert chain.integral.verdict == Convergence.DIVERGES
        assert all(s.verdict == Convergence.DIVERGES for s in chain.series)
        assert chain.coherent


def test_necessary_scan_on_exponential():
    scan = necessary_condition_scan(Weight.exponential(1.0), 24 * np.arange(1, 201))
    assert scan.sup < 1e-10
    assert not scan.grows


def test_necessary_scan_on_constant_grows():
    scan = necessary_condition_scan(Weight.constant(1.0), np.arange(1, 201))
    assert scan.sums[0] == pytest.approx(199.0)
    assert scan.grows


def test_necessary_scan_on_rational_squares_stays_finite():
    scan = necessary_condition_scan(Weight.rational(), np.arange(1, 101) ** 2, eps=1.0)
    assert scan.sup < 1.0
    assert scan.below_eps
    assert not scan.grows


def test_necessary_scan_rejects_unsorted():
    with pytest.raises(ValueError):
        necessary_condition_scan(Weight.exponential(1.0), [3, 2, 5])


def test_c0_pairwise_scan():
    assert len(c0_necessary_scan(Weight.constant(1.0), [1, 2, 3], 0.5).violations) == 3
    assert c0_necessary_scan(Weight.exponential(1.0), 24 * np.arange(1, 50), 0.5).all_pass
    peaks = c0_necessary_scan(Weight.sinlog(), peak_points(2), 0.5)
    assert not peaks.all_pass
    assert peaks.violations[0][2] > 1.0


def test_necessary_budget_for_exponential():
    assert necessary_budget(Weight.exponential(1.0), 0.5) == pytest.approx(math.e, rel=1e-9)
    with pytest.raises(ValueError):
        necessary_budget(Weight.exponential(1.0), 1.0)


@pytest.mark.parametrize("space", [SpaceSpec.lp, SpaceSpec.c0])
def test_table_without_tail_is_inconclusive(space):
    table = Weight.from_descriptor({"kind": "sampled", "step": 0.5, "values": [1.0, 0.8, 0.6, 0.5, 0.4]})
    result = classify(space(table), 2000)
    assert all(verdict == Verdict.INCONCLUSIVE for _, verdict in result.rows())
    assert result.hypercyclic.evidence["domain_end"] == 2.0
    assert result.operator_criterion.evidence["domain_end"] == 2.0


def test_c0_criterion_is_inconclusive_when_the_integral_diverges():
    for w in (Weight.rational(), Weight.constant(1.0)):
        result = classify(SpaceSpec.c0(w), 2000)
        assert result.fhc_criterion.verdict == Verdict.INCONCLUSIVE
        assert result.fhc_criterion.evidence["integral"] == Verdict.FAILS
    # on L^p the same divergence decides the criterion
    assert verdicts(classify(SpaceSpec.lp(Weight.rational()), 2000))["fhc_criterion"] == Verdict.FAILS
