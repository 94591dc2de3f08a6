#!/usr/bin/env python3
"""
Dynamical classification of translation semigroups on weighted spaces.

Every verdict carries its evidence (witness points, partial sums, tail
values) so reports can be audited.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .base import Certificate, Convergence, Verdict, Violation
from .errors import AdmissibilityError, ClassificationError
from .fhc import discrete_series_check
from .gridfn import GridFunction, SpaceSpec
from .weights import (DIVERGENCE_THRESHOLD, UNBOUNDED_THRESHOLD, IntegralVerdict, SeriesVerdict, Weight,
                      check_admissible, integral_test, local_bounds, log_weight, series_test)

logger = logging.getLogger("fhclab.classify")

LIMINF_TOL = 1e-8
LIMIT_FLOOR = 1.0
FAR_POINT = 1e12
SCAN_POINTS = 20001
SERIES_BATTERY: Tuple[Tuple[float, float], ...] = ((0.0, 1.0), (0.5, 1.0), (0.0, 2.0), (1.5, 3.0))


@dataclass
class PropertyVerdict:
    """A three-valued verdict with its evidence."""
    verdict: Verdict
    evidence: Dict[str, Any] = field(default_factory=dict)


@dataclass
class LemmaChain:
    """Integral test and the series battery; all decided verdicts must agree."""
    integral: IntegralVerdict
    series: List[SeriesVerdict]

    @property
    def coherent(self) -> bool:
        decided = {v.verdict for v in [self.integral, *self.series] if v.verdict != Convergence.INCONCLUSIVE}
        return len(decided) <= 1


@dataclass
class Classification:
    """Verdict record for one weight and space."""
    space: SpaceSpec
    horizon: float
    certificate: Certificate
    hypercyclic: PropertyVerdict
    chaotic: PropertyVerdict
    fhc_criterion: PropertyVerdict
    fhc_necessary: PropertyVerdict
    operator_criterion: PropertyVerdict
    lemma_chain: LemmaChain

    def rows(self) -> List[Tuple[str, Verdict]]:
        return [
            ("hypercyclic", self.hypercyclic.verdict),
            ("chaotic", self.chaotic.verdict),
            ("fhc_criterion", self.fhc_criterion.verdict),
            ("fhc_necessary", self.fhc_necessary.verdict),
            ("operator_criterion", self.operator_criterion.verdict),
        ]


@dataclass
class NecessaryScan:
    """sum_{k>i} rho(n_k - n_i) for every i of a finite return-time table."""
    sums: List[float]
    sup: float
    checkpoints: List[int]
    prefix_sups: List[float]
    eps: Optional[float] = None

    @property
    def below_eps(self) -> Optional[bool]:
        return None if self.eps is None else self.sup < self.eps

    @property
    def grows(self) -> bool:
        """True when the sup keeps growing with the table length."""
        if len(self.prefix_sups) < 2:
            return False
        half = self.prefix_sups[len(self.prefix_sups) // 2 - 1] if len(self.prefix_sups) > 2 else self.prefix_sups[0]
        return self.prefix_sups[-1] > 1.5 * half and self.prefix_sups[-1] > 1.0


@dataclass
class C0Scan:
    """Pairwise test rho(n_k - n_i) < eps, k > i."""
    eps: float
    passed: np.ndarray = field(repr=False)
    violations: List[Tuple[int, int, float]] = field(default_factory=list)

    @property
    def all_pass(self) -> bool:
        return not self.violations


def _tail_log(fn, s: float) -> float:
    with np.errstate(over="ignore", divide="ignore"):
        value = float(fn(np.array(s)))
    return math.log(value) if value > 0 else -math.inf


def _scan_log(w: Weight, lo: float, hi: float) -> Optional[Tuple[np.ndarray, np.ndarray]]:
    """log rho on [lo, hi] cut at the end of the domain; None if nothing is left."""
    hi = min(hi, w.profile.domain_end)
    if lo >= hi:
        return None
    s = np.linspace(lo, hi, SCAN_POINTS)
    return s, w.profile.log_value(s)


def _short_table(w: Weight, lo: float) -> PropertyVerdict:
    logger.warning(f"{w.kind}: weight known only up to {w.profile.domain_end:g}, scan starts at {lo:g}")
    return PropertyVerdict(Verdict.INCONCLUSIVE, {"domain_end": w.profile.domain_end})


def _hypercyclic(w: Weight, horizon: float, liminf_tol: float) -> PropertyVerdict:
    tail = w.profile.tail()
    if tail is not None:
        if tail.upper_nonincreasing and _tail_log(tail.upper, FAR_POINT) < math.log(liminf_tol):
            return PropertyVerdict(Verdict.HOLDS, {"tail_upper_at": FAR_POINT})
        lower_log = _tail_log(tail.lower, FAR_POINT)
        if lower_log >= math.log(liminf_tol):
            return PropertyVerdict(Verdict.FAILS, {"tail_lower_at": FAR_POINT, "liminf_lower": math.exp(lower_log)})
    scan = _scan_log(w, horizon / 2.0, horizon)
    if scan is None:
        return _short_table(w, horizon / 2.0)
    s, logs = scan
    i = int(np.argmin(logs))
    evidence = {"window": (float(s[0]), float(s[-1])), "witness": float(s[i]), "min_log_rho": float(logs[i])}
    if logs[i] < math.log(liminf_tol):
        return PropertyVerdict(Verdict.HOLDS, evidence)
    logger.warning(f"{w.kind}: liminf of rho undecided on [{s[0]:g}, {s[-1]:g}]")
    return PropertyVerdict(Verdict.INCONCLUSIVE, evidence)


def _limit_zero(w: Weight, horizon: float, liminf_tol: float, limit_floor: float,
                unbounded_threshold: float) -> PropertyVerdict:
    tail = w.profile.tail()
    if tail is not None:
        if tail.upper_nonincreasing and _tail_log(tail.upper, FAR_POINT) < math.log(liminf_tol):
            return PropertyVerdict(Verdict.HOLDS, {"tail_upper_at": FAR_POINT})
    scan = _scan_log(w, horizon / 2.0, horizon)
    if scan is None:
        unbounded = _bounded(w, horizon, unbounded_threshold)
        if unbounded.verdict == Verdict.FAILS:
            return PropertyVerdict(Verdict.FAILS, dict(unbounded.evidence, unbounded=True))
        return _short_table(w, horizon / 2.0)
    s, logs = scan
    i = int(np.argmax(logs))
    evidence = {"window": (float(s[0]), float(s[-1])), "witness": float(s[i]), "max_log_rho": float(logs[i])}
    if logs[i] >= math.log(limit_floor):
        return PropertyVerdict(Verdict.FAILS, evidence)
    # a locally bounded weight with rho -> 0 is bounded
    unbounded = _bounded(w, horizon, unbounded_threshold)
    if unbounded.verdict == Verdict.FAILS:
        return PropertyVerdict(Verdict.FAILS, dict(unbounded.evidence, unbounded=True))
    return PropertyVerdict(Verdict.INCONCLUSIVE, evidence)


def _bounded(w: Weight, horizon: float, unbounded_threshold: float) -> PropertyVerdict:
    scan = _scan_log(w, 0.0, horizon)
    if scan is None:
        return _short_table(w, 0.0)
    s, logs = scan
    i = int(np.argmax(logs))
    evidence = {"witness": float(s[i]), "max_log_rho": float(logs[i])}
    if logs[i] > math.log(unbounded_threshold):
        logger.info(f"{w.kind}: rho reaches e^{logs[i]:.6g} at s={s[i]:.6g}; unbounded")
        return PropertyVerdict(Verdict.FAILS, evidence)
    tail = w.profile.tail()
    if tail is not None and tail.upper_nonincreasing:
        start = min(tail.horizon, horizon)
        head = w.profile.log_value(np.linspace(0.0, tail.horizon, SCAN_POINTS)) if tail.horizon > 0 else np.zeros(0)
        bound = max(_tail_log(tail.upper, tail.horizon), float(head.max()) if head.size else -math.inf)
        if math.isfinite(bound):
            evidence.update({"tail_from": start, "log_bound": bound})
            return PropertyVerdict(Verdict.HOLDS, evidence)
    return PropertyVerdict(Verdict.INCONCLUSIVE, evidence)


def _operator_criterion(space: SpaceSpec, horizon: int, divergence_threshold: float) -> PropertyVerdict:
    w = space.weight
    if w.profile.tail() is None and math.isfinite(w.profile.domain_end):
        return _short_table(w, 0.0)
    # chi_[1,2] vanishes at 0, so the same test vector works on both spaces
    u = GridFunction.indicator(1.0, 2.0, 32)
    report = discrete_series_check(u, space, horizon, identity_limit=8,
                                   divergence_threshold=divergence_threshold, strict=False)
    evidence = {
        "forward_partial": report.forward_partial,
        "backward_partial": report.backward_partial,
        "backward_remainder": report.backward_remainder,
    }
    return PropertyVerdict(report.verdict.as_verdict(), evidence)


def lemma_chain(w: Weight, horizon: float, tol: float = 1e-9,
                divergence_threshold: float = DIVERGENCE_THRESHOLD) -> LemmaChain:
    """Integral test plus the series test over the (offset, stride) battery."""
    integral = integral_test(w, horizon, tol, divergence_threshold)
    series = [series_test(w, b, P, int(horizon), divergence_threshold) for b, P in SERIES_BATTERY]
    chain = LemmaChain(integral, series)
    if not chain.coherent:
        logger.warning(f"{w.kind}: integral and series verdicts disagree")
    return chain


def classify(space: SpaceSpec, horizon: float, liminf_tol: float = LIMINF_TOL,
             limit_floor: float = LIMIT_FLOOR, unbounded_threshold: float = UNBOUNDED_THRESHOLD,
             divergence_threshold: float = DIVERGENCE_THRESHOLD) -> Classification:
    """
    Decide the dynamical properties of the translation semigroup on ``space``.

    Raises:
        AdmissibilityError: the weight fails its admissibility check
        ClassificationError: chaotic holds while hypercyclic fails
    """
    w = space.weight
    found = check_admissible(w, min(float(horizon), 200.0), 1.0, 0.05)
    if isinstance(found, Violation):
        raise AdmissibilityError(f"weight {w.kind} is not admissible: {found.reason} "
                                 f"(tau={found.tau:g}, t={found.t:g})")

    chain = lemma_chain(w, horizon, divergence_threshold=divergence_threshold)
    integral = PropertyVerdict(chain.integral.verdict.as_verdict(),
                               {"partial": chain.integral.partial, "remainder": chain.integral.remainder,
                                "value": chain.integral.value})
    hypercyclic = _hypercyclic(w, horizon, liminf_tol)
    if space.is_lp:
        chaotic = integral
        fhc_criterion = chaotic
    else:
        chaotic = _limit_zero(w, horizon, liminf_tol, limit_floor, unbounded_threshold)
        # integrability is sufficient on C_0, not necessary
        fhc_criterion = integral if integral.verdict == Verdict.HOLDS else \
            PropertyVerdict(Verdict.INCONCLUSIVE, dict(integral.evidence, integral=integral.verdict))
    fhc_necessary = _bounded(w, horizon, unbounded_threshold)
    operator = _operator_criterion(space, int(horizon), divergence_threshold)

    if chaotic.verdict == Verdict.HOLDS and hypercyclic.verdict == Verdict.FAILS:
        raise ClassificationError(f"{w.kind} on {space.label()}: chaotic but not hypercyclic")
    if fhc_necessary.verdict == Verdict.FAILS and fhc_criterion.verdict == Verdict.HOLDS:
        raise ClassificationError(f"{w.kind} on {space.label()}: criterion holds for an unbounded weight")

    result = Classification(space, float(horizon), found, hypercyclic, chaotic, fhc_criterion,
                            fhc_necessary, operator, chain)
    logger.info(f"{w.kind} on {space.label()}: " +
                ", ".join(f"{name}={verdict.symbol}" for name, verdict in result.rows()))
    return result


def necessary_condition_scan(w: Weight, n: Sequence[int], eps: Optional[float] = None) -> NecessaryScan:
    """
    For each i, sum_{k>i} rho(n_k - n_i) over the table.

    ``prefix_sups`` holds the sup over i for the tables truncated at the
    ``checkpoints`` (powers of two), which exposes sums that keep growing.
    """
    seq = np.asarray(n, dtype=np.int64)
    if seq.size < 2 or np.any(np.diff(seq) <= 0):
        raise ValueError("the return-time sequence must be strictly increasing with at least two terms")
    m = seq.size
    checkpoints = sorted({min(2 ** j, m) for j in range(1, int(math.ceil(math.log2(m))) + 1)} | {m})
    prefix = np.full(len(checkpoints), -np.inf)
    sums = []
    for i in range(m - 1):
        with np.errstate(over="ignore"):
            terms = np.exp(w.profile.log_value((seq[i + 1:] - seq[i]).astype(float)))
        running = np.cumsum(terms)
        sums.append(float(running[-1]))
        for c, K in enumerate(checkpoints):
            if K - 1 > i:
                prefix[c] = max(prefix[c], running[K - 2 - i])
    prefix = np.where(np.isfinite(prefix), prefix, 0.0)
    return NecessaryScan(sums, max(sums), list(checkpoints), [float(v) for v in prefix], eps)


def c0_necessary_scan(w: Weight, n: Sequence[int], eps: float) -> C0Scan:
    """Pointwise test rho(n_k - n_i) < eps for all pairs k > i."""
    seq = np.asarray(n, dtype=np.int64)
    if np.any(np.diff(seq) <= 0):
        raise ValueError("the return-time sequence must be strictly increasing")
    diffs = seq[None, :] - seq[:, None]
    upper = diffs > 0
    logs = np.where(upper, w.profile.log_value(np.maximum(diffs, 0).astype(float)), -np.inf)
    passed = logs < math.log(eps)
    passed[~upper] = True
    violations = [(int(i), int(k), float(np.exp(min(logs[i, k], 700.0))))
                  for i, k in zip(*np.nonzero(~passed))]
    return C0Scan(eps, passed, violations)


def necessary_budget(w: Weight, eta: float, p: float = 1.0, sigma_max: float = 100.0) -> float:
    """
    B rho(1) eta^p / (A (1 - eta)^p), with (A, B) the local bounds for windows of length 1.

    Bounds sum_{k>i} rho(n_k - n_i) over return times within eta of the
    normalized indicator of [0, 1].
    """
    if not 0 < eta < 1:
        raise ValueError("eta must lie in (0, 1)")
    bounds = local_bounds(w, 1.0, sigma_max)
    return bounds.B * math.exp(log_weight(w, 1.0)) * eta ** p / (bounds.A * (1.0 - eta) ** p)
