#!/usr/bin/env python3
"""
Weight functions on [0, inf): evaluation, admissibility certificates and the
convergence / boundedness tests used to classify translation semigroups.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .base import Certificate, Convergence, LocalBounds, Verdict, Violation, WeightProfile
from .errors import AdmissibilityError, ConfigError, DensityError, GridAlignmentError, WeightDomainError
from ..weights import (ConstantProfile, ExponentialProfile, RationalProfile, SinLogProfile,
                       profile_from_descriptor)

logger = logging.getLogger("fhclab.weights")

DIVERGENCE_THRESHOLD = 1e12
UNBOUNDED_THRESHOLD = 1e12
MAX_OMEGA = 50.0


@dataclass(frozen=True)
class Weight:
    """A positive weight rho on [0, inf) with an optional admissibility certificate."""
    profile: WeightProfile
    certificate: Optional[Certificate] = None

    @property
    def kind(self) -> str:
        return self.profile.kind

    @classmethod
    def exponential(cls, a: float = 1.0) -> "Weight":
        profile = ExponentialProfile(a)
        return cls(profile, profile.analytic_certificate())

    @classmethod
    def rational(cls) -> "Weight":
        profile = RationalProfile()
        return cls(profile, profile.analytic_certificate())

    @classmethod
    def constant(cls, c: float = 1.0) -> "Weight":
        profile = ConstantProfile(c)
        return cls(profile, profile.analytic_certificate())

    @classmethod
    def sinlog(cls) -> "Weight":
        profile = SinLogProfile()
        return cls(profile, profile.analytic_certificate())

    @classmethod
    def from_descriptor(cls, descriptor: Union[str, Mapping[str, Any]]) -> "Weight":
        """
        Build a weight from a descriptor mapping or a shorthand string.

        Shorthands: ``exponential:1``, ``rational``, ``constant:2``, ``sinlog``.
        Closed forms get their analytic certificate unless ``certificate`` is given.
        """
        if isinstance(descriptor, str):
            kind, _, arg = descriptor.partition(":")
            descriptor = {"kind": kind.strip()}
            if arg:
                try:
                    descriptor["params"] = [float(arg)]
                except ValueError:
                    raise ConfigError(f"bad weight parameter {arg!r}", field="weight")
        profile = profile_from_descriptor(descriptor)
        cert_data = descriptor.get("certificate")
        if cert_data is not None:
            try:
                certificate = Certificate(M=float(cert_data["M"]), omega=float(cert_data["omega"]))
            except (KeyError, TypeError, ValueError):
                raise ConfigError("certificate needs numeric 'M' and 'omega'", field="weight.certificate")
            if certificate.M < 1:
                raise ConfigError("certificate M must be >= 1", field="weight.certificate")
        else:
            certificate = profile.analytic_certificate()
        return cls(profile, certificate)

    def describe(self) -> Dict[str, Any]:
        descriptor = self.profile.describe()
        if self.certificate is not None:
            descriptor["certificate"] = {"M": self.certificate.M, "omega": self.certificate.omega}
        return descriptor


@dataclass
class IntegralVerdict:
    """Outcome of the integrability test for rho."""
    verdict: Convergence
    partial: float
    horizon: float
    remainder: Tuple[float, float] = (math.nan, math.nan)
    value: Optional[float] = None
    error: Optional[float] = None


@dataclass
class SeriesVerdict:
    """Outcome of the test for sum_k rho(b + kP)."""
    verdict: Convergence
    offset: float
    stride: float
    terms: int
    partial: float
    remainder: Tuple[float, float] = (math.nan, math.nan)
    value: Optional[float] = None


@dataclass
class SyndeticReport:
    """Outcome of the tests of rho restricted to an integer set D."""
    series: Convergence
    partial: float
    bounded: Verdict
    sup_value: float
    sup_log: float
    max_gap: Optional[int] = None
    global_bound: Optional[float] = None
    log_values: List[float] = field(default_factory=list)


def _as_array(t) -> np.ndarray:
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0) or np.any(~np.isfinite(arr)):
        raise WeightDomainError("weights are evaluated at finite nonnegative arguments only")
    return arr


def eval_weight(w: Weight, t: float) -> float:
    """
    Evaluate rho(t).

    Raises:
        WeightDomainError: t negative, or beyond a sampled table without tail
    """
    return float(w.profile.value(_as_array(t)))


def log_weight(w: Weight, t: float) -> float:
    """Evaluate log rho(t); finite even where rho itself overflows."""
    return float(w.profile.log_value(_as_array(t)))


def _log_grid(w: Weight, count: int, step: float) -> np.ndarray:
    s = np.arange(count) * step
    log_values = w.profile.log_value(s)
    if np.any(~np.isfinite(log_values)):
        bad = float(s[np.argmax(~np.isfinite(log_values))])
        raise AdmissibilityError(f"non-positive weight sample encountered at s={bad:g}")
    return log_values


def _grid_count(length: float, step: float, what: str) -> int:
    count = length / step
    if abs(count - round(count)) > 1e-9 * max(1.0, count):
        raise GridAlignmentError(f"{what}={length:g} is not a multiple of the grid step {step:g}")
    return int(round(count))


def check_admissible(w: Weight, tau_max: float, t_max: float, grid_step: float,
                     max_omega: float = MAX_OMEGA) -> Union[Certificate, Violation]:
    """
    Certify rho(tau) <= M e^{omega t} rho(tau + t) on a grid.

    With a declared certificate, the inequality is checked at every grid pair
    (tau, t), tau <= tau_max, 0 < t <= t_max.  Otherwise M = 1 is fixed,
    omega is the sup of the log-ratio quotient (clipped at 0), and M is
    inflated if residual violations remain.

    Returns:
        Certificate on success, Violation with the witnessing pair on failure
    """
    if min(tau_max, t_max, grid_step) <= 0:
        raise ValueError("tau_max, t_max and grid_step must be positive")
    n_tau = int(math.floor(tau_max / grid_step + 1e-9)) + 1
    n_t = max(1, int(math.floor(t_max / grid_step + 1e-9)))
    if w.profile.domain_end < math.inf:
        n_tau = min(n_tau, int(w.profile.domain_end / grid_step) - n_t + 1)
        if n_tau < 1:
            raise AdmissibilityError("sampled table too short for the requested scan")

    log_values = _log_grid(w, n_tau + n_t, grid_step)
    i = np.arange(n_tau)[:, None]
    j = np.arange(1, n_t + 1)[None, :]
    t = j * grid_step
    drop = log_values[i] - log_values[i + j]

    if w.certificate is not None:
        cert = w.certificate
        excess = drop - (math.log(cert.M) + cert.omega * t)
        worst = np.unravel_index(np.argmax(excess), excess.shape)
        if excess[worst] > 1e-12 * max(1.0, abs(drop[worst])):
            tau_w, t_w = float(worst[0] * grid_step), float((worst[1] + 1) * grid_step)
            w.profile.log_warning(f"declared certificate {cert} violated at tau={tau_w:g}, t={t_w:g}")
            return Violation(tau=tau_w, t=t_w, reason="declared certificate violated")
        return cert

    quotient = drop / t
    worst = np.unravel_index(np.argmax(quotient), quotient.shape)
    omega = max(0.0, float(quotient[worst]))
    if omega > max_omega:
        tau_w, t_w = float(worst[0] * grid_step), float((worst[1] + 1) * grid_step)
        w.profile.log_warning(f"estimated omega {omega:g} exceeds {max_omega:g} at tau={tau_w:g}, t={t_w:g}")
        return Violation(tau=tau_w, t=t_w, reason=f"growth rate {omega:g} exceeds {max_omega:g}")
    residual = float(np.max(drop - omega * t))
    M = math.exp(max(0.0, residual))
    logger.debug(f"Certificate for {w.kind}: M={M:g}, omega={omega:g}")
    return Certificate(M=M, omega=omega)


def _require_certificate(w: Weight, horizon: float, grid_step: float) -> Certificate:
    if w.certificate is not None:
        return w.certificate
    found = check_admissible(w, horizon, 1.0, grid_step)
    if isinstance(found, Violation):
        w.profile.log_error(f"no certificate up to tau={horizon:g}: {found.reason}")
        raise AdmissibilityError(f"weight {w.kind} is not admissible: {found.reason} "
                                 f"(tau={found.tau:g}, t={found.t:g})")
    return found


def local_bounds(w: Weight, l: float, sigma_max: float, grid_step: float = 0.01) -> LocalBounds:
    """
    Constants A, B with A rho(sigma) <= rho(t) <= B rho(sigma + l), t in [sigma, sigma + l].

    Certificate constants are A = 1/(M e^{omega+ l}), B = M e^{omega+ l}; a grid
    scan over sigma in [0, sigma_max] tightens them.  Scan values of
    non-monotone weights are widened by (M e^{|omega| h})^2 to cover
    off-grid points.
    """
    if l <= 0:
        raise ValueError("window length must be positive")
    cert = _require_certificate(w, sigma_max, grid_step)
    growth = cert.M * math.exp(max(cert.omega, 0.0) * l)
    A_cert, B_cert = 1.0 / growth, growth

    n_window = _grid_count(l, grid_step, "l")
    n_sigma = int(math.floor(sigma_max / grid_step)) + 1
    if w.profile.domain_end < math.inf:
        n_sigma = min(n_sigma, int(w.profile.domain_end / grid_step) - n_window + 1)
    log_values = _log_grid(w, n_sigma + n_window, grid_step)
    sigma = np.arange(n_sigma)[:, None]
    offset = np.arange(n_window + 1)[None, :]
    inside = log_values[sigma + offset]
    low = float(np.min(inside - log_values[sigma]))
    high = float(np.max(inside - log_values[sigma + n_window]))
    if not w.profile.monotone:
        widen = 2.0 * (math.log(cert.M) + abs(cert.omega) * grid_step)
        low -= widen
        high += widen
    A = max(A_cert, math.exp(low))
    B = min(B_cert, math.exp(high))
    return LocalBounds(l=l, A=A, B=B)


def integral_test(w: Weight, horizon: float, tol: float = 1e-9,
                  divergence_threshold: float = DIVERGENCE_THRESHOLD) -> IntegralVerdict:
    """
    Decide whether the integral of rho over [0, inf) is finite.

    The partial integral over [0, horizon] is combined with the analytic tail
    bounds.  Without a tail the verdict is inconclusive unless the partial
    integral already exceeds ``divergence_threshold``.
    """
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    profile = w.profile
    tail = profile.tail()
    if tail is not None:
        horizon = max(horizon, tail.horizon)
    else:
        horizon = min(horizon, profile.domain_end)
    partial = profile.integral(0.0, horizon)
    result = IntegralVerdict(Convergence.INCONCLUSIVE, partial, horizon)

    if partial > divergence_threshold:
        result.verdict = Convergence.DIVERGES
        return result
    if tail is None:
        profile.log_warning("no tail; integral verdict inconclusive")
        return result

    low, high = tail.lower_integral(horizon), tail.upper_integral(horizon)
    result.remainder = (low, high)
    if math.isfinite(high):
        result.verdict = Convergence.CONVERGES
        result.value = partial + 0.5 * (low + high)
        result.error = 0.5 * (high - low)
        if result.error > tol:
            logger.warning(f"Integral remainder spread {result.error:g} exceeds tol {tol:g}")
    elif math.isinf(low):
        result.verdict = Convergence.DIVERGES
    return result


def series_test(w: Weight, offset: float = 0.0, stride: float = 1.0, horizon: int = 1000,
                divergence_threshold: float = DIVERGENCE_THRESHOLD) -> SeriesVerdict:
    """
    Decide whether sum_{k>=1} rho(b + kP) converges.

    Terms with b + kP <= horizon are summed; the remainder is bracketed by
    integral comparison with the analytic tail bounds.
    """
    if stride <= 0:
        raise ValueError("stride must be positive")
    profile = w.profile
    limit = min(float(horizon), profile.domain_end)
    count = max(0, int(math.floor((limit - offset) / stride + 1e-12)))
    points = offset + stride * np.arange(1, count + 1)
    terms = profile.value(points) if count else np.zeros(0)
    partial = math.fsum(terms)
    result = SeriesVerdict(Convergence.INCONCLUSIVE, offset, stride, count, partial)

    if partial > divergence_threshold:
        result.verdict = Convergence.DIVERGES
        return result
    tail = profile.tail()
    start = offset + stride * (count + 1)
    if tail is None or start < tail.horizon:
        profile.log_warning(f"no usable tail past {start:g}; series verdict inconclusive")
        return result

    low = tail.lower_integral(start) / stride
    high = math.inf
    if tail.upper_nonincreasing:
        high = float(tail.upper(np.array(start))) + tail.upper_integral(start) / stride
    result.remainder = (low, high)
    if math.isfinite(high):
        result.verdict = Convergence.CONVERGES
        result.value = partial + 0.5 * (low + high)
    elif math.isinf(low):
        result.verdict = Convergence.DIVERGES
    return result


def syndetic_tests(w: Weight, D: Sequence[int], horizon: int,
                   declared_bound: Optional[int] = None,
                   unbounded_threshold: float = UNBOUNDED_THRESHOLD) -> SyndeticReport:
    """
    Test rho on an integer set D: summability and boundedness.

    With a declared gap bound M, D must meet every window of length M; the
    series verdict then equals the verdict for sum rho(k) and a finite sup K
    on D yields the global bound K B_M / A_M, provided a nonincreasing tail
    bound covers what lies past the horizon.  Without a bound only evidence
    is reported: unbounded growth when log rho increases along D past
    ``unbounded_threshold``.
    """
    from .density import gap_analysis

    points = np.asarray(sorted(int(d) for d in D if 0 <= int(d) <= horizon), dtype=np.int64)
    if points.size == 0:
        raise DensityError("set D has no elements within the horizon")
    log_values = w.profile.log_value(points.astype(float))
    sup_log = float(np.max(log_values))
    with np.errstate(over="ignore"):
        values = np.exp(log_values)
    partial = math.fsum(values)
    report = SyndeticReport(Convergence.INCONCLUSIVE, partial, Verdict.INCONCLUSIVE,
                            sup_value=math.exp(sup_log) if sup_log < 709 else math.inf,
                            sup_log=sup_log, log_values=[float(v) for v in log_values])

    if declared_bound is not None:
        gaps = gap_analysis(points, declared_bound)
        report.max_gap = gaps.max_gap
        if not gaps.syndetic:
            raise DensityError(f"D has a gap of {gaps.max_gap} exceeding its declared bound {declared_bound}")
        report.series = series_test(w, 0.0, 1.0, horizon).verdict
        tail = w.profile.tail()
        tail_sup = math.inf
        if tail is not None and tail.upper_nonincreasing:
            tail_sup = float(tail.upper(np.array(tail.horizon, dtype=float)))
        if sup_log > math.log(unbounded_threshold):
            report.bounded = Verdict.FAILS
        elif math.isfinite(tail_sup):
            bounds = local_bounds(w, float(declared_bound), float(min(horizon, 200)), grid_step=0.1)
            report.global_bound = max(report.sup_value * bounds.B / bounds.A, tail_sup)
            report.bounded = Verdict.HOLDS
        else:
            w.profile.log_warning(f"sup on D up to {horizon} is finite but no monotone tail bound "
                                  "covers the rest; boundedness inconclusive")
    else:
        if partial > DIVERGENCE_THRESHOLD:
            report.series = Convergence.DIVERGES
        elif series_test(w, 0.0, 1.0, horizon).verdict == Convergence.CONVERGES:
            report.series = Convergence.CONVERGES
        rising = log_values.size > 1 and bool(np.all(np.diff(log_values) > 0))
        if rising and sup_log > math.log(unbounded_threshold):
            report.bounded = Verdict.FAILS

    if report.bounded == Verdict.FAILS:
        w.profile.log_info(f"rho grows along D (log rho up to {sup_log:.6g})")
    return report
