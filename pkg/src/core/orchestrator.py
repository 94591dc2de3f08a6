#!/usr/bin/env python3
"""
Experiment orchestrator.

Coordinates the classify / construct / orbit / periodic experiments and
turns their outcomes (or failures) into reports and statuses.
"""

import logging
import threading
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Tuple

import numpy as np

from .base import ExperimentStatus, Verdict
from .classify import c0_necessary_scan, classify, necessary_budget, necessary_condition_scan
from .config import ConfigManager, parse_time
from .errors import AdmissibilityError, ConfigError, HypothesisViolation, LabError
from .fhc import FHCVector, build_periodic_point, build_vector, density_transfer, orbit_hit_density, verify_returns
from ..utils.report import Report, config_hash, write_yaml

RUNTIME_KEYS = ("log_level", "log_file", "out")
NECESSARY_STRIDE = 24
NECESSARY_TERMS = 200


@dataclass
class ExperimentResult:
    """Result of one experiment run."""
    experiment: str
    status: ExperimentStatus
    report: Report
    message: Optional[str] = None
    payload: Any = None
    duration: float = 0.0

    @property
    def exit_code(self) -> int:
        return self.status.exit_code


class Laboratory:
    """
    Main orchestrator for experiments.

    Builds weights, spaces and targets from the configuration and runs
    experiments against them.
    """

    EXPERIMENTS = ("classify", "construct", "orbit", "periodic")

    def __init__(self, config_manager: ConfigManager):
        """
        Initialize the laboratory.

        Args:
            config_manager: Configuration manager instance
        """
        self.config_manager = config_manager
        self.config = config_manager.config
        self.logger = logging.getLogger("fhclab.orchestrator")

        self._lock = threading.Lock()
        self._vector: Optional[FHCVector] = None
        self.handlers: Dict[str, Callable[[Report], Tuple[ExperimentStatus, Any]]] = {
            "classify": self._classify,
            "construct": self._construct,
            "orbit": self._orbit,
            "periodic": self._periodic,
        }

    def config_hash(self) -> str:
        data = {k: v for k, v in asdict(self.config).items() if k not in RUNTIME_KEYS}
        return config_hash(data)

    def header(self) -> Dict[str, Any]:
        """Header fields shared by every report."""
        c = self.config
        header: Dict[str, Any] = {
            "config_hash": self.config_hash(),
            "weight": c.weight if isinstance(c.weight, str) else c.weight.get("kind"),
            "space": c.space,
            "p": c.p if c.space == "lp" else None,
            "grid_step": c.grid_step,
            "horizon": c.horizon,
        }
        for key, value in asdict(c.tolerances).items():
            header[f"tolerance.{key}"] = value
        return header

    def run(self, experiment: str, out: Optional[Path] = None) -> ExperimentResult:
        """
        Run one experiment.

        Args:
            experiment: Name of the experiment
            out: Report path, or None to keep the report in memory

        Returns:
            ExperimentResult; failures are mapped to a status, never raised
        """
        report = Report(experiment)
        start = time.perf_counter()
        message, payload = None, None
        try:
            if experiment not in self.handlers:
                raise ConfigError(f"unknown experiment {experiment!r}; expected one of {self.EXPERIMENTS}")
            report.header.update(self.header())
            self.logger.info(f"Running {experiment}")
            status, payload = self.handlers[experiment](report)
        except ConfigError as e:
            status, message = ExperimentStatus.CONFIG_ERROR, str(e)
        except (HypothesisViolation, AdmissibilityError) as e:
            status, message = ExperimentStatus.HYPOTHESIS_VIOLATION, str(e)
        except LabError as e:
            status, message = ExperimentStatus.FAILED, str(e)

        if message:
            self.logger.error(f"{experiment} failed ({status.value}): {message}")
            report.set_summary(error=message)
        report.set_summary(status=status)
        if out is not None:
            report.write(out)
        result = ExperimentResult(experiment, status, report, message, payload, time.perf_counter() - start)
        self.logger.info(f"Completed {experiment}: {status.value} in {result.duration:.2f}s")
        return result

    # ------------------------------------------------------------------
    # Experiments
    # ------------------------------------------------------------------

    def vector(self) -> FHCVector:
        """The configured vector, built once and shared by construct and orbit."""
        with self._lock:
            if self._vector is None:
                c = self.config
                t = c.tolerances
                self._vector = build_vector(c.build_targets(), c.build_space(), int(c.horizon),
                                            t.slack_constant, t.pettis_window, t.quadrature_nodes)
            return self._vector

    def _classify(self, report: Report) -> Tuple[ExperimentStatus, Any]:
        c = self.config
        t = c.tolerances
        space = c.build_space()
        result = classify(space, float(c.horizon), t.liminf_tol, t.limit_floor,
                          t.unbounded_threshold, t.divergence_threshold)

        report.add("admissible", M=result.certificate.M, omega=result.certificate.omega)
        for name, verdict in result.rows():
            evidence = getattr(result, name).evidence
            report.add("verdict", property=name, verdict=verdict,
                       **{k: v for k, v in sorted(evidence.items()) if not isinstance(v, dict)})
        chain = result.lemma_chain
        report.add("lemma", test="integral", verdict=chain.integral.verdict, partial=chain.integral.partial,
                   value=chain.integral.value)
        for s in chain.series:
            report.add("lemma", test="series", offset=s.offset, stride=s.stride, verdict=s.verdict,
                       terms=s.terms, partial=s.partial, value=s.value)

        w = space.weight
        sequence = NECESSARY_STRIDE * np.arange(1, NECESSARY_TERMS + 1)
        # differences n_k - n_i must stay inside the domain of rho
        sequence = sequence[sequence - sequence[0] <= w.profile.domain_end]
        if sequence.size < 2:
            report.add("necessary", stride=NECESSARY_STRIDE, terms=int(sequence.size),
                       domain_end=w.profile.domain_end, skipped=True)
        elif space.is_lp:
            scan = necessary_condition_scan(w, sequence)
            report.add("necessary", stride=NECESSARY_STRIDE, terms=int(sequence.size), sup=scan.sup, grows=scan.grows)
            if result.fhc_necessary.verdict == Verdict.HOLDS:
                report.add("necessary_budget", eta=0.5, budget=necessary_budget(w, 0.5, space.p))
        else:
            c0 = c0_necessary_scan(w, sequence, 0.5)
            report.add("necessary", stride=NECESSARY_STRIDE, terms=int(sequence.size), eps=0.5,
                       violations=len(c0.violations))

        report.set_summary(
            hypercyclic=result.hypercyclic.verdict,
            chaotic=result.chaotic.verdict,
            fhc_criterion=result.fhc_criterion.verdict,
            fhc_necessary=result.fhc_necessary.verdict,
            operator_criterion=result.operator_criterion.verdict,
            lemma_coherent=chain.coherent,
        )
        return ExperimentStatus.PASSED, result

    def _construct(self, report: Report) -> Tuple[ExperimentStatus, Any]:
        v = self.vector()
        levels = verify_returns(v, workers=self.config.tolerances.workers)
        for lv in levels:
            report.add("level", l=lv.level, N=v.thresholds[lv.level - 1], nu=lv.nu, period=lv.period,
                       offset=lv.offset, checked=lv.checked, max_error=lv.max_error, worst_n=lv.worst_time,
                       budget=lv.budget, slack=lv.slack, passed=lv.passed,
                       decomposition_defect=lv.decomposition_defect, density=v.family.density)
        if self.config.out:
            write_yaml(v.to_dict(), Path(self.config.out).with_suffix(".vector.yaml"))

        passed = all(lv.passed for lv in levels)
        report.set_summary(levels=len(levels), period=v.family.period, block_norm_sum=v.block_norm_sum,
                           truncation_bound=v.truncation_bound, all_budgets_met=passed)
        return (ExperimentStatus.PASSED if passed else ExperimentStatus.BUDGET_VIOLATION), (v, levels)

    def _orbit(self, report: Report) -> Tuple[ExperimentStatus, Any]:
        c = self.config
        v = self.vector()
        level = c.orbit.level
        if level > v.family.levels:
            raise ConfigError(f"orbit level {level} exceeds the {v.family.levels} built levels", field="orbit.level")
        u = v.smoothed[level - 1]
        budget = 4.0 / 2 ** level
        eps = float(c.eps) if c.eps is not None else budget + c.orbit.margin
        step = parse_time(c.step, "step")
        N = float(c.horizon)
        t = c.tolerances

        scan = orbit_hit_density(v.x, u, eps, v.space, N, step, t.tail_window, t.workers)
        window = 100.0
        for a in np.arange(0.0, N, window):
            b = min(a + window, N)
            measure = sum(max(0.0, min(hi, b) - max(lo, a)) for lo, hi in scan.hits.intervals)
            integer = sum(1 for n in scan.integer_hits.points if a <= n < b)
            report.add("window", start=a, end=b, hit_measure=measure, integer_hits=integer)
        transfer = density_transfer(v.x, u, eps, v.space, N, step, t.tail_window, t.workers)
        report.add("transfer", delta_hat=transfer.delta_hat, growth=transfer.growth,
                   discrete_radius=transfer.discrete_radius, continuous=transfer.continuous.estimate,
                   discrete=transfer.discrete.estimate, lower_bound=transfer.lower_bound, holds=transfer.holds)

        floor = 0.8 * v.family.density
        guaranteed = eps >= budget
        dense_enough = scan.discrete.estimate >= floor or not guaranteed
        report.set_summary(level=level, eps=eps, step=step, period=v.family.period,
                           continuous_density=scan.continuous.estimate, discrete_density=scan.discrete.estimate,
                           min_distance=scan.min_distance, density_floor=floor if guaranteed else None,
                           transfer_holds=transfer.holds)
        ok = dense_enough and transfer.holds
        return (ExperimentStatus.PASSED if ok else ExperimentStatus.BUDGET_VIOLATION), (scan, transfer)

    def _periodic(self, report: Report) -> Tuple[ExperimentStatus, Any]:
        c = self.config
        t = c.tolerances
        space = c.build_space()
        targets = c.build_targets()
        y = targets[min(c.orbit.level, len(targets)) - 1]
        delta = parse_time(c.periodic.delta, "periodic.delta")
        period, K = int(c.periodic.period), int(c.periodic.truncation)

        points = [build_periodic_point(y, period, delta, k, space, t.pettis_window, t.quadrature_nodes)
                  for k in range(1, K + 1)]
        for pp in points:
            report.add("truncation", K=pp.truncation, periodic_defect=pp.periodic_defect,
                       defect_bound=pp.defect_bound, tail_bound=pp.tail_bound)
        final = points[-1] if points else build_periodic_point(y, period, delta, 0, space,
                                                               t.pettis_window, t.quadrature_nodes)
        # cell averaging costs at most the growth over one cell
        cell_growth = space.growth_bound(1.0 / y.resolution)
        within = all(pp.periodic_defect <= pp.defect_bound * cell_growth + 1e-12 for pp in points)
        report.set_summary(period=period, delta=delta, truncation=K, periodic_defect=final.periodic_defect,
                           approximation_defect=final.approximation_defect,
                           smoothing_defect=final.smoothing_defect, defects_within_bounds=within)
        if self.config.out:
            write_yaml(final.z.to_dict(), Path(self.config.out).with_suffix(".periodic.yaml"))
        return (ExperimentStatus.PASSED if within else ExperimentStatus.BUDGET_VIOLATION), final
