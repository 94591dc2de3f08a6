#!/usr/bin/env python3
"""
Abstract base class for weight profiles.

This module defines the interface every weight kind must implement, together
with the verdict/status enums and the small result records shared across the
numerical modules.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Callable, Dict, Optional, Tuple, Any
import logging
import math

import numpy as np


class Verdict(Enum):
    """Three-valued answer to a yes/no question about a weight or space."""
    HOLDS = "holds"
    FAILS = "fails"
    INCONCLUSIVE = "inconclusive"

    @property
    def symbol(self) -> str:
        return {"holds": "yes", "fails": "no", "inconclusive": "?"}[self.value]


class Convergence(Enum):
    """Verdict of an integral or series test."""
    CONVERGES = "converges"
    DIVERGES = "diverges"
    INCONCLUSIVE = "inconclusive"

    def as_verdict(self) -> Verdict:
        return {
            Convergence.CONVERGES: Verdict.HOLDS,
            Convergence.DIVERGES: Verdict.FAILS,
            Convergence.INCONCLUSIVE: Verdict.INCONCLUSIVE,
        }[self]


class ExperimentStatus(Enum):
    """Status of an experiment run."""
    PASSED = "passed"
    BUDGET_VIOLATION = "budget_violation"
    HYPOTHESIS_VIOLATION = "hypothesis_violation"
    CONFIG_ERROR = "config_error"
    FAILED = "failed"

    @property
    def exit_code(self) -> int:
        return {
            ExperimentStatus.PASSED: 0,
            ExperimentStatus.FAILED: 1,
            ExperimentStatus.BUDGET_VIOLATION: 2,
            ExperimentStatus.HYPOTHESIS_VIOLATION: 3,
            ExperimentStatus.CONFIG_ERROR: 4,
        }[self]


@dataclass(frozen=True)
class Certificate:
    """Admissibility certificate: rho(tau) <= M e^{omega t} rho(tau + t)."""
    M: float
    omega: float


@dataclass(frozen=True)
class Violation:
    """Witness that a weight breaks an admissibility inequality."""
    tau: float
    t: float
    reason: str


@dataclass(frozen=True)
class LocalBounds:
    """A rho(sigma) <= rho(t) <= B rho(sigma + l) for t in [sigma, sigma + l]."""
    l: float
    A: float
    B: float


@dataclass(frozen=True)
class TailBound:
    """
    Analytic bounds for a weight beyond ``horizon``.

    ``lower`` and ``upper`` bound rho pointwise on [horizon, inf).  The
    integrals are taken from a point x >= horizon to infinity and may be inf.
    ``lower`` is always nonincreasing; ``upper`` only when
    ``upper_nonincreasing`` is set.
    """
    horizon: float
    lower: Callable[[np.ndarray], np.ndarray]
    upper: Callable[[np.ndarray], np.ndarray]
    lower_integral: Callable[[float], float]
    upper_root_integral: Callable[[float, float], float]
    upper_nonincreasing: bool = True

    def upper_integral(self, x: float) -> float:
        return self.upper_root_integral(x, 1.0)


_GAUSS_NODES = 8


class WeightProfile(ABC):
    """
    Abstract base class for all weight kinds.

    Each kind (exponential, rational, ...) evaluates log rho, integrates rho
    over intervals and describes its tail.
    """

    kind: str = "abstract"

    def __init__(self, params: Tuple[float, ...] = (), logger: Optional[logging.Logger] = None):
        """
        Initialize the profile.

        Args:
            params: Numeric parameters of the kind
            logger: Logger instance to use
        """
        self.params = tuple(float(v) for v in params)
        self.logger = logger or logging.getLogger(f"fhclab.weights.{self.kind}")

    @abstractmethod
    def log_value(self, s: np.ndarray) -> np.ndarray:
        """
        Evaluate log rho.

        Args:
            s: Nonnegative evaluation points

        Returns:
            Array of log rho(s)
        """
        pass

    @abstractmethod
    def tail(self) -> Optional[TailBound]:
        """
        Analytic tail description.

        Returns:
            TailBound, or None when the kind has no analytic tail
        """
        pass

    def value(self, s: np.ndarray) -> np.ndarray:
        """Evaluate rho; overflows to inf for very large weights."""
        with np.errstate(over="ignore"):
            return np.exp(self.log_value(np.asarray(s, dtype=float)))

    def mass(self, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        """
        Integral of rho over [lo, hi], elementwise.

        The default uses one Gauss-Legendre panel per interval and is meant
        for short intervals such as grid cells.
        """
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        nodes, wts = np.polynomial.legendre.leggauss(_GAUSS_NODES)
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        pts = mid[..., None] + half[..., None] * nodes
        return half * (self.value(pts) @ wts)

    def integral(self, a: float, b: float, panel: float = 0.25) -> float:
        """Integral of rho over a possibly long interval [a, b]."""
        if b <= a:
            return 0.0
        count = max(1, int(math.ceil((b - a) / panel)))
        edges = np.linspace(a, b, count + 1)
        return math.fsum(self.mass(edges[:-1], edges[1:]))

    @lru_cache(maxsize=64)
    def cell_masses(self, resolution: int, n_cells: int) -> np.ndarray:
        """
        Masses of the first ``n_cells`` grid cells at step 1/resolution.

        Returns:
            Read-only array of per-cell integrals of rho
        """
        k = np.arange(n_cells, dtype=float)
        masses = self.mass(k / resolution, (k + 1.0) / resolution)
        masses.setflags(write=False)
        return masses

    @lru_cache(maxsize=64)
    def cell_midpoint_values(self, resolution: int, n_cells: int) -> np.ndarray:
        """Values of rho at the midpoints of the first ``n_cells`` cells."""
        values = self.value((np.arange(n_cells, dtype=float) + 0.5) / resolution)
        values.setflags(write=False)
        return values

    def analytic_certificate(self) -> Optional["Certificate"]:
        """Closed-form admissibility certificate, if the kind has one."""
        return None

    @property
    def monotone(self) -> bool:
        """True when rho is known to be nonincreasing."""
        return False

    @property
    def domain_end(self) -> float:
        """Largest representable argument."""
        return math.inf

    def describe(self) -> Dict[str, Any]:
        """
        Get a serializable descriptor of this profile.

        Returns:
            Dictionary with kind and parameters
        """
        return {"kind": self.kind, "params": list(self.params)}

    def _key(self) -> Tuple[Any, ...]:
        return (self.kind, self.params)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, WeightProfile) and self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __repr__(self) -> str:
        return f"{type(self).__name__}{self.params}"

    def log_info(self, message: str):
        """Log an info message."""
        self.logger.info(f"[{self.kind}] {message}")

    def log_warning(self, message: str):
        """Log a warning message."""
        self.logger.warning(f"[{self.kind}] {message}")

    def log_error(self, message: str):
        """Log an error message."""
        self.logger.error(f"[{self.kind}] {message}")
