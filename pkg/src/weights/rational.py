#!/usr/bin/env python3
"""
Rational weight rho(s) = 1/(1 + s).
"""

import math
from typing import Optional

import numpy as np

from ..core.base import Certificate, TailBound, WeightProfile


class RationalProfile(WeightProfile):
    """Weight 1/(1+s): tends to zero but is not integrable."""

    kind = "rational"

    def __init__(self, logger=None):
        super().__init__((), logger)

    def log_value(self, s: np.ndarray) -> np.ndarray:
        return -np.log1p(np.asarray(s, dtype=float))

    def mass(self, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        return np.log1p((hi - lo) / (1.0 + lo))

    def integral(self, a: float, b: float, panel: float = 0.25) -> float:
        if b <= a:
            return 0.0
        return float(self.mass(np.array(a), np.array(b)))

    def tail(self) -> Optional[TailBound]:
        harmonic = lambda s: 1.0 / (1.0 + np.asarray(s, dtype=float))
        return TailBound(
            horizon=0.0,
            lower=harmonic,
            upper=harmonic,
            lower_integral=lambda x: math.inf,
            upper_root_integral=lambda x, p: math.inf,
        )

    def analytic_certificate(self) -> Optional[Certificate]:
        # (1 + tau + t)/(1 + tau) <= 1 + t <= e^t
        return Certificate(M=1.0, omega=1.0)

    @property
    def monotone(self) -> bool:
        return True
