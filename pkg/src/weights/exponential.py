#!/usr/bin/env python3
"""
Exponential weight rho(s) = e^{-a s}.
"""

import math
from typing import Optional

import numpy as np

from ..core.base import Certificate, TailBound, WeightProfile


class ExponentialProfile(WeightProfile):
    """Weight e^{-a s} with a > 0; integrable, every moment of chaos holds."""

    kind = "exponential"

    def __init__(self, a: float = 1.0, logger=None):
        if not a > 0:
            raise ValueError(f"exponential rate must be positive, got {a}")
        super().__init__((a,), logger)
        self.a = float(a)

    def log_value(self, s: np.ndarray) -> np.ndarray:
        return -self.a * np.asarray(s, dtype=float)

    def mass(self, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        return np.exp(-self.a * lo) * -np.expm1(-self.a * (hi - lo)) / self.a

    def integral(self, a: float, b: float, panel: float = 0.25) -> float:
        if b <= a:
            return 0.0
        return float(self.mass(np.array(a), np.array(b)))

    def tail(self) -> Optional[TailBound]:
        a = self.a
        decay = lambda s: np.exp(-a * np.asarray(s, dtype=float))
        return TailBound(
            horizon=0.0,
            lower=decay,
            upper=decay,
            lower_integral=lambda x: math.exp(-a * x) / a,
            upper_root_integral=lambda x, p: p * math.exp(-a * x / p) / a,
        )

    def analytic_certificate(self) -> Optional[Certificate]:
        return Certificate(M=1.0, omega=self.a)

    @property
    def monotone(self) -> bool:
        return True
