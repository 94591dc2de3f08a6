#!/usr/bin/env python3
"""
Constant weight rho(s) = c.
"""

import math
from typing import Optional

import numpy as np

from ..core.base import Certificate, TailBound, WeightProfile


class ConstantProfile(WeightProfile):
    """Weight identically equal to c > 0."""

    kind = "constant"

    def __init__(self, c: float = 1.0, logger=None):
        if not c > 0:
            raise ValueError(f"constant weight must be positive, got {c}")
        super().__init__((c,), logger)
        self.c = float(c)

    def log_value(self, s: np.ndarray) -> np.ndarray:
        return np.full(np.shape(s), math.log(self.c))

    def mass(self, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        return self.c * (np.asarray(hi, dtype=float) - np.asarray(lo, dtype=float))

    def integral(self, a: float, b: float, panel: float = 0.25) -> float:
        return self.c * max(0.0, b - a)

    def tail(self) -> Optional[TailBound]:
        c = self.c
        level = lambda s: np.full(np.shape(s), c)
        return TailBound(
            horizon=0.0,
            lower=level,
            upper=level,
            lower_integral=lambda x: math.inf,
            upper_root_integral=lambda x, p: math.inf,
        )

    def analytic_certificate(self) -> Optional[Certificate]:
        return Certificate(M=1.0, omega=0.0)

    @property
    def monotone(self) -> bool:
        return True
