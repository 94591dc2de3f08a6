#!/usr/bin/env python3
"""
Oscillating weight rho = e^{-phi} with phi(s) = s sin(log s) for s >= 1.

On [0, 1] phi is extended by phi(s) = s - 1, which matches value and
derivative at s = 1.  Since phi'(s) = sin(log s) + cos(log s) on [1, inf),
|phi'| <= sqrt(2) everywhere, so (M, omega) = (1, sqrt(2)) certifies
admissibility.  The weight has liminf 0 and is unbounded.
"""

import math
from typing import Optional

import numpy as np

from ..core.base import Certificate, TailBound, WeightProfile


def phi(s: np.ndarray) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    safe = np.maximum(s, 1.0)
    return np.where(s >= 1.0, safe * np.sin(np.log(safe)), s - 1.0)


def peak_points(count: int) -> np.ndarray:
    """Integers near e^{3pi/2 + 2pi k}, where sin(log s) ~ -1 and rho ~ e^s."""
    k = np.arange(count, dtype=float)
    return np.floor(np.exp(1.5 * math.pi + 2.0 * math.pi * k)).astype(np.int64)


def valley_points(count: int) -> np.ndarray:
    """Integers near e^{pi/2 + 2pi k}, where sin(log s) ~ 1 and rho ~ e^{-s}."""
    k = np.arange(count, dtype=float)
    return np.floor(np.exp(0.5 * math.pi + 2.0 * math.pi * k)).astype(np.int64)


class SinLogProfile(WeightProfile):
    """The hypercyclic but not frequently hypercyclic example weight."""

    kind = "sinlog"

    def __init__(self, logger=None):
        super().__init__((), logger)

    def log_value(self, s: np.ndarray) -> np.ndarray:
        return -phi(s)

    def tail(self) -> Optional[TailBound]:
        # |sin| <= 1 gives e^{-s} <= rho(s) <= e^{s} for s >= 1
        return TailBound(
            horizon=1.0,
            lower=lambda s: np.exp(-np.asarray(s, dtype=float)),
            upper=lambda s: np.exp(np.asarray(s, dtype=float)),
            lower_integral=lambda x: math.exp(-x),
            upper_root_integral=lambda x, p: math.inf,
            upper_nonincreasing=False,
        )

    def analytic_certificate(self) -> Optional[Certificate]:
        return Certificate(M=1.0, omega=math.sqrt(2.0))
