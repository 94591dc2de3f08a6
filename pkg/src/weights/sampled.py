#!/usr/bin/env python3
"""
Sampled weight: values on a uniform grid, linearly interpolated.

Beyond the last sample the weight continues with an optional closed-form
tail profile; without one, evaluation past the horizon is an error.
"""

import math
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from ..core.base import TailBound, WeightProfile
from ..core.errors import WeightDomainError


class SampledProfile(WeightProfile):
    """Piecewise-linear weight read from a table."""

    kind = "sampled"

    def __init__(self, step: float, values: Sequence[float],
                 tail: Optional[WeightProfile] = None, logger=None):
        values = np.asarray(values, dtype=float)
        if step <= 0:
            raise ValueError(f"sample step must be positive, got {step}")
        if values.size < 2:
            raise ValueError("a sampled weight needs at least two values")
        if np.any(~np.isfinite(values)) or np.any(values <= 0):
            raise ValueError("sampled weight values must be finite and positive")
        if tail is not None and tail.kind == self.kind:
            raise ValueError("a sampled tail cannot itself be sampled")
        super().__init__((step,) + tuple(values), logger)
        self.step = float(step)
        self.values = values
        self.tail_profile = tail
        self.nodes = np.arange(values.size) * self.step
        self.horizon = float(self.nodes[-1])
        # trapezoid rule is exact for the linear interpolant
        pieces = 0.5 * (values[:-1] + values[1:]) * self.step
        self._cumulative = np.concatenate(([0.0], np.cumsum(pieces)))

    def _check_domain(self, s: np.ndarray):
        if np.any(s < 0):
            raise WeightDomainError("weights are defined on [0, inf) only")
        if self.tail_profile is None and np.any(s > self.horizon + 1e-12):
            raise WeightDomainError(
                f"sampled weight has no tail descriptor beyond horizon {self.horizon:g}")

    def log_value(self, s: np.ndarray) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        self._check_domain(s)
        inside = np.log(np.interp(np.minimum(s, self.horizon), self.nodes, self.values))
        if self.tail_profile is None:
            return inside
        return np.where(s <= self.horizon, inside, self.tail_profile.log_value(s))

    def _primitive(self, x: np.ndarray) -> np.ndarray:
        inner = np.minimum(x, self.horizon)
        idx = np.clip(np.searchsorted(self.nodes, inner, side="right") - 1, 0, self.values.size - 2)
        left = self.nodes[idx]
        mid_value = np.interp(0.5 * (left + inner), self.nodes, self.values)
        # midpoint rule on the piece [left, x] is exact for a linear function
        result = self._cumulative[idx] + (inner - left) * mid_value
        if self.tail_profile is not None:
            beyond = x > self.horizon
            if np.any(beyond):
                extra = self.tail_profile.mass(np.full(x.shape, self.horizon), np.maximum(x, self.horizon))
                result = np.where(beyond, result + extra, result)
        return result

    def mass(self, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        self._check_domain(np.concatenate((lo.ravel(), hi.ravel())))
        return self._primitive(hi) - self._primitive(lo)

    def integral(self, a: float, b: float, panel: float = 0.25) -> float:
        if b <= a:
            return 0.0
        return float(self.mass(np.array(a), np.array(b)))

    def tail(self) -> Optional[TailBound]:
        if self.tail_profile is None:
            return None
        inner = self.tail_profile.tail()
        if inner is None:
            return None
        return TailBound(
            horizon=max(inner.horizon, self.horizon),
            lower=inner.lower,
            upper=inner.upper,
            lower_integral=inner.lower_integral,
            upper_root_integral=inner.upper_root_integral,
            upper_nonincreasing=inner.upper_nonincreasing,
        )

    @property
    def monotone(self) -> bool:
        own = bool(np.all(np.diff(self.values) <= 0))
        return own and (self.tail_profile is None or self.tail_profile.monotone)

    @property
    def domain_end(self) -> float:
        return math.inf if self.tail_profile is not None else self.horizon

    def describe(self) -> Dict[str, Any]:
        descriptor: Dict[str, Any] = {
            "kind": self.kind,
            "step": self.step,
            "values": [float(v) for v in self.values],
        }
        if self.tail_profile is not None:
            descriptor["tail"] = self.tail_profile.describe()
        return descriptor

    def _key(self) -> Tuple[Any, ...]:
        tail_key = self.tail_profile._key() if self.tail_profile is not None else None
        return (self.kind, self.params, tail_key)
