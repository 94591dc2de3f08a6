#!/usr/bin/env python3
"""
Discretized function spaces over [0, inf).

A ``GridFunction`` is piecewise constant on the uniform grid of step
h = 1/resolution, so integer-time translations are exact cell shifts.
Block integrals of orbits are piecewise linear; they are stored as exact
cell averages computed from the cell-averaged primitive
Y(x) = int_0^x f, extended to x < 0 by the section-map fill.
"""

import logging
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Mapping, Optional, Union

import numpy as np

from .errors import ConfigError, GridAlignmentError
from .weights import Weight

logger = logging.getLogger("fhclab.gridfn")

_CHI = re.compile(r"^\s*chi\(\s*([-+0-9./eE]+)\s*,\s*([-+0-9./eE]+)\s*\)\s*$")


def parse_step(value: Union[str, float, int]) -> int:
    """
    Parse a grid step ("1/32", 0.03125, 32) into its resolution 1/h.

    Raises:
        ConfigError: 1/h is not a positive integer
    """
    try:
        if isinstance(value, str):
            frac = Fraction(value.strip())
        else:
            frac = Fraction(value).limit_denominator(1 << 20)
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"cannot parse grid step {value!r}", field="grid_step")
    if frac <= 0:
        raise ConfigError("grid step must be positive", field="grid_step")
    if frac > 1 and frac.denominator == 1:
        # an integer > 1 is read as a resolution
        return int(frac)
    inverse = 1 / frac
    if inverse.denominator != 1:
        raise ConfigError(f"1/h must be a positive integer, got h={value}", field="grid_step")
    return int(inverse)


def grid_cells(t: float, resolution: int) -> int:
    """Number of cells in a grid-aligned nonnegative time t."""
    cells = t * resolution
    rounded = int(round(cells))
    if t < 0 or abs(cells - rounded) > 1e-9 * max(1.0, abs(cells)):
        raise GridAlignmentError(f"time {t!r} is not a nonnegative multiple of 1/{resolution}")
    return rounded


@dataclass(eq=False)
class GridFunction:
    """A compactly supported piecewise-constant function on [0, inf)."""
    resolution: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if int(self.resolution) != self.resolution or self.resolution < 1:
            raise GridAlignmentError(f"resolution must be a positive integer, got {self.resolution}")
        self.resolution = int(self.resolution)
        self.values = np.asarray(self.values, dtype=float).ravel()

    @property
    def step(self) -> float:
        return 1.0 / self.resolution

    @property
    def support_cells(self) -> int:
        nonzero = np.flatnonzero(self.values)
        return int(nonzero[-1]) + 1 if nonzero.size else 0

    @property
    def support_end(self) -> float:
        return self.support_cells / self.resolution

    def __len__(self) -> int:
        return self.values.size

    @classmethod
    def zeros(cls, resolution: int, cells: int = 0) -> "GridFunction":
        return cls(resolution, np.zeros(cells))

    @classmethod
    def indicator(cls, a: float, b: float, resolution: int) -> "GridFunction":
        """chi_[a, b] for grid-aligned 0 <= a <= b."""
        lo, hi = grid_cells(a, resolution), grid_cells(b, resolution)
        if hi < lo:
            raise ConfigError(f"empty indicator chi({a}, {b})")
        values = np.zeros(hi)
        values[lo:hi] = 1.0
        return cls(resolution, values)

    @classmethod
    def parse(cls, spec: Union[str, Mapping[str, Any]], resolution: int) -> "GridFunction":
        """Build from ``chi(a,b)`` syntax or a serialized mapping."""
        if isinstance(spec, str):
            match = _CHI.match(spec)
            if not match:
                raise ConfigError(f"cannot parse target {spec!r}; expected chi(a,b)", field="targets")
            try:
                a, b = float(Fraction(match.group(1))), float(Fraction(match.group(2)))
            except ValueError:
                raise ConfigError(f"bad interval in {spec!r}", field="targets")
            try:
                return cls.indicator(a, b, resolution)
            except GridAlignmentError as e:
                raise ConfigError(str(e), field="targets")
        return cls.from_dict(spec)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "GridFunction":
        try:
            resolution = parse_step(data["step"])
            values = np.asarray(data["values"], dtype=float)
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"grid function needs 'step' and 'values': {e}", field="targets")
        f = cls(resolution, values)
        declared = data.get("support_cells")
        if declared is not None and int(declared) < f.support_cells:
            raise ConfigError("support_cells is smaller than the nonzero payload", field="support_cells")
        return f

    def to_dict(self) -> Dict[str, Any]:
        trimmed = self.values[:self.support_cells]
        return {
            "step": f"1/{self.resolution}",
            "support_cells": self.support_cells,
            "values": [float(v) for v in trimmed],
        }

    def padded(self, cells: int) -> np.ndarray:
        """Values extended with zeros (or truncated) to exactly ``cells`` entries."""
        out = np.zeros(cells)
        n = min(cells, self.values.size)
        out[:n] = self.values[:n]
        return out

    def trimmed(self) -> "GridFunction":
        return GridFunction(self.resolution, self.values[:self.support_cells].copy())

    def total_variation(self) -> float:
        """Total variation on [0, inf), counting the final drop to zero."""
        v = self.values[:self.support_cells]
        if v.size == 0:
            return 0.0
        return float(np.sum(np.abs(np.diff(v))) + abs(v[-1]))

    def __add__(self, other: "GridFunction") -> "GridFunction":
        _same_grid(self, other)
        n = max(len(self), len(other))
        return GridFunction(self.resolution, self.padded(n) + other.padded(n))

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        _same_grid(self, other)
        n = max(len(self), len(other))
        return GridFunction(self.resolution, self.padded(n) - other.padded(n))

    def scaled(self, factor: float) -> "GridFunction":
        return GridFunction(self.resolution, factor * self.values)

    def equals(self, other: "GridFunction") -> bool:
        """Exact equality up to trailing zeros."""
        if self.resolution != other.resolution:
            return False
        n = max(len(self), len(other))
        return bool(np.array_equal(self.padded(n), other.padded(n)))


def _same_grid(f: GridFunction, g: GridFunction):
    if f.resolution != g.resolution:
        raise GridAlignmentError(f"grid mismatch: 1/{f.resolution} vs 1/{g.resolution}")


@dataclass(frozen=True)
class SpaceSpec:
    """
    The ambient space: L^p_rho (p >= 1) or C^rho_0.

    The space fixes the norm and the fill of the section maps S_t (zero on
    L^p, the value f(0) on C_0).
    """
    weight: Weight
    kind: str = "lp"
    p: float = 1.0

    def __post_init__(self):
        if self.kind not in ("lp", "c0"):
            raise ConfigError(f"space must be 'lp' or 'c0', got {self.kind!r}", field="space")
        if self.kind == "lp" and not self.p >= 1:
            raise ConfigError(f"p must be >= 1, got {self.p}", field="p")

    @classmethod
    def lp(cls, weight: Weight, p: float = 1.0) -> "SpaceSpec":
        return cls(weight, "lp", float(p))

    @classmethod
    def c0(cls, weight: Weight) -> "SpaceSpec":
        return cls(weight, "c0", math.inf)

    @property
    def is_lp(self) -> bool:
        return self.kind == "lp"

    def fill_value(self, f: GridFunction) -> float:
        if self.is_lp or len(f) == 0:
            return 0.0
        return float(f.values[0])

    def growth_bound(self, t: float) -> float:
        """Bound on ||T_t|| from the weight certificate."""
        cert = self.weight.certificate
        if cert is None:
            return math.inf
        bound = cert.M * math.exp(cert.omega * t)
        return bound ** (1.0 / self.p) if self.is_lp else bound

    def label(self) -> str:
        return f"L^{self.p:g}" if self.is_lp else "C_0"


def translate(f: GridFunction, t: float) -> GridFunction:
    """T_t f(x) = f(x + t): exact left shift by t/h cells."""
    k = grid_cells(t, f.resolution)
    return GridFunction(f.resolution, f.values[k:].copy())


def backshift(f: GridFunction, t: float, space: SpaceSpec) -> GridFunction:
    """S_t f: right shift by t/h cells, cells [0, t) filled with 0 (L^p) or f(0) (C_0)."""
    k = grid_cells(t, f.resolution)
    head = np.full(k, space.fill_value(f))
    return GridFunction(f.resolution, np.concatenate((head, f.values)))


def refine(f: GridFunction, factor: int) -> GridFunction:
    """Split every cell into ``factor`` equal cells; an exact embedding."""
    if factor < 1:
        raise GridAlignmentError("refinement factor must be a positive integer")
    return GridFunction(f.resolution * factor, np.repeat(f.values, factor))


def norm(f: GridFunction, space: SpaceSpec) -> float:
    """
    Weighted norm.

    L^p: (sum |v_k|^p m_k)^{1/p} with m_k the exact cell mass of rho.
    C_0: max |v_k| rho(midpoint_k).
    """
    n = f.support_cells
    if n == 0:
        return 0.0
    v = np.abs(f.values[:n])
    profile = space.weight.profile
    if space.is_lp:
        masses = profile.cell_masses(f.resolution, n)
        if space.p == 1.0:
            return float(np.dot(v, masses))
        return float(np.dot(v ** space.p, masses) ** (1.0 / space.p))
    return float(np.max(v * profile.cell_midpoint_values(f.resolution, n)))


def _cell_primitive(f: GridFunction, index: np.ndarray, fill: float) -> np.ndarray:
    """Average of Y(x) = int_0^x f over cell i, with f = fill on (-inf, 0)."""
    h = f.step
    n = len(f)
    nodes = np.concatenate(([0.0], np.cumsum(f.values))) * h
    inside = np.clip(index, 0, max(n - 1, 0))
    out = np.where(index >= n, nodes[n], 0.5 * (nodes[inside] + nodes[np.minimum(inside + 1, n)]))
    if n == 0:
        out = np.zeros(index.shape)
    return np.where(index < 0, fill * (index + 0.5) * h, out)


def window_integral(f: GridFunction, lo: int, hi: int, cells: int, fill: float = 0.0) -> GridFunction:
    """
    Cell averages of g(s) = int_{s + lo h}^{s + hi h} f~(u) du on the first ``cells`` cells.

    Every block integral of the orbit is such a window: both the forward
    pieces int T_t f dt and the backward pieces int S_t f dt.
    """
    j = np.arange(max(cells, 0))
    values = _cell_primitive(f, j + hi, fill) - _cell_primitive(f, j + lo, fill)
    return GridFunction(f.resolution, values)


def smoothing(y: GridFunction) -> GridFunction:
    """R y = int_0^1 T_t y dt, i.e. (Ry)(s) = int_s^{s+1} y."""
    r = y.resolution
    return window_integral(y, 0, r, len(y))


def block_integral_T(f: GridFunction, n: int) -> GridFunction:
    """int_n^{n+1} T_t f dt = T_n R f."""
    r = f.resolution
    return window_integral(f, n * r, (n + 1) * r, max(len(f) - n * r, 0))


def block_integral_S(f: GridFunction, n: int, space: SpaceSpec) -> GridFunction:
    """int_n^{n+1} S_t f dt, i.e. g(s) = int_{s-n-1}^{s-n} f~(u) du."""
    if n < 0:
        raise GridAlignmentError("block index must be nonnegative")
    r = f.resolution
    return window_integral(f, -(n + 1) * r, -n * r, len(f) + (n + 1) * r, space.fill_value(f))


def orbit_norms(f: GridFunction, times: np.ndarray, space: SpaceSpec, backward: bool) -> np.ndarray:
    """
    ||S_t f|| (backward) or ||T_t f|| (forward) for arbitrary real times.

    Cell masses are integrated exactly over the shifted cells, so the
    result is continuous in t.  In C_0 the backward fill is ignored; callers
    refuse targets with f(0) != 0 there.
    """
    times = np.asarray(times, dtype=float)
    n = f.support_cells
    if n == 0:
        return np.zeros(times.shape)
    h = f.step
    v = np.abs(f.values[:n])
    k = np.arange(n)
    profile = space.weight.profile
    shift = times[:, None] if backward else -times[:, None]
    lo = k[None, :] * h + shift
    hi = lo + h
    if space.is_lp:
        lo_c, hi_c = np.maximum(lo, 0.0), np.maximum(hi, 0.0)
        masses = profile.mass(lo_c, hi_c)
        return (masses @ (v ** space.p)) ** (1.0 / space.p)
    mid = 0.5 * (lo + hi)
    alive = hi > 0
    rho = profile.value(np.maximum(mid, 0.0))
    return np.max(np.where(alive, v[None, :] * rho, 0.0), axis=1)
