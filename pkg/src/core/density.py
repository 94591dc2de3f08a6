#!/usr/bin/env python3
"""
Lower densities of subsets of N and R+, and bounded-gap utilities.

The liminf in the definition of lower density is approximated by the
minimum of the running ratio over a tail window [N - w, N]; both the
profile and the window are reported.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import DensityError

logger = logging.getLogger("fhclab.density")


@dataclass(frozen=True)
class HitSet:
    """
    Return times of an orbit to a set.

    Discrete sets carry sorted integers; continuous sets carry sorted,
    disjoint half-open intervals.
    """
    horizon: float
    points: Tuple[int, ...] = ()
    intervals: Tuple[Tuple[float, float], ...] = ()
    continuous: bool = False

    @classmethod
    def discrete(cls, points: Sequence[int], horizon: float) -> "HitSet":
        pts = tuple(sorted(int(p) for p in points if 0 <= p <= horizon))
        return cls(horizon=horizon, points=pts)

    @classmethod
    def from_intervals(cls, intervals: Sequence[Tuple[float, float]], horizon: float) -> "HitSet":
        ivs = tuple(sorted((float(a), float(b)) for a, b in intervals))
        _check_disjoint(ivs)
        return cls(horizon=horizon, intervals=ivs, continuous=True)


@dataclass
class DensityEstimate:
    """Running ratio profile and its minimum over the tail window."""
    estimate: float
    horizon: float
    window: float
    grid: np.ndarray
    profile: np.ndarray


@dataclass
class GapReport:
    """Gap structure of a sorted integer set."""
    max_gap: int
    syndetic: bool
    difference_set_max_gap: Optional[int]
    declared_bound: Optional[int] = None


def _check_disjoint(intervals: Sequence[Tuple[float, float]]):
    for (a, b), (c, _) in zip(intervals, intervals[1:]):
        if c < b:
            raise DensityError(f"intervals [{a:g}, {b:g}) and [{c:g}, ...) overlap")
    for a, b in intervals:
        if b < a:
            raise DensityError(f"interval [{a:g}, {b:g}) has negative length")


def lower_density_discrete(points: Sequence[int], N: int, tail_window: int = 0) -> DensityEstimate:
    """
    Estimate the lower density of a set of naturals.

    Args:
        points: Elements of the set (any order)
        N: Horizon
        tail_window: Width of the window [N - w, N] the minimum is taken over

    Returns:
        DensityEstimate with profile n -> #{a in A : 1 <= a <= n} / n for n = 1..N
    """
    if N < 1:
        raise DensityError("empty horizon")
    if tail_window < 0 or tail_window > N:
        raise DensityError(f"tail window {tail_window} does not fit in horizon {N}")
    pts = np.asarray(points, dtype=np.int64)
    # 0 is not a natural number here; counting it would push ratios above 1
    pts = np.unique(pts[(pts >= 1) & (pts <= N)])
    n = np.arange(1, N + 1)
    counts = np.searchsorted(pts, n, side="right")
    profile = counts / n
    window = profile[max(N - 1 - tail_window, 0):]
    return DensityEstimate(float(np.min(window)), float(N), float(tail_window), n, profile)


def _measure_up_to(intervals: np.ndarray, x: np.ndarray) -> np.ndarray:
    if intervals.size == 0:
        return np.zeros_like(x)
    a = intervals[:, 0][None, :]
    b = intervals[:, 1][None, :]
    return np.sum(np.clip(np.minimum(b, x[:, None]) - a, 0.0, None), axis=1)


def lower_density_continuous(intervals: Sequence[Tuple[float, float]], N: float,
                             tail_window: float = 0.0) -> DensityEstimate:
    """
    Estimate the lower density of a union of disjoint intervals in R+.

    The ratio mu(M cap [0, n]) / n is monotone between interval endpoints,
    so its minimum over [N - w, N] is attained at an endpoint or at the
    window ends; exactly those points form the profile.
    """
    if N <= 0:
        raise DensityError("empty horizon")
    ivs = sorted((float(a), float(b)) for a, b in intervals)
    _check_disjoint(ivs)
    arr = np.asarray(ivs, dtype=float).reshape(-1, 2)
    lo = max(N - tail_window, np.finfo(float).tiny)
    breaks = arr.ravel() if arr.size else np.zeros(0)
    grid = np.unique(np.concatenate(([lo, N], breaks[(breaks > lo) & (breaks < N)])))
    profile = _measure_up_to(arr, grid) / grid
    return DensityEstimate(float(np.min(profile)), float(N), float(tail_window), grid, profile)


def gap_analysis(points: Sequence[int], declared_bound: Optional[int] = None,
                 difference_limit: Optional[int] = None) -> GapReport:
    """
    Analyse the gaps of a sorted integer set.

    The set is syndetic for a bound M when it meets every window [n, n + M],
    n >= 0, up to its last element.  The difference set {a - a' > 0} is
    truncated at ``difference_limit`` (default: half the span), beyond
    which it is too sparse to be representative.
    """
    pts = np.unique(np.asarray(points, dtype=np.int64))
    if pts.size == 0:
        raise DensityError("gap analysis needs a nonempty set")
    gaps = np.diff(pts)
    max_gap = int(max(int(pts[0]), int(gaps.max()) if gaps.size else 0))
    syndetic = declared_bound is not None and max_gap <= declared_bound

    diff_gap = None
    if pts.size > 1:
        limit = difference_limit if difference_limit is not None else int(pts[-1] - pts[0]) // 2
        seen = np.zeros(max(limit, 0) + 1, dtype=bool)
        # lag-d differences grow strictly with d on a sorted set
        for lag in range(1, pts.size):
            step = pts[lag:] - pts[:-lag]
            if step.min() > limit:
                break
            seen[step[step <= limit]] = True
        diffs = np.flatnonzero(seen[1:]) + 1
        if diffs.size:
            diff_gap = int(max(int(diffs[0]), int(np.diff(diffs).max()) if diffs.size > 1 else 0))
    logger.debug(f"gap analysis: max_gap={max_gap}, difference gap={diff_gap}")
    return GapReport(max_gap, syndetic, diff_gap, declared_bound)
