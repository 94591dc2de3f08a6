#!/usr/bin/env python3
"""
Frequently hypercyclic vectors for translation semigroups.

Builds separated families of return times, the thresholds N_l from the
orbit tails of the targets, the vector x = sum_n int_n^{n+1} S_t z_n dt,
and checks its returns, its orbit densities and the periodic points of
the same construction.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from .base import Convergence
from .density import DensityEstimate, HitSet, lower_density_continuous, lower_density_discrete
from .errors import ConstructionError, FamilyError, GridAlignmentError, HypothesisViolation
from .gridfn import (GridFunction, SpaceSpec, backshift, block_integral_S, block_integral_T, grid_cells,
                     norm, orbit_norms, smoothing, translate, window_integral)
from .weights import integral_test, series_test

logger = logging.getLogger("fhclab.fhc")

FORWARD = "forward"
BACKWARD = "backward"
VARIANTS = (FORWARD, BACKWARD)

PETTIS_WINDOW = 24.0
QUADRATURE_NODES = 8
SLACK_CONSTANT = 32.0
MAX_TAIL_SEARCH = 1e6


# --------------------------------------------------------------------------
# Separated families
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SeparatedFamily:
    """
    Arithmetic progressions A(l) = {kP + o_l : k >= k0(l)}, one per level.

    With gap g = 2 max nu and period P = L g, every two distinct members
    lie at least g >= nu_l + nu_k apart.
    """
    nu: Tuple[int, ...]
    gap: int
    period: int
    offsets: Tuple[int, ...]
    starts: Tuple[int, ...]
    horizon: int

    @property
    def levels(self) -> int:
        return len(self.nu)

    def first(self, l: int) -> int:
        return self.starts[l - 1] * self.period + self.offsets[l - 1]

    def level_set(self, l: int, horizon: Optional[int] = None) -> np.ndarray:
        """Members of A(l) up to ``horizon`` (default: the family horizon); l is 1-based."""
        if not 1 <= l <= self.levels:
            raise FamilyError(f"level {l} outside 1..{self.levels}")
        limit = self.horizon if horizon is None else horizon
        return np.arange(self.first(l), limit + 1, self.period, dtype=np.int64)

    def level_of(self, n: int) -> Optional[int]:
        for l in range(1, self.levels + 1):
            if n >= self.first(l) and (n - self.offsets[l - 1]) % self.period == 0:
                return l
        return None

    def assignment(self, horizon: Optional[int] = None) -> List[Tuple[int, int]]:
        """Sorted (n, level) pairs of all members up to ``horizon``."""
        pairs = [(int(n), l) for l in range(1, self.levels + 1) for n in self.level_set(l, horizon)]
        return sorted(pairs)

    @property
    def density(self) -> float:
        return 1.0 / self.period

    def to_dict(self) -> Dict[str, Any]:
        return {
            "nu": list(self.nu),
            "gap": self.gap,
            "period": self.period,
            "offsets": list(self.offsets),
            "starts": list(self.starts),
            "horizon": self.horizon,
        }


def build_family(nu: Sequence[int], horizon: int) -> SeparatedFamily:
    """
    Build the separated family for parameters nu_1 <= ... <= nu_L.

    All invariants (disjointness, n >= nu_l, |n - m| >= nu_l + nu_k and the
    density 1/P) are checked by exhaustive scan up to ``horizon``.

    Raises:
        FamilyError: bad parameters, horizon below a level's first element,
            or a failed invariant scan
    """
    nu = tuple(int(v) for v in nu)
    if not nu:
        raise FamilyError("a family needs at least one level")
    if any(v < 1 for v in nu):
        raise FamilyError(f"separation parameters must be positive, got {nu}")
    if any(b < a for a, b in zip(nu, nu[1:])):
        raise FamilyError(f"separation parameters must be nondecreasing, got {nu}")

    gap = 2 * max(nu)
    period = len(nu) * gap
    offsets = tuple(l * gap for l in range(len(nu)))
    starts = tuple(max(0, -(-(v - o) // period)) for v, o in zip(nu, offsets))
    family = SeparatedFamily(nu, gap, period, offsets, starts, int(horizon))

    for l in range(1, family.levels + 1):
        if family.first(l) > horizon:
            raise FamilyError(f"horizon {horizon} is below the first element {family.first(l)} of level {l}")
    _verify_family(family)
    logger.info(f"Built family nu={nu}: gap={gap}, period={period}")
    return family


def _verify_family(family: SeparatedFamily):
    pairs = family.assignment()
    members = np.array([n for n, _ in pairs], dtype=np.int64)
    levels = np.array([l for _, l in pairs], dtype=np.int64)
    nu = np.asarray(family.nu, dtype=np.int64)

    if np.unique(members).size != members.size:
        raise FamilyError("levels of the family intersect")
    if np.any(members < nu[levels - 1]):
        raise FamilyError("a member lies below its level's separation parameter")

    # only neighbours closer than 2 max nu can break separation
    reach = 2 * int(nu.max())
    for d in range(1, members.size):
        close = members[d:] - members[:-d]
        if close.size == 0 or np.all(close >= reach):
            break
        need = nu[levels[d:] - 1] + nu[levels[:-d] - 1]
        if np.any(close < need):
            i = int(np.argmax(close < need))
            raise FamilyError(f"members {members[i]} and {members[i + d]} are closer than {need[i]}")

    for l in range(1, family.levels + 1):
        count = family.level_set(l).size
        first = family.first(l)
        error = abs(count / family.horizon - family.density)
        if error > (first + family.period) / family.horizon:
            raise FamilyError(f"level {l} density {count / family.horizon:g} is not 1/{family.period}")


# --------------------------------------------------------------------------
# Orbit tails
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class TailThreshold:
    """Grid time N with int_N^inf ||V_t y|| dt < threshold, and its integer ceiling."""
    variant: str
    threshold: float
    time: float
    index: int
    bound: float


def _check_variant(variant: str):
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")


def _panel_integral(fn: Callable[[np.ndarray], np.ndarray], a: float, b: float,
                    resolution: int, nodes: int) -> float:
    """Composite Gauss-Legendre over [a, b] with panels split at grid points."""
    if b <= a:
        return 0.0
    inner = np.arange(math.floor(a * resolution) + 1, math.ceil(b * resolution)) / resolution
    edges = np.concatenate(([a], inner[(inner > a) & (inner < b)], [b]))
    x, w = np.polynomial.legendre.leggauss(nodes)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    points = (mid[:, None] + half[:, None] * x).ravel()
    values = fn(points).reshape(half.size, nodes)
    return math.fsum(half * (values @ w))


def _backward_remainder(y: GridFunction, space: SpaceSpec, start: float) -> float:
    """Bound on int_start^inf ||S_t y|| dt from the weight's analytic tail."""
    tail = space.weight.profile.tail()
    if tail is None or not tail.upper_nonincreasing:
        return math.inf
    v = np.abs(y.values[:y.support_cells])
    if space.is_lp:
        du_norm = float(np.sum(v ** space.p) * y.step) ** (1.0 / space.p)
        return du_norm * tail.upper_root_integral(start, space.p)
    return float(v.max()) * tail.upper_integral(start)


def _require_backward_tail(y: GridFunction, space: SpaceSpec):
    if not space.is_lp and y.support_cells and y.values[0] != 0:
        raise HypothesisViolation(
            "C_0 backward orbits of a target with f(0) != 0 keep the constant fill; "
            "targets must vanish at 0")
    tail = space.weight.profile.tail()
    if tail is None:
        raise HypothesisViolation(f"weight {space.weight.kind} has no analytic tail; "
                                  "backward tails cannot be bounded")
    if not tail.upper_nonincreasing or not math.isfinite(tail.upper_root_integral(tail.horizon + 1.0,
                                                                                   space.p if space.is_lp else 1.0)):
        raise HypothesisViolation(f"backward orbit norms are not integrable for weight {space.weight.kind}")


def _tail_function(y: GridFunction, space: SpaceSpec, variant: str, window: float,
                   nodes: int) -> Callable[[float], float]:
    backward = variant == BACKWARD
    resolution = y.resolution

    def orbit(t: np.ndarray) -> np.ndarray:
        return orbit_norms(y, t, space, backward)

    if not backward:
        end = y.support_end
        return lambda N: _panel_integral(orbit, N, end, resolution, nodes)

    tail = space.weight.profile.tail()
    horizon = tail.horizon if tail is not None else 0.0

    def profile(N: float) -> float:
        end = max(N + window, horizon)
        return _panel_integral(orbit, N, end, resolution, nodes) + _backward_remainder(y, space, end)

    return profile


def pettis_tail_profile(y: GridFunction, space: SpaceSpec, variant: str, N_list: Sequence[float],
                        window: float = PETTIS_WINDOW, nodes: int = QUADRATURE_NODES) -> List[float]:
    """
    Bounds on ||int_K V_t y dt|| over compact K in [N, inf), for each N.

    Each value is int_N^{N+window} ||V_t y|| dt plus the analytic remainder
    beyond the window (forward orbits vanish past the support instead).
    """
    _check_variant(variant)
    if y.support_cells == 0:
        return [0.0 for _ in N_list]
    if variant == BACKWARD:
        _require_backward_tail(y, space)
    fn = _tail_function(y, space, variant, window, nodes)
    return [fn(float(N)) for N in N_list]


def tail_threshold(y: GridFunction, space: SpaceSpec, threshold: float, variant: str = BACKWARD,
                   window: float = PETTIS_WINDOW, nodes: int = QUADRATURE_NODES) -> TailThreshold:
    """
    Smallest grid time N with int_N^inf ||V_t y|| dt < threshold.

    Args:
        y: Compactly supported target
        space: Ambient space
        threshold: Positive bound
        variant: ``forward`` (V = T) or ``backward`` (V = S)

    Returns:
        TailThreshold with the grid time and its integer ceiling

    Raises:
        HypothesisViolation: backward tail without an integrable analytic bound
    """
    _check_variant(variant)
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    if y.support_cells == 0:
        return TailThreshold(variant, threshold, 0.0, 0, 0.0)
    if variant == BACKWARD:
        _require_backward_tail(y, space)
    G = _tail_function(y, space, variant, window, nodes)

    if G(0.0) < threshold:
        root = 0.0
    else:
        hi = y.support_end if variant == FORWARD else max(1.0, y.support_end)
        while G(hi) >= threshold:
            hi *= 2.0
            if hi > MAX_TAIL_SEARCH:
                raise ConstructionError(f"no {variant} tail threshold below {MAX_TAIL_SEARCH:g}")
        root = optimize.brentq(lambda N: G(N) - threshold, 0.0, hi, xtol=1e-12)

    r = y.resolution
    cells = math.ceil(root * r)
    bound = G(cells / r)
    while bound >= threshold:
        cells += 1
        bound = G(cells / r)
    time = cells / r
    logger.debug(f"{variant} tail threshold {threshold:g}: N={root:.6g}, grid time {time:g}")
    return TailThreshold(variant, threshold, time, int(math.ceil(time)), bound)


# --------------------------------------------------------------------------
# The vector
# --------------------------------------------------------------------------

@dataclass(eq=False)
class FHCVector:
    """x = sum_{n <= horizon} int_n^{n+1} S_t z_n dt with z_n = y_l on A(l)."""
    x: GridFunction
    family: SeparatedFamily
    targets: Tuple[GridFunction, ...]
    thresholds: Tuple[float, ...]
    space: SpaceSpec
    horizon: int
    slack: float
    block_norm_sum: float
    truncation_bound: float
    smoothed: Tuple[GridFunction, ...] = field(default=(), repr=False)

    def __post_init__(self):
        if not self.smoothed:
            self.smoothed = tuple(smoothing(y) for y in self.targets)

    def target_of(self, n: int) -> Optional[GridFunction]:
        l = self.family.level_of(n)
        if l is None or n > self.horizon:
            return None
        return self.targets[l - 1]

    @property
    def max_support(self) -> float:
        return max(y.support_end for y in self.targets)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "weight": self.space.weight.describe(),
            "space": self.space.label(),
            "family": self.family.to_dict(),
            "thresholds": list(self.thresholds),
            "horizon": self.horizon,
            "slack": self.slack,
            "targets": [y.to_dict() for y in self.targets],
            "vector": self.x.to_dict(),
        }


def _level_thresholds(targets: Sequence[GridFunction], space: SpaceSpec, window: float,
                      nodes: int) -> List[float]:
    """N_l = max over lambda <= l of both tail thresholds of y_lambda at 1/(l 2^l)."""
    result = []
    for l in range(1, len(targets) + 1):
        level_bound = 1.0 / (l * 2 ** l)
        N = 0.0
        for y in targets[:l]:
            for variant in VARIANTS:
                N = max(N, tail_threshold(y, space, level_bound, variant, window, nodes).time)
        result.append(N)
    return result


def build_vector(targets: Sequence[GridFunction], space: SpaceSpec, horizon: int,
                 slack_constant: float = SLACK_CONSTANT, window: float = PETTIS_WINDOW,
                 nodes: int = QUADRATURE_NODES) -> FHCVector:
    """
    Construct the frequently hypercyclic vector for the given targets.

    Raises:
        ConstructionError: no targets, mixed grids, or no family member below the horizon
        HypothesisViolation: the weight is not integrable
    """
    if not targets:
        raise ConstructionError("at least one target is required")
    resolution = targets[0].resolution
    if any(y.resolution != resolution for y in targets):
        raise GridAlignmentError("all targets must share one grid")
    verdict = integral_test(space.weight, float(max(horizon, 1)))
    if verdict.verdict != Convergence.CONVERGES:
        raise HypothesisViolation(
            f"int rho = inf or undecided for {space.weight.kind} ({verdict.verdict.value}); "
            "the criterion needs an integrable weight")

    thresholds = _level_thresholds(targets, space, window, nodes)
    nu, running = [], 1
    for N in thresholds:
        running = max(running, int(math.ceil(N)))
        nu.append(running)
    try:
        family = build_family(nu, horizon)
    except FamilyError as e:
        raise ConstructionError(str(e)) from e

    pieces: List[GridFunction] = []
    block_norm_sum = 0.0
    for n, l in family.assignment():
        block = block_integral_S(targets[l - 1], n, space)
        block_norm_sum += norm(block, space)
        pieces.append(block)
    if not pieces:
        raise ConstructionError(f"horizon {horizon} includes no family element")
    total = np.zeros(max(len(b) for b in pieces))
    for block in pieces:
        total[:len(block)] += block.values
    x = GridFunction(resolution, total)

    truncation = 0.0
    for y in targets:
        if y.support_cells:
            truncation += pettis_tail_profile(y, space, BACKWARD, [horizon + 1.0], window, nodes)[0]
    tv_max = max(y.total_variation() for y in targets)
    slack = slack_constant * tv_max / resolution
    logger.info(f"Built vector: nu={tuple(nu)}, period={family.period}, {len(pieces)} blocks, "
                f"||x|| <= {block_norm_sum:.6g}, truncation <= {truncation:.3g}")
    return FHCVector(x, family, tuple(targets), tuple(thresholds), space, int(horizon),
                     slack, block_norm_sum, truncation)


# --------------------------------------------------------------------------
# Returns
# --------------------------------------------------------------------------

@dataclass
class OrbitDecomposition:
    """T_{n+1} x split into past forward blocks, the current target and future backward blocks."""
    past: GridFunction
    current: GridFunction
    future: GridFunction

    @property
    def total(self) -> GridFunction:
        return self.past + self.current + self.future


@dataclass
class LevelReturns:
    """Return-bound check for one level."""
    level: int
    nu: int
    period: int
    offset: int
    checked: int
    max_error: float
    worst_time: Optional[int]
    budget: float
    slack: float
    decomposition_defect: float = 0.0
    errors: List[Tuple[int, float]] = field(default_factory=list, repr=False)

    @property
    def passed(self) -> bool:
        return self.max_error < self.budget + self.slack


def decompose_orbit(v: FHCVector, n: int) -> OrbitDecomposition:
    """
    Split T_{n+1} x into its three sums.

    Blocks j < n turn into int_{n-j}^{n-j+1} T_s z_j ds, the block j = n into
    R z_n, and blocks j > n into int_{j-n-1}^{j-n} S_s z_j ds.
    """
    r = v.x.resolution
    past, current, future = GridFunction.zeros(r), GridFunction.zeros(r), GridFunction.zeros(r)
    for j, l in v.family.assignment(v.horizon):
        z = v.targets[l - 1]
        if j < n:
            past = past + block_integral_T(z, n - j)
        elif j == n:
            current = v.smoothed[l - 1]
        else:
            future = future + block_integral_S(z, j - n - 1, v.space)
    return OrbitDecomposition(past, current, future)


def _check_level(v: FHCVector, l: int, check_horizon: int) -> LevelReturns:
    u = v.smoothed[l - 1]
    times = v.family.level_set(l, check_horizon)
    errors = []
    for n in times:
        e = norm(translate(v.x, float(n + 1)) - u, v.space)
        errors.append((int(n), e))
    budget = 4.0 / 2 ** l
    report = LevelReturns(l, v.family.nu[l - 1], v.family.period, v.family.offsets[l - 1],
                          len(errors), 0.0, None, budget, v.slack, errors=errors)
    if errors:
        worst_n, worst = max(errors, key=lambda item: item[1])
        report.max_error, report.worst_time = worst, worst_n
        direct = translate(v.x, float(worst_n + 1))
        report.decomposition_defect = norm(decompose_orbit(v, worst_n).total - direct, v.space)
    if not report.passed:
        logger.warning(f"Level {l}: return error {report.max_error:.6g} exceeds "
                       f"{budget:g} + {v.slack:g} at n={report.worst_time}")
    else:
        logger.info(f"Level {l}: {len(errors)} returns, max error {report.max_error:.6g} < {budget:g}")
    return report


def verify_returns(v: FHCVector, check_horizon: Optional[int] = None, workers: int = 1) -> List[LevelReturns]:
    """
    Measure ||T_{n+1} x - R y_l|| for n in A(l), n <= check_horizon, per level.

    Levels are checked concurrently; reports come back ordered by level.

    Raises:
        ConstructionError: check horizon reaches into the truncated part of the series
    """
    limit = v.horizon - int(math.ceil(v.max_support))
    if check_horizon is None:
        check_horizon = limit
    if check_horizon > limit:
        raise ConstructionError(f"check horizon {check_horizon} exceeds {limit} "
                                "(construction horizon minus the target support)")
    levels = range(1, v.family.levels + 1)
    if workers <= 1:
        return [_check_level(v, l, check_horizon) for l in levels]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(lambda l: _check_level(v, l, check_horizon), levels))


# --------------------------------------------------------------------------
# Orbit scans and densities
# --------------------------------------------------------------------------

@dataclass
class OrbitReport:
    """Hits {t : ||T_t x - u|| < eps} on the scanned grid and their densities."""
    eps: float
    step: float
    horizon: float
    times: np.ndarray = field(repr=False)
    distances: np.ndarray = field(repr=False)
    hits: HitSet
    integer_hits: HitSet
    continuous: DensityEstimate
    discrete: DensityEstimate

    @property
    def min_distance(self) -> float:
        return float(self.distances.min()) if self.distances.size else math.inf


def _orbit_distances(x: GridFunction, u: GridFunction, space: SpaceSpec, shifts: np.ndarray) -> np.ndarray:
    """||T_{s h} x - u|| for integer cell shifts s, with one weight table for all shifts."""
    xv = x.values[:x.support_cells]
    uv = u.values[:u.support_cells]
    length = max(xv.size, uv.size)
    profile = space.weight.profile
    if space.is_lp:
        table = profile.cell_masses(x.resolution, length)
    else:
        table = profile.cell_midpoint_values(x.resolution, length)
    live = np.flatnonzero(table)
    cutoff = int(live[-1]) + 1 if live.size else 0
    xv = xv[:cutoff]
    n_u = min(uv.size, cutoff)

    out = np.empty(shifts.size)
    for i, s in enumerate(shifts):
        d = np.zeros(max(xv.size - s, n_u))
        if xv.size > s:
            d[:xv.size - s] = xv[s:]
        d[:n_u] -= uv[:n_u]
        d = np.abs(d)
        w = table[:d.size]
        if d.size == 0:
            out[i] = 0.0
        elif not space.is_lp:
            out[i] = float(np.max(d * w))
        elif space.p == 1.0:
            out[i] = float(np.dot(d, w))
        else:
            out[i] = float(np.dot(d ** space.p, w) ** (1.0 / space.p))
    return out


def _merge_hits(times: np.ndarray, step: float) -> List[Tuple[float, float]]:
    intervals: List[Tuple[float, float]] = []
    for t in times:
        a, b = float(t), float(t) + step
        if intervals and abs(intervals[-1][1] - a) < 1e-12:
            intervals[-1] = (intervals[-1][0], b)
        else:
            intervals.append((a, b))
    return intervals


def orbit_hit_density(x: GridFunction, u: GridFunction, eps: float, space: SpaceSpec, N: float,
                      step: float, tail_window: float = 0.0, workers: int = 1,
                      chunk: int = 2048) -> OrbitReport:
    """
    Scan ||T_t x - u|| on t = 0, step, ..., N and estimate the hit densities.

    Hits become intervals [t, t + step); integer hit times give the
    discrete estimate.  Chunks of times are scanned concurrently and
    reassembled in time order.
    """
    r = x.resolution
    step_cells = grid_cells(step, r)
    if step_cells == 0 or r % step_cells != 0:
        raise GridAlignmentError(f"orbit step {step:g} must be a grid multiple dividing 1")
    count = int(math.floor(N / step + 1e-9)) + 1
    shifts = np.arange(count, dtype=np.int64) * step_cells
    chunks = [shifts[i:i + chunk] for i in range(0, count, chunk)]
    if workers <= 1 or len(chunks) == 1:
        parts = [_orbit_distances(x, u, space, c) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            parts = list(executor.map(lambda c: _orbit_distances(x, u, space, c), chunks))
    distances = np.concatenate(parts) if parts else np.zeros(0)
    times = shifts / r

    hit_mask = distances < eps
    hit_times = times[hit_mask]
    hits = HitSet.from_intervals(_merge_hits(hit_times, step), N)
    integer_mask = hit_mask & (shifts % r == 0)
    integer_hits = HitSet.discrete((shifts[integer_mask] // r).tolist(), N)

    N_int = int(math.floor(N))
    continuous = lower_density_continuous(hits.intervals, N, tail_window)
    discrete = lower_density_discrete(integer_hits.points, N_int, int(min(tail_window, N_int)))
    logger.debug(f"orbit scan eps={eps:g}: {int(hit_mask.sum())}/{count} grid hits, "
                 f"densities {continuous.estimate:.4g} / {discrete.estimate:.4g}")
    return OrbitReport(eps, step, N, times, distances, hits, integer_hits, continuous, discrete)


@dataclass
class DensityTransfer:
    """Continuous hit density against delta_hat times the discrete one at a smaller radius."""
    eps: float
    delta_hat: float
    growth: float
    discrete_radius: float
    continuous: DensityEstimate
    discrete: DensityEstimate
    slack: float

    @property
    def lower_bound(self) -> float:
        return self.delta_hat * self.discrete.estimate - self.slack

    @property
    def holds(self) -> bool:
        return self.continuous.estimate >= self.lower_bound


def continuity_radius(u: GridFunction, space: SpaceSpec, radius: float, limit: float = 1.0) -> float:
    """Largest grid delta <= limit with ||T_s u - u|| < radius for all grid s <= delta."""
    r = u.resolution
    delta = 0.0
    for k in range(1, int(round(limit * r)) + 1):
        if norm(translate(u, k / r) - u, space) >= radius:
            break
        delta = k / r
    return delta


def density_transfer(x: GridFunction, u: GridFunction, eps: float, space: SpaceSpec, N: float,
                     step: float, tail_window: float = 0.0, workers: int = 1) -> DensityTransfer:
    """
    Compare continuous and discrete hit densities.

    Integer returns within eps / (2 G(delta_hat)) of u stay within eps for
    the following delta_hat time units, G the semigroup growth bound.
    """
    delta_hat = continuity_radius(u, space, eps / 2.0)
    growth = max(space.growth_bound(0.0), space.growth_bound(delta_hat))
    discrete_radius = eps / (2.0 * growth)
    continuous = orbit_hit_density(x, u, eps, space, N, step, tail_window, workers).continuous
    discrete = orbit_hit_density(x, u, discrete_radius, space, N, 1.0, tail_window, workers).discrete
    slack = 2.0 * (step + delta_hat) / N
    report = DensityTransfer(eps, delta_hat, growth, discrete_radius, continuous, discrete, slack)
    if not report.holds:
        logger.warning(f"Density transfer fails: {continuous.estimate:.6g} < {report.lower_bound:.6g}")
    return report


# --------------------------------------------------------------------------
# Periodic points
# --------------------------------------------------------------------------

@dataclass
class PeriodicPoint:
    """A near-periodic point z with its defects."""
    z: GridFunction
    period: int
    delta: float
    truncation: int
    periodic_defect: float
    approximation_defect: float
    smoothing_defect: float
    defect_bound: float
    tail_bound: float


def _forward_piece(y: GridFunction, start: int, width: int) -> GridFunction:
    """int_0^delta T_{c + s} y ds with c = start h, delta = width h."""
    return window_integral(y, start, start + width, max(len(y) - start, 0))


def _backward_piece(y: GridFunction, start: int, width: int, space: SpaceSpec) -> GridFunction:
    """int_0^delta S_{c - s} y ds with c = start h >= delta."""
    return window_integral(y, -start, -start + width, len(y) + start, space.fill_value(y))


def build_periodic_point(y: GridFunction, t: int, delta: float, K: int, space: SpaceSpec,
                         window: float = PETTIS_WINDOW, nodes: int = QUADRATURE_NODES) -> PeriodicPoint:
    """
    z = delta^{-1} [sum_{k=1}^K int_0^delta S_{kt-s} y ds + int_0^delta T_s y ds
                    + sum_{k>=1} int_0^delta T_{kt+s} y ds].

    The forward series stops by itself past the support of y.

    Raises:
        HypothesisViolation: the weight is not integrable
    """
    if int(t) != t or t < 1:
        raise ValueError(f"period must be a positive integer, got {t}")
    if not 0 < delta <= 1:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    if K < 0:
        raise ValueError("truncation must be nonnegative")
    r = y.resolution
    width = grid_cells(delta, r)
    period_cells = int(t) * r
    if y.support_cells:
        verdict = integral_test(space.weight, 100.0)
        if verdict.verdict != Convergence.CONVERGES:
            raise HypothesisViolation(f"periodic points need an integrable weight; "
                                      f"int rho is {verdict.verdict.value} for {space.weight.kind}")
        _require_backward_tail(y, space)

    base = _forward_piece(y, 0, width)
    total = GridFunction(r, base.values.copy())
    for k in range(1, K + 1):
        total = total + _backward_piece(y, k * period_cells, width, space)
    k = 1
    while k * period_cells < len(y):
        total = total + _forward_piece(y, k * period_cells, width)
        k += 1
    z = total.scaled(1.0 / delta)
    mean = base.scaled(1.0 / delta)

    periodic_defect = norm(translate(z, float(t)) - z, space)
    approximation_defect = norm(z - mean, space)
    smoothing_defect = norm(mean - y, space)
    defect_bound = tail_bound = 0.0
    if y.support_cells:
        # T_t z - z is the last backward piece; the omitted pieces start one period later
        bounds = pettis_tail_profile(y, space, BACKWARD, [K * t - delta, (K + 1) * t - delta], window, nodes)
        defect_bound = bounds[0] / delta if K >= 1 else math.inf
        tail_bound = bounds[1] / delta
    logger.info(f"Periodic point t={t}, delta={delta:g}, K={K}: ||T_t z - z|| = {periodic_defect:.3g}")
    return PeriodicPoint(z, int(t), delta, K, periodic_defect, approximation_defect,
                         smoothing_defect, defect_bound, tail_bound)


# --------------------------------------------------------------------------
# Operator-level series
# --------------------------------------------------------------------------

@dataclass
class DiscreteSeriesReport:
    """Partial sums of ||T_n u|| and ||S_n u|| for u = R y."""
    horizon: int
    forward_sums: List[float]
    backward_sums: List[float]
    forward_terms: int
    backward_remainder: float
    identity_checked: int
    identity_holds: bool
    verdict: Convergence

    @property
    def forward_partial(self) -> float:
        return self.forward_sums[-1] if self.forward_sums else 0.0

    @property
    def backward_partial(self) -> float:
        return self.backward_sums[-1] if self.backward_sums else 0.0


def discrete_series_check(y: GridFunction, space: SpaceSpec, horizon: int, identity_limit: int = 50,
                          divergence_threshold: float = 1e12, strict: bool = True) -> DiscreteSeriesReport:
    """
    Evidence for the unconditional convergence of sum T_n u and sum S_n u.

    Also checks S_n u = (S_1)^n u exactly for n <= identity_limit.  With
    ``strict`` a non-integrable weight is refused; otherwise the report
    carries the divergence evidence.
    """
    if strict:
        verdict = integral_test(space.weight, float(max(horizon, 1)))
        if verdict.verdict != Convergence.CONVERGES:
            raise HypothesisViolation(f"weight {space.weight.kind} is not integrable")
    u = smoothing(y)
    n = np.arange(1, horizon + 1, dtype=float)
    forward = orbit_norms(u, n, space, backward=False)
    backward = orbit_norms(u, n, space, backward=True)
    forward_sums = np.cumsum(forward).tolist()
    backward_sums = np.cumsum(backward).tolist()
    forward_terms = int(np.count_nonzero(forward))

    iterate, holds, checked = u, True, min(identity_limit, horizon)
    for k in range(1, checked + 1):
        iterate = backshift(iterate, 1.0, space)
        if not iterate.equals(backshift(u, float(k), space)):
            holds = False
            logger.error(f"S_{k} u differs from (S_1)^{k} u")
            break

    remainder = math.inf
    tail = space.weight.profile.tail()
    if u.support_cells and tail is not None and tail.upper_nonincreasing:
        start = float(horizon + 1)
        if start >= tail.horizon:
            v = np.abs(u.values[:u.support_cells])
            if space.is_lp:
                scale = float(np.sum(v ** space.p) * u.step) ** (1.0 / space.p)
                first = float(tail.upper(np.array(start))) ** (1.0 / space.p)
                remainder = scale * (first + tail.upper_root_integral(start, space.p))
            else:
                remainder = float(v.max()) * (float(tail.upper(np.array(start))) + tail.upper_integral(start))
    elif not u.support_cells:
        remainder = 0.0

    partial = backward_sums[-1] if backward_sums else 0.0
    if math.isfinite(remainder):
        verdict = Convergence.CONVERGES
    elif partial > divergence_threshold or series_test(space.weight, 0.0, 1.0, horizon).verdict == Convergence.DIVERGES:
        verdict = Convergence.DIVERGES
    else:
        verdict = Convergence.INCONCLUSIVE
    return DiscreteSeriesReport(horizon, forward_sums, backward_sums, forward_terms, remainder,
                                checked, holds, verdict)
