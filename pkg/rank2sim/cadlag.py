"""
Event-driven algebra of cadlag paths that never jump downwards.

Two representations:
- JumpDriftPath: start + drift * t + finitely many positive jumps, evaluated exactly.
- GridPath: values on a uniform grid (piecewise constant from the left between grid
  points) plus an exact overlay of positive jumps.

On top of these: running minimum / first passage (L and U), monotone composition,
pointwise sums, excursions above the running minimum, excursion marks and the
goodness diagnostics used to monitor limit paths.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from rank2sim.errors import DownwardJump, HorizonMismatch, OutOfDomain

log = logging.getLogger(__name__)

INF = math.inf
# relative slack when checking that a composition did not create a downward jump
JUMP_SLACK = 1e-12


def _merge_jumps(times, sizes) -> tuple[np.ndarray, np.ndarray]:
    times = np.asarray(times, dtype=float).ravel()
    sizes = np.asarray(sizes, dtype=float).ravel()
    if times.shape != sizes.shape:
        raise ValueError(f'jump times/sizes length mismatch: {times.size} vs {sizes.size}')
    if times.size == 0:
        return np.zeros(0), np.zeros(0)
    order = np.argsort(times, kind='stable')
    times, sizes = times[order], sizes[order]
    uniq, first = np.unique(times, return_index=True)
    if uniq.size != times.size:
        sizes = np.add.reduceat(sizes, first)
        times = uniq
    keep = sizes > 0
    return times[keep], sizes[keep]


# =============================================================================
# JUMP + DRIFT PATHS
# =============================================================================

@dataclass(frozen=True, eq=False)
class JumpDriftPath:
    """start + drift * t + sum of jumps with time <= t, on [0, horizon].

    Simultaneous jumps are merged and zero-size jumps dropped at construction.
    ``truncated`` marks a path whose true domain ended at ``horizon`` (the path
    is undefined, conventionally +inf, from the horizon on).
    """

    drift: float
    times: np.ndarray
    sizes: np.ndarray
    horizon: float
    start: float = 0.0
    truncated: bool = False
    _cum: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.horizon < 0:
            raise ValueError(f'horizon must be >= 0, got {self.horizon}')
        sizes = np.asarray(self.sizes, dtype=float).ravel()
        if np.any(sizes < 0):
            raise DownwardJump(f'negative jump size {sizes.min():.6g}')
        times, sizes = _merge_jumps(self.times, sizes)
        if times.size and (times[0] < 0 or times[-1] > self.horizon):
            raise OutOfDomain(f'jump times must lie in [0, {self.horizon}], '
                              f'got [{times[0]}, {times[-1]}]')
        for arr in (times, sizes):
            arr.setflags(write=False)
        object.__setattr__(self, 'times', times)
        object.__setattr__(self, 'sizes', sizes)
        object.__setattr__(self, 'drift', float(self.drift))
        object.__setattr__(self, 'horizon', float(self.horizon))
        object.__setattr__(self, 'start', float(self.start))
        object.__setattr__(self, '_cum', np.concatenate([[0.0], np.cumsum(sizes)]))

    @classmethod
    def from_jumps(cls, drift: float, jumps, horizon: float, start: float = 0.0) -> JumpDriftPath:
        """Build from an iterable of (time, size) pairs."""
        jumps = list(jumps)
        times = [t for t, _ in jumps]
        sizes = [s for _, s in jumps]
        return cls(drift, np.array(times, dtype=float), np.array(sizes, dtype=float), horizon, start)

    @classmethod
    def zero(cls, horizon: float) -> JumpDriftPath:
        return cls(0.0, np.zeros(0), np.zeros(0), horizon)

    @property
    def n_jumps(self) -> int:
        return int(self.times.size)

    @property
    def total_jump(self) -> float:
        return float(self._cum[-1])

    def is_non_decreasing(self) -> bool:
        return self.drift >= 0

    # ── evaluation ──

    def _check(self, t):
        t_arr = np.asarray(t, dtype=float)
        if np.any(t_arr < 0) or np.any(t_arr > self.horizon):
            raise OutOfDomain(f't outside [0, {self.horizon}]')
        return t_arr

    def _value(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.times, t, side='right')
        return self.start + self.drift * t + self._cum[idx]

    def _left(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.times, t, side='left')
        return self.start + self.drift * t + self._cum[idx]

    def value(self, t):
        """Right-continuous value at t (scalar or array)."""
        out = self._value(self._check(t))
        return float(out) if out.ndim == 0 else out

    def left(self, t):
        """Left limit at t; at t = 0 this is ``start``."""
        out = self._left(self._check(t))
        return float(out) if out.ndim == 0 else out

    def jump_values(self) -> tuple[np.ndarray, np.ndarray]:
        """(left limits, right values) at every jump time."""
        base = self.start + self.drift * self.times
        return base + self._cum[:-1], base + self._cum[1:]

    def scaled(self, c: float) -> JumpDriftPath:
        """c * path for c > 0."""
        if c <= 0:
            raise ValueError(f'scale must be > 0, got {c}')
        return JumpDriftPath(c * self.drift, self.times, c * self.sizes, self.horizon,
                             c * self.start, self.truncated)

    def with_horizon(self, horizon: float) -> JumpDriftPath:
        return restrict(self, horizon) if horizon <= self.horizon else JumpDriftPath(
            self.drift, self.times, self.sizes, horizon, self.start, self.truncated)


# =============================================================================
# GRID PATHS
# =============================================================================

@dataclass(frozen=True, eq=False)
class GridPath:
    """Grid values at k * step (k = 0..n) plus an exact positive jump overlay.

    Between grid points the grid part is constant (value of the grid point to
    the left); overlay jumps are added at their exact times.
    """

    step: float
    values: np.ndarray
    jump_times: np.ndarray = field(default_factory=lambda: np.zeros(0))
    jump_sizes: np.ndarray = field(default_factory=lambda: np.zeros(0))
    truncated: bool = False
    grid: np.ndarray = field(init=False, repr=False)
    _cum: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError(f'grid step must be > 0, got {self.step}')
        values = np.array(self.values, dtype=float).ravel()
        if values.size == 0:
            raise ValueError('grid path needs at least one grid value')
        grid = np.arange(values.size) * float(self.step)
        times, sizes = _merge_jumps(self.jump_times, self.jump_sizes)
        if times.size and (times[0] < 0 or times[-1] > grid[-1]):
            raise OutOfDomain(f'overlay jumps outside [0, {grid[-1]}]')
        for arr in (values, grid, times, sizes):
            arr.setflags(write=False)
        object.__setattr__(self, 'values', values)
        object.__setattr__(self, 'grid', grid)
        object.__setattr__(self, 'jump_times', times)
        object.__setattr__(self, 'jump_sizes', sizes)
        object.__setattr__(self, '_cum', np.concatenate([[0.0], np.cumsum(sizes)]))

    @property
    def horizon(self) -> float:
        return float(self.grid[-1])

    def _check(self, t):
        t_arr = np.asarray(t, dtype=float)
        if np.any(t_arr < 0) or np.any(t_arr > self.horizon):
            raise OutOfDomain(f't outside [0, {self.horizon}]')
        return t_arr

    def _value(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        k = np.searchsorted(self.grid, t, side='right') - 1
        return self.values[k] + self._cum[np.searchsorted(self.jump_times, t, side='right')]

    def _left(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        k = np.maximum(np.searchsorted(self.grid, t, side='left') - 1, 0)
        return self.values[k] + self._cum[np.searchsorted(self.jump_times, t, side='left')]

    def value(self, t):
        out = self._value(self._check(t))
        return float(out) if out.ndim == 0 else out

    def left(self, t):
        out = self._left(self._check(t))
        return float(out) if out.ndim == 0 else out

    def events(self) -> tuple[np.ndarray, np.ndarray]:
        """Event times (grid points and overlay jumps) and the path value at each.

        The path is constant between consecutive events.
        """
        times = np.union1d(self.grid, self.jump_times)
        return times, self._value(times)


Path = JumpDriftPath | GridPath


def eval_path(path: Path, t):
    """Right-continuous value of ``path`` at ``t``."""
    return path.value(t)


def eval_left(path: Path, t):
    """Left limit of ``path`` at ``t``."""
    return path.left(t)


# =============================================================================
# PATH ARITHMETIC
# =============================================================================

def _same_horizon(h1: float, h2: float) -> bool:
    return abs(h1 - h2) <= 1e-12 * max(1.0, abs(h1), abs(h2))


def add(p1: Path, p2: Path) -> Path:
    """Pointwise sum of two paths on the same horizon; jumps are merged."""
    if not _same_horizon(p1.horizon, p2.horizon):
        raise HorizonMismatch(f'cannot add paths with horizons {p1.horizon} and {p2.horizon}')
    if isinstance(p1, JumpDriftPath) and isinstance(p2, JumpDriftPath):
        return JumpDriftPath(p1.drift + p2.drift,
                             np.concatenate([p1.times, p2.times]),
                             np.concatenate([p1.sizes, p2.sizes]),
                             p1.horizon, p1.start + p2.start, p1.truncated or p2.truncated)
    if isinstance(p1, GridPath) and isinstance(p2, GridPath):
        if p1.step != p2.step or p1.values.size != p2.values.size:
            raise HorizonMismatch('grid paths must share step and grid length')
        return GridPath(p1.step, p1.values + p2.values,
                        np.concatenate([p1.jump_times, p2.jump_times]),
                        np.concatenate([p1.jump_sizes, p2.jump_sizes]),
                        p1.truncated or p2.truncated)
    grid, exact = (p1, p2) if isinstance(p1, GridPath) else (p2, p1)
    # drift and start fold into the grid values, jumps into the overlay
    return GridPath(grid.step, grid.values + exact.start + exact.drift * grid.grid,
                    np.concatenate([grid.jump_times, exact.times]),
                    np.concatenate([grid.jump_sizes, exact.sizes]),
                    grid.truncated or exact.truncated)


def restrict(path: Path, horizon: float) -> Path:
    """The same path on the shorter domain [0, horizon]."""
    if horizon > path.horizon:
        raise OutOfDomain(f'cannot restrict horizon {path.horizon} to {horizon}')
    if isinstance(path, JumpDriftPath):
        keep = path.times <= horizon
        return JumpDriftPath(path.drift, path.times[keep], path.sizes[keep], horizon,
                             path.start, path.truncated)
    n = int(np.searchsorted(path.grid, horizon, side='right'))
    keep = path.jump_times <= path.grid[n - 1]
    return GridPath(path.step, path.values[:n], path.jump_times[keep], path.jump_sizes[keep],
                    path.truncated)


# =============================================================================
# EXCURSIONS ABOVE THE RUNNING MINIMUM
# =============================================================================

@dataclass(frozen=True, eq=False)
class ExcursionSet:
    """Disjoint intervals (l_j, r_j), sorted by l, on [0, horizon].

    ``censored`` is set when the last excursion was still open at the horizon
    (its right endpoint is then the horizon).
    """

    left: np.ndarray
    right: np.ndarray
    horizon: float
    censored: bool = False

    def __post_init__(self):
        object.__setattr__(self, 'left', np.asarray(self.left, dtype=float))
        object.__setattr__(self, 'right', np.asarray(self.right, dtype=float))

    def __len__(self) -> int:
        return int(self.left.size)

    @property
    def lengths(self) -> np.ndarray:
        return self.right - self.left

    @property
    def total_length(self) -> float:
        return float(np.sum(self.lengths))

    def intervals(self) -> list[tuple[float, float]]:
        return list(zip(self.left.tolist(), self.right.tolist()))


def extract_excursions(path: Path, resolution: float | None = None) -> ExcursionSet:
    """Maximal intervals of {t : path(t) > inf_{s<=t} path(s)}.

    Exact for JumpDriftPath; for GridPath an excursion closes at the first event
    where the path is back at (or below) its running minimum, so endpoints carry
    the grid resolution.
    """
    if isinstance(path, GridPath):
        return _grid_excursions(path)
    return _jump_drift_excursions(path)


def _jump_drift_excursions(path: JumpDriftPath) -> ExcursionSet:
    T = path.horizon
    if path.drift > 0:
        # strictly increasing between jumps: above the initial value on (0, T]
        if T > 0:
            return ExcursionSet(np.array([0.0]), np.array([T]), T, censored=True)
        return ExcursionSet(np.zeros(0), np.zeros(0), T)
    times = path.times
    if path.drift == 0:
        first = times[(times > 0) & (times < T)]
        if first.size:
            return ExcursionSet(first[:1], np.array([T]), T, censored=True)
        return ExcursionSet(np.zeros(0), np.zeros(0), T)

    speed = -path.drift
    cum = path._cum
    lefts, rights = [], []
    open_l, open_k, open_r = None, 0, 0.0
    for i, tau in enumerate(times.tolist()):
        if open_l is not None and tau <= open_r:
            open_r = open_l + (cum[i + 1] - cum[open_k]) / speed
            continue
        if open_l is not None:
            lefts.append(open_l)
            rights.append(open_r)
            open_l = None
        if tau == 0.0:
            # a jump at time 0 only raises the initial level
            continue
        open_l, open_k = tau, i
        open_r = tau + (cum[i + 1] - cum[i]) / speed
    censored = False
    # a jump exactly at T opens nothing inside [0, T]
    if open_l is not None and open_l < T:
        lefts.append(open_l)
        if open_r > T:
            rights.append(T)
            censored = True
        else:
            rights.append(open_r)
    return ExcursionSet(np.array(lefts), np.array(rights), T, censored)


def _grid_excursions(path: GridPath) -> ExcursionSet:
    times, vals = path.events()
    above = vals > np.minimum.accumulate(vals)
    if not above.any():
        return ExcursionSet(np.zeros(0), np.zeros(0), path.horizon)
    padded = np.concatenate([[False], above, [False]]).astype(np.int8)
    edges = np.diff(padded)
    starts = np.flatnonzero(edges == 1)
    stops = np.flatnonzero(edges == -1)
    censored = bool(stops[-1] == times.size)
    ends = np.append(times, path.horizon)[stops]
    lefts = times[starts]
    keep = ends > lefts
    return ExcursionSet(lefts[keep], ends[keep], path.horizon, censored and bool(keep[-1]))


def lengths_desc(e: ExcursionSet) -> np.ndarray:
    """Excursion lengths sorted descending; equal lengths keep left-endpoint order."""
    lengths = e.lengths
    order = np.argsort(-lengths, kind='stable')
    return lengths[order]


@dataclass(frozen=True, eq=False)
class ExcursionMarks:
    left: np.ndarray
    length: np.ndarray
    mark: np.ndarray

    def __len__(self) -> int:
        return int(self.left.size)

    def triples(self) -> list[tuple[float, float, float]]:
        return list(zip(self.left.tolist(), self.length.tolist(), self.mark.tolist()))


def excursion_marks(e: ExcursionSet, phi: Path) -> ExcursionMarks:
    """(l, r - l, phi(r) - phi(l-)) for every excursion, in the order of ``e``.

    Marks of excursions reaching past phi's domain are NaN.
    """
    mark = np.full(len(e), np.nan)
    inside = e.right <= phi.horizon
    if inside.any():
        mark[inside] = phi._value(e.right[inside]) - phi._left(e.left[inside])
    return ExcursionMarks(e.left.copy(), e.lengths, mark)


# =============================================================================
# RUNNING MINIMUM AND FIRST PASSAGE
# =============================================================================

@dataclass(frozen=True, eq=False)
class RunningMin:
    """L(t) = -inf_{s<=t} f(s) and its generalized inverse U(y) = inf{t : L(t) > y}.

    ``passage`` is U as a JumpDriftPath in the level variable y: drift 1/|drift(f)|
    and one jump per excursion of f, located at the level where the excursion
    starts, of size the excursion length. U is +inf from ``passage.horizon`` on.
    """

    path: JumpDriftPath
    excursions: ExcursionSet
    passage: JumpDriftPath

    def level(self, t):
        """L(t)."""
        t = np.asarray(self.path._check(t), dtype=float)
        lo = self.path._value(t)
        idx = np.searchsorted(self.excursions.left, t, side='right') - 1
        inside = np.zeros(t.shape, dtype=bool)
        floor = lo.copy()
        if len(self.excursions):
            valid = idx >= 0
            j = np.where(valid, idx, 0)
            last = valid & self.excursions.censored & (j == len(self.excursions) - 1)
            inside = valid & ((t < self.excursions.right[j]) | last)
            floor = np.where(inside, self.path._left(self.excursions.left[j]), lo)
        out = -np.minimum(floor, self.path.start)
        return float(out) if out.ndim == 0 else out

    def first_passage(self, y):
        """U(y); +inf beyond the simulated range."""
        y = np.asarray(y, dtype=float)
        out = np.full(y.shape, INF)
        ok = (y >= 0) & (y < self.passage.horizon)
        out[ok] = self.passage._value(y[ok])
        out[y < 0] = 0.0
        return float(out) if out.ndim == 0 else out

    def hitting(self, v):
        """tau(v) = inf{t : f(t-) = -v}, the left-continuous version U(v-)."""
        v = np.asarray(v, dtype=float)
        out = np.full(v.shape, INF)
        out[v <= 0] = 0.0
        ok = (v > 0) & (v <= self.passage.horizon)
        out[ok] = self.passage._left(v[ok])
        return float(out) if out.ndim == 0 else out


def running_min(path: JumpDriftPath) -> RunningMin:
    """Running minimum functional L of ``path`` together with its inverse U."""
    if path.start != 0:
        raise ValueError(f'running_min expects a path started at 0, got start={path.start}')
    exc = extract_excursions(path)
    if path.drift >= 0:
        empty = JumpDriftPath(0.0, np.zeros(0), np.zeros(0), 0.0, truncated=True)
        return RunningMin(path, exc, empty)
    speed = -path.drift
    levels = -path._left(exc.left)
    lengths = exc.lengths
    if exc.censored:
        top = float(levels[-1])
        levels, lengths = levels[:-1], lengths[:-1]
        truncated = True
    else:
        top = float(-min(path._value(path.horizon), 0.0))
        truncated = False
    passage = JumpDriftPath(1.0 / speed, levels, lengths, top, truncated=truncated)
    return RunningMin(path, exc, passage)


def first_passage(path: JumpDriftPath, y):
    """U(y) = inf{t : L(t) > y}, +inf if L never exceeds y before the horizon."""
    return running_min(path).first_passage(y)


# =============================================================================
# MONOTONE COMPOSITION
# =============================================================================

def _segments(path: JumpDriftPath) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Start times, start values and end (left-limit) values of the inter-jump segments."""
    seg_t = np.concatenate([[0.0], path.times])
    seg_end_t = np.append(path.times, path.horizon)
    start_v = path._value(seg_t)
    end_v = path._left(seg_end_t)
    end_v[-1] = path._value(path.horizon)
    return seg_t, start_v, end_v


def first_reach(path: JumpDriftPath, levels, strict: bool = False) -> np.ndarray:
    """inf{t : path(t) >= y} (or > y when ``strict``) for a non-decreasing path; +inf if never."""
    levels = np.asarray(levels, dtype=float)
    seg_t, start_v, end_v = _segments(path)
    side = 'right' if strict else 'left'
    j = np.searchsorted(end_v, levels, side=side)
    out = np.full(levels.shape, INF)
    ok = j < seg_t.size
    jj = j[ok]
    lv = levels[ok]
    reached = (start_v[jj] > lv) if strict else (start_v[jj] >= lv)
    t = np.where(reached, seg_t[jj],
                 seg_t[jj] + (lv - start_v[jj]) / (path.drift if path.drift > 0 else 1.0))
    out[ok] = t
    return out


def compose_monotone(outer: JumpDriftPath, inner: JumpDriftPath) -> JumpDriftPath:
    """outer o inner for a non-decreasing ``inner``, computed event by event.

    ``outer`` must not decrease across the range skipped by any jump of
    ``inner`` (drift >= 0 suffices, as for U2 and X12 in the exploration); a
    composition that would jump downwards raises DownwardJump.

    Output events are the jumps of ``inner`` and the preimages under ``inner`` of
    the jumps of ``outer``. When ``inner`` leaves outer's domain the output is
    cut at that time and flagged ``truncated``.
    """
    if inner.drift < 0:
        raise ValueError(f'inner path must be non-decreasing, got drift {inner.drift}')
    a, b = outer.drift, inner.drift

    limit = float(first_reach(inner, outer.horizon, strict=not outer.truncated))
    truncated = inner.truncated
    horizon = inner.horizon
    if limit <= horizon:
        horizon, truncated = limit, True
        log.debug(f'[compose] inner leaves outer domain at t={limit:.6g}')

    def in_domain(t):
        return (t > 0) & ((t < horizon) if truncated else (t <= horizon))

    events = inner.times[in_domain(inner.times)]
    pre_t = pre_s = np.zeros(0)
    if b > 0 and outer.n_jumps:
        reach = first_reach(inner, outer.times)
        ok = np.isfinite(reach) & in_domain(reach)
        pre_t, pre_s = reach[ok], outer.times[ok]
        events = np.union1d(events, pre_t)

    start = float(outer._value(inner._value(0.0)))
    if events.size == 0:
        return JumpDriftPath(a * b, np.zeros(0), np.zeros(0), horizon, start, truncated)

    inner_right = inner._value(events)
    inner_left = inner._left(events)
    if pre_t.size:
        # inner(t*-) <= s <= inner(t*) holds exactly at a preimage t* of an outer jump s
        at = np.searchsorted(events, pre_t)
        np.maximum.at(inner_right, at, pre_s)
        np.minimum.at(inner_left, at, pre_s)
    right = outer._value(inner_right)
    left = outer._left(inner_left) if b > 0 else outer._value(inner_left)
    delta = right - left
    scale = max(1.0, float(np.max(np.abs(right))))
    if np.any(delta < -JUMP_SLACK * scale):
        raise DownwardJump(f'outer decreases across a jump of inner: composed jump {delta.min():.6g}')
    keep = delta > 0
    return JumpDriftPath(a * b, events[keep], delta[keep], horizon, start, truncated)


# =============================================================================
# GOODNESS DIAGNOSTICS
# =============================================================================

DEFAULT_EPS_GRID = (1e-3, 1e-2, 1e-1, 1.0)


@dataclass(frozen=True)
class GoodnessReport:
    """Finite-data reading of the conditions under which excursion maps behave well.

    ``endpoint_jump`` and ``complement_measure`` are exact statements about the
    path; the gap statistics and the ladder property are heuristics.
    """

    excursion_count: int
    endpoint_jump: float
    complement_measure: float
    long_excursions: dict[float, int]
    min_endpoint_gap: float
    close_endpoint_pairs: int
    ladder_decreasing: bool
    first_negative_time: float
    flags: tuple[str, ...]

    def as_dict(self) -> dict:
        return {
            'excursion_count': self.excursion_count,
            'endpoint_jump': self.endpoint_jump,
            'complement_measure': self.complement_measure,
            'long_excursions': {str(k): v for k, v in self.long_excursions.items()},
            'min_endpoint_gap': self.min_endpoint_gap,
            'close_endpoint_pairs': self.close_endpoint_pairs,
            'ladder_decreasing': self.ladder_decreasing,
            'first_negative_time': self.first_negative_time,
            'flags': list(self.flags),
        }


def _first_negative(path: Path) -> float:
    if isinstance(path, GridPath):
        times, vals = path.events()
        neg = np.flatnonzero(vals < 0)
        return float(times[neg[0]]) if neg.size else INF
    if path.start < 0:
        return 0.0
    if path.drift >= 0:
        return INF
    seg_t, start_v, end_v = _segments(path)
    hit = np.flatnonzero(end_v < 0)
    if not hit.size:
        return INF
    j = hit[0]
    # strictly below zero right after the crossing time
    return float(seg_t[j] + max(start_v[j], 0.0) / -path.drift)


def goodness_report(path: Path, horizon: float | None = None, tol: float = 1e-3,
                    eps_grid=DEFAULT_EPS_GRID) -> GoodnessReport:
    if horizon is not None and horizon < path.horizon:
        path = restrict(path, horizon)
    T = path.horizon
    exc = extract_excursions(path)
    closed_right = exc.right[:-1] if exc.censored else exc.right

    if closed_right.size:
        jumps = np.abs(path._value(closed_right) - path._left(closed_right))
        endpoint_jump = float(jumps.max())
        ladder_vals = path._value(closed_right)
        ladder = bool(np.all(np.diff(ladder_vals) < 0))
    else:
        endpoint_jump, ladder = 0.0, True

    complement = max(T - exc.total_length, 0.0)
    lengths = exc.lengths
    long_counts = {float(eps): int(np.sum(lengths >= eps)) for eps in eps_grid}

    if closed_right.size > 1:
        gaps = np.diff(np.sort(closed_right))
        min_gap = float(gaps.min())
        close_pairs = int(np.sum(gaps < tol))
    else:
        min_gap, close_pairs = INF, 0

    flags = []
    if complement > tol * T:
        flags.append('complement_positive')
    if endpoint_jump > tol:
        flags.append('endpoint_jump')
    if not ladder:
        flags.append('ladder_violated')
    if exc.censored:
        flags.append('censored_last_excursion')
    return GoodnessReport(len(exc), endpoint_jump, complement, long_counts, min_gap, close_pairs,
                          ladder, _first_negative(path), tuple(flags))
