"""
Simulation of thinned Levy processes and the three regime limits.

    J^theta(t)   = sum_p theta_p (1[xi_p <= t] - theta_p t),   xi_p ~ Exp(theta_p)
    W(t)         = sqrt(beta) B(t) + lambda t - beta t^2 / 2 + J^theta(t)

J is exact. W is a GridPath: the Brownian part lives on a uniform grid, drift and
parabola are exact at grid points, and the jumps of J are overlaid at their exact
times. Excursion lengths above the running minimum give zeta.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from rank2sim.cadlag import (
    GridPath,
    JumpDriftPath,
    extract_excursions,
    goodness_report,
    lengths_desc,
)
from rank2sim.errors import WrongRegime
from rank2sim.params import (
    BipartiteParams,
    ClassicParams,
    InteractingParams,
    LimitTriple,
    RegimeParams,
    merge_sorted,
)

log = logging.getLogger(__name__)

THETA_REL_TAIL = 1e-6
HORIZON_FACTOR = 15.0
STEP_FRACTION = 1e-4
MAX_DOUBLINGS = 3
# excursions ending within the last zeta_1 of the horizon must stay below this share of zeta_1
ADEQUACY_FRACTION = 0.05


# =============================================================================
# PARAMETERS
# =============================================================================

def truncate_theta(theta, rel_tail: float = THETA_REL_TAIL) -> tuple[np.ndarray, float]:
    """Keep the leading entries until the cubic tail drops below ``rel_tail`` of the total.

    Returns the kept entries and the cubic mass of the dropped ones.
    """
    theta = np.sort(np.asarray(theta, dtype=float).ravel())[::-1]
    theta = theta[theta > 0]
    if theta.size == 0:
        return theta, 0.0
    cubes = theta ** 3
    total = float(cubes.sum())
    # tail[k] = sum of cubes after the first k entries
    tail = total - np.concatenate([[0.0], np.cumsum(cubes)])
    keep = int(np.argmax(tail < rel_tail * total))
    return theta[:keep], float(max(tail[keep], 0.0))


def default_horizon(params: LimitTriple) -> float:
    """15 x the scale of the largest excursion."""
    if params.beta > 0:
        scale = params.beta ** (-1 / 3) * (1.0 + max(params.lam * params.beta ** (-2 / 3), 0.0))
    else:
        # no parabola: the jumps and a positive drift set the scale
        scale = 1.0 + float(np.sum(params.theta)) + max(params.lam, 0.0)
    return HORIZON_FACTOR * scale


def default_step(T: float) -> float:
    return STEP_FRACTION * T


def _grid(h: float, T: float) -> tuple[int, float]:
    if not (h > 0 and T > 0):
        raise ValueError(f'grid step and horizon must be > 0, got h={h}, T={T}')
    n = max(1, int(math.ceil(T / h - 1e-9)))
    return n, T / n


# =============================================================================
# SAMPLES
# =============================================================================

@dataclass(frozen=True, eq=False)
class ThinnedLevySample:
    """One realisation of W^{beta,theta,lambda} on [0, T].

    ``params`` carries the kept theta entries; ``tail_bound`` is the cubic mass
    of the dropped ones.
    """

    params: LimitTriple
    path: GridPath
    horizon: float
    step: float
    tail_bound: float

    @property
    def kept(self) -> int:
        return int(self.params.theta.size)


@dataclass(frozen=True, eq=False)
class ZetaSample:
    """Excursion lengths of one limit path, sorted descending."""

    lengths: np.ndarray
    horizon: float
    step: float
    adequate: bool
    doublings: int = 0

    def top(self, k: int) -> np.ndarray:
        out = np.zeros(k)
        m = min(k, self.lengths.size)
        out[:m] = self.lengths[:m]
        return out


def simulate_J(theta, T: float, rng: np.random.Generator) -> JumpDriftPath:
    """Exact J^theta on [0, T]: drift -sum theta^2, jumps theta_p at Exp(theta_p) clocks."""
    theta = np.asarray(theta, dtype=float).ravel()
    theta = theta[theta > 0]
    if theta.size == 0:
        return JumpDriftPath.zero(T)
    clocks = rng.exponential(1.0 / theta)
    keep = clocks <= T
    return JumpDriftPath(-float(np.sum(theta ** 2)), clocks[keep], theta[keep], T)


def simulate_W(params: LimitTriple, h: float | None, T: float | None,
               rng: np.random.Generator) -> ThinnedLevySample:
    """W^{beta,theta,lambda} on a grid of step about ``h`` over [0, T]."""
    T = default_horizon(params) if T is None else T
    n, step = _grid(default_step(T) if h is None else h, T)
    theta, tail = truncate_theta(params.theta)
    kept = LimitTriple(params.beta, theta, params.lam, params.tail_bound + tail, params.in_domain)

    t = np.arange(n + 1) * step
    values = (params.lam - float(np.sum(theta ** 2))) * t - 0.5 * params.beta * t ** 2
    if params.beta > 0:
        increments = rng.normal(0.0, math.sqrt(params.beta * step), n)
        values[1:] += np.cumsum(increments)
    J = simulate_J(theta, T, rng)
    path = GridPath(step, values, J.times, J.sizes)
    return ThinnedLevySample(kept, path, T, step, kept.tail_bound)


def _adequate(lengths_by_left: np.ndarray, rights: np.ndarray, T: float) -> bool:
    if lengths_by_left.size == 0:
        return True
    largest = float(lengths_by_left.max())
    late = rights > T - largest
    return not np.any(lengths_by_left[late] > ADEQUACY_FRACTION * largest)


def zeta_from_path(path: GridPath) -> tuple[np.ndarray, bool]:
    """Sorted excursion lengths of ``path`` and the horizon adequacy verdict."""
    exc = extract_excursions(path)
    return lengths_desc(exc), _adequate(exc.lengths, exc.right, path.horizon)


def zeta(params: LimitTriple, h: float | None, T: float | None, rng: np.random.Generator,
         auto_horizon: bool = True, max_doublings: int = MAX_DOUBLINGS) -> ZetaSample:
    """zeta^{beta,theta,lambda}: excursion lengths of W, largest first.

    When the horizon looks too short (a sizeable excursion ends within the last
    zeta_1 of it) the horizon is doubled and W resimulated, up to
    ``max_doublings`` times. The grid step scales with the horizon unless given.
    """
    T = default_horizon(params) if T is None else T
    doublings = 0
    while True:
        sample = simulate_W(params, h, T, rng)
        lengths, ok = zeta_from_path(sample.path)
        if ok or not auto_horizon or doublings >= max_doublings:
            break
        T *= 2.0
        doublings += 1
        log.info(f'[limit] horizon doubled to {T:.6g}')
    if not ok:
        log.warning(f'[limit] horizon {T:.6g} still inadequate after {doublings} doublings')
    if params.beta == 0 and lengths.size:
        report = goodness_report(sample.path)
        if report.flags:
            log.warning(f'[limit] beta = 0 path flagged: {", ".join(report.flags)}')
    return ZetaSample(lengths, T, sample.step, ok, doublings)


# =============================================================================
# REGIME LIMITS
# =============================================================================

def _expect(rp: RegimeParams, kind: type) -> None:
    if not isinstance(rp, kind):
        raise WrongRegime(f'expected {kind.tag} parameters, got {rp.tag}')


def limit_classic(rp: RegimeParams, h: float | None, T: float | None,
                  rng: np.random.Generator) -> ThinnedLevySample:
    """Z^C = W^{betaC, thetaC, lambdaC}."""
    _expect(rp, ClassicParams)
    return simulate_W(rp.triple, h, T, rng)


def limit_bipartite(rp: RegimeParams, h: float | None, T: float | None,
                    rng: np.random.Generator) -> ThinnedLevySample:
    """Z^BP = W^{beta1+beta2, theta1 merged theta2, 0} + (l11 + 2 l12 + l22) t."""
    _expect(rp, BipartiteParams)
    return simulate_W(rp.triple, h, T, rng)


def passage_path(Z2: GridPath, lambda12: float, times) -> np.ndarray:
    """t -> inf{u : Z2(u) < -lambda12 t} at ``times``; +inf past Z2's horizon.

    Non-decreasing and right-continuous in t; u is read off Z2's event times.
    """
    ev_t, ev_v = Z2.events()
    depth = -np.minimum.accumulate(ev_v)
    idx = np.searchsorted(depth, lambda12 * np.asarray(times, dtype=float), side='right')
    return np.append(ev_t, np.inf)[idx]


def limit_interacting(rp: RegimeParams, h: float | None, T: float | None,
                      rng: np.random.Generator, max_doublings: int = MAX_DOUBLINGS) -> GridPath:
    """Z^I(t) = Z1(t) + lambda12 inf{u : Z2(u) < -lambda12 t} on Z1's grid.

    Z2 is simulated on the same step over a horizon doubled until its running
    minimum passes -lambda12 T; past that the result is cut and flagged truncated.
    """
    _expect(rp, InteractingParams)
    t1, t2 = rp.types
    T = default_horizon(t1) if T is None else T
    n, step = _grid(default_step(T) if h is None else h, T)
    Z1 = simulate_W(t1, step, n * step, rng).path

    T2 = max(T, default_horizon(t2))
    for attempt in range(max_doublings + 1):
        Z2 = simulate_W(t2, step, T2, rng).path
        _, vals = Z2.events()
        if vals.min() < -rp.lambda12 * T or attempt == max_doublings:
            break
        T2 *= 2.0
        log.info(f'[limit] Z2 horizon doubled to {T2:.6g}')

    passage = passage_path(Z2, rp.lambda12, Z1.grid)
    finite = np.isfinite(passage)
    if finite.all():
        return GridPath(step, Z1.values + rp.lambda12 * passage, Z1.jump_times, Z1.jump_sizes)
    cut = int(np.argmin(finite))
    log.warning(f'[limit] interacting passage infinite from t={Z1.grid[cut]:.6g}; path truncated')
    cut = max(cut, 1)
    keep = Z1.jump_times <= Z1.grid[cut - 1]
    return GridPath(step, Z1.values[:cut] + rp.lambda12 * passage[:cut],
                    Z1.jump_times[keep], Z1.jump_sizes[keep], truncated=True)


def limit_interacting_merged(rp: RegimeParams, h: float | None, T: float | None,
                             rng: np.random.Generator) -> ThinnedLevySample:
    """The same limit as W^{beta1, theta1 merged lambda12 zeta', lambda11 + lambda12^2 sum zeta'^2}.

    zeta' comes from an independent Z2. The passage term is a plain sum of
    excursion lengths, so the compensator of the added jumps is put back
    into the drift.
    """
    _expect(rp, InteractingParams)
    t1, t2 = rp.types
    side = zeta(t2, None, None, rng)
    added = rp.lambda12 * side.lengths
    theta = merge_sorted(t1.theta, added)
    lam = t1.lam + float(np.sum(added ** 2))
    merged = LimitTriple(t1.beta, theta, lam, t1.tail_bound, True)
    return simulate_W(merged, h, T, rng)
