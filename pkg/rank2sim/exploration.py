"""
Finite-n exploration processes and first hitting times of two-type additive fields.

Each vertex (l, i) gets an exponential clock xi ~ Exp(w^i_l) and is discovered at
xi / q_ii. With N^i the discovered mass of type i,

    X11 = N1 - t     X12 = (q12/q11) N2
    X21 = (q12/q22) N1     X22 = N2 - t

and V = X11 + X12 o U2 o X21, where U2 is the first passage functional of X22.
Excursions of V above its running minimum correspond to components with type-1
mass, and the excursion marks of U2 o X21 carry the type-2 share.

The nearly-bipartite variant drives the same construction with one shared clock
rate q = q12 and the eps-scaled diagonal parts of the reparametrised model.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterator
from dataclasses import dataclass

import numpy as np

from rank2sim.cadlag import (
    INF,
    JumpDriftPath,
    RunningMin,
    add,
    compose_monotone,
    extract_excursions,
    running_min,
)
from rank2sim.errors import NotBipartite, ZeroDiagonal
from rank2sim.params import ModelSpec, WeightVector, bipartite_reparam, default_delta

log = logging.getLogger(__name__)

# relative agreement at which the iteration stops when off-diagonals drift
ITERATION_TOL = 1e-14
MAX_ITERATIONS = 10_000


# =============================================================================
# BUNDLE
# =============================================================================

@dataclass(frozen=True, eq=False)
class ExplorationBundle:
    """All encoding processes of one exploration.

    ``clocks1`` / ``clocks2`` hold the discovery time of every vertex, in the
    weight order of the spec. ``coefficients`` is the matrix C with
    X11 = C11 J1 - t, X12 = C12 J2, X21 = C21 J1, X22 = C22 J2 - t, where J^i
    is the unscaled discovered mass; it maps a component's mass vector to the
    (length, mark) pair of its excursion.
    """

    N1: JumpDriftPath
    N2: JumpDriftPath
    X11: JumpDriftPath
    X12: JumpDriftPath
    X21: JumpDriftPath
    X22: JumpDriftPath
    U2: RunningMin
    U2X21: JumpDriftPath
    V: JumpDriftPath
    clocks1: np.ndarray
    clocks2: np.ndarray
    coefficients: np.ndarray

    @property
    def horizon(self) -> float:
        return self.V.horizon


def default_horizon(spec: ModelSpec, clocks1: np.ndarray | None = None,
                    jump_budget: float = 0.0) -> float:
    """max_i (2 sigma_1(w^i) q_ii + 10 / q_ii), raised to the closure time of V if clocks are given.

    The closure time is the first time after which every type-1 clock has fired
    and V sits below its earlier running minimum; ``jump_budget`` bounds the
    total upward jump of V.
    """
    T = 0.0
    for i, w in enumerate(spec.weights, start=1):
        q = spec.q(i, i)
        if len(w) and q > 0:
            T = max(T, 2.0 * w.sigma(1) * q + 10.0 / q)
    if clocks1 is not None and clocks1.size:
        T = max(T, float(clocks1.max()) + jump_budget + 1.0)
    return T


def _jumps(times: np.ndarray, w: WeightVector, scale: float, horizon: float) -> JumpDriftPath:
    keep = times <= horizon
    return JumpDriftPath(0.0, times[keep], scale * w.entries[keep], horizon)


def _assemble(w1: WeightVector, w2: WeightVector, clocks1: np.ndarray, clocks2: np.ndarray,
              C: np.ndarray, horizon: float | None, spec: ModelSpec) -> ExplorationBundle:
    s1, s2 = w1.sigma(1), w2.sigma(1)
    T = horizon if horizon is not None else default_horizon(spec, clocks1, C[0, 0] * s1 + C[0, 1] * s2)
    # X22 must run until U2 is finite at every level X21 can reach
    last2 = float(clocks2.max()) if clocks2.size else 0.0
    T2 = last2 + C[1, 1] * s2 + C[1, 0] * s1 + 1.0

    N1 = _jumps(clocks1, w1, C[0, 0], T)
    N2 = _jumps(clocks2, w2, C[1, 1], T2)
    drift_down = JumpDriftPath(-1.0, np.zeros(0), np.zeros(0), T)
    X11 = add(N1, drift_down)
    X22 = add(N2, JumpDriftPath(-1.0, np.zeros(0), np.zeros(0), T2))
    X21 = _jumps(clocks1, w1, C[1, 0], T)
    X12 = _jumps(clocks2, w2, C[0, 1], T2)

    U2 = running_min(X22)
    U2X21 = compose_monotone(U2.passage, X21)
    V = add(X11, compose_monotone(X12, U2X21))
    if V.truncated:
        log.warning(f'[explore] V truncated at {V.horizon:.6g}; U2 did not cover X21')
    log.debug(f'[explore] horizon={T:.6g} X22 horizon={T2:.6g} jumps(V)={V.n_jumps}')
    return ExplorationBundle(N1, N2, X11, X12, X21, X22, U2, U2X21, V, clocks1, clocks2, C)


def _clocks(w: WeightVector, rng: np.random.Generator) -> np.ndarray:
    if len(w) == 0:
        return np.zeros(0)
    return rng.exponential(1.0 / w.entries)


def build_exploration(spec: ModelSpec, rng: np.random.Generator,
                      horizon: float | None = None) -> ExplorationBundle:
    """Sample clocks and assemble N^i, X^{j,i}, U2 and V for ``spec``."""
    w1, w2 = spec.weights
    for i, w in enumerate((w1, w2), start=1):
        if len(w) and spec.q(i, i) <= 0:
            raise ZeroDiagonal(f'q_{i}{i} = {spec.q(i, i)}; apply bipartite_reparam first')
    q11, q12, q22 = spec.q(1, 1), spec.q(1, 2), spec.q(2, 2)
    C = np.array([
        [1.0, q12 / q11 if len(w2) else 0.0],
        [q12 / q22 if len(w1) and len(w2) else 0.0, 1.0],
    ])
    xi1, xi2 = _clocks(w1, rng), _clocks(w2, rng)
    clocks1 = xi1 / q11 if len(w1) else xi1
    clocks2 = xi2 / q22 if len(w2) else xi2
    return _assemble(w1, w2, clocks1, clocks2, C, horizon, spec)


def build_exploration_bp(spec: ModelSpec, rng: np.random.Generator, delta: float | None = None,
                         horizon: float | None = None) -> ExplorationBundle:
    """Exploration of a nearly-bipartite spec with shared clock rate q = q12.

    X21(t) = sum_l w^1_l 1[xi_l <= q t] and X11 = -t + eps1 X21, symmetrically
    for type 2. A vanishing q_ii is replaced by ``delta`` (default c_n^{-2}).
    """
    if spec.q(1, 2) <= 0:
        raise NotBipartite(f'nearly-bipartite exploration needs q12 > 0, got {spec.q(1, 2)}')
    rp = bipartite_reparam(spec, default_delta(spec) if delta is None else delta)
    w1, w2 = spec.weights
    eps = rp.eps
    C = np.array([[eps[0], 1.0], [1.0, eps[1]]])
    clocks1 = _clocks(w1, rng) / rp.rate
    clocks2 = _clocks(w2, rng) / rp.rate
    tilde = ModelSpec(rp.w1, rp.w2, rp.Q)
    log.debug(f'[explore] bipartite rate={rp.rate:.6g} eps={eps.tolist()}')
    return _assemble(w1, w2, clocks1, clocks2, C, horizon, tilde)


# =============================================================================
# ADDITIVE FIELDS
# =============================================================================

@dataclass(frozen=True, eq=False)
class AdditiveField:
    """F^j(t1, t2) = f^{j,1}(t1) + f^{j,2}(t2) for j = 1, 2.

    Off-diagonal components are non-decreasing, diagonal ones never jump down,
    and all start at 0. An off-diagonal component with zero drift is taken to
    be constant after its horizon.
    """

    f11: JumpDriftPath
    f12: JumpDriftPath
    f21: JumpDriftPath
    f22: JumpDriftPath

    def __post_init__(self):
        for name in ('f11', 'f12', 'f21', 'f22'):
            f = getattr(self, name)
            if f.start != 0:
                raise ValueError(f'{name} must start at 0, got {f.start}')
            if f.n_jumps and f.times[0] == 0:
                raise ValueError(f'{name} must not jump at time 0')
        for name in ('f12', 'f21'):
            if not getattr(self, name).is_non_decreasing():
                raise ValueError(f'{name} must be non-decreasing')

    def off_diagonal(self, j: int) -> JumpDriftPath:
        return self.f12 if j == 1 else self.f21

    def diagonal(self, j: int) -> JumpDriftPath:
        return self.f11 if j == 1 else self.f22


def exploration_field(bundle: ExplorationBundle) -> AdditiveField:
    return AdditiveField(bundle.X11, bundle.X12, bundle.X21, bundle.X22)


def _off_left(f: JumpDriftPath, u: float) -> float:
    """f(u-) with f(inf) read as the limit after the horizon."""
    if u == 0:
        return f.start
    if u > f.horizon or math.isinf(u):
        if f.drift == 0 and not f.truncated:
            return float(f._value(f.horizon))
        return INF
    return float(f._left(u))


class _Taus:
    """tau^j(v) = inf{t : f^{j,j}(t-) = -v} for both diagonal components."""

    def __init__(self, F: AdditiveField):
        self._rm = (running_min(F.f11), running_min(F.f22))

    def __call__(self, j: int, v: float) -> float:
        if math.isinf(v):
            return INF
        return float(self._rm[j - 1].hitting(v))


def iterate_hitting_time(F: AdditiveField, r, max_iterations: int = MAX_ITERATIONS,
                         tol: float = ITERATION_TOL) -> Iterator[np.ndarray]:
    """Yield u^(1), u^(2), ... with u_j^(n) = tau^j(r_j + f^{j,i}(u_i^(n-1) -)).

    Stops once two successive iterates coincide (or agree to ``tol`` relative
    when an off-diagonal drifts), or after ``max_iterations``.
    """
    r = np.asarray(r, dtype=float)
    if r.shape != (2,) or np.any(r < 0):
        raise ValueError(f'r must be a non-negative 2-vector, got {r.tolist()}')
    tau = _Taus(F)
    exact = F.f12.drift == 0 and F.f21.drift == 0
    u = np.zeros(2)
    for _ in range(max_iterations):
        nxt = np.array([
            tau(1, r[0] + _off_left(F.f12, u[1])),
            tau(2, r[1] + _off_left(F.f21, u[0])),
        ])
        yield nxt
        if exact:
            done = np.array_equal(nxt, u)
        else:
            finite = np.isfinite(nxt) & np.isfinite(u)
            same_inf = np.isinf(nxt) == np.isinf(u)
            done = bool(np.all(same_inf)) and np.allclose(nxt[finite], u[finite], rtol=tol, atol=0.0)
        u = nxt
        if done:
            return
    log.warning(f'[field] hitting-time iteration stopped after {max_iterations} steps at {u.tolist()}')


def field_hitting_time(F: AdditiveField, r, max_iterations: int = MAX_ITERATIONS) -> np.ndarray:
    """Minimal solution T(r) of F^j(t-) = -r_j (coordinates may be +inf)."""
    u = np.zeros(2)
    for u in iterate_hitting_time(F, r, max_iterations):
        pass
    return u


def single_process_T1(F: AdditiveField, r: float) -> tuple[float, float]:
    """T(r, 0) through the one-dimensional process f11 + f12 o tau2 o f21.

    T1 is the first t with f11(t-) + f12(tau2(f21(t-)) -) = -r and
    T2 = tau2(f21(T1 -)). The off-diagonal components must be pure jump.
    """
    if r <= 0:
        raise ValueError(f'r must be > 0, got {r}')
    if F.f12.drift != 0 or F.f21.drift != 0:
        raise ValueError('single-process representation needs pure-jump off-diagonal components')
    tau = _Taus(F)
    # f21(t-) is constant on (s_k, s_{k+1}] between consecutive jumps of f21
    bounds = np.append(F.f21.times, INF)
    starts = np.concatenate([[0.0], F.f21.times])
    T1 = INF
    for s, s_next in zip(starts.tolist(), bounds.tolist()):
        level = _off_left(F.f21, s_next) if math.isfinite(s_next) else _off_left(F.f21, INF)
        c = _off_left(F.f12, tau(2, level))
        t = tau(1, r + c)
        if t <= s_next:
            T1 = t
            break
    T2 = tau(2, _off_left(F.f21, T1))
    return T1, T2


# =============================================================================
# DUALITY READOUT
# =============================================================================

def first_excursion_mass(bundle: ExplorationBundle) -> np.ndarray | None:
    """Mass vector C^{-1} (r - l, mark) of the first excursion of V, None if there is none.

    The mark is U2 o X21(r) - U2 o X21(l-). In the standard exploration C is the
    mass transfer matrix diag(Q)^{-1} Q.
    """
    exc = extract_excursions(bundle.V)
    if not len(exc) or (exc.censored and len(exc) == 1):
        return None
    l, r = float(exc.left[0]), float(exc.right[0])
    Y = bundle.U2X21
    if r > Y.horizon:
        return None
    mark = float(Y._value(r) - Y._left(l))
    return np.linalg.solve(bundle.coefficients, np.array([r - l, mark]))
