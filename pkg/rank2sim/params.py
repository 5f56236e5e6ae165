"""
Weight vectors, kernel decompositions, regime parameter maps and model conversions.

A rank-2 model is a pair of weight vectors W = (w1, w2) and a symmetric 2x2 matrix Q;
vertex (l, i) and (r, j) are joined with probability 1 - exp(-q_ij w^i_l w^j_r).
In the critical window Q = D^{-1/2} K D^{-1/2} + Lambda with D = diag(sigma_2(w^i)).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):
        __str__ = str.__str__
        __format__ = str.__format__
from typing import ClassVar, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from rank2sim.errors import (
    DegenerateDiagonal,
    NonPositiveKernel,
    NotBipartite,
    NotCriticalSBM,
    NotInteracting,
    PFNotCritical,
)

log = logging.getLogger(__name__)

PF_TOLERANCE = 1e-9
RESIDUAL_TOLERANCE_FACTOR = 1e-6
DET_FLOOR = 1e-12

ANTI_DIAGONAL = np.array([[0.0, 1.0], [1.0, 0.0]])


# =============================================================================
# WEIGHT VECTORS
# =============================================================================

@dataclass(frozen=True, eq=False)
class WeightVector:
    """Finite non-increasing vector of positive weights.

    Zero (and negative) entries are dropped and the rest sorted descending at
    construction, so ``entries`` always satisfies the ordering invariant.
    """

    entries: np.ndarray
    _moments: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=float).ravel()
        arr = arr[arr > 0]
        if arr.size > 1 and not np.all(arr[:-1] >= arr[1:]):
            arr = np.sort(arr)[::-1]
        arr.setflags(write=False)
        object.__setattr__(self, 'entries', arr)

    @classmethod
    def constant(cls, value: float, count: int) -> WeightVector:
        return cls(np.full(int(count), float(value)))

    def __len__(self) -> int:
        return int(self.entries.size)

    def __repr__(self) -> str:
        if self.is_constant and len(self):
            return f'WeightVector(value={self.entries[0]:.6g}, count={len(self)})'
        return f'WeightVector(len={len(self)}, head={self.entries[:3].tolist()})'

    @property
    def is_constant(self) -> bool:
        return len(self) > 0 and self.entries[0] == self.entries[-1]

    def sigma(self, p: int) -> float:
        if p < 1:
            raise ValueError(f'sigma_p needs p >= 1, got {p}')
        if p not in self._moments:
            if len(self) == 0:
                value = 0.0
            elif self.is_constant:
                value = float(len(self) * self.entries[0] ** p)
            else:
                value = float(np.sum(self.entries ** p))
            self._moments[p] = value
        return self._moments[p]

    def scaled(self, c: float) -> WeightVector:
        return WeightVector(self.entries * c)


def sigma_p(w: WeightVector, p: int) -> float:
    """sigma_p(w) = sum_j w_j^p (0 for the empty vector)."""
    return w.sigma(p)


def merge_sorted(a: Sequence[float], b: Sequence[float]) -> np.ndarray:
    """Merge two non-increasing sequences into one non-increasing sequence."""
    merged = np.concatenate([np.asarray(a, dtype=float).ravel(),
                             np.asarray(b, dtype=float).ravel()])
    # stable sort keeps ties in input order
    order = np.argsort(-merged, kind='stable')
    return merged[order]


# =============================================================================
# LIMIT TRIPLES
# =============================================================================

@dataclass(frozen=True, eq=False)
class LimitTriple:
    """Parameters (beta, theta, lambda) of a thinned Levy process.

    ``theta`` is stored finite; ``tail_bound`` declares an upper bound on the
    cubic tail sum of the entries that were not stored. Membership of the
    parameter space where excursions are well defined cannot be verified for a
    finite theta, so ``in_domain`` is True for beta > 0 and otherwise whatever
    the caller asserts.
    """

    beta: float
    theta: np.ndarray = field(default_factory=lambda: np.zeros(0))
    lam: float = 0.0
    tail_bound: float = 0.0
    in_domain: bool | None = None

    def __post_init__(self):
        if self.beta < 0:
            raise ValueError(f'beta must be >= 0, got {self.beta}')
        theta = np.asarray(self.theta, dtype=float).ravel()
        if np.any(theta < 0):
            raise ValueError('theta entries must be non-negative')
        theta = np.sort(theta[theta > 0])[::-1]
        theta.setflags(write=False)
        object.__setattr__(self, 'theta', theta)
        object.__setattr__(self, 'beta', float(self.beta))
        object.__setattr__(self, 'lam', float(self.lam))
        if self.in_domain is None:
            object.__setattr__(self, 'in_domain', self.beta > 0)

    def with_lambda(self, lam: float) -> LimitTriple:
        return LimitTriple(self.beta, self.theta, lam, self.tail_bound, self.in_domain)

    def as_dict(self) -> dict:
        return {'beta': self.beta, 'theta': self.theta.tolist(), 'lambda': self.lam}


def scale_triple(triple: LimitTriple, a: float) -> LimitTriple:
    """(beta, theta, lambda) -> (a^3 beta, a theta, a^2 lambda).

    a * W^{beta,theta,lambda}(a t) has the law of W at the scaled triple.
    """
    return LimitTriple(a ** 3 * triple.beta, a * triple.theta, a ** 2 * triple.lam,
                       a ** 3 * triple.tail_bound, triple.in_domain)


# =============================================================================
# KERNEL DECOMPOSITION AND MODEL SPEC
# =============================================================================

def _as_matrix(m, name: str) -> np.ndarray:
    arr = np.asarray(m, dtype=float)
    if arr.shape != (2, 2):
        raise ValueError(f'{name} must be 2x2, got shape {arr.shape}')
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


def _is_symmetric(m: np.ndarray) -> bool:
    return abs(m[0, 1] - m[1, 0]) <= 1e-12 * max(1.0, abs(m[0, 1]))


@dataclass(frozen=True, eq=False)
class KernelDecomposition:
    """K, Lambda, alpha and c_n of the critical-window decomposition of Q."""

    K: np.ndarray
    Lambda: np.ndarray
    alpha: float
    c_n: float

    def __post_init__(self):
        K = _as_matrix(self.K, 'K')
        L = _as_matrix(self.Lambda, 'Lambda')
        if not _is_symmetric(K) or np.any(K < 0):
            raise ValueError(f'K must be symmetric non-negative, got {K.tolist()}')
        # a singular K is accepted only when it is positive, where its PF vector is still unique
        if abs(np.linalg.det(K)) <= DET_FLOOR and not np.all(K > 0):
            raise ValueError(f'K must be non-singular, got det={np.linalg.det(K):.3g}')
        if not _is_symmetric(L):
            raise ValueError(f'Lambda must be symmetric, got {L.tolist()}')
        if np.any((K == 0) & (L < 0)):
            raise ValueError('Lambda must be >= 0 wherever K vanishes')
        if not self.c_n > 0:
            raise ValueError(f'c_n must be > 0, got {self.c_n}')
        object.__setattr__(self, 'K', K)
        object.__setattr__(self, 'Lambda', L)


@dataclass(frozen=True, eq=False)
class ModelSpec:
    """The pair of weight vectors, the matrix Q, and optionally its decomposition."""

    w1: WeightVector
    w2: WeightVector
    Q: np.ndarray
    decomposition: KernelDecomposition | None = None
    residual_tol: float | None = None

    def __post_init__(self):
        Q = _as_matrix(self.Q, 'Q')
        if not _is_symmetric(Q):
            raise ValueError(f'Q must be symmetric, got {Q.tolist()}')
        if np.any(Q < 0):
            raise ValueError(f'Q must be non-negative, got {Q.tolist()}')
        object.__setattr__(self, 'Q', Q)
        if self.decomposition is not None and len(self.w1) and len(self.w2):
            tol = self.residual_tol
            if tol is None:
                tol = RESIDUAL_TOLERANCE_FACTOR * self.c_n
                object.__setattr__(self, 'residual_tol', tol)
            worst = float(np.max(np.abs(residual(self))))
            if worst > tol:
                log.warning(f'[spec] kernel residual {worst:.3g} exceeds tolerance {tol:.3g}')

    @property
    def weights(self) -> tuple[WeightVector, WeightVector]:
        return self.w1, self.w2

    @property
    def D(self) -> np.ndarray:
        return np.diag([self.w1.sigma(2), self.w2.sigma(2)])

    @property
    def c_n(self) -> float:
        s = self.w1.sigma(2) * self.w2.sigma(2)
        return 1.0 / math.sqrt(s) if s > 0 else math.inf

    def q(self, i: int, j: int) -> float:
        """q_ij with 1-based type indices."""
        return float(self.Q[i - 1, j - 1])

    def to_document(self) -> dict:
        return ModelSpecDocument.from_spec(self).model_dump(mode='json', exclude_none=True)

    @classmethod
    def from_document(cls, doc: dict | str) -> ModelSpec:
        if isinstance(doc, str):
            parsed = ModelSpecDocument.model_validate_json(doc)
        else:
            parsed = ModelSpecDocument.model_validate(doc)
        return parsed.to_spec()


def residual(spec: ModelSpec) -> np.ndarray:
    """Q - D^{-1/2} K D^{-1/2} - Lambda."""
    dec = spec.decomposition
    if dec is None:
        raise ValueError('residual needs a kernel decomposition')
    d = 1.0 / np.sqrt(np.diag(spec.D))
    return spec.Q - d[:, None] * dec.K * d[None, :] - dec.Lambda


def spec_from_kernel(w1: WeightVector, w2: WeightVector, K, Lambda, alpha: float = 0.0) -> ModelSpec:
    """Assemble Q = D^{-1/2} K D^{-1/2} + Lambda for the given weights."""
    K = np.asarray(K, dtype=float)
    Lambda = np.asarray(Lambda, dtype=float)
    d = 1.0 / np.sqrt(np.array([w1.sigma(2), w2.sigma(2)]))
    Q = d[:, None] * K * d[None, :] + Lambda
    c_n = 1.0 / math.sqrt(w1.sigma(2) * w2.sigma(2))
    return ModelSpec(w1, w2, Q, KernelDecomposition(K, Lambda, alpha, c_n))


# ── JSON documents ──────────────────────────────────────────

class ConstantWeights(BaseModel):
    """Compressed form of a constant weight vector."""
    value: float = Field(gt=0)
    count: int = Field(ge=0)


class DecompositionDocument(BaseModel):
    K: list[list[float]]
    Lambda: list[list[float]]
    alpha: float = 0.0
    c_n: float | None = None


class ModelSpecDocument(BaseModel):
    """Wire format of a ModelSpec."""

    model_config = ConfigDict(extra='forbid')

    w1: list[float] | ConstantWeights
    w2: list[float] | ConstantWeights
    Q: list[list[float]]
    decomposition: DecompositionDocument | None = None

    @staticmethod
    def _weights_out(w: WeightVector) -> list[float] | ConstantWeights:
        if w.is_constant and len(w) > 1:
            return ConstantWeights(value=float(w.entries[0]), count=len(w))
        return w.entries.tolist()

    @staticmethod
    def _weights_in(w: list[float] | ConstantWeights) -> WeightVector:
        if isinstance(w, ConstantWeights):
            return WeightVector.constant(w.value, w.count)
        return WeightVector(np.asarray(w, dtype=float))

    @classmethod
    def from_spec(cls, spec: ModelSpec) -> ModelSpecDocument:
        dec = None
        if spec.decomposition is not None:
            d = spec.decomposition
            dec = DecompositionDocument(K=d.K.tolist(), Lambda=d.Lambda.tolist(),
                                        alpha=d.alpha, c_n=d.c_n)
        return cls(w1=cls._weights_out(spec.w1), w2=cls._weights_out(spec.w2),
                   Q=spec.Q.tolist(), decomposition=dec)

    def to_spec(self) -> ModelSpec:
        w1, w2 = self._weights_in(self.w1), self._weights_in(self.w2)
        dec = None
        if self.decomposition is not None:
            c_n = self.decomposition.c_n
            if c_n is None:
                c_n = 1.0 / math.sqrt(w1.sigma(2) * w2.sigma(2))
            dec = KernelDecomposition(np.array(self.decomposition.K), np.array(self.decomposition.Lambda),
                                      self.decomposition.alpha, c_n)
        return ModelSpec(w1, w2, np.array(self.Q, dtype=float), dec)


# =============================================================================
# PERRON-FROBENIUS
# =============================================================================

def pf_eigen(M) -> tuple[float, np.ndarray]:
    """Closed-form PF root and right eigenvector (entries summing to 1) of a 2x2 matrix."""
    M = np.asarray(M, dtype=float)
    a, b, c, d = M[0, 0], M[0, 1], M[1, 0], M[1, 1]
    half_trace = 0.5 * (a + d)
    root = half_trace + math.sqrt(0.25 * (a - d) ** 2 + b * c)
    if b != 0:
        vec = np.array([b, root - a])
    elif c != 0:
        vec = np.array([root - d, c])
    else:
        vec = np.array([1.0, 0.0]) if a >= d else np.array([0.0, 1.0])
    total = vec.sum()
    if total == 0 or np.any(vec / total <= 0):
        raise NonPositiveKernel(f'PF eigenvector of {M.tolist()} is not strictly positive')
    return float(root), vec / total


# =============================================================================
# REGIME PARAMETERS
# =============================================================================

class Regime(StrEnum):
    CLASSIC = 'classic'
    INTERACTING = 'interacting'
    BIPARTITE = 'bipartite'


@dataclass(frozen=True, eq=False)
class ClassicParams:
    u: np.ndarray
    triple: LimitTriple
    tag: ClassVar[Regime] = Regime.CLASSIC

    @property
    def betaC(self) -> float:
        return self.triple.beta

    @property
    def thetaC(self) -> np.ndarray:
        return self.triple.theta

    @property
    def lambdaC(self) -> float:
        return self.triple.lam


@dataclass(frozen=True, eq=False)
class InteractingParams:
    types: tuple[LimitTriple, LimitTriple]
    lambda12: float
    tag: ClassVar[Regime] = Regime.INTERACTING


@dataclass(frozen=True, eq=False)
class BipartiteParams:
    triple: LimitTriple
    tag: ClassVar[Regime] = Regime.BIPARTITE

    @property
    def drift(self) -> float:
        return self.triple.lam


RegimeParams = ClassicParams | InteractingParams | BipartiteParams


def classic_params(dec: KernelDecomposition, limits: tuple[LimitTriple, LimitTriple],
                   tol: float = PF_TOLERANCE) -> ClassicParams:
    """Classic regime: K positive with PF root 1.

    The lambda fields of ``limits`` are ignored; the drift comes from Lambda.
    """
    if np.any(dec.K <= 0):
        raise NonPositiveKernel(f'classic regime needs K > 0 entrywise, got {dec.K.tolist()}')
    root, u = pf_eigen(dec.K)
    if abs(root - 1.0) > tol:
        raise PFNotCritical(f'PF root of K is {root:.12g}, expected 1')
    return ClassicParams(u, directional_params(u, limits, dec.Lambda))


def directional_params(v, limits: tuple[LimitTriple, LimitTriple], Lambda) -> LimitTriple:
    """beta^v = v1^3 b1 + v2^3 b2, theta^v = v1 theta1 merged with v2 theta2, lambda^v = <v, Lambda v>."""
    v = np.asarray(v, dtype=float)
    t1, t2 = limits
    beta = v[0] ** 3 * t1.beta + v[1] ** 3 * t2.beta
    theta = merge_sorted(v[0] * t1.theta, v[1] * t2.theta)
    lam = float(v @ np.asarray(Lambda, dtype=float) @ v)
    tail = v[0] ** 3 * t1.tail_bound + v[1] ** 3 * t2.tail_bound
    in_domain = beta > 0 or bool(t1.in_domain) or bool(t2.in_domain)
    return LimitTriple(beta, theta, lam, tail, in_domain)


def interacting_params(dec: KernelDecomposition, limits: tuple[LimitTriple, LimitTriple],
                       tol: float = PF_TOLERANCE) -> InteractingParams:
    if np.max(np.abs(dec.K - np.eye(2))) > tol:
        raise NotInteracting(f'interacting regime needs K = I, got {dec.K.tolist()}')
    lambda12 = float(dec.Lambda[0, 1])
    if lambda12 <= 0:
        raise NotInteracting(f'interacting regime needs lambda12 > 0, got {lambda12}')
    types = tuple(t.with_lambda(float(dec.Lambda[i, i])) for i, t in enumerate(limits))
    return InteractingParams(types, lambda12)


def bipartite_params(dec: KernelDecomposition, limits: tuple[LimitTriple, LimitTriple],
                     tol: float = PF_TOLERANCE) -> BipartiteParams:
    if np.max(np.abs(dec.K - ANTI_DIAGONAL)) > tol:
        raise NotBipartite(f'bipartite regime needs K = [[0,1],[1,0]], got {dec.K.tolist()}')
    if dec.Lambda[0, 0] < 0 or dec.Lambda[1, 1] < 0:
        raise NotBipartite(f'bipartite regime needs lambda_ii >= 0, got {np.diag(dec.Lambda).tolist()}')
    t1, t2 = limits
    drift = float(np.ones(2) @ dec.Lambda @ np.ones(2))
    triple = LimitTriple(t1.beta + t2.beta, merge_sorted(t1.theta, t2.theta), drift,
                         t1.tail_bound + t2.tail_bound,
                         bool(t1.in_domain) or bool(t2.in_domain) or t1.beta + t2.beta > 0)
    return BipartiteParams(triple)


def regime_params(regime: Regime | str, dec: KernelDecomposition,
                  limits: tuple[LimitTriple, LimitTriple]) -> RegimeParams:
    regime = Regime(regime)
    if regime is Regime.CLASSIC:
        return classic_params(dec, limits)
    if regime is Regime.INTERACTING:
        return interacting_params(dec, limits)
    return bipartite_params(dec, limits)


# ── Diagnostics of the finite-n kernel ──────────────────────

def mass_transfer_matrix(spec: ModelSpec) -> np.ndarray:
    """R = diag(Q)^{-1} Q, mapping component masses to excursion marks."""
    diag = np.diag(spec.Q)
    if np.any(diag <= 0):
        raise DegenerateDiagonal(f'R needs q_ii > 0, got {diag.tolist()}')
    return spec.Q / diag[:, None]


def kernel_transfer_limit(K) -> np.ndarray:
    """Large-n limit diag(K)^{-1} K of the mass transfer matrix."""
    K = np.asarray(K, dtype=float)
    return K / np.diag(K)[:, None]


def q_ratio_expansion(dec: KernelDecomposition) -> tuple[float, float]:
    """First-order expansions in 1/c_n of q12/q11 and q12/q22."""
    K, L, a, c = dec.K, dec.Lambda, dec.alpha, dec.c_n
    k11, k12, k22 = K[0, 0], K[0, 1], K[1, 1]
    r1 = k12 / k11 * (1 + (a + L[0, 1] / k12 - L[0, 0] / k11) / c)
    r2 = k12 / k22 * (1 + (-a + L[0, 1] / k12 - L[1, 1] / k22) / c)
    return float(r1), float(r2)


def classic_slope(K) -> float:
    """Limit slope kappa11 kappa12 / (kappa22 (1 - kappa22)) of U^2 o X^{2,1}."""
    K = np.asarray(K, dtype=float)
    k22 = K[1, 1]
    if not 0 < k22 < 1:
        raise ValueError(f'slope needs 0 < kappa22 < 1, got {k22}')
    return float(K[0, 0] * K[0, 1] / (k22 * (1 - k22)))


def estimate_limit_pair(w: WeightVector, theta_threshold: float = 0.1,
                        top: int = 10) -> LimitTriple:
    """Finite-n reading of (beta, theta) from weights.

    theta_j = w_j / sigma_2 for leading entries above ``theta_threshold`` (none for
    a constant vector), and beta = sigma_3 / sigma_2^3 minus their cubic mass.
    """
    s2 = w.sigma(2)
    if s2 == 0:
        return LimitTriple(0.0)
    if w.is_constant:
        return LimitTriple(w.sigma(3) / s2 ** 3)
    head = w.entries[:top] / s2
    theta = head[head >= theta_threshold]
    beta = max(w.sigma(3) / s2 ** 3 - float(np.sum(theta ** 3)), 0.0)
    return LimitTriple(beta, theta)


# =============================================================================
# CONVERSIONS
# =============================================================================

def sbm_to_rank2(n1: int, n2: int, k_tilde, a_tilde, mu, b,
                 tol: float = PF_TOLERANCE) -> ModelSpec:
    """Two-community SBM with p_ij = k_ij/n + a_ij n^{-4/3} in the rank-2 parametrisation."""
    k_tilde = np.asarray(k_tilde, dtype=float)
    a_tilde = np.asarray(a_tilde, dtype=float)
    mu = np.asarray(mu, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any(mu <= 0) or abs(mu.sum() - 1.0) > tol:
        raise NotCriticalSBM(f'mu must be positive and sum to 1, got {mu.tolist()}')
    root, _ = pf_eigen(k_tilde @ np.diag(mu))
    if abs(root - 1.0) > tol:
        raise NotCriticalSBM(f'PF root of K~ diag(mu) is {root:.12g}, expected 1')

    n = n1 + n2
    w1 = WeightVector.constant(mu[0] ** -0.5 * n ** (-2 / 3), n1)
    w2 = WeightVector.constant(mu[1] ** -0.5 * n ** (-2 / 3), n2)
    sq = np.sqrt(mu)
    K = sq[:, None] * k_tilde * sq[None, :]
    bkd = (b / sq)[:, None] * k_tilde * sq[None, :]
    Lambda = sq[:, None] * a_tilde * sq[None, :] + 0.5 * bkd + 0.5 * bkd.T
    log.debug(f'[convert] sbm n=({n1},{n2}) K={K.tolist()} Lambda={Lambda.tolist()}')
    alpha = float(b[0] / mu[0] - b[1] / mu[1])
    spec = spec_from_kernel(w1, w2, K, Lambda, alpha)
    return spec


def sbm_limit_constants(k_tilde, a_tilde, mu, b) -> dict:
    """chi and lambda of the Erdos-Renyi-basin limit of a critical two-community SBM.

    n^{-2/3} (component vertex counts) converges to chi^{1/3} zeta^{1,0,chi^{2/3} lambda}.
    """
    k_tilde = np.asarray(k_tilde, dtype=float)
    a_tilde = np.asarray(a_tilde, dtype=float)
    mu = np.asarray(mu, dtype=float)
    M = k_tilde @ np.diag(mu)
    _, u = pf_eigen(M)
    _, v = pf_eigen(M.T)
    v = v / float(v @ u)
    D, B = np.diag(mu), np.diag(np.asarray(b, dtype=float))
    mass = float(mu @ u)
    chi = float(v @ u ** 2) / (v.sum() * mass ** 2)
    lam = float(v @ (a_tilde @ D + k_tilde @ B) @ u) / (v.sum() * mass)
    return {'chi': chi, 'lambda': lam, 'u': u.tolist(), 'v': v.tolist(),
            'limit': LimitTriple(1.0, (), chi ** (2 / 3) * lam).as_dict(),
            'scale': chi ** (1 / 3)}


class BipartiteRegime(StrEnum):
    LIGHT = 'light'
    MODERATE = 'moderate'
    HEAVY = 'heavy'


def bip_er_to_rank2(n: int, m: int, lambda12: float, regime: BipartiteRegime | str,
                    theta: float | None = None) -> ModelSpec:
    """Bipartite Erdos-Renyi B(n, m, p) in one of the three clustering regimes."""
    regime = BipartiteRegime(regime)
    if n < 1 or m < 1:
        raise ValueError(f'n and m must be >= 1, got n={n}, m={m}')
    if regime is BipartiteRegime.MODERATE and not (theta and theta > 0):
        raise ValueError(f'moderate regime needs theta > 0, got {theta}')
    if regime is BipartiteRegime.HEAVY:
        w1 = WeightVector.constant(m ** (-1 / 6) * n ** -0.5, n)
        w2 = WeightVector.constant(m ** (-2 / 3), m)
        base = m ** (1 / 3)
    else:
        w1 = WeightVector.constant(n ** (-2 / 3), n)
        w2 = WeightVector.constant(n ** (-1 / 6) * m ** -0.5, m)
        base = n ** (1 / 3)
    Q = np.array([[0.0, base + lambda12], [base + lambda12, 0.0]])
    c_n = 1.0 / math.sqrt(w1.sigma(2) * w2.sigma(2))
    dec = KernelDecomposition(ANTI_DIAGONAL, np.array([[0.0, lambda12], [lambda12, 0.0]]), 0.0, c_n)
    return ModelSpec(w1, w2, Q, dec)


def bip_er_limit(n: int, m: int, lambda12: float, regime: BipartiteRegime | str,
                 theta: float | None = None) -> LimitTriple:
    """Predicted nearly-bipartite limit triple for B(n, m, p) from the weight moments."""
    spec = bip_er_to_rank2(n, m, lambda12, regime, theta)
    beta = sum(w.sigma(3) / w.sigma(2) ** 3 for w in spec.weights)
    return LimitTriple(beta, (), 2.0 * lambda12)


# =============================================================================
# BIPARTITE REPARAMETRISATION
# =============================================================================

@dataclass(frozen=True, eq=False)
class BipartiteReparam:
    """Scaled weights eps_i w^i and scaled kernel of a nearly-bipartite spec."""

    spec: ModelSpec
    w1: WeightVector
    w2: WeightVector
    Q: np.ndarray
    eps: np.ndarray
    rate: float


def default_delta(spec: ModelSpec) -> float:
    return spec.c_n ** -2


def bipartite_reparam(spec: ModelSpec, delta: float | None = None) -> BipartiteReparam:
    """eps_i = lambda_ii / (c_n + lambda12), w~^i = eps_i w^i, q~_ii = (c_n + lambda12)/eps_i,
    q~12 = (c_n + lambda12)/(eps1 eps2).

    Vanishing diagonal entries are replaced by ``delta`` first; ``spec`` in the
    result is the perturbed model.
    """
    Q = spec.Q.copy()
    for i in range(2):
        if Q[i, i] == 0:
            if delta is None:
                raise DegenerateDiagonal(f'q_{i + 1}{i + 1} = 0 and no delta supplied')
            Q[i, i] = delta
    if Q[0, 1] <= 0:
        raise NotBipartite(f'bipartite reparametrisation needs q12 > 0, got {Q[0, 1]}')
    perturbed = spec if np.array_equal(Q, spec.Q) else ModelSpec(spec.w1, spec.w2, Q, spec.decomposition,
                                                                  spec.residual_tol)
    # c_n + lambda12^(n) is q12 itself
    rate = float(Q[0, 1])
    eps = np.diag(Q) / rate
    Qt = np.empty((2, 2))
    Qt[0, 0] = rate / eps[0]
    Qt[1, 1] = rate / eps[1]
    Qt[0, 1] = Qt[1, 0] = rate / (eps[0] * eps[1])
    return BipartiteReparam(perturbed, spec.w1.scaled(eps[0]), spec.w2.scaled(eps[1]), Qt, eps, rate)
