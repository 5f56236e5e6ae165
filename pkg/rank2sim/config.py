"""
Configuration: process-wide settings and experiment documents.

Settings come from defaults overridden by the environment (RANK2SIM_*).
Experiments are JSON documents validated into ExperimentConfig; every model source
knows how to build the ModelSpec of a rung of size n.
"""

from __future__ import annotations

import json
import logging
import os
from pathlib import Path
from typing import Annotated, Literal

import numpy as np
from pydantic import AfterValidator, BaseModel, ConfigDict, Field, model_validator

from rank2sim.errors import ConfigError
from rank2sim.params import (
    BipartiteRegime,
    LimitTriple,
    ModelSpec,
    ModelSpecDocument,
    Regime,
    WeightVector,
    bip_er_to_rank2,
    sbm_to_rank2,
    spec_from_kernel,
)

log = logging.getLogger(__name__)

SEED_ENV = 'RANK2SIM_SEED'
THREADS_ENV = 'RANK2SIM_THREADS'
OUT_DIR_ENV = 'RANK2SIM_OUT'
U64_MAX = 2 ** 64 - 1


def parse_seed(raw: str | int) -> int:
    try:
        seed = int(raw)
    except (TypeError, ValueError):
        raise ConfigError(f'seed must be an unsigned 64-bit integer, got {raw!r}') from None
    if not 0 <= seed <= U64_MAX:
        raise ConfigError(f'seed must be an unsigned 64-bit integer, got {raw!r}')
    return seed


class Settings(BaseModel):
    """Process-wide defaults."""

    seed: int = Field(0, ge=0, le=U64_MAX)
    threads: int = Field(1, ge=1)
    out_dir: Path = Path('./rank2sim-out')

    @classmethod
    def from_env(cls, environ: dict[str, str] | None = None) -> Settings:
        env = os.environ if environ is None else environ
        values = {}
        if SEED_ENV in env:
            values['seed'] = parse_seed(env[SEED_ENV])
        if THREADS_ENV in env:
            try:
                values['threads'] = int(env[THREADS_ENV])
            except ValueError:
                raise ConfigError(f'{THREADS_ENV} must be an integer, got {env[THREADS_ENV]!r}') from None
        if OUT_DIR_ENV in env:
            values['out_dir'] = Path(env[OUT_DIR_ENV])
        return cls(**values)


# =============================================================================
# MODEL SOURCES
# =============================================================================

def _check_matrix(m: list[list[float]]) -> list[list[float]]:
    if len(m) != 2 or any(len(row) != 2 for row in m):
        raise ValueError('expected a 2x2 matrix')
    return m


Matrix = Annotated[list[list[float]], AfterValidator(_check_matrix)]


class ExplicitSource(BaseModel):
    """A fixed ModelSpec; the n-ladder is ignored."""

    model_config = ConfigDict(extra='forbid')
    kind: Literal['explicit'] = 'explicit'
    spec: ModelSpecDocument

    def build(self, n: int) -> ModelSpec:
        return self.spec.to_spec()


class SbmSource(BaseModel):
    """Critical two-community SBM; a rung of size n has n_i = round(mu_i n + b_i n^{2/3})."""

    model_config = ConfigDict(extra='forbid')
    kind: Literal['sbm'] = 'sbm'
    k_tilde: Matrix
    a_tilde: Matrix
    mu: tuple[float, float]
    b: tuple[float, float] = (0.0, 0.0)

    def sizes(self, n: int) -> tuple[int, int]:
        return tuple(int(round(m * n + b * n ** (2 / 3))) for m, b in zip(self.mu, self.b))

    def build(self, n: int) -> ModelSpec:
        n1, n2 = self.sizes(n)
        return sbm_to_rank2(n1, n2, self.k_tilde, self.a_tilde, self.mu, self.b)


class BiperSource(BaseModel):
    """Bipartite Erdos-Renyi B(n, m, p) in one of its clustering regimes."""

    model_config = ConfigDict(extra='forbid')
    kind: Literal['biper'] = 'biper'
    lambda12: float
    regime: BipartiteRegime = BipartiteRegime.LIGHT
    m_factor: float = Field(100.0, gt=0)
    m: int | None = Field(None, ge=1)
    theta: float | None = Field(None, gt=0)

    def right_size(self, n: int) -> int:
        if self.m is not None:
            return self.m
        if self.regime is BipartiteRegime.MODERATE:
            return max(1, int(round(self.theta * n)))
        return max(1, int(round(self.m_factor * n)))

    @model_validator(mode='after')
    def _moderate_needs_theta(self):
        if self.regime is BipartiteRegime.MODERATE and self.theta is None:
            raise ValueError('moderate regime needs theta')
        return self

    def build(self, n: int) -> ModelSpec:
        return bip_er_to_rank2(n, self.right_size(n), self.lambda12, self.regime, self.theta)


class WeightLaw(BaseModel):
    """Per-type weights: n^{-2/3} 1_n, or n^{-(1 - 2 gamma)} l^{-gamma} for a power law."""

    model_config = ConfigDict(extra='forbid')
    kind: Literal['constant', 'power'] = 'constant'
    gamma: float = Field(0.4, gt=1 / 3, lt=0.5)
    size_factor: float = Field(1.0, gt=0)

    def weights(self, n: int) -> WeightVector:
        count = max(1, int(round(self.size_factor * n)))
        if self.kind == 'constant':
            return WeightVector.constant(count ** (-2 / 3), count)
        ranks = np.arange(1, count + 1, dtype=float)
        return WeightVector(count ** -(1 - 2 * self.gamma) * ranks ** -self.gamma)


class KernelSource(BaseModel):
    """Weights from per-type laws and Q = D^{-1/2} K D^{-1/2} + Lambda."""

    model_config = ConfigDict(extra='forbid')
    kind: Literal['kernel'] = 'kernel'
    weights: tuple[WeightLaw, WeightLaw] = (WeightLaw(), WeightLaw())
    K: Matrix
    Lambda: Matrix = [[0.0, 0.0], [0.0, 0.0]]
    alpha: float = 0.0
    empty_type2: bool = False

    def build(self, n: int) -> ModelSpec:
        w1 = self.weights[0].weights(n)
        if self.empty_type2:
            K = np.asarray(self.K, dtype=float)
            q11 = K[0, 0] / w1.sigma(2) + self.Lambda[0][0]
            return ModelSpec(w1, WeightVector(np.zeros(0)), np.array([[q11, 0.0], [0.0, 0.0]]))
        w2 = self.weights[1].weights(n)
        return spec_from_kernel(w1, w2, self.K, self.Lambda, self.alpha)


Source = Annotated[ExplicitSource | SbmSource | BiperSource | KernelSource, Field(discriminator='kind')]


# =============================================================================
# EXPERIMENT CONFIG
# =============================================================================

class LimitSettings(BaseModel):
    model_config = ConfigDict(extra='forbid')
    h: float | None = Field(None, gt=0)
    T: float | None = Field(None, gt=0)
    replicas: int = Field(2000, ge=1)
    auto_horizon: bool = True
    max_doublings: int = Field(3, ge=0)


class StatisticsSettings(BaseModel):
    model_config = ConfigDict(extra='forbid')
    top_k: int = Field(3, ge=1)
    significance: float = Field(0.01, gt=0, lt=1)
    pass_fraction: float = Field(0.8, gt=0, le=1)


class SlopeSettings(BaseModel):
    model_config = ConfigDict(extra='forbid')
    t_max: float = Field(5.0, gt=0)
    points: int = Field(500, ge=2)
    replicas: int = Field(50, ge=1)


class LimitPair(BaseModel):
    """Explicit per-type (beta_i, theta_i)."""

    model_config = ConfigDict(extra='forbid')
    beta: float = Field(ge=0)
    theta: list[float] = []

    def triple(self) -> LimitTriple:
        return LimitTriple(self.beta, np.asarray(self.theta, dtype=float))


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra='forbid')

    source: Source
    regime: Regime
    n_ladder: list[Annotated[int, Field(ge=1)]] = Field(min_length=1)
    replicas: int = Field(200, ge=1)
    limit: LimitSettings = LimitSettings()
    statistics: StatisticsSettings = StatisticsSettings()
    limits: tuple[LimitPair, LimitPair] | None = None
    slope: SlopeSettings = SlopeSettings()
    seed: int = Field(0, ge=0, le=U64_MAX)
    threads: int = Field(1, ge=1)

    def resolved(self) -> dict:
        return self.model_dump(mode='json')


def load_config(path: str | Path | None = None, overrides: dict | None = None,
                environ: dict[str, str] | None = None, document: dict | None = None) -> ExperimentConfig:
    """Read a JSON experiment and resolve seed and threads.

    Precedence is CLI override, then RANK2SIM_SEED / RANK2SIM_THREADS, then the
    document. ``overrides`` entries that are None count as absent.
    """
    if path is not None:
        try:
            raw = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f'cannot read config {path}: {exc}') from exc
    elif document is not None:
        raw = dict(document)
    else:
        raise ConfigError('no experiment config given')
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    settings = Settings.from_env(environ)
    for name in ('seed', 'threads'):
        if name not in overrides and name in settings.model_fields_set:
            raw[name] = getattr(settings, name)
            log.info(f'[config] {name} taken from the environment: {raw[name]}')
    for key, value in overrides.items():
        section, _, leaf = key.partition('.')
        if leaf:
            raw.setdefault(section, {})[leaf] = value
        else:
            raw[key] = value
    return ExperimentConfig.model_validate(raw)
