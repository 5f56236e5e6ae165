"""
Reference model specs and experiment documents for testing.

Each builder returns a spec whose limit is known in closed form, or a tiny
spec small enough for exhaustive enumeration.
"""

import math

import numpy as np

from rank2sim.params import ModelSpec, WeightVector, bip_er_to_rank2, spec_from_kernel

ER_KERNEL = [[0.5, 0.5], [0.5, 0.5]]
IDENTITY = [[1.0, 0.0], [0.0, 1.0]]


def constant_weights(n: int) -> WeightVector:
    return WeightVector.constant(n ** (-2 / 3), n)


def er_embedded_spec(n: int) -> ModelSpec:
    """Critical Erdos-Renyi graph on 2n vertices split into two equal types."""
    return spec_from_kernel(constant_weights(n), constant_weights(n), ER_KERNEL, np.zeros((2, 2)))


def interacting_spec(n: int, lambda12: float = 1.0) -> ModelSpec:
    return spec_from_kernel(constant_weights(n), constant_weights(n), IDENTITY,
                            [[0.0, lambda12], [lambda12, 0.0]])


def light_bipartite_spec(n: int, m: int, lambda12: float = 1.0) -> ModelSpec:
    return bip_er_to_rank2(n, m, lambda12, 'light')


def tiny_spec() -> ModelSpec:
    """Vertices (1,1), (2,1), (1,2); p = 0.5 inside type 1 and 0.3 across types."""
    q11 = -math.log(0.5)
    q12 = -math.log(0.7)
    return ModelSpec(WeightVector.constant(1.0, 2), WeightVector.constant(1.0, 1),
                     np.array([[q11, q12], [q12, 0.0]]))


def duality_spec() -> ModelSpec:
    return ModelSpec(WeightVector.constant(0.5, 5), WeightVector.constant(0.4, 5),
                     np.array([[1.2, 0.8], [0.8, 1.5]]))


# ── experiment documents ────────────────────────────────────

def kernel_document(regime: str, K, Lambda, n_ladder, replicas: int = 20,
                    limit_replicas: int = 40, **extra) -> dict:
    doc = {
        'source': {'kind': 'kernel', 'K': K, 'Lambda': Lambda},
        'regime': regime,
        'n_ladder': list(n_ladder),
        'replicas': replicas,
        'limit': {'replicas': limit_replicas},
        'seed': 7,
    }
    doc.update(extra)
    return doc


def classic_document(n_ladder=(200, 400), **kw) -> dict:
    return kernel_document('classic', ER_KERNEL, [[0.0, 0.0], [0.0, 0.0]], n_ladder, **kw)


def interacting_document(n_ladder=(200, 400), **kw) -> dict:
    return kernel_document('interacting', IDENTITY, [[0.0, 1.0], [1.0, 0.0]], n_ladder, **kw)


def bipartite_document(n_ladder=(200, 400), m_factor: float = 10.0, **kw) -> dict:
    doc = {
        'source': {'kind': 'biper', 'lambda12': 1.0, 'regime': 'light', 'm_factor': m_factor},
        'regime': 'bipartite',
        'n_ladder': list(n_ladder),
        'replicas': kw.pop('replicas', 20),
        'limit': {'replicas': kw.pop('limit_replicas', 40)},
        'seed': 7,
    }
    doc.update(kw)
    return doc
