"""
Size-biased permutations.

An order pi of the indices with positive size is size-biased when
P(pi = tau) = prod_l s_tau(l) / sum_{k >= l} s_tau(k).
Zero sizes never appear in the order.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

import numpy as np

from rank2sim.errors import AllZero


@dataclass(frozen=True, eq=False)
class SizeBiasedDraw:
    order: np.ndarray
    sizes: np.ndarray

    def __len__(self) -> int:
        return int(self.order.size)

    def as_tuple(self) -> tuple[int, ...]:
        return tuple(int(i) for i in self.order)


def _positive(sizes) -> tuple[np.ndarray, np.ndarray]:
    sizes = np.asarray(sizes, dtype=float).ravel()
    if np.any(sizes < 0):
        raise ValueError('sizes must be non-negative')
    idx = np.flatnonzero(sizes > 0)
    if idx.size == 0:
        raise AllZero('size-biased order needs at least one positive size')
    return sizes, idx


def size_biased_permutation(sizes, rng: np.random.Generator) -> SizeBiasedDraw:
    """Sequential weighted sampling without replacement among positive sizes."""
    sizes, idx = _positive(sizes)
    remaining = list(idx.tolist())
    order = []
    while remaining:
        weights = np.cumsum(sizes[remaining])
        k = int(np.searchsorted(weights, rng.random() * weights[-1], side='right'))
        order.append(remaining.pop(min(k, len(remaining) - 1)))
    return SizeBiasedDraw(np.array(order, dtype=int), sizes)


def exponential_embedding(sizes, rng: np.random.Generator) -> SizeBiasedDraw:
    """Order the positive sizes by independent Exp(s_j) clocks."""
    sizes, idx = _positive(sizes)
    clocks = rng.exponential(1.0 / sizes[idx])
    return SizeBiasedDraw(idx[np.argsort(clocks, kind='stable')], sizes)


def first_two_law(sizes) -> dict[tuple[int, ...], float]:
    """Exact law of the first two entries of a size-biased order.

    Keys have length 2, or length 1 when only one size is positive.
    """
    sizes, idx = _positive(sizes)
    total = sizes[idx].sum()
    if idx.size == 1:
        return {(int(idx[0]),): 1.0}
    law = {}
    for i, j in permutations(idx.tolist(), 2):
        law[(i, j)] = sizes[i] / total * sizes[j] / (total - sizes[i])
    return law


def permutation_law(sizes) -> dict[tuple[int, ...], float]:
    """Exact law of the full order, for small inputs."""
    sizes, idx = _positive(sizes)
    law = {}
    for perm in permutations(idx.tolist()):
        p, rest = 1.0, sizes[idx].sum()
        for i in perm:
            p *= sizes[i] / rest
            rest -= sizes[i]
        law[perm] = p
    return law
