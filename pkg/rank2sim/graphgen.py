"""
Sampling of the rank-2 multiplicative graph G(W, Q) and its component masses.

Edges are sampled as a Poissonized multigraph per block: the number of (l, r)
draws in block (i, j) is Poisson(q_ij sigma_1(w^i) sigma_1(w^j)) (halved inside a
block), endpoints are weight-proportional, and duplicates/self-loops are
discarded. Each pair then carries at least one draw with probability exactly
1 - exp(-q_ij w_l w_r), independently over pairs.

Vertex indices are 0-based inside this module; exports are 1-based.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):
        __str__ = str.__str__
        __format__ = str.__format__

import numpy as np

from rank2sim.params import ModelSpec, WeightVector

log = logging.getLogger(__name__)


# =============================================================================
# WEIGHT-PROPORTIONAL DRAWS
# =============================================================================

class AliasTable:
    """Vose alias table: O(1) draws of index l with probability w_l / sigma_1(w)."""

    def __init__(self, w: WeightVector):
        self.n = len(w)
        self.uniform = w.is_constant or self.n <= 1
        if self.uniform:
            self.prob = self.alias = None
            return
        p = w.entries * (self.n / w.sigma(1))
        prob = np.ones(self.n)
        alias = np.arange(self.n)
        small = [i for i in range(self.n) if p[i] < 1.0]
        large = [i for i in range(self.n) if p[i] >= 1.0]
        p = p.tolist()
        while small and large:
            s, g = small.pop(), large.pop()
            prob[s] = p[s]
            alias[s] = g
            p[g] = p[g] + p[s] - 1.0
            (small if p[g] < 1.0 else large).append(g)
        # leftovers are 1 up to rounding
        self.prob, self.alias = prob, alias

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.n == 0:
            return np.zeros(0, dtype=np.int64)
        idx = rng.integers(0, self.n, size=size)
        if self.uniform:
            return idx
        coin = rng.random(size)
        return np.where(coin < self.prob[idx], idx, self.alias[idx])


# =============================================================================
# UNION-FIND
# =============================================================================

class UnionFind:
    """Disjoint sets over 0..n-1 with path halving and union by size."""

    def __init__(self, n: int):
        self._parent = list(range(n))
        self._size = [1] * n
        self.n_sets = n

    def __repr__(self) -> str:
        return f'UnionFind: contains {self.n_sets} sets.'

    def find(self, a: int) -> int:
        parent = self._parent
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(self, a: int, b: int) -> int:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return ra
        if self._size[ra] < self._size[rb]:
            ra, rb = rb, ra
        self._parent[rb] = ra
        self._size[ra] += self._size[rb]
        self.n_sets -= 1
        return ra

    def size(self, a: int) -> int:
        return self._size[self.find(a)]

    def roots(self) -> np.ndarray:
        return np.fromiter((self.find(a) for a in range(len(self._parent))),
                           dtype=np.int64, count=len(self._parent))


# =============================================================================
# GRAPHS
# =============================================================================

@dataclass(frozen=True, eq=False)
class Rank2Graph:
    """Edge list of a sampled graph; types are 1 or 2, indices 0-based within type."""

    spec: ModelSpec
    type_a: np.ndarray
    index_a: np.ndarray
    type_b: np.ndarray
    index_b: np.ndarray

    @property
    def n_edges(self) -> int:
        return int(self.type_a.size)

    @property
    def sizes(self) -> tuple[int, int]:
        return len(self.spec.w1), len(self.spec.w2)

    def edges(self) -> list[tuple[tuple[int, int], tuple[int, int]]]:
        """Edges as ((l, i), (r, j)) with 1-based l, r."""
        return [((int(l) + 1, int(i)), (int(r) + 1, int(j)))
                for i, l, j, r in zip(self.type_a, self.index_a, self.type_b, self.index_b)]

    def global_ids(self) -> tuple[np.ndarray, np.ndarray]:
        """Endpoint ids in 0..n1+n2-1, type-1 vertices first."""
        n1 = len(self.spec.w1)
        a = self.index_a + np.where(self.type_a == 2, n1, 0)
        b = self.index_b + np.where(self.type_b == 2, n1, 0)
        return a, b


def _block(rng: np.random.Generator, q: float, tables: tuple[AliasTable, AliasTable],
           weights: tuple[WeightVector, WeightVector], same: bool) -> tuple[np.ndarray, np.ndarray]:
    w_a, w_b = weights
    if q <= 0 or len(w_a) == 0 or len(w_b) == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    mean = q * w_a.sigma(1) * w_b.sigma(1)
    if same:
        mean *= 0.5
    count = int(rng.poisson(mean))
    left = tables[0].draw(rng, count)
    right = tables[1].draw(rng, count)
    if same:
        keep = left != right
        left, right = left[keep], right[keep]
        left, right = np.minimum(left, right), np.maximum(left, right)
    keys = np.unique(left.astype(np.int64) * len(w_b) + right)
    return keys // len(w_b), keys % len(w_b)


def sample_graph(spec: ModelSpec, rng: np.random.Generator) -> Rank2Graph:
    """Each pair ((l,i),(r,j)) is an edge independently with probability 1 - exp(-q_ij w^i_l w^j_r)."""
    w1, w2 = spec.weights
    t1, t2 = AliasTable(w1), AliasTable(w2)
    blocks = [
        (1, 1, _block(rng, spec.q(1, 1), (t1, t1), (w1, w1), True)),
        (1, 2, _block(rng, spec.q(1, 2), (t1, t2), (w1, w2), False)),
        (2, 2, _block(rng, spec.q(2, 2), (t2, t2), (w2, w2), True)),
    ]
    type_a = np.concatenate([np.full(l.size, i, dtype=np.int8) for i, _, (l, _) in blocks])
    type_b = np.concatenate([np.full(r.size, j, dtype=np.int8) for _, j, (_, r) in blocks])
    index_a = np.concatenate([l for _, _, (l, _) in blocks])
    index_b = np.concatenate([r for _, _, (_, r) in blocks])
    log.debug(f'[graph] sampled {index_a.size} edges on {len(w1)}+{len(w2)} vertices')
    return Rank2Graph(spec, type_a, index_a, type_b, index_b)


# =============================================================================
# COMPONENTS
# =============================================================================

class Coordinate(StrEnum):
    TYPE1 = '1'
    TYPE2 = '2'
    TOTAL = 'total'


@dataclass(frozen=True, eq=False)
class ComponentMassList:
    """Component mass vectors (M_l1, M_l2) in list order.

    ``counts`` holds vertex counts per type, ``min_vertex`` the smallest global
    vertex id of each component, and ``membership`` maps global vertex id to
    list position (None for lists built directly from masses).
    """

    masses: np.ndarray
    counts: np.ndarray | None = None
    min_vertex: np.ndarray | None = None
    membership: np.ndarray | None = None

    @classmethod
    def from_masses(cls, masses) -> ComponentMassList:
        arr = np.asarray(masses, dtype=float).reshape(-1, 2)
        return cls(arr, None, np.arange(arr.shape[0]), None)

    def __len__(self) -> int:
        return int(self.masses.shape[0])

    def as_list(self) -> list[tuple[float, float]]:
        return [(float(a), float(b)) for a, b in self.masses]

    def top(self, k: int) -> np.ndarray:
        out = np.zeros((k, 2))
        m = min(k, len(self))
        out[:m] = self.masses[:m]
        return out

    def totals(self) -> np.ndarray:
        return self.masses.sum(axis=0)

    def _take(self, order: np.ndarray) -> ComponentMassList:
        membership = None
        if self.membership is not None:
            rank = np.empty(order.size, dtype=np.int64)
            rank[order] = np.arange(order.size)
            membership = rank[self.membership]
        return ComponentMassList(
            self.masses[order],
            None if self.counts is None else self.counts[order],
            None if self.min_vertex is None else self.min_vertex[order],
            membership,
        )


def components(g: Rank2Graph) -> ComponentMassList:
    """Connected components with masses, ordered by (M1 desc, M2 desc, min vertex asc)."""
    w1, w2 = g.spec.weights
    n1, n2 = len(w1), len(w2)
    total = n1 + n2
    a, b = g.global_ids()

    label = np.arange(total, dtype=np.int64)
    if a.size:
        touched, compact = np.unique(np.concatenate([a, b]), return_inverse=True)
        uf = UnionFind(touched.size)
        for x, y in zip(compact[:a.size].tolist(), compact[a.size:].tolist()):
            uf.union(x, y)
        label[touched] = touched[uf.roots()]

    _, first, inverse = np.unique(label, return_index=True, return_inverse=True)
    n_comp = first.size
    m1 = np.bincount(inverse[:n1], weights=w1.entries, minlength=n_comp)
    m2 = np.bincount(inverse[n1:], weights=w2.entries, minlength=n_comp)
    c1 = np.bincount(inverse[:n1], minlength=n_comp)
    c2 = np.bincount(inverse[n1:], minlength=n_comp)
    unordered = ComponentMassList(np.column_stack([m1, m2]), np.column_stack([c1, c2]),
                                  first.astype(np.int64), inverse.astype(np.int64))
    return ord_by(unordered, Coordinate.TYPE1)


def ord_by(masses: ComponentMassList, coordinate: Coordinate | str | int = Coordinate.TYPE1) -> ComponentMassList:
    """Reorder by one coordinate descending; ties by the other coordinate, then position.

    Position means min vertex id when known, otherwise current list order.
    """
    coordinate = Coordinate(str(coordinate))
    m = masses.masses
    tie = masses.min_vertex if masses.min_vertex is not None else np.arange(len(masses))
    if coordinate is Coordinate.TYPE1:
        keys = (tie, -m[:, 1], -m[:, 0])
    elif coordinate is Coordinate.TYPE2:
        keys = (tie, -m[:, 0], -m[:, 1])
    else:
        keys = (tie, -m[:, 0], -(m[:, 0] + m[:, 1]))
    return masses._take(np.lexsort(keys))


def component_counts(masses: ComponentMassList) -> np.ndarray:
    """Vertex counts (type 1, type 2) per component, in list order."""
    if masses.counts is None:
        raise ValueError('component list carries no vertex counts')
    return masses.counts


def partition_key(g: Rank2Graph) -> frozenset:
    """Canonical component partition of a small graph, as sets of (index, type)."""
    n1, n2 = g.sizes
    comps = components(g)
    blocks: dict[int, set] = {}
    for v, c in enumerate(comps.membership.tolist()):
        vertex = (v + 1, 1) if v < n1 else (v - n1 + 1, 2)
        blocks.setdefault(c, set()).add(vertex)
    return frozenset(frozenset(s) for s in blocks.values())
