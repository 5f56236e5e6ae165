"""
Integration test: sampled component partitions of tiny graphs against exact enumeration.
"""

import numpy as np
import pytest

from rank2sim.graphgen import partition_key, sample_graph
from rank2sim.params import ModelSpec, WeightVector
from rank2sim.stats import empirical_law, tv_distance
from tests.fixtures.model_specs import tiny_spec
from tests.fixtures.path_generators import exhaustive_partition_law

pytestmark = pytest.mark.integration

SAMPLES = 200_000


def _mixed_spec() -> ModelSpec:
    return ModelSpec(WeightVector(np.array([1.0, 0.5])), WeightVector(np.array([0.8, 0.3])),
                     np.array([[0.7, 0.9], [0.9, 1.2]]))


class TestSmallGraphLaw:

    @pytest.mark.parametrize('build', [tiny_spec, _mixed_spec], ids=['two_plus_one', 'two_plus_two'])
    def test_partition_law(self, build, rng):
        spec = build()
        exact = exhaustive_partition_law(spec)
        assert sum(exact.values()) == pytest.approx(1.0)
        sampled = empirical_law(partition_key(sample_graph(spec, rng)) for _ in range(SAMPLES))
        assert tv_distance(sampled, exact) <= 0.01

    def test_hand_computed_probabilities(self):
        law = exhaustive_partition_law(tiny_spec())
        singletons = frozenset({frozenset({(1, 1)}), frozenset({(2, 1)}), frozenset({(1, 2)})})
        # no edge: 0.5 * 0.7 * 0.7
        assert law[singletons] == pytest.approx(0.245)
        whole = frozenset({frozenset({(1, 1), (2, 1), (1, 2)})})
        # connected iff at least two of the three edges are present
        p = 0.5 * 0.3 * 0.3 + 0.5 * 0.3 * 0.7 * 2 + 0.5 * 0.3 * 0.3
        assert law[whole] == pytest.approx(p)
