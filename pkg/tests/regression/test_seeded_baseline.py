"""
Seeded baseline snapshots.

These tests capture the CURRENT output of the samplers for fixed seeds.
The first run writes the snapshot and skips; later runs compare against it.
Delete a snapshot file to re-baseline after an intended change of a sampler.

Usage:
    pytest tests/regression/test_seeded_baseline.py -v
"""

import json
from pathlib import Path

import numpy as np
import pytest

from rank2sim.exploration import build_exploration, exploration_field, field_hitting_time, first_excursion_mass
from rank2sim.graphgen import components, sample_graph
from rank2sim.levy import zeta
from rank2sim.params import LimitTriple
from tests.fixtures.model_specs import duality_spec, er_embedded_spec

pytestmark = pytest.mark.regression

SNAPSHOTS_DIR = Path(__file__).parent / 'snapshots'
SEED = 20240611


def _check(name: str, current: dict):
    path = SNAPSHOTS_DIR / f'{name}_baseline.json'
    if not path.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(current, indent=2, sort_keys=True))
        pytest.skip(f'baseline {path.name} written')
    baseline = json.loads(path.read_text())
    assert baseline.keys() == current.keys()
    for key, expected in baseline.items():
        np.testing.assert_allclose(current[key], expected, rtol=1e-12, atol=0, err_msg=key)


class TestSeededBaseline:

    def test_component_masses(self):
        g = sample_graph(er_embedded_spec(500), np.random.default_rng(SEED))
        comps = components(g)
        _check('components', {
            'n_edges': [g.n_edges],
            'top_masses': comps.masses[:5].ravel().tolist(),
            'n_components': [len(comps)],
        })

    def test_zeta(self):
        z = zeta(LimitTriple(1.0, (0.8, 0.4), -0.5), 0.01, 20.0, np.random.default_rng(SEED), auto_horizon=False)
        _check('zeta', {'top': z.top(5).tolist()})

    def test_first_excursion(self):
        masses = []
        rng = np.random.default_rng(SEED)
        for _ in range(20):
            mass = first_excursion_mass(build_exploration(duality_spec(), rng))
            masses.extend([-1.0, -1.0] if mass is None else mass.tolist())
        _check('first_excursion', {'masses': masses})

    def test_hitting_times(self):
        F = exploration_field(build_exploration(duality_spec(), np.random.default_rng(SEED)))
        times = [field_hitting_time(F, r).tolist() for r in ([0.5, 0.0], [0.0, 0.4], [1.0, 0.8])]
        _check('hitting_times', {'times': np.ravel(times).tolist()})
