"""
Large-n acceptance experiments per regime.

Each run takes minutes; all are marked slow and deselected by default.
Run with:
    pytest tests/e2e/test_acceptance.py -m slow -v
"""

import math

import numpy as np
import pytest

from rank2sim.config import load_config
from rank2sim.harness import run_regime_experiment, slope_diagnostic
from rank2sim.levy import limit_interacting, limit_interacting_merged, zeta_from_path
from rank2sim.params import InteractingParams, LimitTriple
from rank2sim.stats import ks_two_sample
from tests.fixtures.model_specs import bipartite_document, classic_document, interacting_document

pytestmark = [pytest.mark.e2e, pytest.mark.slow]

N = 100_000
SIGNIFICANCE = 0.01
GRAPH_REPLICAS = 200
LIMIT_REPLICAS = 2000


def _cfg(document: dict):
    return load_config(document=document, environ={})


def _ks_critical(n: int, m: int, alpha: float = SIGNIFICANCE) -> float:
    """Asymptotic two-sample KS critical value."""
    return math.sqrt(-0.5 * math.log(alpha / 2)) * math.sqrt((n + m) / (n * m))


def _top1(report):
    (rung,) = report.rungs
    return rung, rung.tests[0]


# ============================================================
# REGIMES
# ============================================================

class TestClassic:

    def test_top_mass_and_ratio(self, tmp_path):
        cfg = _cfg(classic_document(n_ladder=(N,), replicas=GRAPH_REPLICAS, limit_replicas=LIMIT_REPLICAS))
        rung, top1 = _top1(run_regime_experiment(cfg, tmp_path))
        assert top1.ks_pvalue > SIGNIFICANCE
        assert rung.ratio_expected == pytest.approx(1.0)
        assert rung.ratio_relative_error < 0.05

    def test_slope(self):
        cfg = _cfg(classic_document(n_ladder=(N,), slope={'replicas': 50}))
        est = slope_diagnostic(cfg)
        assert est.relative_error < 0.05


class TestBipartite:

    def test_light_regime(self, tmp_path):
        doc = bipartite_document(n_ladder=(N,), m_factor=100.0, replicas=GRAPH_REPLICAS,
                                 limit_replicas=LIMIT_REPLICAS)
        rung, top1 = _top1(run_regime_experiment(_cfg(doc), tmp_path))
        assert rung.sizes == (N, 100 * N)
        assert top1.ks_pvalue > SIGNIFICANCE
        assert rung.top1_correlation > 0.95


class TestInteracting:

    def test_top_mass(self, tmp_path):
        cfg = _cfg(interacting_document(n_ladder=(N,), replicas=GRAPH_REPLICAS, limit_replicas=LIMIT_REPLICAS))
        _, top1 = _top1(run_regime_experiment(cfg, tmp_path))
        assert top1.ks_pvalue > SIGNIFICANCE

    def test_merged_representation(self, rng):
        one = LimitTriple(1.0)
        rp = InteractingParams((one, one), 1.0)
        direct, merged = [], []
        for _ in range(LIMIT_REPLICAS):
            lengths, _ = zeta_from_path(limit_interacting(rp, None, None, rng))
            direct.append(lengths[0] if lengths.size else 0.0)
            lengths, _ = zeta_from_path(limit_interacting_merged(rp, None, None, rng).path)
            merged.append(lengths[0] if lengths.size else 0.0)
        _, pvalue = ks_two_sample(np.array(direct), np.array(merged))
        assert pvalue > SIGNIFICANCE


# ============================================================
# GRID ROBUSTNESS
# ============================================================

class TestGridRobustness:
    """Halving h or doubling T moves the KS statistic by less than half its critical value."""

    BASE = {'h': 3e-3, 'T': 30.0}

    @pytest.mark.parametrize('build', [classic_document, bipartite_document, interacting_document],
                             ids=['classic', 'bipartite', 'interacting'])
    def test_statistic_is_stable(self, tmp_path, build):
        def run(limit: dict, name: str) -> float:
            doc = build(n_ladder=(N,), replicas=GRAPH_REPLICAS, limit_replicas=LIMIT_REPLICAS)
            doc['limit'].update(limit, auto_horizon=False)
            _, top1 = _top1(run_regime_experiment(_cfg(doc), tmp_path / name))
            return top1.ks_statistic

        base = run(self.BASE, 'base')
        finer = run({**self.BASE, 'h': self.BASE['h'] / 2}, 'finer')
        longer = run({**self.BASE, 'T': self.BASE['T'] * 2}, 'longer')
        tolerance = 0.5 * _ks_critical(GRAPH_REPLICAS, LIMIT_REPLICAS)
        assert abs(finer - base) < tolerance
        assert abs(longer - base) < tolerance
