"""
Two-sample statistics and Monte Carlo bands.
"""

import numpy as np
import pytest

from rank2sim.errors import EmptySample
from rank2sim.stats import (
    band_check,
    empirical_law,
    ks_two_sample,
    pass_fraction,
    tv_distance,
    variance_band_check,
    wasserstein1,
)

pytestmark = pytest.mark.unit


class TestTwoSample:

    def test_identical_samples(self):
        a = np.arange(50, dtype=float)
        stat, pvalue = ks_two_sample(a, a)
        assert stat == 0.0
        assert pvalue == pytest.approx(1.0)

    def test_disjoint_samples(self):
        stat, pvalue = ks_two_sample(np.zeros(100), np.ones(100))
        assert stat == 1.0
        assert pvalue < 1e-10

    def test_wasserstein_shift(self):
        a = np.array([0.0, 1.0, 2.5])
        assert wasserstein1(a, a + 0.75) == pytest.approx(0.75)

    def test_empty_sample(self):
        with pytest.raises(EmptySample):
            ks_two_sample([], [1.0])
        with pytest.raises(EmptySample):
            wasserstein1([1.0], [])


class TestBands:

    def test_normal_sample_in_band(self, rng):
        x = rng.normal(2.0, 3.0, 5000)
        assert band_check(x, 2.0, 9.0)
        assert variance_band_check(x, 9.0)

    def test_wrong_mean_out_of_band(self, rng):
        assert not band_check(rng.normal(0.0, 1.0, 5000), 0.5, 1.0)

    def test_wrong_variance_out_of_band(self, rng):
        assert not variance_band_check(rng.normal(0.0, 1.0, 5000), 2.0)


class TestLaws:

    def test_empirical_law(self):
        assert empirical_law(['a', 'b', 'a', 'a']) == {'a': 0.75, 'b': 0.25}

    def test_empirical_law_empty(self):
        with pytest.raises(EmptySample):
            empirical_law([])

    def test_tv_distance(self):
        assert tv_distance({'a': 0.5, 'b': 0.5}, {'a': 1.0}) == pytest.approx(0.5)
        assert tv_distance({'a': 1.0}, {'a': 1.0}) == 0.0

    def test_pass_fraction(self):
        assert pass_fraction([0.5, 0.001, 0.2, 0.3], 0.01) == 0.75
        assert pass_fraction([], 0.01) == 1.0
