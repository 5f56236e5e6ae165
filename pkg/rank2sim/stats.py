"""
Two-sample statistics and Monte Carlo bands used by the harness and the tests.
"""

from __future__ import annotations

from collections import Counter
from collections.abc import Hashable, Iterable, Mapping

import numpy as np
from scipy import stats

from rank2sim.errors import EmptySample


def _sample(a, name: str) -> np.ndarray:
    arr = np.asarray(a, dtype=float).ravel()
    if arr.size == 0:
        raise EmptySample(f'{name} is empty')
    return arr


def ks_two_sample(a, b) -> tuple[float, float]:
    """Two-sample Kolmogorov-Smirnov statistic with its asymptotic p-value."""
    a, b = _sample(a, 'first sample'), _sample(b, 'second sample')
    res = stats.ks_2samp(a, b, method='asymp')
    return float(res.statistic), float(res.pvalue)


def wasserstein1(a, b) -> float:
    """W1 distance between the empirical laws of ``a`` and ``b``."""
    a, b = _sample(a, 'first sample'), _sample(b, 'second sample')
    return float(stats.wasserstein_distance(a, b))


def band_check(sample, mean: float, var: float, sigmas: float = 3.0) -> bool:
    """Sample mean within ``sigmas`` standard errors of ``mean``, given the true variance."""
    x = _sample(sample, 'sample')
    se = np.sqrt(max(var, 0.0) / x.size)
    return bool(abs(x.mean() - mean) <= sigmas * se + 1e-12 * max(1.0, abs(mean)))


def variance_band_check(sample, var: float, sigmas: float = 3.0) -> bool:
    """Sample variance within ``sigmas`` standard errors of ``var``.

    The standard error uses the empirical fourth central moment.
    """
    x = _sample(sample, 'sample')
    centred = x - x.mean()
    m4 = float(np.mean(centred ** 4))
    se = np.sqrt(max(m4 - var ** 2, 0.0) / x.size)
    return bool(abs(x.var(ddof=1) - var) <= sigmas * se + 1e-12 * max(1.0, abs(var)))


def empirical_law(draws: Iterable[Hashable]) -> dict:
    counts = Counter(draws)
    total = sum(counts.values())
    if total == 0:
        raise EmptySample('no draws')
    return {k: c / total for k, c in counts.items()}


def tv_distance(p: Mapping, q: Mapping) -> float:
    """Total variation distance between two laws on a finite set."""
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)


def pass_fraction(pvalues, significance: float) -> float:
    pv = np.asarray(list(pvalues), dtype=float)
    if pv.size == 0:
        return 1.0
    return float(np.mean(pv > significance))
