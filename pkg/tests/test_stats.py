"""Empirical distributions, KS distance, Hill estimator, bootstrap, chi-square."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from latfluct import (ContractViolation, EmpiricalDistribution, bootstrap_ci,
                      chi_square_uniform, hill_tail_index, ks_distance)
from latfluct.rng import Stream, derive_key, uniform_array

finite_floats = st.floats(allow_nan=False, allow_infinity=False,
                          min_value=-1e12, max_value=1e12)
float_arrays = hnp.arrays(np.float64, st.integers(1, 60), elements=finite_floats)


# ---------------------------------------------------------------------------
# EmpiricalDistribution


def test_distribution_sorts_and_summarizes():
    d = EmpiricalDistribution(np.array([3.0, -1.0, 2.0, 2.0]))
    assert d.n == 4
    assert d.samples.tolist() == [-1.0, 2.0, 2.0, 3.0]
    assert d.mean() == pytest.approx(1.5)
    assert d.moment(2) == pytest.approx((1 + 4 + 4 + 9) / 4)
    assert d.abs_moment(1) == pytest.approx(2.0)
    assert d.stderr() == pytest.approx(np.std(d.samples, ddof=1) / 2.0)
    assert d.quantile(0.5) == pytest.approx(2.0)


def test_distribution_cdf_right_continuous():
    d = EmpiricalDistribution(np.array([0.0, 1.0]))
    assert d.cdf(-0.5) == 0.0
    assert d.cdf(0.0) == 0.5
    assert d.cdf(0.5) == 0.5
    assert d.cdf(1.0) == 1.0
    out = d.cdf(np.array([0.0, 2.0]))
    assert out.tolist() == [0.5, 1.0]


def test_distribution_rejects_non_finite():
    with pytest.raises(ContractViolation):
        EmpiricalDistribution(np.array([1.0, math.nan]))
    with pytest.raises(ContractViolation):
        EmpiricalDistribution(np.array([math.inf]))


def test_empty_distribution_defers_errors():
    d = EmpiricalDistribution(np.array([]))
    assert d.n == 0
    for call in (d.mean, lambda: d.cdf(0.0), lambda: d.moment(2),
                 lambda: d.abs_moment(1), lambda: d.quantile(0.5)):
        with pytest.raises(ContractViolation):
            call()
    with pytest.raises(ContractViolation):
        EmpiricalDistribution(np.array([1.0])).stderr()


# ---------------------------------------------------------------------------
# KS distance


def test_ks_identical_samples():
    assert ks_distance([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == 0.0


def test_ks_disjoint_singletons():
    assert ks_distance([0.0], [1.0]) == 1.0


def test_ks_interleaved():
    assert ks_distance([0.0, 1.0], [0.5]) == 0.5


def test_ks_accepts_distributions():
    a = EmpiricalDistribution(np.array([0.0, 1.0]))
    b = EmpiricalDistribution(np.array([0.5]))
    assert ks_distance(a, b) == 0.5
    with pytest.raises(ContractViolation):
        ks_distance(a, np.array([]))


@given(a=float_arrays, b=float_arrays)
@settings(max_examples=200, deadline=None)
def test_ks_properties(a, b):
    d = ks_distance(a, b)
    assert 0.0 <= d <= 1.0
    assert d == ks_distance(b, a)
    assert ks_distance(a, a) == 0.0


def test_ks_against_scipy():
    from scipy.stats import ks_2samp
    rng = np.random.default_rng(2)
    for _ in range(20):
        a = rng.normal(size=rng.integers(5, 200))
        b = rng.normal(loc=rng.uniform(-1, 1), size=rng.integers(5, 200))
        assert ks_distance(a, b) == pytest.approx(
            ks_2samp(a, b).statistic, abs=1e-12)


# ---------------------------------------------------------------------------
# Hill estimator


def pareto(alpha: float, n: int, seed: int) -> np.ndarray:
    u = uniform_array(derive_key(seed), np.arange(n, dtype=np.int64))
    return (1.0 - u) ** (-1.0 / alpha)


def test_hill_recovers_four_thirds():
    x = pareto(4.0 / 3.0, 1_000_000, seed=9001)
    got = hill_tail_index(x, top_fraction=0.005)
    assert 1.23 <= got <= 1.43


def test_hill_recovers_three():
    x = pareto(3.0, 1_000_000, seed=9002)
    got = hill_tail_index(x, top_fraction=0.005)
    assert 2.7 <= got <= 3.3


def test_hill_uses_absolute_values():
    x = pareto(3.0, 1_000_000, seed=9003)
    signs = np.where(uniform_array(derive_key(5), np.arange(x.size)) < 0.5, -1, 1)
    assert hill_tail_index(x * signs) == hill_tail_index(x)


def test_hill_validation():
    x = pareto(2.0, 100_000, seed=1)
    with pytest.raises(ContractViolation):
        hill_tail_index(x, top_fraction=0.2)
    with pytest.raises(ContractViolation):
        hill_tail_index(x, top_fraction=0.0)
    with pytest.raises(ContractViolation):
        hill_tail_index(np.ones(200_000))  # constant tail is degenerate
    with pytest.raises(ContractViolation):
        hill_tail_index(x[:1000], top_fraction=0.005)  # k < 100


# ---------------------------------------------------------------------------
# bootstrap


def test_bootstrap_reproducible_and_contains_point():
    x = np.sin(np.arange(300, dtype=float))
    s = Stream(derive_key(33))
    lo, hi = bootstrap_ci(x, np.mean, s, n_boot=200)
    assert (lo, hi) == bootstrap_ci(x, np.mean, s, n_boot=200)
    assert lo < float(np.mean(x)) < hi


def test_bootstrap_validation():
    s = Stream(derive_key(33))
    with pytest.raises(ContractViolation):
        bootstrap_ci(np.array([1.0]), np.mean, s)
    with pytest.raises(ContractViolation):
        bootstrap_ci(np.arange(10.0), np.mean, s, n_boot=5)
    with pytest.raises(ContractViolation):
        bootstrap_ci(np.arange(10.0), np.mean, s, level=1.5)


def test_bootstrap_gaussian_coverage():
    # 100 seeded trials: the 95% interval for the mean should cover the
    # true mean 93 to 97 times
    n = 400
    covered = 0
    for trial in range(100):
        key = derive_key(777, trial)
        u1 = uniform_array(key, np.arange(n, dtype=np.int64))
        u2 = uniform_array(key, np.arange(n, 2 * n, dtype=np.int64))
        z = np.sqrt(-2.0 * np.log1p(-u1)) * np.cos(2.0 * np.pi * u2)
        lo, hi = bootstrap_ci(z, np.mean, Stream(derive_key(778, trial)),
                              n_boot=400)
        if lo <= 0.0 <= hi:
            covered += 1
    assert 93 <= covered <= 97


# ---------------------------------------------------------------------------
# chi-square


def test_chi_square_uniform_accepts_uniform():
    u = uniform_array(derive_key(12), np.arange(20_000, dtype=np.int64))
    stat, p = chi_square_uniform(u, bins=20)
    assert p > 1e-3
    assert stat < 60.0


def test_chi_square_rejects_concentrated():
    v = np.full(2000, 0.125)
    stat, p = chi_square_uniform(v, bins=20)
    assert p < 1e-12


def test_chi_square_validation():
    with pytest.raises(ContractViolation):
        chi_square_uniform(np.linspace(0, 0.99, 50), bins=20)
    with pytest.raises(ContractViolation):
        chi_square_uniform(np.linspace(0.0, 1.0, 200), bins=20)  # 1.0 included
