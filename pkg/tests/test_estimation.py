import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from rebitlab import analytics, entanglement, states
from rebitlab.estimation import (
    BinnedStat,
    Histogram,
    boundary_violations,
    conditional_mean,
    hist_accumulate,
    hist_density,
    hist_density_with_errors,
    ks_critical_value,
    ks_two_sample,
    ks_uniform,
)


def test_hist_bin_conventions():
    h = Histogram(0.0, 1.0, 10)
    assert hist_accumulate(h, 0.0).counts[0] == 1
    assert hist_accumulate(h, 1.0).counts[-1] == 1
    over = hist_accumulate(h, 1.0 + 1e-12)
    assert over.overflow == 1 and over.counts.sum() == 0 and over.total == 1
    under = hist_accumulate(h, -1e-12)
    assert under.underflow == 1
    assert hist_accumulate(h, 0.1).counts[1] == 1
    with pytest.raises(ValueError):
        hist_accumulate(h, math.nan)


def test_hist_density_single_bin():
    h = Histogram(0.0, 1.0, 10).accumulate(np.full(50, 0.35))
    dens = hist_density(h)
    assert dens[3] == pytest.approx((0.35, 10.0))
    assert sum(d for _, d in dens) == pytest.approx(10.0)
    with pytest.raises(ValueError):
        hist_density(Histogram(0.0, 1.0, 10))


def test_hist_density_uniform():
    x = np.random.default_rng(0).random(10**6)
    dens = np.array(hist_density(Histogram(0.0, 1.0, 100).accumulate(x)))
    # binomial standard error per bin is sqrt(0.01 * 0.99 / 1e6) / 0.01 ~ 0.01
    assert np.abs(dens[:, 1] - 1).max() < 0.05


def test_hist_mass_identity():
    x = np.random.default_rng(1).normal(0.5, 0.4, 10_000)
    h = Histogram(0.0, 1.0, 37).accumulate(x)
    mass = sum(d for _, d in hist_density(h)) * h.width
    assert mass == pytest.approx((h.total - h.underflow - h.overflow) / h.total, abs=1e-12)
    assert h.counts.sum() + h.underflow + h.overflow == h.total


def test_hist_merge_is_exact():
    rng = np.random.default_rng(2)
    a, b, c = (rng.random(1000) for _ in range(3))
    h = Histogram(0.0, 1.0, 20)
    left = h.accumulate(a).merge(h.accumulate(b)).merge(h.accumulate(c))
    right = h.accumulate(c).merge(h.accumulate(a).merge(h.accumulate(b)))
    single = h.accumulate(np.concatenate([a, b, c]))
    for other in (right, single):
        np.testing.assert_array_equal(left.counts, other.counts)
        assert left.total == other.total
    with pytest.raises(ValueError):
        h.merge(Histogram(0.0, 2.0, 20))


def test_hist_stderr():
    h = Histogram(0.0, 1.0, 4).accumulate([0.1, 0.1, 0.6, 0.9])
    _, d, e = hist_density_with_errors(h)[0]
    assert d == pytest.approx(2.0)
    assert e == pytest.approx(math.sqrt(0.5 * 0.5 / 4) / 0.25)


def test_conditional_mean_constant():
    x = np.random.default_rng(3).random(5000)
    b = conditional_mean(x, np.full_like(x, 0.7), np.linspace(0, 1, 11))
    means = b.means()
    np.testing.assert_allclose(means[b.count > 0], 0.7, rtol=0, atol=1e-15)


def test_conditional_mean_identity():
    x = np.random.default_rng(4).random(200_000)
    edges = np.linspace(0, 1, 61)
    b = conditional_mean(x, x, edges)
    assert np.all(np.abs(b.means() - b.centers) < 3 * b.stderrs())
    # stderr oracle: uniform within a bin has variance width^2 / 12
    width = edges[1] - edges[0]
    np.testing.assert_allclose(b.variances(), width**2 / 12, rtol=0.05)


def test_conditional_mean_empty_bins_are_missing():
    b = conditional_mean([0.1, 0.15], [1.0, 2.0], [0.0, 0.5, 1.0])
    assert b.means()[0] == pytest.approx(1.5)
    assert math.isnan(b.means()[1])
    assert b.count[1] == 0
    with pytest.raises(ValueError):
        conditional_mean([math.nan], [1.0], [0.0, 1.0])


def test_binned_merge_matches_single_pass():
    rng = np.random.default_rng(5)
    x, y = rng.random(30_000), rng.normal(3.0, 1.0, 30_000)
    edges = np.linspace(0, 1, 8)
    whole = conditional_mean(x, y, edges)
    parts = [BinnedStat(edges).accumulate(x[i : i + 7000], y[i : i + 7000]) for i in range(0, 30_000, 7000)]
    forward = parts[0]
    for p in parts[1:]:
        forward = forward.merge(p)
    backward = parts[-1]
    for p in parts[-2::-1]:
        backward = p.merge(backward)
    for merged in (forward, backward):
        np.testing.assert_array_equal(merged.count, whole.count)
        np.testing.assert_allclose(merged.means(), whole.means(), rtol=1e-13)
        np.testing.assert_allclose(merged.variances(), whole.variances(), rtol=1e-11)
        np.testing.assert_allclose(merged.variances(), [np.var(y[(x >= lo) & (x < hi)], ddof=1) for lo, hi in zip(edges[:-1], edges[1:])], rtol=1e-11)


def test_binned_merge_with_empty_is_exact():
    rng = np.random.default_rng(6)
    b = conditional_mean(rng.random(100), rng.random(100), np.linspace(0, 1, 5))
    e = BinnedStat(np.linspace(0, 1, 5))
    for merged in (b.merge(e), e.merge(b)):
        np.testing.assert_array_equal(merged.mean, b.mean)
        np.testing.assert_array_equal(merged.m2, b.m2)


def test_ks_grid_example():
    samples = [0.1, 0.2, 0.3, 0.4, 0.5, 0.5, 0.6, 0.7, 0.8, 0.9]
    res = ks_uniform(samples)
    assert res.statistic <= 0.1 + 1e-12
    assert res.n == 10
    assert res.scaled == pytest.approx(res.statistic * math.sqrt(10))
    with pytest.raises(ValueError):
        ks_uniform([0.5] * 9)
    with pytest.raises(ValueError):
        ks_uniform([0.5] * 9 + [1.5])


def test_ks_matches_scipy():
    x = np.random.default_rng(7).random(1000) ** 1.1
    assert ks_uniform(x).statistic == pytest.approx(stats.kstest(x, "uniform").statistic, abs=1e-15)
    y = np.random.default_rng(8).random(700)
    assert ks_two_sample(x, y).statistic == pytest.approx(stats.ks_2samp(x, y).statistic, abs=1e-15)


def test_ks_uniform_draws_below_critical_value():
    x = np.random.default_rng(9).random(10**5)
    assert ks_uniform(x).scaled < 1.95


def test_ks_critical_values():
    assert ks_critical_value(0.001) == pytest.approx(1.9495, abs=1e-4)
    assert ks_critical_value(0.01) == pytest.approx(1.6276, abs=1e-4)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=10, max_size=200), st.randoms())
def test_ks_permutation_invariant(xs, rnd):
    shuffled = xs[:]
    rnd.shuffle(shuffled)
    assert ks_uniform(xs).statistic == ks_uniform(shuffled).statistic


def test_boundary_violations_on_families():
    mix = [entanglement.evaluate(states.maximal_entangled_mixture(p)) for p in np.linspace(0, 1, 51)]
    fam = [entanglement.evaluate(analytics.maximal_family_state(b)) for b in np.linspace(-0.5, 0.5, 51)]
    assert boundary_violations(mix, 1e-9) == 0
    assert boundary_violations(fam, 1e-9) == 0
    outside = {"participation_ratio": np.array([3.0]), "c_cfr": np.array([0.8])}
    assert boundary_violations(outside, 1e-9) == 1
