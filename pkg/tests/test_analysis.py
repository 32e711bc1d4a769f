"""Tests for total-variation helpers, degree laws, and law-level diagnostics."""

import math

import numpy as np
import pytest
from scipy import stats
from scipy.special import gammaln

from poisson_digraph.analysis import (
    Pmf,
    conditional_degree_params,
    degree_fit_test,
    empirical_tv,
    independence_test,
    loop_test,
    mixed_poisson_pmf,
    mixed_poisson_tail,
    mixing_pairs,
    poisson_chisquare,
    poisson_tv,
    product_poisson_chisquare,
)
from poisson_digraph.sampler import sample_graph_fast
from poisson_digraph.weights import (
    Constant,
    ConstantMarginal,
    IndependentProduct,
    ParetoMarginal,
    ParetoMirrored,
    sample_weights,
)


def _brute_tv(u, lam, jmax=500):
    js = np.arange(jmax)
    log_pu = -u + js * np.log(u) - gammaln(js + 1) if u > 0 else None
    pu = np.exp(log_pu) if u > 0 else (js == 0).astype(float)
    log_pl = -lam + js * np.log(lam) - gammaln(js + 1) if lam > 0 else None
    pl = np.exp(log_pl) if lam > 0 else (js == 0).astype(float)
    return 0.5 * np.abs(pu - pl).sum() + 0.5 * abs((1 - pu.sum()) - (1 - pl.sum()))


@pytest.mark.parametrize("pair", [(1.0, 2.0), (0.3, 9.0), (5.0, 5.5), (0.0, 1.7), (12.0, 12.0)])
def test_poisson_tv_matches_series(pair):
    u, lam = pair
    assert poisson_tv(u, lam) == pytest.approx(_brute_tv(u, lam), abs=1e-10)


def test_poisson_tv_zero_rate_closed_form():
    for u in (0.1, 1.0, 4.2):
        assert poisson_tv(0.0, u) == pytest.approx(1.0 - math.exp(-u), abs=1e-12)
    assert poisson_tv(0.0, 0.0) == 0.0


def test_poisson_tv_properties_random_pairs():
    rng = np.random.default_rng(0)
    for _ in range(200):
        u, lam = rng.uniform(0, 30, size=2)
        t = poisson_tv(u, lam)
        assert 0.0 <= t <= 1.0
        assert t == pytest.approx(poisson_tv(lam, u), abs=1e-12)
        if u != lam:
            assert t > 0
    for _ in range(50):
        a, b, c = rng.uniform(0, 20, size=3)
        assert poisson_tv(a, c) <= poisson_tv(a, b) + poisson_tv(b, c) + 1e-12


def test_poisson_tv_rejects_bad_input():
    for bad in (-1.0, float("nan")):
        with pytest.raises(ValueError):
            poisson_tv(bad, 1.0)
        with pytest.raises(ValueError):
            poisson_tv(1.0, bad)


def test_pmf_validation():
    ok = Pmf(masses=np.full((2, 2), 0.2), tail_mass=0.2)
    assert ok.kmax == 1
    with pytest.raises(ValueError):
        Pmf(masses=np.full((2, 2), 0.2), tail_mass=0.5)
    with pytest.raises(ValueError):
        Pmf(masses=np.full((2, 2), -0.1), tail_mass=1.4)


def test_mixed_pmf_constant_is_product_poisson():
    pmf = mixed_poisson_pmf(Constant(2.0), kmax=20)
    marg = stats.poisson.pmf(np.arange(21), 2.0)
    np.testing.assert_allclose(pmf.masses, np.outer(marg, marg), rtol=1e-12)
    assert pmf.tail_mass == pytest.approx(1.0 - marg.sum() ** 2, abs=1e-12)


def test_mixed_pmf_tail_shrinks_with_kmax():
    small = mixed_poisson_pmf(ParetoMirrored(3.5, 1.0), kmax=5, mc_samples=20_000)
    large = mixed_poisson_pmf(ParetoMirrored(3.5, 1.0), kmax=25, mc_samples=20_000)
    assert large.tail_mass < small.tail_mass
    assert large.masses.sum() + large.tail_mass == pytest.approx(1.0, abs=1e-9)


def test_mixed_tail_constant_closed_form():
    ks = np.array([1, 3, 7])
    tails = mixed_poisson_tail(Constant(2.0), ks, side="in", mc_samples=1000)
    np.testing.assert_allclose(tails, stats.poisson.sf(ks - 1, 2.0), rtol=1e-12)


def test_mixed_tail_decreasing_for_heavy_tails():
    ks = np.array([5, 10, 20, 40])
    tails = mixed_poisson_tail(ParetoMirrored(3.5, 1.0), ks, mc_samples=200_000, seed=3)
    assert np.all(np.diff(tails) < 0)
    assert np.all(tails > 0)


def test_mixing_pairs_degenerate_atoms():
    wi, wo = mixing_pairs(Constant(3.0), size=1000, seed=0)
    assert wi.shape == (1,) and wo.shape == (1,)
    assert wi[0] == wo[0] == 3.0
    const_prod = IndependentProduct(ConstantMarginal(2.0), ConstantMarginal(2.0))
    wi, wo = mixing_pairs(const_prod, size=1000, seed=0)
    assert wi.size == 1


def test_mixing_pairs_mirrored_are_equal():
    wi, wo = mixing_pairs(ParetoMirrored(3.5, 1.0), size=5000, seed=1)
    np.testing.assert_array_equal(wi, wo)
    assert wi.size == 5000
    assert wi.min() >= 1.0


def test_degree_fit_accepts_matching_model():
    model = Constant(2.0)
    w = sample_weights(model, 40_000, seed=21)
    g = sample_graph_fast(w, 2.0 * 40_000, seed=21)
    res = degree_fit_test(g, model, kmax=30, threshold=0.015, seed=21)
    assert res.passed
    assert res.statistic < 0.015
    assert res.n == 40_000


def test_degree_fit_rejects_wrong_model():
    w = sample_weights(Constant(2.0), 40_000, seed=22)
    g = sample_graph_fast(w, 2.0 * 40_000, seed=22)
    res = degree_fit_test(g, Constant(5.0), kmax=30, threshold=0.015, seed=22)
    assert not res.passed
    assert res.statistic > 0.3


def test_degree_fit_statistic_shrinks_with_n():
    stats_by_n = []
    for n in (1_000, 10_000, 100_000):
        w = sample_weights(Constant(2.0), n, seed=23)
        g = sample_graph_fast(w, 2.0 * n, seed=23)
        stats_by_n.append(degree_fit_test(g, Constant(2.0), kmax=30, seed=23).statistic)
    assert stats_by_n[0] > stats_by_n[1] > stats_by_n[2]


def test_degree_fit_warns_when_underpowered():
    w = sample_weights(Constant(2.0), 10, seed=0)
    g = sample_graph_fast(w, 20.0, seed=0)
    with pytest.warns(UserWarning, match="little power"):
        degree_fit_test(g, Constant(2.0), kmax=10, seed=0)


def test_conditional_degree_params_constant():
    w = sample_weights(Constant(2.0), 4, seed=0)
    p = conditional_degree_params(w, 8.0, v=2)
    assert p.lam_in == pytest.approx(1.5)
    assert p.lam_out == pytest.approx(1.5)
    assert p.lam_total == pytest.approx(3.5)


def test_conditional_degree_params_by_hand():
    from poisson_digraph.weights import WeightSequence

    w = WeightSequence(np.array([1.0, 2.0]), np.array([3.0, 4.0]))
    p = conditional_degree_params(w, 5.0, v=1)
    assert p.lam_in == pytest.approx(1.0 * (7.0 - 3.0) / 5.0)
    assert p.lam_out == pytest.approx(3.0 * (3.0 - 1.0) / 5.0)
    assert p.lam_total == pytest.approx(0.8 + 1.2 + 3.0 / 5.0)


def test_conditional_degree_params_single_vertex():
    from poisson_digraph.weights import WeightSequence

    w = WeightSequence(np.array([2.0]), np.array([2.0]))
    p = conditional_degree_params(w, 2.0, v=1)
    assert p.lam_in == 0.0
    assert p.lam_out == 0.0
    assert p.lam_total == pytest.approx(2.0)


def test_independence_single_vertex_is_exactly_zero():
    res = independence_test(Constant(1.0), n=100, k=1, reps=100, seed=0)
    assert res.statistic == 0.0


def test_independence_validates_block_size():
    with pytest.raises(ValueError):
        independence_test(Constant(1.0), n=3, k=4, reps=100, seed=0)
    with pytest.raises(ValueError):
        independence_test(Constant(1.0), n=3, k=0, reps=100, seed=0)


def test_independence_statistic_decays_with_n():
    small = independence_test(Constant(1.0), n=50, k=2, reps=200_000, seed=4)
    large = independence_test(Constant(1.0), n=5_000, k=2, reps=200_000, seed=4)
    assert large.statistic < small.statistic
    assert large.statistic < 0.03
    assert len(large.pairwise) == 1
    assert large.reps == 200_000
    three = independence_test(Constant(1.0), n=500, k=3, reps=50_000, seed=4)
    assert len(three.pairwise) == 3
    assert three.statistic == pytest.approx(max(three.pairwise.values()))


def test_loop_law_constant_one():
    res = loop_test(Constant(1.0), n=400, reps=20_000, seed=5)
    assert res.expected_mean == pytest.approx(1.0)
    assert res.passed
    assert abs(res.z) <= 3
    assert res.chi2_pvalue >= 0.01


def test_loop_law_constant_two_mean():
    res = loop_test(Constant(2.0), n=200, reps=20_000, seed=6)
    assert res.expected_mean == pytest.approx(2.0)
    assert res.passed


def test_loop_test_refuses_infinite_second_moment():
    with pytest.raises(ValueError, match="infinite"):
        loop_test(ParetoMirrored(3.0, 1.0), n=100, reps=100, seed=0)


def test_loop_law_heavy_tails():
    # tau = 6 keeps E[Lambda^4] finite, so the loop total converges fast
    # enough for a chi-square at moderate n; rho/mu = (5/3) / (5/4)
    res = loop_test(ParetoMirrored(6.0, 1.0), n=2_000, reps=20_000, seed=7)
    assert res.expected_mean == pytest.approx(4.0 / 3.0)
    assert res.passed


def test_poisson_chisquare_calibration():
    rng = np.random.default_rng(8)
    draws = rng.poisson(3.0, size=20_000)
    good = poisson_chisquare(draws, 3.0)
    assert good.pvalue >= 1e-3
    assert good.dof == good.bins - 1
    assert good.bins >= 2
    bad = poisson_chisquare(draws, 3.5)
    assert bad.pvalue < 1e-6


def test_product_chisquare_calibration_and_power():
    rng = np.random.default_rng(9)
    ind = np.column_stack([rng.poisson(1.0, 20_000), rng.poisson(2.0, 20_000)])
    assert product_poisson_chisquare(ind, np.array([1.0, 2.0])).pvalue >= 1e-3
    x = rng.poisson(1.5, 20_000)
    coupled = np.column_stack([x, x])
    assert product_poisson_chisquare(coupled, np.array([1.5, 1.5])).pvalue < 1e-6


def test_empirical_tv_edge_cases():
    xs = np.zeros(100, dtype=int)
    assert empirical_tv(xs, xs) == 0.0
    assert empirical_tv(xs, np.ones(100, dtype=int)) == 1.0
    half = np.concatenate([np.zeros(50, dtype=int), np.ones(50, dtype=int)])
    assert empirical_tv(xs, half) == pytest.approx(0.5)
