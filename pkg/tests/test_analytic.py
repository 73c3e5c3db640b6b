import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from keyrel import analytic as A
from keyrel.model import ModelParams, ScalingConfig

from oracles import edge_prob_enumerated, edge_prob_exact, lambda_exact

MU4 = (0.25, 0.25, 0.25, 0.25)
OFFSETS = (0, 5, 10, 15)


def fig1(k1, alpha=1.0, n=500):
    return ModelParams(n, MU4, tuple(k1 + o for o in OFFSETS), 10_000, alpha)


# -- edge_prob -------------------------------------------------------------------

def test_single_key_pool_of_five():
    assert A.edge_prob(5, 1, 1) == pytest.approx(0.2, rel=1e-15)
    assert edge_prob_enumerated(5, 1, 1) == Fraction(1, 5)


def test_overfull_pair_is_certain():
    assert A.edge_prob(4, 2, 3) == 1.0


def test_two_of_four():
    assert edge_prob_enumerated(4, 2, 2) == Fraction(5, 6)
    assert A.edge_prob(4, 2, 2) == pytest.approx(5 / 6, rel=1e-14)


def test_symmetric_spot_value():
    assert A.edge_prob(100, 3, 7) == A.edge_prob(100, 7, 3)


@pytest.mark.parametrize("P, Ki, Kj", [(0, 1, 1), (5, 0, 1), (5, 1, 6), (5, 6, 1)])
def test_out_of_range_rings_rejected(P, Ki, Kj):
    with pytest.raises(ValueError):
        A.edge_prob(P, Ki, Kj)


@pytest.mark.parametrize("P, Ki, Kj", [
    (10**6, 1, 1), (10**6, 1, 50), (10**6, 40, 60), (10**4, 50, 50),
    (10**4, 10, 70), (2000, 8, 16), (10**5, 300, 2000), (37, 5, 9),
])
def test_relative_accuracy_against_rationals(P, Ki, Kj):
    exact = edge_prob_exact(P, Ki, Kj)
    got = A.edge_prob(P, Ki, Kj)
    assert abs(Fraction(got) - exact) / exact < Fraction(1, 10**12)


@pytest.mark.parametrize("P, Ki, Kj", [(10**4, 10, 70), (10**4, 40, 40), (500, 20, 30)])
def test_lgamma_route_agrees(P, Ki, Kj):
    assert A.edge_prob_lgamma(P, Ki, Kj) == pytest.approx(A.edge_prob(P, Ki, Kj), rel=1e-9)


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 2000), st.data())
def test_edge_prob_properties(P, data):
    a = data.draw(st.integers(1, min(P, 60)))
    b = data.draw(st.integers(1, min(P, 60)))
    p = A.edge_prob(P, a, b)
    assert 0.0 <= p <= 1.0
    assert p == A.edge_prob(P, b, a)
    if a + b > P or a == P or b == P:
        assert p == 1.0
    elif 1 - edge_prob_exact(P, a, b) > Fraction(2) ** -52:
        # a complement below one ulp legitimately rounds to 1.0
        assert p < 1.0
    if a < P:
        assert A.edge_prob(P, a + 1, b) >= p
    assert A.edge_prob(P + 1, a, b) <= p


def test_matrix_symmetric_bitwise():
    p = A.edge_prob_matrix((3, 8, 8, 21), 97)
    assert np.array_equal(p, p.T)


# -- lambda / Lambda ---------------------------------------------------------------

def test_single_class_lambda_is_p11():
    params = ModelParams(50, (1.0,), (7,), 200)
    assert A.mean_edge_prob(params, 0) == A.edge_prob(200, 7, 7)


def test_identical_classes():
    params = ModelParams(50, (0.5, 0.5), (40, 40), 10_000)
    p11 = A.edge_prob(10_000, 40, 40)
    assert A.mean_edge_prob(params, 0) == pytest.approx(p11, rel=1e-15)
    assert A.mean_edge_prob(params, 1) == A.mean_edge_prob(params, 0)


@pytest.mark.parametrize("pool", [100, 10_000])
def test_lambda_four_classes_matches_rationals(pool):
    params = ModelParams(500, MU4, (10, 15, 20, 25), pool, 0.6)
    lam = A.mean_edge_probs(params)
    for i in range(4):
        exact = lambda_exact([Fraction(1, 4)] * 4, params.keys, pool, i)
        assert lam[i] == pytest.approx(float(exact), rel=1e-13)
        assert A.mean_edge_prob(params, i) == lam[i]
    # frozen from the rational oracle
    if pool == 100:
        assert lam[0] == pytest.approx(0.8364380573392833, rel=1e-13)
    else:
        assert lam[0] == pytest.approx(0.01735670611659005, rel=1e-13)


def test_class_index_range():
    with pytest.raises(IndexError):
        A.mean_edge_prob(fig1(10), 4)


def test_thinning():
    params = fig1(10, alpha=1.0)
    assert A.thinned_mean_edge_prob(params, 2) == A.mean_edge_prob(params, 2)
    half = params.with_(alpha=0.5)
    assert A.thinned_mean_edge_prob(half, 0) == 0.5 * A.mean_edge_prob(half, 0)


def test_fig1_lambda1_at_k1_20():
    # rational oracle: 0.4 * lambda_1 with K = (20, 25, 30, 35)
    assert A.thinned_mean_edge_prob(fig1(20, 0.4), 0) == pytest.approx(0.02143183972614482,
                                                                       rel=1e-13)


def test_summary_lambda_is_alpha_times_lambda():
    s = A.AnalyticSummary.of(fig1(12, 0.3))
    assert np.array_equal(s.Lambda, 0.3 * s.lambda_)
    assert s.c_n == A.scaling_coefficient(fig1(12, 0.3))
    assert s.k_avg == 19.5


# -- scaling coefficient -------------------------------------------------------------

def test_scaling_coefficient_definition():
    n = 1000
    # choose alpha so that Lambda_1 = c log n / n exactly up to rounding
    base = ModelParams(n, (1.0,), (20,), 10_000)
    for c in (1.0, 2.0):
        a = c * math.log(n) / n / A.mean_edge_prob(base, 0)
        assert A.scaling_coefficient(base.with_(alpha=a)) == pytest.approx(c, rel=1e-12)


def test_scaling_coefficient_fig1_value():
    assert A.scaling_coefficient(fig1(25, 0.6)) == pytest.approx(3.7731391949331056, rel=1e-12)


def test_scaling_coefficient_needs_two_nodes():
    with pytest.raises(ValueError):
        A.scaling_coefficient(ModelParams(1, (1.0,), (2,), 10))


# -- critical values ------------------------------------------------------------------

@pytest.mark.parametrize("alpha, expected", [(0.2, 22), (0.4, 15), (0.6, 12), (0.8, 10)])
def test_critical_k1_fig1(alpha, expected):
    # expected values from a K1 = 1..100 scan with exact rationals
    assert A.critical_k1(500, MU4, OFFSETS, 10_000, alpha) == expected


def test_critical_k1_boundary_consistency():
    for alpha in (0.2, 0.5, 0.8):
        k = A.critical_k1(500, MU4, OFFSETS, 10_000, alpha)
        lam_at = A.mean_edge_prob(fig1(k, alpha), 0)
        lam_before = A.mean_edge_prob(fig1(k - 1, alpha), 0)
        assert A.meets_critical(lam_at, 500, alpha)
        assert not A.meets_critical(lam_before, 500, alpha)


def test_critical_k1_monotone_in_alpha():
    assert (A.critical_k1(500, MU4, OFFSETS, 10_000, 1.0)
            <= A.critical_k1(500, MU4, OFFSETS, 10_000, 0.2))


def test_critical_k1_single_class():
    assert A.critical_k1(500, (1.0,), (0,), 10_000, 1.0) == 12


def test_critical_k1_unachievable():
    with pytest.raises(A.Unachievable):
        A.critical_k1(10**6, (1.0,), (0,), 3, 1e-9)


def test_strict_inequality_at_tie():
    n, alpha = 100, 0.5
    assert not A.meets_critical(A.connectivity_threshold(n, alpha), n, alpha)


def test_critical_alpha_linear_cases():
    n = 500
    base = ModelParams(n, (1.0,), (20,), 10_000)
    lam1 = A.mean_edge_prob(base, 0)
    crit = A.critical_alpha(base)
    assert crit.alpha == pytest.approx((math.log(n) / n) / lam1)
    assert crit.achievable


def test_critical_alpha_boundaries(monkeypatch):
    n = 500
    base = ModelParams(n, (1.0,), (20,), 10_000)
    target = math.log(n) / n
    monkeypatch.setattr(A, "mean_edge_prob", lambda p, i: target)
    assert A.critical_alpha(base) == (1.0, False)
    monkeypatch.setattr(A, "mean_edge_prob", lambda p, i: 2 * target)
    assert A.critical_alpha(base).alpha == pytest.approx(0.5, rel=1e-15)


@pytest.mark.parametrize("keys, expected", [
    ((10, 70), 0.31941518080858163),
    ((20, 60), 0.1626993210458696),
    ((30, 50), 0.10993638983522155),
    ((40, 40), 0.083756464164338153),
])
def test_critical_alpha_fig2(keys, expected):
    crit = A.critical_alpha(ModelParams(500, (0.5, 0.5), keys, 10_000))
    assert crit.alpha == pytest.approx(expected, rel=1e-12)
    assert crit.achievable


# -- approximation ---------------------------------------------------------------------

def test_approx_single_key():
    params = ModelParams(100, (0.3, 0.7), (1, 1), 10**6)
    approx = A.approx_lambda1(params)
    assert approx.approx == pytest.approx(1e-6)
    assert approx.exact == pytest.approx(1e-6, rel=1e-12)
    assert approx.rel_gap < 1e-9


def test_approx_fig1_small_gap():
    assert A.approx_lambda1(fig1(10)).rel_gap < 0.05


def test_approx_out_of_regime_still_reports():
    gap = A.approx_lambda1(ModelParams(100, (0.5, 0.5), (10, 15), 30)).rel_gap
    assert gap > 0.1


# -- ordering ---------------------------------------------------------------------------

@settings(max_examples=300, deadline=None)
@given(st.data())
def test_lambda_ordering(data):
    r = data.draw(st.integers(1, 6))
    P = data.draw(st.integers(2, 10**5))
    keys = sorted(data.draw(st.lists(st.integers(1, max(1, min(P // 2, 400))),
                                     min_size=r, max_size=r)))
    weights = data.draw(st.lists(st.integers(1, 100), min_size=r, max_size=r))
    mu = [w / sum(weights) for w in weights]
    lam = A.mean_edge_probs(ModelParams(100, tuple(mu), tuple(keys), P))
    assert np.all(np.diff(lam) >= 0)


# -- diagnostics -------------------------------------------------------------------------

def test_classify_trend():
    assert A.classify_trend([1, 2, 3]) == "growing"
    assert A.classify_trend([3, 2, 1]) == "shrinking"
    assert A.classify_trend([1.0, 1.0, 1.0]) == "flat"
    assert A.classify_trend([1, 3, 2]) == "mixed"
    # alpha * p11 = 1/n exactly gives n * alpha * p11 = 1 for every n
    ns = [100, 200, 400, 800]
    assert A.classify_trend([n * (1 / n) for n in ns]) == "flat"


def test_pool_condition_fixed_pool():
    cfg = ScalingConfig(c=2, n_values=(1000, 5000, 20_000), mu=(1.0,), keys=(20,),
                        pool=10_000, sigma=1.0)
    assert A.asymptotic_diagnostics(cfg, 5000).pool_condition is True
    assert A.asymptotic_diagnostics(cfg, 10_000).pool_condition is True
    assert A.asymptotic_diagnostics(cfg, 20_000).pool_condition is False


def test_diagnostics_trend_growing():
    cfg = ScalingConfig(c=3, n_values=(100, 200, 400, 800), mu=(1.0,), keys=(15,), sigma=1.0)
    rep = A.asymptotic_diagnostics(cfg, 800)
    assert rep.trend == "growing"
    assert not rep.flagged
    assert rep.n_alpha_p11 == rep.grid_n_alpha_p11[-1]


def test_expected_isolated_single_class():
    params = ModelParams(50, (1.0,), (3,), 100, 0.5)
    L = 0.5 * A.edge_prob(100, 3, 3)
    assert A.expected_isolated(params) == pytest.approx(50 * (1 - L) ** 49, rel=1e-12)
