import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from risambc import specfun
from risambc.errors import DomainError, InvalidArgumentError
from risambc.specfun import (bessel_k_scaled, gauss_laguerre, ln_bessel_k_scaled, ln_gamma,
                             log_sum_exp, reg_lower_gamma)

# e^x K_nu(x), 30-digit mpmath values
K_SCALED = {
    (0, 0.001): 7.030716002378251518, (0, 0.1): 2.682326102262894383, (0, 1.0): 1.144463079806895015,
    (0, 2.0): 0.8415682150707714179, (0, 2.5): 0.7595486903280995787, (0, 10.0): 0.3916319344365986657,
    (0, 100.0): 0.1251756216591265789, (0, 700.0): 0.04736236945461357211,
    (1, 0.001): 1000.996734559068452, (1, 0.1): 10.89018268304969657, (1, 1.0): 1.636153486263258247,
    (1, 2.0): 1.033476847068688573, (1, 2.5): 0.9001744239078780891, (1, 10.0): 0.4107665705957887511,
    (1, 100.0): 0.1257999504795785293, (1, 700.0): 0.04739618765349454414,
    (2, 0.1): 220.4859797632568259, (2, 2.5): 1.479688229454402050, (2, 10.0): 0.4737852485557564160,
    (5, 0.001): 3.843841680400050002e17, (5, 1.0): 981.1926115029156017, (5, 2.0): 69.68655087607675118,
    (5, 100.0): 0.1417513015132950781,
    (11, 0.001): 3.719608856774847607e42, (11, 2.5): 1626203.499584506888, (11, 10.0): 86.75166360822483845,
    (11, 700.0): 0.05163466148959174843,
}

# P(a, x), mpmath
REG_GAMMA = {
    (0.5, 0.1): 0.3452791539814229796, (0.5, 3.0): 0.9856941215645703605, (3.0, 2.0): 0.3233235838169365405,
    (3.0, 10.0): 0.9972306042844884241, (19.319, 5.0): 9.011776340152479430e-07,
    (19.319, 19.319): 0.5302626410482803117, (19.319, 40.0): 0.9998962231488315082,
    (100.0, 90.0): 0.1582209891864301681, (100.0, 120.0): 0.9721362601094793385,
    (0.001, 0.001): 0.9936876467088602901,
}

LN_GAMMA = {
    0.001: 6.907178885383853683, 0.5: 0.5723649429247000871, 1.5: -0.1207822376352452223,
    7.25: 7.052185450738539445, 18.319: 34.42104808180426995, 171.3: 708.1149470389968243,
    1000.0: 5905.220423209181212,
}


class TestGaussLaguerre:
    def test_two_point_rule(self):
        r = gauss_laguerre(2)
        s2 = math.sqrt(2.0)
        np.testing.assert_allclose(r.nodes, [2 - s2, 2 + s2], rtol=1e-14)
        np.testing.assert_allclose(r.weights, [(2 + s2) / 4, (2 - s2) / 4], rtol=1e-14)
        assert abs(np.dot(r.weights, r.nodes) - 1.0) < 1e-14

    def test_one_point_rule(self):
        r = gauss_laguerre(1)
        assert r.nodes.tolist() == [1.0] and r.weights.tolist() == [1.0]

    @pytest.mark.parametrize("D", [2, 8, 32])
    def test_moments_exact(self, D):
        r = gauss_laguerre(D)
        for k in range(2 * D):
            got = log_sum_exp(r.log_weights + k * np.log(r.nodes))
            assert abs(math.expm1(got - math.lgamma(k + 1))) <= 1e-10

    @pytest.mark.parametrize("D", [1, 3, 50, 64, 128, 299, 300, 512])
    def test_weights_normalized(self, D):
        assert abs(math.expm1(log_sum_exp(gauss_laguerre(D).log_weights))) <= 1e-12

    def test_high_order_moments_stay_accurate(self):
        # with alpha ~ 18 the quadrature must integrate t^alpha well at D = 300
        r = gauss_laguerre(300)
        for a in (18.319, 30.5, 80.0):
            assert abs(math.expm1(log_sum_exp(r.log_weights + a * np.log(r.nodes)) - math.lgamma(a + 1))) < 1e-12

    def test_d300_tail_weights_underflow_in_linear_space(self):
        r = gauss_laguerre(300)
        assert r.log_weights.min() < -700   # would be 0.0 as a double
        assert np.all(np.isfinite(r.log_weights))

    def test_nodes_strictly_increasing_and_positive(self):
        for D in (2, 17, 300, 512):
            n = gauss_laguerre(D).nodes
            assert n[0] > 0 and np.all(np.diff(n) > 0)

    def test_matches_scipy_roots(self):
        from scipy.special import roots_laguerre
        x, w = roots_laguerre(40)
        r = gauss_laguerre(40)
        np.testing.assert_allclose(r.nodes, x, rtol=1e-12)
        np.testing.assert_allclose(r.weights, w, rtol=1e-9, atol=1e-300)

    def test_cached_and_read_only(self):
        r = gauss_laguerre(40)
        assert gauss_laguerre(40) is r
        with pytest.raises(ValueError):
            r.nodes[0] = 1.0

    @pytest.mark.parametrize("D", [0, -1, 513, 2.5, True, "3"])
    def test_invalid_order(self, D):
        with pytest.raises(InvalidArgumentError):
            gauss_laguerre(D)

    def test_numpy_integer_order(self):
        assert gauss_laguerre(np.int64(4)).order == 4


class TestLnGamma:
    @pytest.mark.parametrize("a,expected", sorted(LN_GAMMA.items()))
    def test_oracle(self, a, expected):
        assert abs(ln_gamma(a) - expected) <= 1e-12 * max(1.0, abs(expected))

    def test_trivial(self):
        assert abs(ln_gamma(1.0)) < 1e-15
        assert abs(ln_gamma(5.0) - math.log(24.0)) < 1e-13

    @pytest.mark.parametrize("a", [0.0, -1.0, math.inf, math.nan])
    def test_domain(self, a):
        with pytest.raises(DomainError):
            ln_gamma(a)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(0.5, 100.0))
    def test_recurrence(self, a):
        assert abs(ln_gamma(a + 1.0) - ln_gamma(a) - math.log(a)) <= 1e-12 * max(1.0, abs(ln_gamma(a + 1.0)))

    @settings(max_examples=200, deadline=None)
    @given(st.floats(1e-3, 1e4))
    def test_matches_math_lgamma(self, a):
        assert abs(ln_gamma(a) - math.lgamma(a)) <= 1e-12 * max(1.0, abs(math.lgamma(a)))


class TestRegLowerGamma:
    @pytest.mark.parametrize("ax,expected", sorted(REG_GAMMA.items()))
    def test_oracle(self, ax, expected):
        assert abs(reg_lower_gamma(*ax) - expected) <= 1e-10

    def test_trivial(self):
        assert reg_lower_gamma(3.0, 0.0) == 0.0
        assert abs(reg_lower_gamma(1.0, 1.0) - (1 - math.exp(-1))) < 1e-14
        assert reg_lower_gamma(2.0, math.inf) == 1.0

    def test_array_input(self):
        xs = np.array([[0.0, 1.0], [5.0, 50.0]])
        out = reg_lower_gamma(2.0, xs)
        assert out.shape == (2, 2)
        np.testing.assert_allclose(out.ravel(), [reg_lower_gamma(2.0, float(x)) for x in xs.ravel()], rtol=0, atol=0)

    @pytest.mark.parametrize("a,x", [(0.0, 1.0), (-2.0, 1.0), (1.0, -0.1), (1.0, math.nan)])
    def test_domain(self, a, x):
        with pytest.raises(DomainError):
            reg_lower_gamma(a, x)

    def test_domain_array(self):
        with pytest.raises(DomainError):
            reg_lower_gamma(1.0, np.array([1.0, -1.0]))

    @settings(max_examples=100, deadline=None)
    @given(st.floats(0.05, 200.0), st.lists(st.floats(0.0, 400.0), min_size=2, max_size=20))
    def test_monotone_and_bounded(self, a, xs):
        xs = np.sort(np.array(xs))
        p = reg_lower_gamma(a, xs)
        assert np.all((p >= 0.0) & (p <= 1.0))
        assert np.all(np.diff(p) >= -1e-15)

    @settings(max_examples=100, deadline=None)
    @given(st.floats(0.5, 500.0))
    def test_tends_to_one(self, a):
        assert reg_lower_gamma(a, a + 40.0 * math.sqrt(a)) >= 1.0 - 1e-8

    @settings(max_examples=100, deadline=None)
    @given(st.floats(0.01, 0.5))
    def test_tends_to_one_small_shape(self, a):
        # a + 40 sqrt(a) is only ~10 here and Q(a, 10) can exceed 1e-8
        assert reg_lower_gamma(a, a + 40.0 * math.sqrt(a) + 30.0) >= 1.0 - 1e-8

    @settings(max_examples=100, deadline=None)
    @given(st.floats(0.1, 150.0), st.floats(0.0, 300.0))
    def test_matches_scipy(self, a, x):
        from scipy.special import gammainc
        assert abs(reg_lower_gamma(a, x) - gammainc(a, x)) <= 1e-10


class TestBesselK:
    @pytest.mark.parametrize("key,expected", sorted(K_SCALED.items()))
    def test_oracle(self, key, expected):
        assert abs(bessel_k_scaled(*key) - expected) <= 1e-9 * expected

    def test_reference_values(self):
        assert abs(bessel_k_scaled(0, 1.0) * math.exp(-1.0) - 0.421024) < 1e-6
        assert abs(bessel_k_scaled(1, 1.0) * math.exp(-1.0) - 0.601907) < 1e-6

    @pytest.mark.parametrize("x", [0.1, 1.0, 10.0])
    def test_recurrence_residual(self, x):
        k0, k1, k2 = (bessel_k_scaled(n, x) for n in (0, 1, 2))
        assert abs(k2 - k0 - 2.0 / x * k1) <= 1e-10 * k2

    def test_large_x_asymptote(self):
        assert abs(bessel_k_scaled(0, 100.0) / math.sqrt(math.pi / 200.0) - 1.0) < 0.01

    def test_log_form_survives_overflow(self):
        # K_150(1e-3) is far beyond double range; its log is not
        from scipy.special import gammaln
        v = ln_bessel_k_scaled(150, 1e-3)
        lead = gammaln(150) + 150 * math.log(2 / 1e-3) - math.log(2)
        assert v > 710 and abs(v - lead) < 1e-3

    def test_array(self):
        xs = np.array([0.5, 2.0, 3.0])
        np.testing.assert_array_equal(bessel_k_scaled(3, xs), [bessel_k_scaled(3, float(x)) for x in xs])

    @pytest.mark.parametrize("nu,x", [(0, 0.0), (1, -1.0), (-1, 1.0), (1.5, 1.0)])
    def test_domain(self, nu, x):
        with pytest.raises(DomainError):
            bessel_k_scaled(nu, x)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 12), st.floats(1e-3, 300.0), st.floats(1.001, 3.0))
    def test_positive_decreasing(self, nu, x, f):
        # K_nu itself (not the scaled form) is strictly decreasing
        a = ln_bessel_k_scaled(nu, x) - x
        b = ln_bessel_k_scaled(nu, x * f) - x * f
        assert b < a

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 15), st.floats(1e-2, 500.0))
    def test_matches_scipy(self, nu, x):
        from scipy.special import kve
        assert abs(bessel_k_scaled(nu, x) / kve(nu, x) - 1.0) <= 1e-9


class TestLogSumExp:
    def test_trivial(self):
        assert abs(log_sum_exp([0.0, 0.0]) - math.log(2.0)) < 1e-15
        assert abs(log_sum_exp([-1000.0, -1000.0]) - (-1000.0 + math.log(2.0))) < 1e-12
        assert log_sum_exp([1e308, 0.0]) == 1e308

    def test_neg_inf(self):
        assert log_sum_exp([-math.inf, -math.inf]) == -math.inf
        assert log_sum_exp([-math.inf, 0.0]) == 0.0

    def test_empty(self):
        with pytest.raises(InvalidArgumentError):
            log_sum_exp([])

    def test_naive_oracle(self):
        v = np.random.default_rng(7).uniform(-20, 20, 50)
        assert abs(log_sum_exp(v) - math.log(np.sum(np.exp(v)))) <= 1e-12 * abs(math.log(np.sum(np.exp(v))))

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.floats(-700, 700), min_size=1, max_size=60), st.floats(-1e4, 1e4))
    def test_shift_invariance(self, v, c):
        v = np.array(v)
        assert abs(log_sum_exp(v + c) - (log_sum_exp(v) + c)) <= 1e-9 * max(1.0, abs(c), np.max(np.abs(v)))


def test_backend_kernels_agree_on_specfun(kernels):
    from risambc import _pycore
    xs = np.linspace(0.01, 50.0, 301)
    for nu in (0, 1, 5, 11):
        np.testing.assert_array_equal(kernels.ln_bessel_k_scaled_vec(nu, xs), _pycore.ln_bessel_k_scaled_vec(nu, xs))
    np.testing.assert_array_equal(kernels.reg_lower_gamma_vec(19.3, xs), _pycore.reg_lower_gamma_vec(19.3, xs))
    assert kernels.ln_gamma(18.319) == _pycore.ln_gamma(18.319)
    a = kernels.laguerre_pair(300, xs)
    b = _pycore.laguerre_pair(300, xs)
    for u, v in zip(a, b):
        np.testing.assert_array_equal(u, v)
