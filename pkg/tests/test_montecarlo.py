import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from risambc import model, montecarlo as mc
from risambc.errors import InvalidArgumentError


def _draw(**kw):
    base = dict(h_u=1.0 + 0j, h_e=1.0 + 0j, a_sr=np.ones(2), a_ru=np.ones(2), g_block=np.ones(1, complex),
                h_ipu=1.0 + 0j, h_ipe=1.0 + 0j, Y=2.0, Z=1.0)
    base.update(kw)
    return mc.ChannelDraw(**base)


def test_sinrs_hand_example(dp):
    unit = replace(dp, rho=1.0, rho_e=1.0)
    g_uu, g_uc, g_eu, g_ec = mc.sinrs(_draw(), unit, kappa=0.5, varpi=0.0)
    assert (g_uu, g_uc, g_eu, g_ec) == (0.5, 1.0, 0.8, 0.25)
    _, g_uc, _, g_ec = mc.sinrs(_draw(), unit, kappa=0.5, varpi=1.0)
    assert (g_uc, g_ec) == (0.5, 0.125)


def test_secrecy_capacity():
    assert mc.secrecy_capacity(3.0, 1.0) == 1.0
    assert mc.secrecy_capacity(1.0, 3.0) == 0.0
    np.testing.assert_array_equal(mc.secrecy_capacity([3.0, 0.0], [0.0, 0.0]), [2.0, 0.0])


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 1e6), st.floats(0, 1e6))
def test_secrecy_capacity_nonnegative_bounded(gu, ge):
    c = mc.secrecy_capacity(gu, ge)
    assert 0.0 <= c <= math.log2(1.0 + gu) + 1e-12


def test_draw_layout_matches_kernel(scenario, dp):
    """Y and Z from the single-draw path agree with the bulk kernel."""
    from risambc._pycore import _powers
    z = mc._block_normals(5, 0, 8, mc.n_columns(scenario.M, scenario.Q))
    hu2, he2, Y, Z, ipu2, ipe2 = _powers(z, scenario.M, scenario.Q, mc.channel_sd(dp))
    for i in range(8):
        d = mc.draw_from_normals(z[i], dp, scenario.M, scenario.Q)
        assert d.Y == pytest.approx(Y[i], rel=1e-12)
        assert d.Z == pytest.approx(Z[i], rel=1e-10)
        assert abs(d.h_u) ** 2 == pytest.approx(hu2[i], rel=1e-12)
        assert abs(d.h_ipe) ** 2 == pytest.approx(ipe2[i], rel=1e-12)


def test_draw_from_normals_shape(dp):
    with pytest.raises(InvalidArgumentError):
        mc.draw_from_normals(np.zeros(5), dp, 12, 6)


def test_sample_draw_second_moments(scenario, dp):
    rng = np.random.default_rng(0)
    hu = [abs(mc.sample_draw(dp, 2, 1, rng).h_u) ** 2 for _ in range(20000)]
    assert np.mean(hu) == pytest.approx(dp.Omega_u, rel=0.05)


def test_pinned_counts(scenario):
    # frozen run of the default scenario at its default seed
    c = mc.simulate_outages(scenario, trials=1_000_000)
    assert (c.data, c.back_ipsic, c.back_psic) == (85, 0, 0)
    assert c.seed == 20240611 and c.trials == 1_000_000


def test_determinism_across_workers(scenario):
    a = mc.simulate_outages(scenario, trials=200_000, seed=3, workers=1)
    b = mc.simulate_outages(scenario, trials=200_000, seed=3, workers=4)
    assert a == b
    s1 = mc.sinr_samples(scenario, trials=70_000, seed=9, workers=1)
    s3 = mc.sinr_samples(scenario, trials=70_000, seed=9, workers=3)
    for k in mc.SINR_COLUMNS:
        np.testing.assert_array_equal(s1[k], s3[k])


def test_prefix_stability(scenario):
    # the first blocks of a longer run are the same draws
    a = mc.sinr_samples(scenario, trials=40_000, seed=1)
    b = mc.sinr_samples(scenario, trials=100_000, seed=1)
    np.testing.assert_array_equal(a["g_uu"], b["g_uu"][:40_000])


def test_seeds_differ(scenario):
    a = mc.sinr_samples(scenario, trials=1000, seed=1)["g_uu"]
    b = mc.sinr_samples(scenario, trials=1000, seed=2)["g_uu"]
    assert not np.array_equal(a, b)


def test_zero_rate_never_outage(scenario):
    s = replace(scenario, r_u=0.0, r_c=0.0)
    c = mc.simulate_outages(s, trials=20_000, seed=1)
    assert (c.data, c.back_ipsic, c.back_psic, c.sys_ipsic, c.sys_psic) == (0, 0, 0, 0, 0)


def test_vanishing_power_always_outage(scenario):
    s = replace(scenario, ps_dbm=-200.0)
    for sig in ("data", "backscatter"):
        assert mc.estimate_sop(s, sig, "ipsic", trials=20_000, seed=1).p_hat == 1.0


def test_union_dominates_parts(scenario):
    s = replace(scenario, ps_dbm=-20.0)
    c = mc.simulate_outages(s, trials=50_000, seed=4)
    for sic in ("ipsic", "psic"):
        sys = c.count("system", sic)
        assert max(c.data, c.count("backscatter", sic)) <= sys <= c.data + c.count("backscatter", sic)
    # perfect SIC never hurts the backscatter link on the same draws
    assert c.back_psic <= c.back_ipsic


def test_single_element_matches_no_ris(scenario):
    one = replace(scenario, M=1, P=1, Q=1)
    a = mc.simulate_outages(one, trials=30_000, seed=7)
    b = mc.simulate_outages(scenario, trials=30_000, seed=7, no_ris=True)
    assert (a.data, a.back_ipsic, a.back_psic, a.sys_ipsic, a.sys_psic) == \
           (b.data, b.back_ipsic, b.back_psic, b.sys_ipsic, b.sys_psic)


def test_estimators_consistent(scenario):
    s = replace(scenario, ps_dbm=-10.0)
    c = mc.simulate_outages(s, trials=40_000, seed=2)
    e = mc.estimate_sop(s, "backscatter", "ipsic", trials=40_000, seed=2)
    assert e == c.estimate("backscatter", "ipsic")
    assert e.std_err == pytest.approx(math.sqrt(e.p_hat * (1 - e.p_hat) / 40_000))
    assert mc.estimate_system_sop(s, "psic", trials=40_000, seed=2) == c.estimate("system", "psic")
    nr = mc.estimate_sop_no_ris(s, "psic", trials=40_000, seed=2)
    assert nr == mc.simulate_outages(s, 40_000, 2, no_ris=True).estimate("system", "psic")


def test_throughput_estimate_bounds(scenario):
    c = mc.simulate_outages(replace(scenario, ps_dbm=-10.0), trials=40_000, seed=2)
    mean, se = mc.throughput_estimate(c, 0.5, 0.1, "ipsic")
    assert 0.0 <= mean <= 0.6 and se >= 0.0
    full = mc.OutageCounts(0, 0, 0, 0, 0, trials=10, seed=0)
    assert mc.throughput_estimate(full, 1.0, 0.7) == (1.7, 0.0)


@pytest.mark.parametrize("kw", [dict(signal="bogus"), dict(signal="data", sic="half")])
def test_bad_signal_or_sic(scenario, kw):
    with pytest.raises(InvalidArgumentError):
        mc.estimate_sop(scenario, trials=10, **kw)


@pytest.mark.parametrize("kw", [dict(trials=0), dict(seed=-1)])
def test_bad_trials_or_seed(scenario, kw):
    with pytest.raises(InvalidArgumentError):
        mc.simulate_outages(scenario, **kw)


def test_cascaded_sample_moments(scenario, dp):
    Y, Z = mc.cascaded_samples(scenario, trials=200_000, seed=11)
    mean_y = scenario.M * math.pi / 4 * math.sqrt(dp.Omega_sr * dp.Omega_ru)
    assert Y.mean() == pytest.approx(mean_y, rel=0.005)
    assert Z.mean() == pytest.approx(scenario.Q * dp.Omega_sr * dp.Omega_re, rel=0.01)


def test_empirical_cdf():
    np.testing.assert_array_equal(mc.empirical_cdf([1.0, 2.0, 2.0, 3.0], [0.0, 2.0, 5.0]), [0.0, 0.75, 1.0])
    with pytest.raises(InvalidArgumentError):
        mc.empirical_cdf([], [1.0])
    with pytest.raises(InvalidArgumentError):
        mc.empirical_cdf([1.0], [2.0, 1.0])


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=200),
       st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=30))
def test_empirical_cdf_properties(samples, grid):
    grid = np.sort(grid)
    F = mc.empirical_cdf(samples, grid)
    assert np.all((F >= 0) & (F <= 1)) and np.all(np.diff(F) >= 0)
    assert np.array_equal(F, [np.mean(np.array(samples) <= g) for g in grid])


def test_ris_versus_single_element_at_30dbm(scenario):
    ris = mc.simulate_outages(scenario, trials=300_000, seed=5)
    bare = mc.simulate_outages(scenario, trials=300_000, seed=5, no_ris=True)
    assert bare.back_ipsic >= ris.back_ipsic and bare.back_psic >= ris.back_psic
    assert bare.data <= ris.data


def test_mc_psic_backscatter_nonincreasing_in_power(scenario):
    p = [mc.estimate_sop(replace(scenario, ps_dbm=ps), "backscatter", "psic", trials=30_000, seed=8).p_hat
         for ps in (-30.0, -20.0, -15.0, -10.0, 0.0)]
    assert all(b <= a for a, b in zip(p, p[1:]))
