"""Verification suite: every acceptance check with its pinned tolerance.

Shared by the `verify`/`selftest` CLI commands and the acceptance tests.
Each check reports a measured value, the threshold it is compared against
and the verdict; `CheckResult.line()` renders the machine-readable form.
"""
from dataclasses import dataclass, replace
import math
import os
import tempfile
import time

import numpy as np

from .. import analytic as an
from .. import model
from .. import montecarlo as mc
from ..specfun import bessel_k_scaled, gauss_laguerre, ln_gamma, log_sum_exp, reg_lower_gamma

MC_TRIALS = 1_000_000
QUAD_D = 300

RUNTIME_BUDGET_S = {1: 1.0, 2: 10.0, 3: 120.0, 4: 120.0, 5: 1.0, 6: 5.0, 7: 5.0, 8: 300.0, 9: 60.0}
TOTAL_BUDGET_S = 600.0


@dataclass(frozen=True)
class CheckResult:
    criterion: int
    name: str
    measured: float
    threshold: float
    passed: bool

    def line(self):
        return f"CHECK {self.name} {self.measured:.6g} {self.threshold:.6g} {'PASS' if self.passed else 'FAIL'}"


def _le(c, name, measured, thr):
    return CheckResult(c, name, float(measured), float(thr), bool(measured <= thr))


def _lt(c, name, measured, thr):
    return CheckResult(c, name, float(measured), float(thr), bool(measured < thr))


def _gt(c, name, measured, thr):
    return CheckResult(c, name, float(measured), float(thr), bool(measured > thr))


# -- figure operating points (deltas on top of the loaded scenario) ----------

def fig2(s):
    # the element count is not stated for this figure; keep the config's
    return replace(s, kappa=0.5, rho_e_db=20.0)


def fig3(s):
    return replace(s, M=12, P=2, Q=6, kappa=0.3, r_u=0.5, r_c=0.5, ps_dbm=30.0, rho_e_db=20.0)


def fig4(s):
    return replace(s, M=12, P=2, Q=6, ps_dbm=20.0, kappa=0.5)


def fig5(s):
    return replace(s, M=12, P=2, Q=6, r_u=1.0, r_c=0.7, rho_e_db=20.0, kappa=0.3)


def fig8(s):
    return replace(s, M=4, P=2, Q=2, rho_e_db=10.0, kappa=0.3, r_u=1.0, r_c=0.1)


def _ip_varpi(s):
    # ipSIC-only checks need a nonzero residual factor
    return s if s.varpi > 0.0 else replace(s, varpi=0.01)


# -- 1: quadrature -------------------------------------------------------------

# every order up to 32, then a spread up to the production order
WEIGHT_SUM_ORDERS = tuple(range(1, 33)) + (48, 64, 96, 128, 160, 192, 224, 256, 288, QUAD_D)

def quadrature_checks(c=1):
    out = []
    for D in (2, 8, 32):
        r = gauss_laguerre(D)
        err = max(abs(math.expm1(log_sum_exp(r.log_weights + k * np.log(r.nodes)) - math.lgamma(k + 1)))
                  for k in range(2 * D))
        out.append(_le(c, f"c1_quad_moments_D{D}", err, 1e-10))
    worst = max(abs(math.expm1(log_sum_exp(gauss_laguerre(D).log_weights))) for D in WEIGHT_SUM_ORDERS)
    out.append(_le(c, f"c1_quad_weight_sum_D1_to_{QUAD_D}", worst, 1e-12))
    return out


def specfun_checks(c=1):
    """Spot checks of the special functions against closed forms."""
    out = quadrature_checks(c)
    out.append(_le(c, "selftest_ln_gamma_5", abs(ln_gamma(5.0) - math.log(24.0)), 1e-12))
    rel = max(abs(ln_gamma(a + 1.0) - ln_gamma(a) - math.log(a)) / max(1.0, abs(ln_gamma(a + 1.0)))
              for a in np.linspace(0.5, 100.0, 200))
    out.append(_le(c, "selftest_ln_gamma_recurrence", rel, 1e-12))
    out.append(_le(c, "selftest_reg_lower_gamma_1_1", abs(reg_lower_gamma(1.0, 1.0) + math.expm1(-1.0)), 1e-10))
    k0, k1 = bessel_k_scaled(0, 1.0) / math.e, bessel_k_scaled(1, 1.0) / math.e
    out.append(_le(c, "selftest_bessel_k0_1", abs(k0 - 0.42102443824070834) / 0.42102443824070834, 1e-9))
    out.append(_le(c, "selftest_bessel_k1_1", abs(k1 - 0.6019072301972346) / 0.6019072301972346, 1e-9))
    res = max(abs(bessel_k_scaled(2, x) - bessel_k_scaled(0, x) - 2.0 / x * bessel_k_scaled(1, x)) / bessel_k_scaled(2, x)
              for x in (0.1, 1.0, 10.0))
    out.append(_le(c, "selftest_bessel_recurrence", res, 1e-10))
    out.append(_le(c, "selftest_log_sum_exp", abs(log_sum_exp([-1000.0, -1000.0]) - (-1000.0 + math.log(2.0))), 1e-12))
    return out


# -- 2: mean of Eve's cascaded power ---------------------------------------------

def criterion_2(s, trials=MC_TRIALS):
    out = []
    for Q in (2, 6):
        sq = replace(s, M=2 * Q, P=2, Q=Q)
        _, Z = mc.cascaded_samples(sq, trials=trials)
        dp = model.derive(sq)
        expect = Q * dp.Omega_sr * dp.Omega_re
        z_se = Z.std(ddof=1) / math.sqrt(Z.size)
        out.append(_le(2, f"c2_mean_Z_Q{Q}_in_std_errs", abs(Z.mean() - expect) / z_se, 3.0))
    return out


# -- 3: CDFs against empirical CDFs -------------------------------------------

def cdf_grid(samples, n=50):
    """Log-spaced grid between the 0.1% and 99.9% sample quantiles."""
    lo, hi = np.quantile(samples, [1e-3, 1.0 - 1e-3])
    lo = max(lo, np.min(samples[samples > 0]))
    return np.logspace(math.log10(lo), math.log10(hi), n)


def cdf_gaps(s, trials=MC_TRIALS):
    """{name: (sup-gap, threshold)} for the six SINR CDFs."""
    dp = model.derive(s)
    rule = gauss_laguerre(s.quad_d)
    S = mc.sinr_samples(s, trials=trials)
    k, Q, w = s.kappa, s.Q, s.varpi
    cases = (
        ("uu", "g_uu", lambda x: an.cdf_gamma_uu(x, dp, k, rule), 0.01),
        ("uc_ipsic", "g_uc_ipsic", lambda x: an.cdf_gamma_uc(x, dp, k, w, rule), 0.01),
        ("uc_psic", "g_uc_psic", lambda x: an.cdf_gamma_uc(x, dp, k, 0.0, rule), 0.01),
        ("eu", "g_eu", lambda x: an.cdf_gamma_eu(x, dp, k, Q, rule), 0.02),
        ("ec_ipsic", "g_ec_ipsic", lambda x: an.cdf_gamma_ec(x, dp, k, Q, w, rule), 0.01),
        ("ec_psic", "g_ec_psic", lambda x: an.cdf_gamma_ec(x, dp, k, Q, 0.0, rule), 0.01),
    )
    out = {}
    for name, col, F, floor in cases:
        g = cdf_grid(S[col])
        emp = mc.empirical_cdf(S[col], g)
        sigma = float(np.max(np.sqrt(emp * (1.0 - emp) / trials)))
        out[name] = (float(np.max(np.abs(F(g) - emp))), max(floor, 3.0 * sigma))
    return out


def criterion_3(s, trials=MC_TRIALS):
    return [_le(3, f"c3_cdf_{name}_supgap", gap, thr) for name, (gap, thr) in cdf_gaps(fig2(s), trials).items()]


# -- 4: SOP theorems against Monte Carlo ----------------------------------------

STATED_PS = (10.0, 20.0, 30.0, 40.0)
EXTENDED_PS = (-30.0, -20.0, -10.0, 0.0)


def sop_pairs(s, ps_values, trials=MC_TRIALS):
    """[(ps, signal, sic, analytic, mc)] at each power."""
    out = []
    for ps in ps_values:
        sp = replace(s, ps_dbm=ps)
        dp = model.derive(sp)
        counts = mc.simulate_outages(sp, trials=trials)
        out.append((ps, "data", "none", an.sop_data(sp, dp), counts.estimate("data").p_hat))
        for sic in ("ipsic", "psic"):
            out.append((ps, "backscatter", sic, an.sop_backscatter(sp, dp, sic),
                        counts.estimate("backscatter", sic).p_hat))
    return out


def criterion_4(s, trials=MC_TRIALS):
    out = []
    n_scope = 0
    for ps, signal, sic, a, m in sop_pairs(fig2(s), STATED_PS + EXTENDED_PS, trials):
        if m < 1e-2:
            continue
        n_scope += 1
        tag = signal if sic == "none" else f"{signal}_{sic}"
        out.append(_le(4, f"c4_sop_{tag}_{ps:+g}dBm_rel_err", abs(a - m) / m, 0.15))
    out.append(CheckResult(4, "c4_points_in_scope", n_scope, 1, n_scope >= 1))
    return out


# -- 5: ipSIC forms at varpi = 0 reduce to the pSIC closed forms ----------------

def criterion_5(s):
    s = fig2(s)
    dp = model.derive(s)
    rule = gauss_laguerre(s.quad_d)
    k = s.kappa
    xs_uc = dp.rho * (k * dp.beta * (dp.alpha + 1.0)) ** 2 * np.logspace(-4, 2, 30)
    xs_ec = k * k * dp.rho_e * s.Q * dp.Omega_sr * dp.Omega_re * np.logspace(-4, 2, 30)
    d_uc = np.max(np.abs(an.cdf_gamma_uc_ipsic(xs_uc, dp, k, 0.0, rule) - an.cdf_gamma_uc(xs_uc, dp, k, 0.0)))
    d_ec = np.max(np.abs(an.cdf_gamma_ec_ipsic(xs_ec, dp, k, s.Q, 0.0, rule) - an.cdf_gamma_ec(xs_ec, dp, k, s.Q, 0.0)))
    d_sop = 0.0
    for ps in (-10.0, -5.0, 0.0, 10.0):
        s0 = replace(s, varpi=0.0, ps_dbm=ps)
        d_sop = max(d_sop, abs(an.sop_backscatter(s0, sic="ipsic", rule=rule) - an.sop_backscatter(s0, sic="psic")))
    return [_le(5, "c5_reduce_cdf_uc", d_uc, 1e-12),
            _le(5, "c5_reduce_cdf_ec", d_ec, 1e-12),
            _le(5, "c5_reduce_sop_backscatter", d_sop, 1e-12)]


# -- 6: error floors under imperfect SIC -------------------------------------------

FLOOR_DECADES = tuple(np.linspace(12.0, 16.0, 9))


def criterion_6(s):
    s = _ip_varpi(fig2(s))
    hi = an.scenario_at_rho(s, 1e15)
    pd, ad = an.sop_data(hi), an.asym_sop_data(hi)
    pc, ac = an.sop_backscatter(hi, sic="ipsic"), an.asym_sop_backscatter(hi, sic="ipsic")
    div_d = an.diversity_order(lambda x: an.sop_data(x), s, FLOOR_DECADES)
    div_c = an.diversity_order(lambda x: an.sop_backscatter(x, sic="ipsic"), s, FLOOR_DECADES)
    return [_le(6, "c6_floor_data_rel_err", abs(pd - ad) / ad, 0.01),
            _le(6, "c6_floor_backscatter_ipsic_rel_err", abs(pc - ac) / ac, 0.01),
            _le(6, "c6_diversity_data_abs", abs(div_d), 0.05),
            _le(6, "c6_diversity_backscatter_ipsic_abs", abs(div_c), 0.05)]


# -- 7: pSIC diversity order ----------------------------------------------------------

def criterion_7(s):
    out = []
    for M in (4, 12):
        sm = replace(fig2(s), M=M, P=2, Q=M // 2)
        fit = an.diversity_order(lambda x: an.asym_sop_backscatter(x, sic="psic"), sm, FLOOR_DECADES)
        target = math.pi ** 2 * M / (2.0 * (16.0 - math.pi ** 2))
        out.append(_le(7, f"c7_diversity_psic_M{M}_rel_err", abs(fit - target) / target, 0.03))
    return out


# -- 8: directional trends -------------------------------------------------------------

M_GRID = (4, 8, 12, 16, 20, 24)
X_GRID = (2.0, 6.0, 10.0, 14.0, 18.0)
FIG5_PS = tuple(float(p) for p in range(-30, 61, 10))
FIG8_PS = tuple(float(p) for p in range(-30, 41, 5))
X_MC_PS = -10.0   # power at which Monte Carlo resolves the placement trend


def unimodal_turns(vals):
    """Number of direction changes; 1 with a rise then a fall means one interior peak."""
    d = np.sign(np.diff(vals))
    if d[0] <= 0 or d[-1] >= 0 or np.any(d == 0):
        return -1
    return int(np.count_nonzero(d[1:] != d[:-1]))


def criterion_8(s, trials=MC_TRIALS):
    out = []
    # (a) RIS vs a single backscatter element
    s2 = fig2(s)
    ris = mc.simulate_outages(s2, trials=trials)
    bare = mc.simulate_outages(s2, trials=trials, no_ris=True)
    for sic in ("ipsic", "psic"):
        out.append(_lt(8, f"c8a_backscatter_{sic}_ris_below_no_ris",
                       ris.estimate("backscatter", sic).p_hat, bare.estimate("backscatter", sic).p_hat))
    out.append(_gt(8, "c8a_data_ris_above_no_ris", ris.estimate("data").p_hat, bare.estimate("data").p_hat))

    # (b) system SOP against the number of elements
    s3 = fig3(s)
    sys = {sic: [] for sic in ("ipsic", "psic")}
    for M in M_GRID:
        counts = mc.simulate_outages(model.with_elements(s3, M), trials=trials)
        for sic in sys:
            sys[sic].append(counts.estimate("system", sic).p_hat)
    for sic, v in sys.items():
        out.append(_lt(8, f"c8b_system_{sic}_interior_min_below_ends", min(v[1:-1]), min(v[0], v[-1])))

    # (c) RIS placement: mid-span is worst for the backscatter signal
    s4 = fig4(s)
    for sic in ("ipsic", "psic"):
        v = {x: an.sop_backscatter(model.with_ris_position(s4, x), sic=sic) for x in X_GRID}
        out.append(_gt(8, f"c8c_backscatter_{sic}_mid_above_ends", v[10.0], max(v[2.0], v[18.0])))
    s4m = replace(s4, ps_dbm=X_MC_PS)
    v = {x: mc.simulate_outages(model.with_ris_position(s4m, x), trials=trials).estimate("backscatter", "psic").p_hat
         for x in (2.0, 10.0, 18.0)}
    out.append(_gt(8, "c8c_backscatter_psic_mc_mid_above_ends", v[10.0], max(v[2.0], v[18.0])))

    # (d) throughput ceiling R_u + R_c
    s5 = fig5(s)
    ceiling = s5.r_u + s5.r_c
    for sic in ("ipsic", "psic"):
        t = max(an.secrecy_throughput(replace(s5, ps_dbm=p), sic=sic).network for p in FIG5_PS)
        out.append(_lt(8, f"c8d_throughput_{sic}_max_below_ceiling", t, ceiling))
    t_mc = 0.0
    for p in STATED_PS:
        counts = mc.simulate_outages(replace(s5, ps_dbm=p), trials=trials)
        t_mc = max(t_mc, max(mc.throughput_estimate(counts, s5.r_u, s5.r_c, sic)[0] for sic in ("ipsic", "psic")))
    out.append(_lt(8, "c8d_throughput_mc_max_below_ceiling", t_mc, ceiling))

    # (e) energy efficiency rises to one peak then decays
    s8 = fig8(s)
    for sic in ("ipsic", "psic"):
        ee = [an.secrecy_energy_efficiency(replace(s8, ps_dbm=p), sic=sic) for p in FIG8_PS]
        turns = unimodal_turns(ee)
        out.append(CheckResult(8, f"c8e_energy_eff_{sic}_direction_changes", turns, 1, turns == 1))
    return out


# -- 9: worker-count independence of sweep output ------------------------------------

def criterion_9(s, trials=100_000):
    from .sweep import SweepSpec, run_sweep

    spec = SweepSpec("ps_dbm", STATED_PS, metrics=("sop_data", "sop_backscatter", "sop_system", "throughput", "energy_eff"),
                     methods=("analytic", "mc"), sic=("ipsic", "psic"), baseline=("no_ris",))
    sc = replace(fig2(s), trials=trials)
    blobs = set()
    with tempfile.TemporaryDirectory() as d:
        for w in (1, 4, 8):
            path = os.path.join(d, f"w{w}.csv")
            run_sweep(sc, spec, path, workers=w)
            with open(path, "rb") as fh:
                blobs.add(fh.read())
    return [CheckResult(9, "c9_distinct_csv_outputs_over_1_4_8_workers", len(blobs), 1, len(blobs) == 1)]


CRITERIA = {
    1: lambda s: quadrature_checks(),
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
}


def run_criterion(n, s):
    """Checks for one criterion plus its runtime budget check."""
    t0 = time.perf_counter()
    res = list(CRITERIA[n](s))
    dt = time.perf_counter() - t0
    res.append(_le(n, f"c{n}_runtime_s", dt, RUNTIME_BUDGET_S[n]))
    return res


def run_checks(s, criteria=None, echo=None):
    results = []
    for n in criteria or sorted(CRITERIA):
        for r in run_criterion(n, s):
            results.append(r)
            if echo:
                echo(r.line())
    return results
