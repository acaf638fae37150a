"""Closed-form CDFs, secrecy outage probabilities and derived metrics.

Quadrature sums are formed in log space; every probability is clamped to
[0, 1] on the way out (round-off near 0 can go slightly negative).
"""
from dataclasses import dataclass
import math
from typing import Optional

import numpy as np

from . import model
from .errors import DomainError, InvalidArgumentError, NumericalError
from .specfun import (gauss_laguerre, ln_bessel_k_scaled, ln_gamma, log_sum_exp,
                      reg_lower_gamma)

SERIES_RTOL = 1e-14
SERIES_KMAX = 300


def _clamp(p):
    return min(1.0, max(0.0, p))


def _rule(rule, s=None):
    if rule is not None:
        return rule
    return gauss_laguerre(s.quad_d if s is not None else 300)


def _pointwise(fn, x):
    if np.ndim(x) == 0:
        return fn(float(x))
    x = np.asarray(x, dtype=np.float64)
    return np.array([fn(v) for v in x.ravel()]).reshape(x.shape)


def _nonneg(x):
    if not x >= 0.0:
        raise DomainError(f"x must be nonnegative, got {x}")


def _gamma_tail_complement(c_lin, c_sq, alpha, rule):
    """1 - E[exp(-c_lin - c_sq t^2)] for t ~ Gamma(alpha + 1, 1), by quadrature."""
    t = rule.nodes
    terms = rule.log_weights + alpha * np.log(t) - ln_gamma(alpha + 1.0) - c_lin - c_sq * t * t
    return _clamp(1.0 - math.exp(log_sum_exp(terms)))


# ---------------------------------------------------------------------------
# CDFs of the legitimate-user SINRs

def cdf_gamma_uu(x, dp, kappa, rule=None):
    """CDF of the LU's data-signal SINR (Gamma fit to the cascaded amplitude)."""
    rule = _rule(rule)

    def f(v):
        _nonneg(v)
        if math.isinf(v):
            return 1.0
        c = v / (dp.Omega_u * dp.rho)
        return _gamma_tail_complement(c, c * dp.rho * kappa ** 2 * dp.beta ** 2, dp.alpha, rule)

    return _pointwise(f, x)


def _cdf_uc_quadrature(x, dp, kappa, varpi, rule):
    # averages P(alpha+1, .) over |h_ipu|^2 = Omega_ipu t, t ~ Exp(1)
    _nonneg(x)
    if math.isinf(x):
        return 1.0
    arg = np.sqrt(x * (varpi * dp.rho * dp.Omega_ipu * rule.nodes + 1.0) / dp.rho) / (kappa * dp.beta)
    return _clamp(float(np.dot(rule.weights, reg_lower_gamma(dp.alpha + 1.0, arg))))


def _cdf_uc_perfect(x, dp, kappa):
    _nonneg(x)
    if math.isinf(x):
        return 1.0
    return _clamp(reg_lower_gamma(dp.alpha + 1.0, math.sqrt(x / dp.rho) / (dp.beta * kappa)))


def cdf_gamma_uc(x, dp, kappa, varpi, rule=None):
    """CDF of the LU's backscatter SINR; varpi = 0 uses the closed form."""
    if varpi == 0.0:
        return _pointwise(lambda v: _cdf_uc_perfect(v, dp, kappa), x)
    rule = _rule(rule)
    return _pointwise(lambda v: _cdf_uc_quadrature(v, dp, kappa, varpi, rule), x)


def cdf_gamma_uc_ipsic(x, dp, kappa, varpi, rule=None):
    """Quadrature form of the backscatter CDF, usable at varpi = 0 as well."""
    rule = _rule(rule)
    return _pointwise(lambda v: _cdf_uc_quadrature(v, dp, kappa, varpi, rule), x)


# ---------------------------------------------------------------------------
# CDFs of the eavesdropper SINRs

def _ln_z_tail(xi, Q):
    """log[(2/Gamma(Q)) xi^{Q/2} K_Q(2 sqrt(xi))] = log P(Z > xi * Omega_sr Omega_re)."""
    w = 2.0 * np.sqrt(xi)
    return math.log(2.0) - ln_gamma(Q) + 0.5 * Q * np.log(xi) + ln_bessel_k_scaled(Q, w) - w


def cdf_gamma_eu(x, dp, kappa, Q, rule=None):
    """CDF of Eve's data-signal SINR under the on-off RIS configuration.

    Integrates over u = 2 sqrt(Z / (Omega_sr Omega_re)), whose density is
    (2/Gamma(Q)) (u/2)^Q K_{Q-1}(u); the e^{-u} of K_{Q-1} is the Laguerre
    weight, which keeps every node inside the support.
    """
    rule = _rule(rule)
    om = dp.Omega_sr * dp.Omega_re
    u = rule.nodes
    base = (rule.log_weights + math.log(2.0) - ln_gamma(Q) + Q * np.log(0.5 * u)
            + ln_bessel_k_scaled(Q - 1, u))

    def f(v):
        if not v > 0.0:
            raise DomainError(f"x must be positive, got {v}")
        if math.isinf(v):
            return 1.0
        c = v * kappa ** 2 * om / (4.0 * dp.Omega_e)
        return _clamp(1.0 - math.exp(log_sum_exp(base - c * u * u) - v / (dp.Omega_e * dp.rho_e)))

    return _pointwise(f, x)


def cdf_gamma_eu_clamped(x, dp, kappa, Q, rule=None):
    """Literal node-substitution form of the Eve data-signal CDF.

    Uses t = x(kappa^2 rho_e z + 1)/(Omega_e rho_e) as the Laguerre variable;
    nodes below x/(Omega_e rho_e) map to negative z and are dropped. Only
    accurate when the Z density varies on the scale of the Laguerre nodes.
    """
    rule = _rule(rule)
    om = dp.Omega_sr * dp.Omega_re

    def f(v):
        if not v > 0.0:
            raise DomainError(f"x must be positive, got {v}")
        xi = (dp.Omega_e * dp.rho_e * rule.nodes - v) / (kappa ** 2 * dp.rho_e * v)
        keep = xi > 0.0
        if not keep.any():
            return 1.0
        xi = xi[keep]
        w = 2.0 * np.sqrt(xi / om)
        terms = (rule.log_weights[keep] + 0.5 * (Q - 1) * np.log(xi) - 0.5 * (Q + 1) * math.log(om)
                 + ln_bessel_k_scaled(Q - 1, w) - w)
        lead = math.log(2.0 * dp.Omega_e / (kappa ** 2 * v)) - ln_gamma(Q)
        return _clamp(1.0 - math.exp(lead + log_sum_exp(terms)))

    return _pointwise(f, x)


def _cdf_ec_quadrature(x, dp, kappa, Q, varpi, rule):
    _nonneg(x)
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return 1.0
    xi = x * (varpi * dp.rho_e * dp.Omega_ipe * rule.nodes + 1.0) / (kappa ** 2 * dp.rho_e * dp.Omega_sr * dp.Omega_re)
    return _clamp(1.0 - math.exp(log_sum_exp(rule.log_weights + _ln_z_tail(xi, Q))))


def _cdf_ec_perfect(x, dp, kappa, Q):
    _nonneg(x)
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return 1.0
    xi = x / (kappa ** 2 * dp.rho_e * dp.Omega_sr * dp.Omega_re)
    return _clamp(1.0 - math.exp(_ln_z_tail(xi, Q)))


def cdf_gamma_ec(x, dp, kappa, Q, varpi, rule=None):
    """CDF of Eve's backscatter SINR; varpi = 0 uses the single-term form."""
    if varpi == 0.0:
        return _pointwise(lambda v: _cdf_ec_perfect(v, dp, kappa, Q), x)
    rule = _rule(rule)
    return _pointwise(lambda v: _cdf_ec_quadrature(v, dp, kappa, Q, varpi, rule), x)


def cdf_gamma_ec_ipsic(x, dp, kappa, Q, varpi, rule=None):
    """Quadrature form of Eve's backscatter CDF, usable at varpi = 0 as well."""
    rule = _rule(rule)
    return _pointwise(lambda v: _cdf_ec_quadrature(v, dp, kappa, Q, varpi, rule), x)


# ---------------------------------------------------------------------------
# adaptive-integration references (scipy), independent of the quadrature rule

CDF_VARIANTS = ("uu", "uc", "eu", "ec")


def cdf_reference(variant, x, dp, kappa, Q=None, varpi=0.0, abstol=1e-9):
    """Exact pre-quadrature integral for one of the four SINR CDFs."""
    from scipy import integrate, special

    if variant not in CDF_VARIANTS:
        raise InvalidArgumentError(f"variant must be one of {CDF_VARIANTS}, got {variant!r}")
    if variant in ("eu", "ec") and (Q is None or Q < 1):
        raise InvalidArgumentError("Eve variants need a positive block size Q")
    _nonneg(x)
    if x == 0.0:
        return 0.0
    a1 = dp.alpha + 1.0
    om = dp.Omega_sr * dp.Omega_re

    if variant == "uu":
        # average of P(|h_u|^2 < x(kappa^2 y^2 rho + 1)/rho) over y = beta t, t ~ Gamma(a1)
        def g(t):
            return math.exp((a1 - 1.0) * math.log(t) - t - special.gammaln(a1)) * \
                -math.expm1(-x * (kappa ** 2 * dp.beta ** 2 * t * t * dp.rho + 1.0) / (dp.Omega_u * dp.rho))
        hi = a1 + 60.0 * math.sqrt(a1) + 60.0
        val, err = integrate.quad(g, 0.0, hi, points=[a1 - 1.0], epsabs=abstol / 10, epsrel=1e-12, limit=500)
    elif variant == "uc":
        def g(t):
            y = math.sqrt(x * (varpi * dp.rho * dp.Omega_ipu * t + 1.0) / dp.rho) / (kappa * dp.beta)
            return math.exp(-t) * special.gammainc(a1, y)
        val, err = integrate.quad(g, 0.0, math.inf, epsabs=abstol / 10, epsrel=1e-12, limit=500)
    elif variant == "eu":
        # u = 2 sqrt(Z/om) has density (2/Gamma(Q)) (u/2)^Q K_{Q-1}(u)
        lg = special.gammaln(Q)

        def g(u):
            if u == 0.0:
                return 0.0
            dens = math.exp(math.log(2.0) - lg + Q * math.log(0.5 * u) + math.log(special.kve(Q - 1, u)) - u)
            zval = om * u * u / 4.0
            return dens * -math.expm1(-x * (kappa ** 2 * dp.rho_e * zval + 1.0) / (dp.Omega_e * dp.rho_e))
        val, err = integrate.quad(g, 0.0, 80.0 + 4.0 * Q, epsabs=abstol / 10, epsrel=1e-12, limit=500)
    else:
        lg = special.gammaln(Q)

        def g(t):
            xi = x * (varpi * dp.rho_e * dp.Omega_ipe * t + 1.0) / (kappa ** 2 * dp.rho_e * om)
            w = 2.0 * math.sqrt(xi)
            if w > 1e4 + 20.0 * Q:
                # tail below e^-5000; kve itself returns NaN near w ~ 1e9
                return math.exp(-t)
            tail = math.exp(math.log(2.0) - lg + 0.5 * Q * math.log(xi) + math.log(special.kve(Q, w)) - w)
            return math.exp(-t) * (1.0 - tail)
        val, err = integrate.quad(g, 0.0, math.inf, epsabs=abstol / 10, epsrel=1e-12, limit=500)

    if not (err <= abstol and math.isfinite(val)):
        raise NumericalError(f"reference integral for {variant} at x={x} did not converge (err {err:.2e})")
    return _clamp(val)


# ---------------------------------------------------------------------------
# secrecy outage

@dataclass(frozen=True)
class EpsilonThresholds:
    eps_u: float
    eps_c1: float
    eps_c2: float
    eps_c3: Optional[float]   # None under perfect SIC


def thresholds(s, dp=None) -> EpsilonThresholds:
    """Effective SINR thresholds with Eve's cascaded power replaced by its mean Q Omega_sr Omega_re."""
    dp = dp or model.derive(s)
    if s.r_u < 0 or s.r_c < 0:
        raise DomainError("target rates must be nonnegative")
    k2 = s.kappa ** 2
    ez = s.Q * dp.Omega_sr * dp.Omega_re
    eve_c = k2 * dp.rho_e * ez
    eps_u = 2.0 ** s.r_u * (1.0 + dp.rho_e * dp.Omega_e / (eve_c + 1.0)) - 1.0
    eps_c1 = (2.0 ** s.r_c * (1.0 + eve_c / (s.varpi * dp.rho_e * dp.Omega_ipe + 1.0)) - 1.0) / (k2 * dp.rho)
    eps_c2 = (2.0 ** s.r_c * (1.0 + eve_c) - 1.0) / (k2 * dp.rho)
    # rho -> infinity limit of rho * eps_c1 (rho_e held fixed)
    eps_c3 = eps_c1 * dp.rho if s.varpi > 0.0 else None
    return EpsilonThresholds(eps_u, eps_c1, eps_c2, eps_c3)


def sop_data(s, dp=None, rule=None):
    dp = dp or model.derive(s)
    eps = thresholds(s, dp).eps_u
    c = eps / (dp.Omega_u * dp.rho)
    return _gamma_tail_complement(c, c * dp.rho * s.kappa ** 2 * dp.beta ** 2, dp.alpha, _rule(rule, s))


def asym_sop_data(s, dp=None, rule=None):
    """High-SNR floor of the data-signal SOP (interference-limited)."""
    dp = dp or model.derive(s)
    eps = thresholds(s, dp).eps_u
    return _gamma_tail_complement(0.0, eps * s.kappa ** 2 * dp.beta ** 2 / dp.Omega_u, dp.alpha, _rule(rule, s))


def _check_sic(sic):
    if sic not in ("ipsic", "psic"):
        raise InvalidArgumentError(f"sic must be 'ipsic' or 'psic', got {sic!r}")


def sop_backscatter(s, dp=None, sic="ipsic", rule=None):
    dp = dp or model.derive(s)
    _check_sic(sic)
    th = thresholds(s, dp)
    a1 = dp.alpha + 1.0
    if sic == "psic":
        return _clamp(reg_lower_gamma(a1, math.sqrt(th.eps_c2) / dp.beta))
    rule = _rule(rule, s)
    arg = np.sqrt(th.eps_c1 * (s.varpi * dp.rho * dp.Omega_ipu * rule.nodes + 1.0)) / dp.beta
    return _clamp(float(np.dot(rule.weights, reg_lower_gamma(a1, arg))))


def lower_gamma_series(a1, z):
    """P(a1, z) = z^a1 e^-z sum_k z^k / Gamma(a1 + k + 1), summed in log space."""
    if z == 0.0:
        return 0.0
    lz = math.log(z)
    base = a1 * lz - z
    terms = []
    for k in range(SERIES_KMAX + 1):
        t = base + k * lz - ln_gamma(a1 + k + 1.0)
        terms.append(t)
        # past the peak (z < a1 + k + 1) terms shrink geometrically
        if z < a1 + k + 1.0 and t - log_sum_exp(terms) < math.log(SERIES_RTOL):
            return _clamp(math.exp(log_sum_exp(terms)))
    raise NumericalError(f"lower-gamma series did not converge in {SERIES_KMAX} terms (z={z:.3g})")


def asym_sop_backscatter(s, dp=None, sic="ipsic", rule=None):
    """High-SNR backscatter SOP: a floor for ipSIC, a power-law decay for pSIC."""
    dp = dp or model.derive(s)
    _check_sic(sic)
    th = thresholds(s, dp)
    a1 = dp.alpha + 1.0
    if sic == "psic":
        return lower_gamma_series(a1, math.sqrt(th.eps_c2) / dp.beta)
    if s.varpi == 0.0:
        raise DomainError("the ipSIC asymptote needs varpi > 0")
    rule = _rule(rule, s)
    arg = np.sqrt(th.eps_c3 * s.varpi * dp.Omega_ipu * rule.nodes) / dp.beta
    return _clamp(float(np.dot(rule.weights, reg_lower_gamma(a1, arg))))


def sop_system_indep(s, dp=None, sic="ipsic", rule=None):
    """1 - (1 - P_u)(1 - P_c); treats the two outage events as independent."""
    dp = dp or model.derive(s)
    pu = sop_data(s, dp, rule)
    pc = sop_backscatter(s, dp, sic, rule)
    return _clamp(1.0 - (1.0 - pu) * (1.0 - pc))


def scenario_at_rho(s, rho):
    """Scenario whose transmit SNR P_s / sigma_u^2 equals rho."""
    from dataclasses import replace
    return replace(s, ps_dbm=s.sigma_u_dbm + 10.0 * math.log10(rho))


def diversity_order(sop_fn, s, rho_decades):
    """Negated least-squares slope of log10 SOP against log10 rho.

    sop_fn maps a Scenario to a probability; rho_decades are log10(rho) values.
    """
    dec = np.asarray(list(rho_decades), dtype=float)
    if dec.size < 3:
        raise InvalidArgumentError("diversity_order needs at least 3 decades")
    p = np.array([sop_fn(scenario_at_rho(s, 10.0 ** d)) for d in dec])
    if not np.all(p > 0.0):
        raise NumericalError("SOP underflowed to zero on the decade grid")
    slope = np.polyfit(dec, np.log10(p), 1)[0]
    return float(-slope)


@dataclass(frozen=True)
class Throughput:
    data: float
    backscatter: float

    @property
    def network(self):
        return self.data + self.backscatter


def secrecy_throughput(s, dp=None, sic="ipsic", rule=None) -> Throughput:
    """Delay-limited throughput (1 - P) R per signal; network value is the sum."""
    dp = dp or model.derive(s)
    pu = sop_data(s, dp, rule)
    pc = sop_backscatter(s, dp, sic, rule)
    return Throughput((1.0 - pu) * s.r_u, (1.0 - pc) * s.r_c)


def secrecy_energy_efficiency(s, dp=None, sic="ipsic", rule=None):
    """Network throughput per watt of total consumption (BPCU/W)."""
    t = secrecy_throughput(s, dp, sic, rule).network
    return t / (model.total_power(s) / 1000.0)
