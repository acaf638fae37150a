"""Seeded Monte Carlo simulation of the link model.

Trials are split into fixed-size blocks. Block b draws its standard normals
from Philox seeded with SeedSequence([seed, b]), so every estimate depends on
(seed, trials) only and never on how blocks are spread over workers.

One row of normals holds, in order: h_u (2), h_e (2), h_sr (2M), h_ru (2M),
h_re over Eve's active block (2Q), h_ipu (2), h_ipe (2), as (real, imag)
pairs scaled by sqrt(Omega/2).
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import math

import numpy as np

from . import model
from ._backend import core
from .errors import InvalidArgumentError

BLOCK_SIZE = 1 << 15

SIGNALS = ("data", "backscatter")
SICS = ("ipsic", "psic")


@dataclass(frozen=True)
class ChannelDraw:
    h_u: complex
    h_e: complex
    a_sr: np.ndarray      # |h_sr^m|, m = 1..M
    a_ru: np.ndarray      # |h_ru^m|
    g_block: np.ndarray   # conj(h_re^m) h_sr^m over Eve's block (Q entries)
    h_ipu: complex
    h_ipe: complex
    Y: float
    Z: float


@dataclass(frozen=True)
class SopEstimate:
    p_hat: float
    trials: int
    std_err: float
    seed: int


@dataclass(frozen=True)
class OutageCounts:
    """Outage counts over one common set of draws."""
    data: int
    back_ipsic: int
    back_psic: int
    sys_ipsic: int
    sys_psic: int
    trials: int
    seed: int

    def count(self, signal, sic):
        if signal == "data":
            return self.data
        _check_sic(sic)
        if signal == "backscatter":
            return self.back_ipsic if sic == "ipsic" else self.back_psic
        if signal == "system":
            return self.sys_ipsic if sic == "ipsic" else self.sys_psic
        raise InvalidArgumentError(f"unknown signal {signal!r}")

    def estimate(self, signal, sic="psic"):
        return _binomial(self.count(signal, sic), self.trials, self.seed)


def _binomial(k, n, seed):
    p = k / n
    return SopEstimate(p, n, math.sqrt(p * (1.0 - p) / n), seed)


def _check_sic(sic):
    if sic not in SICS:
        raise InvalidArgumentError(f"sic must be one of {SICS}, got {sic!r}")


def n_columns(M, Q):
    return 8 + 4 * M + 2 * Q


def channel_sd(dp):
    """Per-component standard deviations sqrt(Omega/2) in column-group order."""
    om = (dp.Omega_u, dp.Omega_e, dp.Omega_sr, dp.Omega_ru, dp.Omega_re, dp.Omega_ipu, dp.Omega_ipe)
    return np.sqrt(np.array(om) / 2.0)


def _block_normals(seed, b, rows, ncols):
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, b])))
    return rng.standard_normal((rows, ncols))


def _blocks(trials):
    nb = -(-trials // BLOCK_SIZE)
    return [(b, min(BLOCK_SIZE, trials - b * BLOCK_SIZE)) for b in range(nb)]


def _map_blocks(fn, trials, workers):
    blocks = _blocks(trials)
    if workers <= 1 or len(blocks) == 1:
        return [fn(b, rows) for b, rows in blocks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda br: fn(*br), blocks))


def _resolve(s, trials, seed):
    trials = s.trials if trials is None else int(trials)
    seed = s.seed if seed is None else int(seed)
    if trials < 1:
        raise InvalidArgumentError(f"trials must be >= 1, got {trials}")
    if seed < 0:
        raise InvalidArgumentError(f"seed must be nonnegative, got {seed}")
    return trials, seed


def _shape(s, no_ris):
    # the baseline is a single backscatter element at the RIS position
    return (1, 1) if no_ris else (s.M, s.Q)


def _rate_threshold(R):
    # C < R  <=>  1 + g_u < 2^R (1 + g_e); impossible when R = 0
    return 2.0 ** R if R > 0.0 else 0.0


# ---------------------------------------------------------------------------
# single draws

def draw_from_normals(z, dp, M, Q):
    """ChannelDraw from one row of standard normals (layout in module doc)."""
    z = np.asarray(z, dtype=np.float64)
    if z.shape != (n_columns(M, Q),):
        raise InvalidArgumentError(f"expected {n_columns(M, Q)} normals, got shape {z.shape}")
    sd = channel_sd(dp)
    cplx = lambda lo, hi, k: sd[k] * (z[lo:hi:2] + 1j * z[lo + 1:hi:2])
    h_u = complex(cplx(0, 2, 0)[0])
    h_e = complex(cplx(2, 4, 1)[0])
    h_sr = cplx(4, 4 + 2 * M, 2)
    h_ru = cplx(4 + 2 * M, 4 + 4 * M, 3)
    o_re = 4 + 4 * M
    h_re = cplx(o_re, o_re + 2 * Q, 4)
    o_ip = o_re + 2 * Q
    h_ipu = complex(cplx(o_ip, o_ip + 2, 5)[0])
    h_ipe = complex(cplx(o_ip + 2, o_ip + 4, 6)[0])
    a_sr, a_ru = np.abs(h_sr), np.abs(h_ru)
    g_block = np.conj(h_re) * h_sr[:Q]
    return ChannelDraw(h_u, h_e, a_sr, a_ru, g_block, h_ipu, h_ipe,
                       Y=float(np.sum(a_sr * a_ru)), Z=float(abs(np.sum(g_block)) ** 2))


def sample_draw(dp, M, Q, rng):
    """One realization of every fading and residual-interference variable."""
    return draw_from_normals(rng.standard_normal(n_columns(M, Q)), dp, M, Q)


def sinrs(draw, dp, kappa, varpi):
    """(g_uu, g_uc, g_eu, g_ec); varpi = 0 is perfect SIC."""
    k2 = kappa * kappa
    back_u = k2 * draw.Y ** 2 * dp.rho
    back_e = k2 * draw.Z * dp.rho_e
    g_uu = dp.rho * abs(draw.h_u) ** 2 / (back_u + 1.0)
    g_uc = back_u / (varpi * dp.rho * abs(draw.h_ipu) ** 2 + 1.0)
    g_eu = dp.rho_e * abs(draw.h_e) ** 2 / (back_e + 1.0)
    g_ec = back_e / (varpi * dp.rho_e * abs(draw.h_ipe) ** 2 + 1.0)
    return g_uu, g_uc, g_eu, g_ec


def secrecy_capacity(g_u, g_e):
    """[log2(1+g_u) - log2(1+g_e)]^+ in BPCU."""
    c = np.maximum(0.0, np.log2(1.0 + np.asarray(g_u, dtype=float)) - np.log2(1.0 + np.asarray(g_e, dtype=float)))
    return float(c) if c.ndim == 0 else c


# ---------------------------------------------------------------------------
# bulk simulation

def simulate_outages(s, trials=None, seed=None, workers=1, no_ris=False) -> OutageCounts:
    """Count data, backscatter and union outages on one common set of draws."""
    trials, seed = _resolve(s, trials, seed)
    dp = model.derive(s)
    M, Q = _shape(s, no_ris)
    sd = channel_sd(dp)
    ncols = n_columns(M, Q)
    thr_u, thr_c = _rate_threshold(s.r_u), _rate_threshold(s.r_c)

    def run(b, rows):
        z = _block_normals(seed, b, rows, ncols)
        return core.outage_block(z, M, Q, sd, s.kappa, s.varpi, dp.rho, dp.rho_e, thr_u, thr_c)

    tot = np.sum(_map_blocks(run, trials, workers), axis=0)
    return OutageCounts(*(int(c) for c in tot), trials=trials, seed=seed)


def estimate_sop(s, signal, sic="psic", trials=None, seed=None, workers=1) -> SopEstimate:
    """Fraction of draws whose secrecy capacity for `signal` falls below its target."""
    if signal not in SIGNALS:
        raise InvalidArgumentError(f"signal must be one of {SIGNALS}, got {signal!r}")
    _check_sic(sic)
    return simulate_outages(s, trials, seed, workers).estimate(signal, sic)


def estimate_system_sop(s, sic="psic", trials=None, seed=None, workers=1) -> SopEstimate:
    """P(C_u < R_u or C_c < R_c) on a common draw."""
    _check_sic(sic)
    return simulate_outages(s, trials, seed, workers).estimate("system", sic)


def estimate_sop_no_ris(s, sic="psic", trials=None, seed=None, signal="system", workers=1) -> SopEstimate:
    """Same pipeline with one backscatter element in place of the RIS."""
    _check_sic(sic)
    return simulate_outages(s, trials, seed, workers, no_ris=True).estimate(signal, sic)


def throughput_estimate(counts: OutageCounts, r_u, r_c, sic="psic"):
    """Mean and standard error of the per-draw throughput R_u 1{C_u>=R_u} + R_c 1{C_c>=R_c}."""
    n = counts.trials
    ok_u = 1.0 - counts.data / n
    ok_c = 1.0 - counts.count("backscatter", sic) / n
    ok_both = 1.0 - counts.count("system", sic) / n
    mean = r_u * ok_u + r_c * ok_c
    second = r_u * r_u * ok_u + r_c * r_c * ok_c + 2.0 * r_u * r_c * ok_both
    var = max(second - mean * mean, 0.0)
    return mean, math.sqrt(var / n)


SINR_COLUMNS = ("g_uu", "g_uc_ipsic", "g_uc_psic", "g_eu", "g_ec_ipsic", "g_ec_psic")


def sinr_samples(s, trials=None, seed=None, workers=1, no_ris=False):
    """Per-draw SINRs as a dict keyed by SINR_COLUMNS."""
    trials, seed = _resolve(s, trials, seed)
    dp = model.derive(s)
    M, Q = _shape(s, no_ris)
    sd = channel_sd(dp)
    ncols = n_columns(M, Q)

    def run(b, rows):
        z = _block_normals(seed, b, rows, ncols)
        return core.sinr_block(z, M, Q, sd, s.kappa, s.varpi, dp.rho, dp.rho_e)

    g = np.concatenate(_map_blocks(run, trials, workers))
    return {name: g[:, i] for i, name in enumerate(SINR_COLUMNS)}


def cascaded_samples(s, trials=None, seed=None):
    """Samples of Y = sum_m |h_ru^m||h_sr^m| and Z = |sum_block conj(h_re) h_sr|^2."""
    from ._pycore import _powers

    trials, seed = _resolve(s, trials, seed)
    sd = channel_sd(model.derive(s))
    ncols = n_columns(s.M, s.Q)
    Y, Z = [], []
    for b, rows in _blocks(trials):
        _, _, y, zz, _, _ = _powers(_block_normals(seed, b, rows, ncols), s.M, s.Q, sd)
        Y.append(y)
        Z.append(zz)
    return np.concatenate(Y), np.concatenate(Z)


def empirical_cdf(samples, grid):
    """Fraction of samples <= x for each x in the (sorted) grid."""
    samples = np.asarray(samples, dtype=np.float64).ravel()
    grid = np.asarray(grid, dtype=np.float64)
    if samples.size == 0 or grid.size == 0:
        raise InvalidArgumentError("empirical_cdf needs nonempty samples and grid")
    if np.any(np.diff(grid) < 0):
        raise InvalidArgumentError("grid must be sorted ascending")
    return np.searchsorted(np.sort(samples), grid, side="right") / samples.size
