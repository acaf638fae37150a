"""Pure-Python kernels.

Mirror of ``_core.pyx``. The Monte Carlo kernels use the same operation
order as the compiled versions so both backends produce bit-identical
SINRs and outage counts from the same normals.
"""
import math

import numpy as np

EULER_GAMMA = 0.57721566490153286061
_EPS = 1e-16
_FPMIN = 1e-300
_ITMAX = 100000

_LANCZOS = (
    57.1562356658629235, -59.5979603554754912, 14.1360979747417471,
    -0.491913816097620199, 0.339946499848118887e-4, 0.465236289270485756e-4,
    -0.983744753048795646e-4, 0.158088703224912494e-3, -0.210264441724104883e-3,
    0.217439618115212643e-3, -0.164318106536763890e-3, 0.844182239838527433e-4,
    -0.261908384015814087e-4, 0.368991826595316234e-5,
)


def ln_gamma(a):
    # Lanczos, g = 671/128, 14 terms
    y = a
    tmp = a + 5.24218750000000000
    tmp = (a + 0.5) * math.log(tmp) - tmp
    ser = 0.999999999999997092
    for c in _LANCZOS:
        y += 1.0
        ser += c / y
    return tmp + math.log(2.5066282746310005 * ser / a)


def reg_lower_gamma(a, x):
    """P(a, x); NaN if the expansion does not converge."""
    if x == 0.0:
        return 0.0
    if x < a + 1.0:
        ap = a
        term = total = 1.0 / a
        for _ in range(_ITMAX):
            ap += 1.0
            term *= x / ap
            total += term
            if abs(term) < abs(total) * _EPS:
                return total * math.exp(-x + a * math.log(x) - ln_gamma(a))
        return math.nan
    # modified Lentz on the continued fraction for Q(a, x)
    b = x + 1.0 - a
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, _ITMAX):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return 1.0 - math.exp(-x + a * math.log(x) - ln_gamma(a)) * h
    return math.nan


def reg_lower_gamma_vec(a, xs):
    xs = np.asarray(xs, dtype=np.float64)
    out = np.empty(xs.shape)
    flat = out.reshape(-1)
    for i, x in enumerate(xs.reshape(-1)):
        flat[i] = reg_lower_gamma(a, float(x))
    return out


def _k01_scaled(x):
    """(e^x K_0(x), e^x K_1(x)) for x > 0."""
    if x <= 2.0:
        t = 0.25 * x * x
        lnh = math.log(0.5 * x)
        # k-th terms of t^k/(k!)^2 and t^k/(k!(k+1)!)
        p0 = 1.0
        p1 = 1.0
        harm = 0.0
        i0 = 1.0
        s0 = 0.0
        i1 = 1.0
        s1 = -2.0 * EULER_GAMMA + 1.0
        k = 0
        while True:
            k += 1
            p0 *= t / (k * k)
            p1 *= t / (k * (k + 1))
            harm += 1.0 / k
            i0 += p0
            s0 += harm * p0
            i1 += p1
            s1 += (2.0 * (harm - EULER_GAMMA) + 1.0 / (k + 1)) * p1
            # t <= 1: terms fall like 1/(k!)^2, sums are O(1)
            if (p0 + p1) * (2.0 * harm + 1.0) < 1e-18:
                break
        k0 = -(lnh + EULER_GAMMA) * i0 + s0
        k1 = 1.0 / x + lnh * (0.5 * x * i1) - 0.25 * x * s1
        ex = math.exp(x)
        return k0 * ex, k1 * ex
    # Steed's method on Temme's CF2, order 0
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = delh = d
    q1 = 0.0
    q2 = 1.0
    a1 = 0.25
    q = c = a1
    a = -a1
    s = 1.0 + q * delh
    for i in range(1, _ITMAX):
        a -= 2 * i
        c = -a * c / (i + 1.0)
        qnew = (q1 - b * q2) / a
        q1 = q2
        q2 = qnew
        q += c * qnew
        b += 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        dels = q * delh
        s += dels
        if abs(dels / s) < _EPS:
            break
    else:
        return math.nan, math.nan
    h = a1 * h
    k0 = math.sqrt(math.pi / (2.0 * x)) / s
    k1 = k0 * (x + 0.5 - h) / x
    return k0, k1


def ln_bessel_k_scaled(nu, x):
    """log(e^x K_nu(x)) for integer nu >= 0, x > 0."""
    k0, k1 = _k01_scaled(x)
    if nu == 0:
        return math.log(k0)
    lscale = 0.0
    for j in range(1, nu):
        k0, k1 = k1, k0 + (2.0 * j / x) * k1
        if k1 > 1e250:
            k0 /= k1
            lscale += math.log(k1)
            k1 = 1.0
    return math.log(k1) + lscale


def ln_bessel_k_scaled_vec(nu, xs):
    xs = np.asarray(xs, dtype=np.float64)
    out = np.empty(xs.shape)
    flat = out.reshape(-1)
    for i, x in enumerate(xs.reshape(-1)):
        flat[i] = ln_bessel_k_scaled(nu, float(x))
    return out


def log_sum_exp(values):
    v = np.asarray(values, dtype=np.float64).reshape(-1)
    m = float(np.max(v))
    if math.isinf(m):
        return m
    return m + math.log(float(np.sum(np.exp(v - m))))


def laguerre_pair(n, x):
    """L_n(x), L_{n-1}(x) divided by exp(log_scale); returns all three."""
    x = np.asarray(x, dtype=np.float64)
    p0 = np.ones_like(x)
    p1 = 1.0 - x
    lscale = np.zeros_like(x)
    for k in range(1, n):
        p0, p1 = p1, ((2 * k + 1 - x) * p1 - k * p0) / (k + 1)
        big = np.abs(p1) > 1e100
        if big.any():
            s = np.abs(p1[big])
            p0[big] /= s
            p1[big] /= s
            lscale[big] += np.log(s)
    return p1, p0, lscale


# -- Monte Carlo kernels ---------------------------------------------------
# Column layout of the standard-normal block z (B x 8 + 4M + 2Q):
#   0-1 h_u, 2-3 h_e, 4.. h_sr (M pairs), then h_ru (M pairs),
#   then h_re (Q pairs, Eve's active block), then h_ipu, h_ipe.

def _powers(z, M, Q, sd):
    s_u, s_e, s_sr, s_ru, s_re, s_ipu, s_ipe = sd
    o_ru = 4 + 2 * M
    o_re = 4 + 4 * M
    o_ip = o_re + 2 * Q

    a = s_u * z[:, 0]
    b = s_u * z[:, 1]
    hu2 = a * a + b * b
    a = s_e * z[:, 2]
    b = s_e * z[:, 3]
    he2 = a * a + b * b

    Y = np.zeros(z.shape[0])
    for m in range(M):
        sr_r = s_sr * z[:, 4 + 2 * m]
        sr_i = s_sr * z[:, 5 + 2 * m]
        ru_r = s_ru * z[:, o_ru + 2 * m]
        ru_i = s_ru * z[:, o_ru + 2 * m + 1]
        Y += np.sqrt(sr_r * sr_r + sr_i * sr_i) * np.sqrt(ru_r * ru_r + ru_i * ru_i)

    gr = np.zeros(z.shape[0])
    gi = np.zeros(z.shape[0])
    for q in range(Q):
        sr_r = s_sr * z[:, 4 + 2 * q]
        sr_i = s_sr * z[:, 5 + 2 * q]
        re_r = s_re * z[:, o_re + 2 * q]
        re_i = s_re * z[:, o_re + 2 * q + 1]
        gr += re_r * sr_r + re_i * sr_i
        gi += re_r * sr_i - re_i * sr_r
    Z = gr * gr + gi * gi

    a = s_ipu * z[:, o_ip]
    b = s_ipu * z[:, o_ip + 1]
    ipu2 = a * a + b * b
    a = s_ipe * z[:, o_ip + 2]
    b = s_ipe * z[:, o_ip + 3]
    ipe2 = a * a + b * b
    return hu2, he2, Y, Z, ipu2, ipe2


def sinr_block(z, M, Q, sd, kappa, varpi, rho, rho_e):
    """Columns: g_uu, g_uc(ipSIC), g_uc(pSIC), g_eu, g_ec(ipSIC), g_ec(pSIC)."""
    hu2, he2, Y, Z, ipu2, ipe2 = _powers(z, M, Q, sd)
    k2 = kappa * kappa
    bu = k2 * Y * Y * rho
    be = k2 * Z * rho_e
    out = np.empty((z.shape[0], 6))
    out[:, 0] = rho * hu2 / (bu + 1.0)
    out[:, 1] = bu / (varpi * rho * ipu2 + 1.0)
    out[:, 2] = bu
    out[:, 3] = rho_e * he2 / (be + 1.0)
    out[:, 4] = be / (varpi * rho_e * ipe2 + 1.0)
    out[:, 5] = be
    return out


def outage_block(z, M, Q, sd, kappa, varpi, rho, rho_e, thr_u, thr_c):
    """Counts [data, back ipSIC, back pSIC, system ipSIC, system pSIC].

    thr_* is 2^R, or 0 when R = 0 (outage impossible).
    """
    g = sinr_block(z, M, Q, sd, kappa, varpi, rho, rho_e)
    n = z.shape[0]
    if thr_u > 0.0:
        ou = (1.0 + g[:, 0]) < thr_u * (1.0 + g[:, 3])
    else:
        ou = np.zeros(n, dtype=bool)
    if thr_c > 0.0:
        oc_i = (1.0 + g[:, 1]) < thr_c * (1.0 + g[:, 4])
        oc_p = (1.0 + g[:, 2]) < thr_c * (1.0 + g[:, 5])
    else:
        oc_i = oc_p = np.zeros(n, dtype=bool)
    return np.array([
        np.count_nonzero(ou),
        np.count_nonzero(oc_i),
        np.count_nonzero(oc_p),
        np.count_nonzero(ou | oc_i),
        np.count_nonzero(ou | oc_p),
    ], dtype=np.int64)
