# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; same signatures and arithmetic as ``_pycore``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport log, exp, sqrt, fabs, isinf, NAN, M_PI

cnp.import_array()

cdef double EULER_GAMMA = 0.57721566490153286061
cdef double _EPS = 1e-16
cdef double _FPMIN = 1e-300
cdef int _ITMAX = 100000

cdef double[14] _LANCZOS = [
    57.1562356658629235, -59.5979603554754912, 14.1360979747417471,
    -0.491913816097620199, 0.339946499848118887e-4, 0.465236289270485756e-4,
    -0.983744753048795646e-4, 0.158088703224912494e-3, -0.210264441724104883e-3,
    0.217439618115212643e-3, -0.164318106536763890e-3, 0.844182239838527433e-4,
    -0.261908384015814087e-4, 0.368991826595316234e-5,
]


cdef double _ln_gamma(double a) noexcept nogil:
    cdef double y = a, tmp, ser
    cdef int j
    tmp = a + 5.24218750000000000
    tmp = (a + 0.5) * log(tmp) - tmp
    ser = 0.999999999999997092
    for j in range(14):
        y += 1.0
        ser += _LANCZOS[j] / y
    return tmp + log(2.5066282746310005 * ser / a)


cdef double _reg_lower_gamma(double a, double x) noexcept nogil:
    cdef double ap, term, total, b, c, d, h, an, delta
    cdef int i
    if x == 0.0:
        return 0.0
    if x < a + 1.0:
        ap = a
        term = 1.0 / a
        total = term
        for i in range(_ITMAX):
            ap += 1.0
            term *= x / ap
            total += term
            if fabs(term) < fabs(total) * _EPS:
                return total * exp(-x + a * log(x) - _ln_gamma(a))
        return NAN
    b = x + 1.0 - a
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, _ITMAX):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if fabs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if fabs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if fabs(delta - 1.0) < _EPS:
            return 1.0 - exp(-x + a * log(x) - _ln_gamma(a)) * h
    return NAN


cdef void _k01_scaled(double x, double* k0, double* k1) noexcept nogil:
    cdef double t, lnh, p0, p1, harm, i0, s0, i1, s1, ex
    cdef double b, d, h, delh, q1, q2, a1, q, c, a, s, qnew, dels
    cdef int k, i
    if x <= 2.0:
        t = 0.25 * x * x
        lnh = log(0.5 * x)
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
            if (p0 + p1) * (2.0 * harm + 1.0) < 1e-18:
                break
        ex = exp(x)
        k0[0] = (-(lnh + EULER_GAMMA) * i0 + s0) * ex
        k1[0] = (1.0 / x + lnh * (0.5 * x * i1) - 0.25 * x * s1) * ex
        return
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = d
    delh = d
    q1 = 0.0
    q2 = 1.0
    a1 = 0.25
    q = a1
    c = a1
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
        if fabs(dels / s) < _EPS:
            break
    else:
        k0[0] = NAN
        k1[0] = NAN
        return
    h = a1 * h
    k0[0] = sqrt(M_PI / (2.0 * x)) / s
    k1[0] = k0[0] * (x + 0.5 - h) / x


cdef double _ln_bessel_k_scaled(int nu, double x) noexcept nogil:
    cdef double k0, k1, knext, lscale = 0.0
    cdef int j
    _k01_scaled(x, &k0, &k1)
    if nu == 0:
        return log(k0)
    for j in range(1, nu):
        knext = k0 + (2.0 * j / x) * k1
        k0 = k1
        k1 = knext
        if k1 > 1e250:
            k0 /= k1
            lscale += log(k1)
            k1 = 1.0
    return log(k1) + lscale


def ln_gamma(double a):
    return _ln_gamma(a)


def reg_lower_gamma(double a, double x):
    return _reg_lower_gamma(a, x)


def reg_lower_gamma_vec(double a, xs):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] flat = np.ascontiguousarray(xs, dtype=np.float64).reshape(-1)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(flat.shape[0])
    cdef Py_ssize_t i
    for i in range(flat.shape[0]):
        out[i] = _reg_lower_gamma(a, flat[i])
    return out.reshape(np.shape(xs))


def ln_bessel_k_scaled(int nu, double x):
    return _ln_bessel_k_scaled(nu, x)


def ln_bessel_k_scaled_vec(int nu, xs):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] flat = np.ascontiguousarray(xs, dtype=np.float64).reshape(-1)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(flat.shape[0])
    cdef Py_ssize_t i
    for i in range(flat.shape[0]):
        out[i] = _ln_bessel_k_scaled(nu, flat[i])
    return out.reshape(np.shape(xs))


def log_sum_exp(values):
    cdef const double[::1] v = np.ascontiguousarray(values, dtype=np.float64).reshape(-1)
    cdef Py_ssize_t i, n = v.shape[0]
    cdef double m = v[0], acc = 0.0
    for i in range(1, n):
        if v[i] > m:
            m = v[i]
    if isinf(m):
        return m
    for i in range(n):
        acc += exp(v[i] - m)
    return m + log(acc)


def laguerre_pair(int n, x):
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t i, npts = xv.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out_n = np.empty(npts)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out_m = np.empty(npts)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out_s = np.zeros(npts)
    cdef double p0, p1, p2, s, ls, xi
    cdef int k
    for i in range(npts):
        xi = xv[i]
        p0 = 1.0
        p1 = 1.0 - xi
        ls = 0.0
        for k in range(1, n):
            p2 = ((2 * k + 1 - xi) * p1 - k * p0) / (k + 1)
            p0 = p1
            p1 = p2
            s = fabs(p1)
            if s > 1e100:
                p0 /= s
                p1 /= s
                ls += log(s)
        out_n[i] = p1
        out_m[i] = p0
        out_s[i] = ls
    return out_n, out_m, out_s


cdef inline void _trial(const double[:, ::1] z, Py_ssize_t t, int M, int Q,
                        const double* sd, double kappa, double varpi,
                        double rho, double rho_e, double* g) noexcept nogil:
    cdef double a, b, hu2, he2, Y = 0.0, gr = 0.0, gi = 0.0, Z, ipu2, ipe2
    cdef double sr_r, sr_i, ru_r, ru_i, re_r, re_i, k2, bu, be
    cdef int m, q
    cdef int o_ru = 4 + 2 * M
    cdef int o_re = 4 + 4 * M
    cdef int o_ip = o_re + 2 * Q
    a = sd[0] * z[t, 0]
    b = sd[0] * z[t, 1]
    hu2 = a * a + b * b
    a = sd[1] * z[t, 2]
    b = sd[1] * z[t, 3]
    he2 = a * a + b * b
    for m in range(M):
        sr_r = sd[2] * z[t, 4 + 2 * m]
        sr_i = sd[2] * z[t, 5 + 2 * m]
        ru_r = sd[3] * z[t, o_ru + 2 * m]
        ru_i = sd[3] * z[t, o_ru + 2 * m + 1]
        Y += sqrt(sr_r * sr_r + sr_i * sr_i) * sqrt(ru_r * ru_r + ru_i * ru_i)
    for q in range(Q):
        sr_r = sd[2] * z[t, 4 + 2 * q]
        sr_i = sd[2] * z[t, 5 + 2 * q]
        re_r = sd[4] * z[t, o_re + 2 * q]
        re_i = sd[4] * z[t, o_re + 2 * q + 1]
        gr += re_r * sr_r + re_i * sr_i
        gi += re_r * sr_i - re_i * sr_r
    Z = gr * gr + gi * gi
    a = sd[5] * z[t, o_ip]
    b = sd[5] * z[t, o_ip + 1]
    ipu2 = a * a + b * b
    a = sd[6] * z[t, o_ip + 2]
    b = sd[6] * z[t, o_ip + 3]
    ipe2 = a * a + b * b
    k2 = kappa * kappa
    bu = k2 * Y * Y * rho
    be = k2 * Z * rho_e
    g[0] = rho * hu2 / (bu + 1.0)
    g[1] = bu / (varpi * rho * ipu2 + 1.0)
    g[2] = bu
    g[3] = rho_e * he2 / (be + 1.0)
    g[4] = be / (varpi * rho_e * ipe2 + 1.0)
    g[5] = be


def sinr_block(z, int M, int Q, sd, double kappa, double varpi,
               double rho, double rho_e):
    cdef const double[:, ::1] zv = np.ascontiguousarray(z, dtype=np.float64)
    cdef const double[::1] sdv = np.ascontiguousarray(sd, dtype=np.float64)
    cdef Py_ssize_t t, n = zv.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((n, 6))
    cdef double[:, ::1] ov = out
    with nogil:
        for t in range(n):
            _trial(zv, t, M, Q, &sdv[0], kappa, varpi, rho, rho_e, &ov[t, 0])
    return out


def outage_block(z, int M, int Q, sd, double kappa, double varpi,
                 double rho, double rho_e, double thr_u, double thr_c):
    cdef const double[:, ::1] zv = np.ascontiguousarray(z, dtype=np.float64)
    cdef const double[::1] sdv = np.ascontiguousarray(sd, dtype=np.float64)
    cdef Py_ssize_t t, n = zv.shape[0]
    cdef double g[6]
    cdef long long n_u = 0, n_ci = 0, n_cp = 0, n_si = 0, n_sp = 0
    cdef bint ou, oci, ocp
    with nogil:
        for t in range(n):
            _trial(zv, t, M, Q, &sdv[0], kappa, varpi, rho, rho_e, g)
            ou = thr_u > 0.0 and (1.0 + g[0]) < thr_u * (1.0 + g[3])
            oci = thr_c > 0.0 and (1.0 + g[1]) < thr_c * (1.0 + g[4])
            ocp = thr_c > 0.0 and (1.0 + g[2]) < thr_c * (1.0 + g[5])
            n_u += ou
            n_ci += oci
            n_cp += ocp
            n_si += ou or oci
            n_sp += ou or ocp
    return np.array([n_u, n_ci, n_cp, n_si, n_sp], dtype=np.int64)
