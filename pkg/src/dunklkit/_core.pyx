# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: Gauss 2F1, scaled Dunkl kernel, translated Poisson
kernel with derivatives, and the rank-one Riesz kernel.

Algorithms match ``_core_py`` line for line; see that module for comments.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log, fabs, floor, pow, tan, tgamma, lgamma, sqrt, NAN, M_PI

cnp.import_array()

BACKEND = "cython"

cdef double EULER_GAMMA = 0.57721566490153286061
cdef double TINY = 1e-17
cdef int MAXTERMS = 5000
cdef double ASYMPTOTIC_Y = 40.0


cdef inline bint nonpos_int(double v) nogil:
    return v <= 0.0 and v == floor(v)


cdef double c_rgamma(double x) nogil:
    if nonpos_int(x):
        return 0.0
    if x > 170.0:
        return exp(-lgamma(x))
    return 1.0 / tgamma(x)


cdef double c_digamma(double x) nogil:
    cdef double acc = 0.0, f, tail
    if nonpos_int(x):
        return NAN
    if x < 0.0:
        return c_digamma(1.0 - x) - M_PI / tan(M_PI * x)
    while x < 10.0:
        acc -= 1.0 / x
        x += 1.0
    f = 1.0 / (x * x)
    tail = f * (1.0 / 12 - f * (1.0 / 120 - f * (1.0 / 252 - f * (1.0 / 240 - f / 132.0))))
    return acc + log(x) - 0.5 / x - tail


cdef double c_series(double a, double b, double c, double z) nogil:
    cdef double s = 1.0, t = 1.0
    cdef int n
    for n in range(MAXTERMS):
        t = t * ((a + n) * (b + n) / ((c + n) * (n + 1.0))) * z
        s += t
        if fabs(t) <= TINY * fabs(s):
            return s
    return NAN


# Parameter-only constants of the z -> 1 - z continuation, cached per (a, b, c).
cdef struct NearOne:
    double a, b, c
    int kind          # 0 generic, 1 log0, 2 logm
    int m
    double k1, k2     # generic: the two Gamma prefactors; log cases: see below
    double pa, pb, pm, fact

DEF NSLOTS = 8
cdef NearOne _slots[NSLOTS]
cdef int _nused = 0
cdef int _next = 0


cdef NearOne* near_one_consts(double a, double b, double c) nogil:
    global _nused, _next
    cdef int i, j
    cdef double m, mi, gc
    cdef NearOne* e
    for i in range(_nused):
        if _slots[i].a == a and _slots[i].b == b and _slots[i].c == c:
            return &_slots[i]
    e = &_slots[_next]
    _next = (_next + 1) % NSLOTS
    if _nused < NSLOTS:
        _nused += 1
    e.a = a
    e.b = b
    e.c = c
    m = c - a - b
    mi = floor(m + 0.5)
    gc = tgamma(c)
    if fabs(m - mi) < 1e-13 and mi == 0:
        e.kind = 1
        e.k1 = tgamma(a + b) * c_rgamma(a) * c_rgamma(b)
        e.pa = c_digamma(a)
        e.pb = c_digamma(b)
    elif fabs(m - mi) < 1e-13 and mi > 0:
        e.kind = 2
        e.m = <int>mi
        e.k1 = tgamma(mi) * gc * c_rgamma(a + mi) * c_rgamma(b + mi)
        e.k2 = gc * c_rgamma(a) * c_rgamma(b)
        e.pm = -EULER_GAMMA
        e.fact = 1.0
        for j in range(1, e.m + 1):
            e.pm += 1.0 / j
            e.fact *= j
        e.pa = c_digamma(a + mi)
        e.pb = c_digamma(b + mi)
    else:
        e.kind = 0
        e.k1 = gc * tgamma(m) * c_rgamma(c - a) * c_rgamma(c - b)
        e.k2 = gc * tgamma(-m) * c_rgamma(a) * c_rgamma(b)
    return e


cdef double c_log0(NearOne* e, double y) nogil:
    cdef double a = e.a, b = e.b
    cdef double lny = log(y)
    cdef double p1 = -EULER_GAMMA, pa = e.pa, pb = e.pb
    cdef double coef = 1.0, s = 0.0, term
    cdef int n
    for n in range(MAXTERMS):
        term = coef * (2.0 * p1 - pa - pb - lny)
        s += term
        if n > 0 and fabs(term) <= TINY * fabs(s):
            return e.k1 * s
        coef = coef * ((a + n) * (b + n) / ((n + 1.0) * (n + 1.0))) * y
        p1 += 1.0 / (n + 1.0)
        pa += 1.0 / (a + n)
        pb += 1.0 / (b + n)
    return NAN


cdef double c_logm(NearOne* e, double y) nogil:
    cdef double a = e.a, b = e.b
    cdef int m = e.m
    cdef double finite = 0.0, coef = 1.0, term, s = 0.0
    cdef double lny, p1, pm, pa, pb
    cdef int n
    for n in range(m):
        finite += coef
        if n + 1 < m:
            coef = coef * ((a + n) * (b + n) / ((n + 1.0) * (n + 1.0 - m))) * y
    finite = finite * e.k1
    lny = log(y)
    p1 = -EULER_GAMMA
    pm = e.pm
    pa = e.pa
    pb = e.pb
    coef = 1.0 / e.fact
    for n in range(MAXTERMS):
        term = coef * (lny - p1 - pm + pa + pb)
        s += term
        if n > 0 and fabs(term) <= TINY * fabs(s):
            break
        coef = coef * ((a + m + n) * (b + m + n) / ((n + 1.0) * (n + m + 1.0))) * y
        p1 += 1.0 / (n + 1.0)
        pm += 1.0 / (n + m + 1.0)
        pa += 1.0 / (a + m + n)
        pb += 1.0 / (b + m + n)
    return finite - pow(-y, m) * e.k2 * s


cdef double c_near_one(double a, double b, double c, double y) nogil:
    cdef double m, mi
    cdef NearOne* e
    if nonpos_int(a) or nonpos_int(b):
        return c_series(a, b, c, 1.0 - y)
    m = c - a - b
    mi = floor(m + 0.5)
    if fabs(m - mi) < 1e-13 and mi < 0:
        return pow(y, mi) * c_near_one(c - a, c - b, c, y)
    e = near_one_consts(a, b, c)
    if e.kind == 1:
        return c_log0(e, y)
    if e.kind == 2:
        return c_logm(e, y)
    return e.k1 * c_series(a, b, 1.0 - m, y) + pow(y, m) * e.k2 * c_series(c - a, c - b, 1.0 + m, y)


cdef double c_hyp2f1(double a, double b, double c, double z) nogil:
    if nonpos_int(a) or nonpos_int(b):
        return c_series(a, b, c, z)
    if z <= 0.5:
        return c_series(a, b, c, z)
    return c_near_one(a, b, c, 1.0 - z)


cdef double c_hyp2f1_zy(double a, double b, double c, double z, double y) nogil:
    # y = 1 - z supplied exactly by the caller
    if z <= 0.5 or nonpos_int(a) or nonpos_int(b):
        return c_series(a, b, c, z)
    return c_near_one(a, b, c, y)


def rgamma(double x):
    return c_rgamma(x)


def digamma(double x):
    return c_digamma(x)


def hyp2f1(double a, double b, double c, double z):
    if nonpos_int(c):
        raise ValueError("c must not be a nonpositive integer")
    return c_hyp2f1(a, b, c, z)


def hyp2f1_vec(double a, double b, double c, z, y=None):
    if nonpos_int(c):
        raise ValueError("c must not be a nonpositive integer")
    cdef double[::1] zv = np.ascontiguousarray(z, dtype=np.float64)
    cdef double[::1] yv = np.ascontiguousarray(1.0 - np.asarray(z, dtype=np.float64) if y is None else y,
                                               dtype=np.float64)
    cdef Py_ssize_t i, n = zv.shape[0]
    out = np.empty(n)
    cdef double[::1] ov = out
    with nogil:
        for i in range(n):
            ov[i] = c_hyp2f1_zy(a, b, c, zv[i], yv[i])
    return out


# ------------------------------------------------------ Dunkl kernel ----

cdef double c_kummer_scaled(double a, double b, double y) nogil:
    cdef double s = 1.0, t = 1.0
    cdef int n
    for n in range(MAXTERMS):
        t = t * ((a + n) / ((b + n) * (n + 1.0))) * y
        s += t
        if t <= TINY * s:
            break
    return exp(-y) * s


cdef double c_asymptotic(double pref, double p, double q, double y) nogil:
    cdef double s = 1.0, t = 1.0, tn
    cdef int n
    for n in range(200):
        tn = t * ((p + n) * (q + n) / (n + 1.0)) / y
        if fabs(tn) > fabs(t):
            break
        t = tn
        s += t
        if fabs(t) <= TINY * fabs(s):
            break
    return pref * s


cdef double c_dunkl_scaled(double kappa, double z) nogil:
    cdef double y = 2.0 * fabs(z)
    cdef double b = 2.0 * kappa + 1.0
    if kappa == 0.0:
        return 1.0 if z >= 0.0 else exp(-y)
    if y <= ASYMPTOTIC_Y:
        if z >= 0.0:
            return c_kummer_scaled(kappa + 1.0, b, y)
        return c_kummer_scaled(kappa, b, y)
    if z >= 0.0:
        return c_asymptotic(tgamma(b) * c_rgamma(kappa + 1.0) * pow(y, -kappa), kappa, -kappa, y)
    return c_asymptotic(tgamma(b) * c_rgamma(kappa) * pow(y, -kappa - 1.0), kappa + 1.0, 1.0 - kappa, y)


def dunkl_scaled(double kappa, z):
    cdef double[::1] zv = np.ascontiguousarray(z, dtype=np.float64)
    cdef Py_ssize_t i, n = zv.shape[0]
    out = np.empty(n)
    cdef double[::1] ov = out
    with nogil:
        for i in range(n):
            ov[i] = c_dunkl_scaled(kappa, zv[i])
    return out


# --------------------------------------------------- Poisson / Riesz ----

cdef double c_m_kappa(double kappa) nogil:
    return pow(2.0, kappa + 0.5) * tgamma(kappa + 1.0) / sqrt(M_PI)


def m_kappa(double kappa):
    return c_m_kappa(kappa)


cdef void c_parts(double k, double c, double x0, double x, double t, bint deriv,
                  double* P, double* d0, double* dx) nogil:
    cdef double sp = x0 * x0 + (x + t) * (x + t)
    cdef double sm = x0 * x0 + (x - t) * (x - t)
    cdef double z, G, Gp, A, l0, lx, z0, zx, w, H, Hp, w0, wx
    if x * t >= 0.0:
        z = 4.0 * x * t / sp
        G = c_hyp2f1_zy(k, k, 2 * k + 1, z, sm / sp)
        A = pow(sp, -k) / sm
        P[0] = c * x0 * A * G
        if deriv:
            Gp = k * k / (2 * k + 1) * c_hyp2f1_zy(k + 1, k + 1, 2 * k + 2, z, sm / sp)
            l0 = -2.0 * k * x0 / sp - 2.0 * x0 / sm
            lx = -2.0 * k * (x + t) / sp - 2.0 * (x - t) / sm
            z0 = -z * 2.0 * x0 / sp
            zx = 4.0 * t / sp - z * 2.0 * (x + t) / sp
            d0[0] = c * A * (G + x0 * (l0 * G + Gp * z0))
            dx[0] = c * x0 * A * (lx * G + Gp * zx)
    else:
        w = -4.0 * x * t / sm
        H = c_hyp2f1_zy(k, k + 1, 2 * k + 1, w, sp / sm)
        A = pow(sm, -k - 1.0)
        P[0] = c * x0 * A * H
        if deriv:
            Hp = k * (k + 1) / (2 * k + 1) * c_hyp2f1_zy(k + 1, k + 2, 2 * k + 2, w, sp / sm)
            l0 = -2.0 * (k + 1) * x0 / sm
            lx = -2.0 * (k + 1) * (x - t) / sm
            w0 = -w * 2.0 * x0 / sm
            wx = -4.0 * t / sm - w * 2.0 * (x - t) / sm
            d0[0] = c * A * (H + x0 * (l0 * H + Hp * w0))
            dx[0] = c * x0 * A * (lx * H + Hp * wx)


def poisson_kernel(double kappa, x0, x, t):
    cdef double[::1] a0 = np.ascontiguousarray(x0, dtype=np.float64)
    cdef double[::1] ax = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[::1] at = np.ascontiguousarray(t, dtype=np.float64)
    cdef Py_ssize_t i, n = ax.shape[0]
    cdef double c = c_m_kappa(kappa)
    cdef double dummy
    out = np.empty(n)
    cdef double[::1] ov = out
    with nogil:
        for i in range(n):
            c_parts(kappa, c, a0[i], ax[i], at[i], False, &ov[i], &dummy, &dummy)
    return out


def poisson_grad(double kappa, x0, x, t):
    cdef double[::1] a0 = np.ascontiguousarray(x0, dtype=np.float64)
    cdef double[::1] ax = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[::1] at = np.ascontiguousarray(t, dtype=np.float64)
    cdef Py_ssize_t i, n = ax.shape[0]
    cdef double c = c_m_kappa(kappa)
    cdef double dummy
    P = np.empty(n)
    D0 = np.empty(n)
    DX = np.empty(n)
    PM = np.empty(n)
    cdef double[::1] pv = P, d0v = D0, dxv = DX, pmv = PM
    with nogil:
        for i in range(n):
            c_parts(kappa, c, a0[i], ax[i], at[i], True, &pv[i], &d0v[i], &dxv[i])
            c_parts(kappa, c, a0[i], -ax[i], at[i], False, &pmv[i], &dummy, &dummy)
    return P, D0, DX, PM


def riesz_kernel(double kappa, x, t):
    cdef double[::1] ax = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[::1] at = np.ascontiguousarray(t, dtype=np.float64)
    cdef Py_ssize_t i, n = ax.shape[0]
    cdef double k = kappa
    cdef double c = c_m_kappa(kappa)
    cdef double xi, ti, s, q
    out = np.empty(n)
    cdef double[::1] ov = out
    with nogil:
        for i in range(n):
            xi = ax[i]
            ti = at[i]
            if xi * ti >= 0.0:
                s = fabs(xi + ti)
                q = (xi - ti) / s
                ov[i] = c * pow(s, -2.0 * k) * c_hyp2f1_zy(k, k, 2 * k + 1, 4.0 * xi * ti / (s * s), q * q) / (xi - ti)
            else:
                s = fabs(xi) + fabs(ti)
                q = (fabs(xi) - fabs(ti)) / s
                ov[i] = c * (xi - ti) * pow(s, -2.0 * k - 2.0) * c_hyp2f1_zy(k, k + 1, 2 * k + 1, 4.0 * fabs(xi * ti) / (s * s), q * q)
    return out
