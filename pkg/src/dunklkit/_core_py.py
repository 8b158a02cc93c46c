"""Pure numpy implementation of the hot kernels.

Same API and algorithms as the compiled ``_core`` extension; used when the
extension is missing or ``DUNKLKIT_PURE=1`` is set.  All kernel functions
take 1-D float64 arrays of equal length (broadcasting is done by callers).
"""

import math

import numpy as np

EULER_GAMMA = 0.57721566490153286061
_TINY = 1e-17
_MAXTERMS = 5000
_ASYMPTOTIC_Y = 40.0

BACKEND = "python"


def _nonpos_int(v):
    return v <= 0.0 and v == math.floor(v)


def rgamma(x):
    """1/Gamma(x), zero at the poles."""
    if _nonpos_int(x):
        return 0.0
    if x > 170.0:
        return math.exp(-math.lgamma(x))
    return 1.0 / math.gamma(x)


def digamma(x):
    x = float(x)
    if _nonpos_int(x):
        return math.nan
    if x < 0.0:
        return digamma(1.0 - x) - math.pi / math.tan(math.pi * x)
    acc = 0.0
    while x < 10.0:
        acc -= 1.0 / x
        x += 1.0
    f = 1.0 / (x * x)
    tail = f * (1.0 / 12 - f * (1.0 / 120 - f * (1.0 / 252 - f * (1.0 / 240 - f / 132.0))))
    return acc + math.log(x) - 0.5 / x - tail


# ---------------------------------------------------------------- 2F1 ----

def _series(a, b, c, z):
    """Direct Gauss series; z may be an array."""
    z = np.asarray(z, dtype=float)
    s = np.ones_like(z)
    t = np.ones_like(z)
    for n in range(_MAXTERMS):
        t = t * ((a + n) * (b + n) / ((c + n) * (n + 1.0))) * z
        s = s + t
        if not np.any(np.abs(t) > _TINY * np.abs(s)):
            return s
    raise ArithmeticError("2F1 series did not converge")


def _log0(a, b, y):
    # c = a + b; expansion about z = 1 with logarithm
    pref = math.gamma(a + b) * rgamma(a) * rgamma(b)
    lny = np.log(y)
    p1, pa, pb = -EULER_GAMMA, digamma(a), digamma(b)
    coef = np.ones_like(y)
    s = np.zeros_like(y)
    for n in range(_MAXTERMS):
        term = coef * (2.0 * p1 - pa - pb - lny)
        s = s + term
        if n > 0 and not np.any(np.abs(term) > _TINY * np.abs(s)):
            return pref * s
        coef = coef * ((a + n) * (b + n) / ((n + 1.0) ** 2)) * y
        p1 += 1.0 / (n + 1.0)
        pa += 1.0 / (a + n)
        pb += 1.0 / (b + n)
    raise ArithmeticError("2F1 log series did not converge")


def _logm(a, b, m, y):
    # c = a + b + m with integer m >= 1
    c = a + b + m
    gc = math.gamma(c)
    finite = np.zeros_like(y)
    coef = np.ones_like(y)
    for n in range(m):
        finite = finite + coef
        if n + 1 < m:
            coef = coef * ((a + n) * (b + n) / ((n + 1.0) * (n + 1.0 - m))) * y
    finite = finite * (math.gamma(m) * gc * rgamma(a + m) * rgamma(b + m))

    lny = np.log(y)
    p1 = -EULER_GAMMA
    pm = -EULER_GAMMA + sum(1.0 / k for k in range(1, m + 1))
    pa, pb = digamma(a + m), digamma(b + m)
    coef = np.full_like(y, 1.0 / math.factorial(m))
    s = np.zeros_like(y)
    for n in range(_MAXTERMS):
        term = coef * (lny - p1 - pm + pa + pb)
        s = s + term
        if n > 0 and not np.any(np.abs(term) > _TINY * np.abs(s)):
            break
        coef = coef * ((a + m + n) * (b + m + n) / ((n + 1.0) * (n + m + 1.0))) * y
        p1 += 1.0 / (n + 1.0)
        pm += 1.0 / (n + m + 1.0)
        pa += 1.0 / (a + m + n)
        pb += 1.0 / (b + m + n)
    else:
        raise ArithmeticError("2F1 log series did not converge")
    return finite - (-y) ** m * gc * rgamma(a) * rgamma(b) * s


def _near_one(a, b, c, y):
    if _nonpos_int(a) or _nonpos_int(b):
        return _series(a, b, c, 1.0 - y)
    m = c - a - b
    mi = round(m)
    if abs(m - mi) < 1e-13:
        if mi < 0:
            return y ** mi * _near_one(c - a, c - b, c, y)
        if mi == 0:
            return _log0(a, b, y)
        return _logm(a, b, int(mi), y)
    gc = math.gamma(c)
    first = gc * math.gamma(m) * rgamma(c - a) * rgamma(c - b) * _series(a, b, 1.0 - m, y)
    second = gc * math.gamma(-m) * rgamma(a) * rgamma(b) * _series(c - a, c - b, 1.0 + m, y)
    return first + y ** m * second


def hyp2f1_vec(a, b, c, z, y=None):
    """2F1(a,b;c;z) for fixed parameters and an array of z in [0,1).

    ``y`` optionally supplies 1 - z without cancellation."""
    a, b, c = float(a), float(b), float(c)
    if _nonpos_int(c):
        raise ValueError("c must not be a nonpositive integer")
    z = np.ascontiguousarray(z, dtype=float)
    if _nonpos_int(a) or _nonpos_int(b):
        return _series(a, b, c, z)
    out = np.empty_like(z)
    lo = z <= 0.5
    if np.any(lo):
        out[lo] = _series(a, b, c, z[lo])
    if not np.all(lo):
        hi = ~lo
        yy = 1.0 - z if y is None else np.asarray(y, dtype=float)
        out[hi] = _near_one(a, b, c, yy[hi])
    return out


def hyp2f1(a, b, c, z):
    return float(hyp2f1_vec(a, b, c, np.array([float(z)]))[0])


# ------------------------------------------------------ Dunkl kernel ----

def _kummer_scaled(a, b, y):
    # exp(-y) * 1F1(a; b; y), y >= 0 moderate
    s = np.ones_like(y)
    t = np.ones_like(y)
    for n in range(_MAXTERMS):
        t = t * ((a + n) / ((b + n) * (n + 1.0))) * y
        s = s + t
        if not np.any(t > _TINY * s):
            return np.exp(-y) * s
    raise ArithmeticError("Kummer series did not converge")


def _asymptotic(pref, p, q, y):
    # pref * sum_n (p)_n (q)_n / (n! y^n), truncated at the smallest term
    s = np.ones_like(y)
    t = np.ones_like(y)
    live = np.ones(y.shape, dtype=bool)
    for n in range(200):
        t_new = t * ((p + n) * (q + n) / (n + 1.0)) / y
        grow = np.abs(t_new) > np.abs(t)
        live &= ~grow
        t = np.where(live, t_new, 0.0)
        s = s + t
        if not np.any(live & (np.abs(t) > _TINY * np.abs(s))):
            break
    return pref * s


def dunkl_scaled(kappa, z):
    """exp(-|z|) E_kappa(z, 1) for real z."""
    z = np.ascontiguousarray(z, dtype=float)
    y = 2.0 * np.abs(z)
    if kappa == 0.0:
        return np.where(z >= 0.0, 1.0, np.exp(-y))
    b = 2.0 * kappa + 1.0
    out = np.empty_like(z)
    pos = z >= 0.0
    big = y > _ASYMPTOTIC_Y
    for sel, a in ((pos & ~big, kappa + 1.0), (~pos & ~big, kappa)):
        if np.any(sel):
            out[sel] = _kummer_scaled(a, b, y[sel])
    sel = pos & big
    if np.any(sel):
        yy = y[sel]
        out[sel] = _asymptotic(math.gamma(b) * rgamma(kappa + 1.0) * yy ** (-kappa), kappa, -kappa, yy)
    sel = ~pos & big
    if np.any(sel):
        yy = y[sel]
        out[sel] = _asymptotic(math.gamma(b) * rgamma(kappa) * yy ** (-kappa - 1.0), kappa + 1.0, 1.0 - kappa, yy)
    return out


# --------------------------------------------------- Poisson / Riesz ----

def m_kappa(kappa):
    return 2.0 ** (kappa + 0.5) * math.gamma(kappa + 1.0) / math.sqrt(math.pi)


def _parts(kappa, x0, x, t, deriv):
    """Closed form of the translated Poisson kernel and (optionally) its
    partial derivatives in x0 and x."""
    k = kappa
    c = m_kappa(k)
    sp = x0 * x0 + (x + t) ** 2
    sm = x0 * x0 + (x - t) ** 2
    xt = x * t
    P = np.empty_like(x)
    d0 = np.empty_like(x) if deriv else None
    dx = np.empty_like(x) if deriv else None

    pos = xt >= 0.0
    if np.any(pos):
        spp, smp, x0p, xp, tp = sp[pos], sm[pos], x0[pos], x[pos], t[pos]
        z = 4.0 * xp * tp / spp
        G = hyp2f1_vec(k, k, 2 * k + 1, z, smp / spp)
        A = spp ** (-k) / smp
        P[pos] = c * x0p * A * G
        if deriv:
            Gp = k * k / (2 * k + 1) * hyp2f1_vec(k + 1, k + 1, 2 * k + 2, z, smp / spp)
            l0 = -2.0 * k * x0p / spp - 2.0 * x0p / smp
            lx = -2.0 * k * (xp + tp) / spp - 2.0 * (xp - tp) / smp
            z0 = -z * 2.0 * x0p / spp
            zx = 4.0 * tp / spp - z * 2.0 * (xp + tp) / spp
            d0[pos] = c * A * (G + x0p * (l0 * G + Gp * z0))
            dx[pos] = c * x0p * A * (lx * G + Gp * zx)
    neg = ~pos
    if np.any(neg):
        smn, spn, x0n, xn, tn = sm[neg], sp[neg], x0[neg], x[neg], t[neg]
        w = -4.0 * xn * tn / smn
        H = hyp2f1_vec(k, k + 1, 2 * k + 1, w, spn / smn)
        A = smn ** (-k - 1.0)
        P[neg] = c * x0n * A * H
        if deriv:
            Hp = k * (k + 1) / (2 * k + 1) * hyp2f1_vec(k + 1, k + 2, 2 * k + 2, w, spn / smn)
            l0 = -2.0 * (k + 1) * x0n / smn
            lx = -2.0 * (k + 1) * (xn - tn) / smn
            w0 = -w * 2.0 * x0n / smn
            wx = -4.0 * tn / smn - w * 2.0 * (xn - tn) / smn
            d0[neg] = c * A * (H + x0n * (l0 * H + Hp * w0))
            dx[neg] = c * x0n * A * (lx * H + Hp * wx)
    return P, d0, dx


def poisson_kernel(kappa, x0, x, t):
    return _parts(float(kappa), x0, x, t, False)[0]


def poisson_grad(kappa, x0, x, t):
    """Return (P, dP/dx0, dP/dx, P at -x)."""
    P, d0, dx = _parts(float(kappa), x0, x, t, True)
    Pm = _parts(float(kappa), x0, -x, t, False)[0]
    return P, d0, dx, Pm


def riesz_kernel(kappa, x, t):
    """Closed-form rank-one Riesz kernel; the xt = 0 line is the z = 0 limit."""
    k = float(kappa)
    c = m_kappa(k)
    out = np.empty_like(x)
    xt = x * t
    pos = xt >= 0.0
    if np.any(pos):
        xp, tp = x[pos], t[pos]
        s = np.abs(xp + tp)
        z = 4.0 * xp * tp / (s * s)
        y = ((xp - tp) / s) ** 2
        out[pos] = c * s ** (-2.0 * k) * hyp2f1_vec(k, k, 2 * k + 1, z, y) / (xp - tp)
    neg = ~pos
    if np.any(neg):
        xn, tn = x[neg], t[neg]
        s = np.abs(xn) + np.abs(tn)
        w = 4.0 * np.abs(xn * tn) / (s * s)
        y = ((np.abs(xn) - np.abs(tn)) / s) ** 2
        out[neg] = c * (xn - tn) * s ** (-2.0 * k - 2.0) * hyp2f1_vec(k, k + 1, 2 * k + 1, w, y)
    return out
