"""Heat kernel, kappa-Poisson and conjugate kernels, their integrals,
kappa-gradients and the perpendicular / cone maximal functions (rank one).

Kernel evaluations go through the compiled core (closed hypergeometric
form).  The subordination routes are computed independently, through the
Dunkl kernel and one-dimensional quadrature, and serve as cross-checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._backend import core
from .dunkl_core import MultiplicityConfig, as_config, dunkl_kernel_scaled, intertwining_constant
from .errors import DomainError, NonConvergence
from .functions import Fn, constant
from .numerics import (QuadratureSpec, adaptive_integrate, graded_points, panel_rule,
                       tail_rule)


@dataclass(frozen=True)
class UpperHalfPlanePoint:
    x0: float
    x: float

    def __post_init__(self):
        if not (self.x0 > 0 and math.isfinite(self.x0)):
            raise DomainError(f"height x0 must be positive, got {self.x0}")
        if not math.isfinite(self.x):
            raise DomainError("x must be finite")


@dataclass(frozen=True)
class KappaGradient:
    d0: float
    dx: float

    def __iter__(self):
        return iter((self.d0, self.dx))

    @property
    def norm(self) -> float:
        return math.hypot(self.d0, self.dx)


def _point(p) -> UpperHalfPlanePoint:
    return p if isinstance(p, UpperHalfPlanePoint) else UpperHalfPlanePoint(*map(float, p))


def _flat(*arrays):
    b = np.broadcast_arrays(*[np.asarray(a, dtype=float) for a in arrays])
    shape = b[0].shape
    return shape, [np.ascontiguousarray(a.ravel()) for a in b]


def _out(v, shape):
    v = v.reshape(shape)
    return float(v) if v.ndim == 0 else v


# --------------------------------------------------------------- heat ----

def heat_kernel(v, x, t, cfg):
    """h_v(x, t) = (2v)^{-kappa-1/2} exp(-(x^2+t^2)/4v) E_kappa(x/sqrt(2v), t/sqrt(2v))."""
    k = as_config(cfg).k
    shape, (v, x, t) = _flat(v, x, t)
    if np.any(v <= 0):
        raise DomainError("v must be positive")
    d = np.abs(x) - np.abs(t)
    val = (2 * v) ** (-k - 0.5) * np.exp(-d * d / (4 * v)) * core.dunkl_scaled(k, x * t / (2 * v))
    return _out(val, shape)


# ------------------------------------------------------------ kernels ----

def poisson_values(x0, x, t, cfg):
    """Vectorized (tau_x P_{x0})(-t) from the closed form."""
    k = as_config(cfg).k
    shape, (x0, x, t) = _flat(x0, x, t)
    if np.any(x0 <= 0):
        raise DomainError("x0 must be positive")
    return _out(core.poisson_kernel(k, x0, x, t), shape)


def poisson_kernel(p, t, cfg, method: str = "closed"):
    """(tau_x P_{x0})(-t).

    ``"closed"``: hypergeometric closed form.  ``"intertwining"``: the
    radial translation integral of P_{x0}(r) = m x0 (x0^2 + r^2)^{-kappa-1}
    against mu_x, by adaptive quadrature in s = xi / x.
    """
    p = _point(p)
    if method == "closed":
        return poisson_values(p.x0, p.x, t, cfg)
    if method != "intertwining":
        raise DomainError(f"unknown method {method!r}")
    k = as_config(cfg).k
    m = MultiplicityConfig(k).m_kappa
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.empty_like(ts)
    for i, tt in enumerate(ts):
        if k == 0 or p.x == 0:
            r2 = p.x0 ** 2 + (p.x - tt) ** 2 if k == 0 else p.x0 ** 2 + tt * tt
            out[i] = m * p.x0 * r2 ** (-k - 1)
            continue
        C = intertwining_constant(k)
        a = p.x0 ** 2 + p.x ** 2 + tt * tt
        b = 2 * p.x * tt

        def g(s, a=a, b=b):
            return C * (1 + s) ** k * (1 - s) ** (k - 1) * (a - b * s) ** (-k - 1)
        # the integrand peaks at s = sign(b) with relative width delta
        br = ()
        if b != 0:
            delta = (a - abs(b)) / abs(b)
            steps = delta * 10.0 ** np.arange(0, 8)
            br = tuple(math.copysign(1 - d, b) for d in steps if d < 1)
        spec = QuadratureSpec(abs_tol=1e-300, rel_tol=1e-11, singular_points=(-1.0, 1.0),
                              breakpoints=br)
        out[i] = m * p.x0 * adaptive_integrate(g, -1.0, 1.0, spec).value
    return float(out[0]) if np.ndim(t) == 0 else out


def _subordination_integral(k, x, t, A):
    """I = 2^{k+3/2} A^{-k-1} int_0^inf e^{-u} u^k S(2 x t u / A) du, where
    S(z) = exp(-|z|) E_kappa(z, 1) comes from the Dunkl kernel via the
    intertwining integral (independent of the closed-form kernels)."""
    alpha = 2 * x * t / A

    def S(z):
        return dunkl_kernel_scaled(z, k)

    if k == 0:
        def g(u):
            return np.exp(-u) * np.where(alpha * u >= 0, 1.0, np.exp(2 * alpha * u))
    else:
        def g(u):
            return np.exp(-u) * u ** k * S(alpha * u)
    br = tuple(b for b in (1.0 / abs(alpha) if alpha else 0.0, 1.0) if 0 < b)
    sing = (0.0,) if k != int(k) else ()
    spec = QuadratureSpec(abs_tol=1e-300, rel_tol=1e-12, singular_points=sing, breakpoints=br)
    J = adaptive_integrate(g, 0.0, math.inf, spec)
    return 2.0 ** (k + 1.5) * A ** (-k - 1) * J.value


def poisson_kernel_subordinated(p, t, cfg):
    """x0 / (2 sqrt(pi)) int_0^inf exp(-x0^2/4v) h_v(x, t) v^{-3/2} dv,
    evaluated after the substitution v = A / (4u), A = x0^2 + (|x| - |t|)^2."""
    p = _point(p)
    k = as_config(cfg).k
    t = float(t)
    A = p.x0 ** 2 + (abs(p.x) - abs(t)) ** 2
    return p.x0 / (2 * math.sqrt(math.pi)) * _subordination_integral(k, p.x, t, A)


def conjugate_values(x0, x, t, cfg):
    shape, (x0, x, t) = _flat(x0, x, t)
    return _out((x - t) / x0 * np.asarray(poisson_values(x0, x, t, cfg)).ravel(), shape)


def conjugate_kernel(p, t, cfg):
    """(tau_x Q_{x0})(-t) = ((x - t) / x0) (tau_x P_{x0})(-t)."""
    p = _point(p)
    return conjugate_values(p.x0, p.x, t, cfg)


def conjugate_kernel_subordinated(p, t, cfg):
    """((x - t) / (2 sqrt(pi))) int_0^inf exp(-x0^2/4v) h_v(x, t) v^{-3/2} dv."""
    p = _point(p)
    k = as_config(cfg).k
    t = float(t)
    A = p.x0 ** 2 + (abs(p.x) - abs(t)) ** 2
    return (p.x - t) / (2 * math.sqrt(math.pi)) * _subordination_integral(k, p.x, t, A)


def kernel_gradients(x0, x, t, cfg):
    """P, its kappa-gradient (d0 P, D_x P), Q and (d0 Q, D_x Q); x0, x and t
    broadcast against each other."""
    k = as_config(cfg).k
    x0, x, t = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (x0, x, t)))
    shape = t.shape
    x0, x, t = (np.ascontiguousarray(a.ravel()) for a in (x0, x, t))
    P, d0, dx, Pm = core.poisson_grad(k, x0, x, t)
    small = np.abs(x) < 1e-8 * np.maximum(1.0, np.maximum(np.abs(x), x0))
    xs = np.where(small, 1.0, x)
    DP = np.where(small, (1 + 2 * k) * dx, dx + k * (P - Pm) / xs)
    Q = (x - t) / x0 * P
    d0Q = (x - t) * (d0 / x0 - P / (x0 * x0))
    dxQ = P / x0 + (x - t) / x0 * dx
    DQ = np.where(small, (1 + 2 * k) * dxQ, dxQ + k * ((P + Pm) / x0 - (t / x0) * (P - Pm) / xs))
    out = {"P": P, "d0P": d0, "DP": DP, "Q": Q, "d0Q": d0Q, "DQ": DQ}
    return {kk: v.reshape(shape) for kk, v in out.items()}


# ----------------------------------------------------- integration rule ----

def kernel_rule(k: float, x0: float, x: float, f: Fn, order: int = 12, ratio: float = 3.0):
    """Nodes/weights for ``int f(t) K(x0, x, t) |t|^{2k} dt`` with K peaked at
    t = x (and t = -x when k > 0) on the scale x0.  Panels are graded
    geometrically toward the peaks and f's singular points; f's
    breakpoints are panel edges; unbounded support gets t = 1/u tails."""
    feats = f.features()
    R = 4.0 * max(1.0, abs(x), x0, f.scale())
    edges = {0.0, -R, R}
    peaks = [x, -x] if k > 0 and x != 0 else [x]
    for c in peaks:
        edges |= set(graded_points(c, x0 / 4, 2 * R, ratio))
    for s in f.singular:
        edges |= set(graded_points(s, 1e-12 * max(1.0, abs(s)), 2 * R, 4.0))
    for c, w in f.peaks:
        edges |= set(graded_points(c, w / 4, 2 * R, ratio))
        peaks = peaks + [c]
    edges |= set(feats)
    if f.support is not None:
        lo, hi = f.support
    else:
        lo, hi = -R, R
    edges = sorted(e for e in edges if lo <= e <= hi)
    edges = sorted(set(edges) | {lo, hi})
    # split panels that are long relative to their distance from the peaks
    fine = [edges[0]]
    for a, b in zip(edges[:-1], edges[1:]):
        dist = min(min(abs(a - c), abs(b - c)) for c in peaks)
        width = max(min([x0] + [w for _, w in f.peaks]), dist)
        n = max(1, int(math.ceil((b - a) / (2 * width))))
        fine += list(np.linspace(a, b, n + 1)[1:])
    ts, ws = panel_rule(fine, order, k)
    if f.support is None:
        depth = 1e-3 if f.smooth_tail else 1e-13
        r = 8.0 if f.smooth_tail else 6.0
        for sgn in (1, -1):
            tt, tw = tail_rule(R, order, k, depth=depth, ratio=r, sign=sgn)
            ts = np.concatenate([ts, tt])
            ws = np.concatenate([ws, tw])
    return ts, ws


def _as_fn(f) -> Fn:
    if isinstance(f, Fn):
        return f
    if isinstance(f, (int, float)):
        return constant(float(f))
    if callable(f):
        return Fn(f, getattr(f, "__name__", "f"))
    raise DomainError("f must be an Fn, a callable or a constant")


def _sampled(f):
    from .transform import SampledFunction
    return isinstance(f, SampledFunction)


def poisson_field(f, x0, x, cfg, order: int = 12) -> dict:
    """u_f, Q f and both kappa-gradients at the points (x0[i], x[i]).

    Returns arrays keyed ``u, d0u, Du, v, d0v, Dv`` (v = Q f).
    """
    k = as_config(cfg).k
    c = MultiplicityConfig(k).c_kappa
    shape, (x0, x) = _flat(x0, x)
    if np.any(x0 <= 0):
        raise DomainError("x0 must be positive")
    keys = ("u", "d0u", "Du", "v", "d0v", "Dv")
    src = {"u": "P", "d0u": "d0P", "Du": "DP", "v": "Q", "d0v": "d0Q", "Dv": "DQ"}
    out = {kk: np.empty(len(x0)) for kk in keys}
    sampled = _sampled(f)
    if not sampled:
        fn = _as_fn(f)
    for i in range(len(x0)):
        if sampled:
            ts, ws, fv = f.grid.nodes, f.grid.weights, np.real(f.values)
        else:
            ts, ws = kernel_rule(k, x0[i], x[i], fn, order)
            fv = fn(ts)
        g = kernel_gradients(x0[i], x[i], ts, k)
        fw = c * fv * ws
        for kk in keys:
            out[kk][i] = float(np.dot(fw, g[src[kk]]))
    return {kk: _out(v, shape) for kk, v in out.items()}


def poisson_integral(f, p, cfg, order: int = 12) -> float:
    """u_f(x0, x) = c_kappa int f(t) (tau_x P_{x0})(-t) d omega(t)."""
    p = _point(p)
    return float(poisson_field(f, p.x0, p.x, cfg, order)["u"])


def conjugate_poisson_integral(f, p, cfg, order: int = 12) -> float:
    """Q f(x0, x) = c_kappa int f(t) (tau_x Q_{x0})(-t) d omega(t)."""
    p = _point(p)
    return float(poisson_field(f, p.x0, p.x, cfg, order)["v"])


def kappa_gradient_poisson(f, p, cfg, order: int = 12) -> KappaGradient:
    p = _point(p)
    r = poisson_field(f, p.x0, p.x, cfg, order)
    return KappaGradient(float(r["d0u"]), float(r["Du"]))


def poisson_slice(f, x0: float, grid, cfg=None):
    """u_f(x0, .) sampled on ``grid`` (a transform.Grid)."""
    from .transform import SampledFunction
    k = grid.kappa if cfg is None else as_config(cfg).k
    u = poisson_field(f, np.full(grid.n, x0), grid.nodes, k)["u"]
    return SampledFunction(grid, u, None, f"u(x0={x0})")


def cauchy_riemann_residual(f, p, cfg, h: float | None = None) -> tuple:
    """(D u - d0 v, d0 u + D v) at p with v = Q f.

    Derivatives come from 5-point differences of the computed fields u and
    v (not from the differentiated kernels), so the residual tests the
    kernels and the quadrature together.
    """
    from .dunkl_core import dunkl_derivative
    p = _point(p)
    k = as_config(cfg).k
    h = h or 2e-3 * min(p.x0, 1.0)
    off = np.array([-2, -1, 1, 2]) * h
    c5 = np.array([1, -8, 8, -1]) / (12 * h)
    vert = poisson_field(f, p.x0 + off, np.full(4, p.x), k)
    d0u, d0v = float(c5 @ vert["u"]), float(c5 @ vert["v"])
    xs = np.concatenate([p.x + off, -p.x + off, [p.x, -p.x]])
    hor = poisson_field(f, np.full(len(xs), p.x0), xs, k)
    u_tab = dict(zip(xs, hor["u"]))
    v_tab = dict(zip(xs, hor["v"]))

    def D(tab, sign):
        base = sign * p.x
        fp = float(c5 @ np.array([tab[base + o] for o in off]))
        return fp

    Du = dunkl_derivative(lambda s: u_tab[s], p.x, k, fprime=lambda s: D(u_tab, 1 if s == p.x else -1))
    Dv = dunkl_derivative(lambda s: v_tab[s], p.x, k, fprime=lambda s: D(v_tab, 1 if s == p.x else -1))
    return float(Du - d0v), float(d0u + Dv)


def laplacian_residual(f, p, cfg, h: float | None = None) -> float:
    """d0^2 u + D_x^2 u at p: the analytic first derivatives are
    differentiated once more by central differences."""
    from .dunkl_core import dunkl_derivative
    p = _point(p)
    k = as_config(cfg).k
    h0 = h or 1e-3 * p.x0
    up = poisson_field(f, [p.x0 + h0, p.x0 - h0], [p.x, p.x], k)["d0u"]
    d00 = (up[0] - up[1]) / (2 * h0)

    def Du(s):
        return float(poisson_field(f, p.x0, float(s), k)["Du"])

    def dDu(s):
        hh = 1e-3 * max(p.x0, 1e-3)
        return (Du(s + hh) - Du(s - hh)) / (2 * hh)
    dxx = dunkl_derivative(Du, p.x, k, fprime=dDu)
    return float(d00 + dxx)


# ----------------------------------------------------------- maximal ----

def perp_maximal(f, x: float, x0grid, cfg) -> float:
    """max over the heights in ``x0grid`` of |u_f(x0, x)|."""
    x0grid = np.asarray(x0grid, dtype=float)
    u = poisson_field(f, x0grid, np.full_like(x0grid, x), cfg)["u"]
    return float(np.max(np.abs(u)))


def cone_maximal(f, x: float, a: float, cfg, x0grid=None, lateral: int = 9) -> float:
    """max of |u_f(x0, y)| over grid points of the cone |y - x| < a x0."""
    if a <= 0:
        raise DomainError("aperture must be positive")
    if x0grid is None:
        x0grid = default_heights()
    x0grid = np.asarray(x0grid, dtype=float)
    frac = np.linspace(-1, 1, lateral + 2)[1:-1]
    X0 = np.repeat(x0grid, len(frac))
    Y = x + a * np.outer(x0grid, frac).ravel()
    u = poisson_field(f, X0, Y, cfg)["u"]
    return float(max(np.max(np.abs(u)), perp_maximal(f, x, x0grid, cfg)))


def default_heights(lo: float = 1e-2, hi: float = 10.0, n: int = 16):
    return np.geomspace(lo, hi, n)


def poisson_bounds(x0, x, t, cfg):
    """Two-sided comparison quantities for the translated Poisson kernel:

    lower = x0 / ((x0 + |x - t|) |B(x, x0 + |x - t|)|),
    upper = x0 (x0 + d) / ((x0^2 + |x - t|^2) |B(x, x0 + d)|),  d = orbit distance.
    """
    from .dunkl_core import ball_measure
    k = as_config(cfg).k
    x0, x, t = (np.asarray(a, dtype=float) for a in (x0, x, t))
    d = np.minimum(np.abs(x - t), np.abs(x + t))
    r1 = x0 + np.abs(x - t)
    r2 = x0 + d
    lower = x0 / (r1 * ball_measure(x, r1, k))
    upper = x0 * r2 / ((x0 * x0 + (x - t) ** 2) * ball_measure(x, r2, k))
    return lower, upper


__all__ = [
    "UpperHalfPlanePoint", "KappaGradient", "heat_kernel", "poisson_kernel",
    "poisson_values", "poisson_kernel_subordinated", "conjugate_kernel",
    "conjugate_values", "conjugate_kernel_subordinated", "kernel_gradients",
    "kernel_rule", "poisson_field", "poisson_integral", "conjugate_poisson_integral",
    "kappa_gradient_poisson", "poisson_slice", "cauchy_riemann_residual",
    "laplacian_residual", "perp_maximal", "cone_maximal", "default_heights",
    "poisson_bounds", "NonConvergence",
]
