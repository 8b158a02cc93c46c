"""Rank-one kappa-Riesz kernel and transforms.

Closed forms (m = m_kappa):

    x t > 0:  K = m |x + t|^{-2k} / (x - t) * 2F1(k, k; 2k+1; 4xt / (x+t)^2)
    x t < 0:  K = m (x - t) (|x| + |t|)^{-2k-2} * 2F1(k, k+1; 2k+1; 4|xt| / (|x|+|t|)^2)

For k > 0 the second form has a logarithmic singularity at t = -x (the
hypergeometric function has c - a - b = 0 there), on top of the Hilbert-type
pole at t = x.  Quadrature rules below grade toward both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ._backend import core
from .dunkl_core import MultiplicityConfig, as_config, ball_measure, orbit_distance
from .errors import DomainError, NonConvergence, SingularPoint
from .functions import Fn, chi_interval
from .numerics import gauss_legendre, graded_points, panel_rule, tail_rule
from .poisson import _as_fn, _subordination_integral

SAME, OPPOSITE, SUBORDINATION = "same-sign", "opposite-sign", "subordination"


@dataclass(frozen=True)
class RieszKernelEval:
    value: float
    branch: str
    singular: bool = False

    def __float__(self):
        return self.value


def riesz_values(x, t, cfg):
    """Vectorized closed-form K(x, t); the line xt = 0 uses the exact
    z = 0 limit of the formulas."""
    k = as_config(cfg).k
    x, t = np.broadcast_arrays(np.asarray(x, float), np.asarray(t, float))
    shape = x.shape
    out = core.riesz_kernel(k, np.ascontiguousarray(x.ravel()), np.ascontiguousarray(t.ravel()))
    out = out.reshape(shape)
    return float(out) if out.ndim == 0 else out


def riesz_kernel_subordinated(x: float, t: float, cfg) -> float:
    """K(x, t) = ((x - t) / (2 sqrt(pi))) int_0^inf h_v(x, t) v^{-3/2} dv."""
    k = as_config(cfg).k
    A = (abs(x) - abs(t)) ** 2
    if A == 0:
        raise SingularPoint("subordination integral diverges on |x| = |t|")
    return (x - t) / (2 * math.sqrt(math.pi)) * _subordination_integral(k, x, t, A)


def riesz_kernel(x: float, t: float, cfg, check: bool = True) -> RieszKernelEval:
    """K(x, t) with the branch used; antisymmetry K(x,t) = -K(t,x) is
    verified when ``check`` is set."""
    x, t = float(x), float(t)
    if orbit_distance(x, t) == 0:
        raise SingularPoint(f"K is singular on the orbit of x (x={x}, t={t})")
    if x * t == 0:
        val = riesz_kernel_subordinated(x, t, cfg)
        branch = SUBORDINATION
        if check:
            other = -riesz_kernel_subordinated(t, x, cfg)
            if abs(val - other) > 1e-9 * abs(val):
                raise NonConvergence("antisymmetry check failed", val, abs(val - other))
        return RieszKernelEval(val, branch)
    val = riesz_values(x, t, cfg)
    branch = SAME if x * t > 0 else OPPOSITE
    if check:
        other = -riesz_values(t, x, cfg)
        if abs(val - other) > 1e-12 * abs(val):
            raise NonConvergence("antisymmetry check failed", val, abs(val - other))
    return RieszKernelEval(val, branch)


def riesz_bounds(x, t, cfg):
    """Comparison expressions: lower = 1/|B(x,|x-t|)|,
    upper = d / (|x - t| |B(x, d)|) with d the orbit distance."""
    k = as_config(cfg).k
    x, t = np.asarray(x, float), np.asarray(t, float)
    d = np.minimum(np.abs(x - t), np.abs(x + t))
    r = np.abs(x - t)
    lower = 1.0 / ball_measure(x, r, k)
    upper = d / (r * ball_measure(x, d, k))
    return lower, upper


# ------------------------------------------------------------- rules ----

def _lebesgue_rule(edges, order):
    edges = np.asarray(sorted(set(edges)), dtype=float)
    gx, gw = gauss_legendre(order)
    lo, hi = edges[:-1], edges[1:]
    c, h = 0.5 * (lo + hi), 0.5 * (hi - lo)
    return (c[:, None] + h[:, None] * gx).ravel(), (h[:, None] * gw).ravel()


def _span(k, x, f: Fn, eps):
    """(lo, hi, R, tails): integration range in t and whether the t = 1/u
    tails beyond +-R are needed."""
    R = 4.0 * max(1.0, abs(x) + eps, f.scale())
    if f.support is not None:
        return f.support[0], f.support[1], R, False
    return -R, R, R, True


def _refined(edges, centers, floor, refine):
    """Split panels longer than their distance to the nearest center."""
    edges = sorted(set(edges))
    out = [edges[0]]
    for a, b in zip(edges[:-1], edges[1:]):
        dist = min(min(abs(a - c), abs(b - c)) for c in centers) if centers else b - a
        n = max(1, int(math.ceil((b - a) / max(floor, dist)))) * refine
        out += list(np.linspace(a, b, n + 1)[1:])
    return out


def _feature_edges(f: Fn, R):
    e = set(f.features())
    for s in f.singular:
        e |= set(graded_points(s, 1e-12 * max(1.0, abs(s)), 2 * R, 4.0))
    for c, w in f.peaks:
        e |= set(graded_points(c, w / 4, 2 * R, 3.0))
    return e


def windowed_rule(k: float, x: float, f: Fn, eps: float, order: int = 12, extra=(),
                  refine: int = 1):
    """Weighted rule (weights include |t|^{2k}) on the finite range minus the
    orbit window {d(x, t) <= eps}.  Returns (t, w, R, tails)."""
    lo, hi, R, tails = _span(k, x, f, eps)
    win = [(x - eps, x + eps)]
    if k > 0 and x != 0:
        win.append((-x - eps, -x + eps))
    edges = {lo, hi, 0.0} | set(extra) | _feature_edges(f, R)
    ratio = 3.0 if refine == 1 else 2.0
    for a, b in win:
        edges |= {a, b} | set(graded_points(0.5 * (a + b), eps, 2 * R, ratio))
    edges = [e for e in edges if lo <= e <= hi]
    centers = [0.5 * (a + b) for a, b in win]
    ts, ws = panel_rule(_refined(edges, centers, eps, refine), order, k)
    inside = np.zeros(ts.shape, dtype=bool)
    for a, b in win:
        inside |= (ts > a) & (ts < b)
    return ts[~inside], ws[~inside], R, tails


def _tail_nodes(k, R, f: Fn, order):
    depth = 1e-3 if f.smooth_tail else 1e-13
    parts = [tail_rule(R, order, k, depth=depth, ratio=8.0 if f.smooth_tail else 6.0, sign=s)
             for s in (1, -1)]
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


def _pv_part(k, x, f: Fn, order, refine=1):
    """PV int f(t) K(x, t) d omega(t) over the finite range: symmetric node
    pairs about t = x cancel the pole; grading handles the log point -x."""
    lo, hi, R, tails = _span(k, x, f, 0.0)
    others = [p for p in f.features() if p != x] + [lo, hi]
    if k > 0 and x != 0:
        others += [0.0, -x]
    rho = 0.5 * min([abs(p - x) for p in others if p != x] + [1.0, max(abs(x), 1.0)])
    if rho <= 0:
        raise SingularPoint("principal value undefined: x sits on a jump of f")
    # symmetric part on [x - rho, x + rho], Lebesgue weights, weight folded in
    # the pair sum is bounded near s = 0; stop grading where x +- s would round to x
    floor = 1e-9 * max(1.0, abs(x))
    depth = int(math.ceil(math.log(rho / floor, 3.0))) if rho > floor else 0
    sedges = np.concatenate([[0.0], rho * 3.0 ** -np.arange(depth, -1, -1)])
    if refine > 1:
        sedges = np.unique(np.concatenate([np.linspace(a, b, refine + 1)
                                           for a, b in zip(sedges[:-1], sedges[1:])]))
    s, w = _lebesgue_rule(sedges, order)

    def F(t):
        return f(t) * riesz_values(np.full_like(t, x), t, k) * np.abs(t) ** (2 * k)
    # x +- s round asymmetrically across a binade edge (x = 2); rescale each
    # side by its realized offset so the pole parts still cancel
    tp, tm = x + s, x - s
    sym = np.sum(w * (F(tp) * ((tp - x) / s) + F(tm) * ((x - tm) / s)), axis=-1)
    edges = {lo, hi} | set(graded_points(x, rho, 2 * R, 3.0)) | _feature_edges(f, R)
    if k > 0 and x != 0:
        edges |= set(graded_points(-x, 1e-12 * max(1.0, abs(x)), 2 * R, 4.0))
        edges.add(0.0)
    edges = [e for e in edges if lo <= e <= hi and not (x - rho < e < x + rho)]
    centers = [x, -x] if k > 0 else [x]
    ts, ws = panel_rule(_refined(edges, centers, rho, refine), order, k)
    keep = (ts < x - rho) | (ts > x + rho)
    ts, ws = ts[keep], ws[keep]
    rest = np.sum(f(ts) * riesz_values(np.full_like(ts, x), ts, k) * ws, axis=-1)
    return sym + rest, R, tails


# ------------------------------------------------------- transforms ----

def truncated_riesz(f, eps: float, x: float, cfg, order: int = 12, refine: int = 1) -> float:
    """R^eps f(x) = c_kappa int_{d(x,t) > eps} f(t) K(x, t) d omega(t)."""
    if eps <= 0:
        raise DomainError("eps must be positive")
    k = as_config(cfg).k
    c = MultiplicityConfig(k).c_kappa
    fn = _as_fn(f)
    ts, ws, R, tails = windowed_rule(k, x, fn, eps, order, refine=refine)
    if tails:
        tt, tw = _tail_nodes(k, R, fn, order)
        ts, ws = np.concatenate([ts, tt]), np.concatenate([ws, tw])
    return float(c * np.sum(fn(ts) * riesz_values(np.full_like(ts, x), ts, k) * ws))


def riesz_pv(f, x: float, cfg, order: int = 12, refine: int = 1) -> float:
    """R f(x) as the principal value c_kappa PV int f(t) K(x, t) d omega(t)."""
    k = as_config(cfg).k
    c = MultiplicityConfig(k).c_kappa
    fn = _as_fn(f)
    val, R, tails = _pv_part(k, x, fn, order, refine)
    if tails:
        tt, tw = _tail_nodes(k, R, fn, order)
        val += float(np.sum(fn(tt) * riesz_values(np.full_like(tt, x), tt, k) * tw))
    return c * val


def _recentre(k, x, fn: Fn, R, tails, order):
    """-int_{1<|t|<R} f K(0, .) d omega plus the joint tail
    int_{|t|>R} f (K(x, .) - K(0, .)) d omega."""
    lo, hi = (fn.support if fn.support is not None else (-R, R))
    edges = {-R, -1.0, 1.0, R} | _feature_edges(fn, R)
    ts, ws = panel_rule(sorted(e for e in edges if -R <= e <= R), order, k)
    keep = (np.abs(ts) > 1) & (ts >= lo) & (ts <= hi)
    ts, ws = ts[keep], ws[keep]
    val = -np.sum(fn(ts) * riesz_values(np.zeros_like(ts), ts, k) * ws, axis=-1)
    if tails:
        tt, tw = _tail_nodes(k, R, fn, order)
        diff = riesz_values(np.full_like(tt, x), tt, k) - riesz_values(np.zeros_like(tt), tt, k)
        val = val + np.sum(fn(tt) * diff * tw, axis=-1)
    return val


def regularized_truncated_riesz(f, eps: float, x: float, cfg, order: int = 12,
                                refine: int = 1) -> float:
    """R~^eps f(x) = c_kappa int f(t) (K^eps(x, t) - K^1(0, t)) d omega(t).

    For bounded f the recentring by K^1(0, .) makes the integral converge;
    ``eps = 0`` gives the principal-value limit R~ f(x).
    """
    if eps < 0:
        raise DomainError("eps must be >= 0")
    k = as_config(cfg).k
    c = MultiplicityConfig(k).c_kappa
    fn = _as_fn(f)
    R = 4.0 * max(1.0, abs(x) + eps, fn.scale())
    fin = Fn(fn.func, fn.name, fn.breakpoints, fn.singular,
             fn.support if fn.support is not None else (-R, R), fn.parity, fn.bound,
             fn.smooth_tail, fn.growth, fn.peaks)
    if eps > 0:
        ts, ws, _, _ = windowed_rule(k, x, fin, eps, order, extra=(-1.0, 1.0), refine=refine)
        main = np.sum(fin(ts) * riesz_values(np.full_like(ts, x), ts, k) * ws, axis=-1)
    else:
        main, _, _ = _pv_part(k, x, fin, order, refine)
    out = c * (main + _recentre(k, x, fn, R, fn.support is None, order))
    return float(out) if np.ndim(out) == 0 else out


def regularized_riesz(f, x: float, cfg, order: int = 12) -> float:
    return regularized_truncated_riesz(f, 0.0, x, cfg, order)


def riesz_image(psi, cfg, eps: float = 0.0) -> Fn:
    """R~psi (or R~^eps psi) as an Fn.

    Jumps of psi become log singularities of the image; for kappa > 0 their
    reflections are kinks.  ``params["riesz_of"]`` keeps psi so Poisson
    fields of the image can be taken from the conjugate field of psi.
    """
    k = as_config(cfg).k
    fn = _as_fn(psi)
    jumps = tuple(fn.features())
    refl = tuple(-p for p in jumps if p != 0 and -p not in jumps) if k > 0 else ()

    def g(x):
        x = np.asarray(x, dtype=float)
        flat = [regularized_truncated_riesz(fn, eps, float(v), k) for v in x.ravel()]
        return np.asarray(flat).reshape(x.shape)
    return Fn(g, f"R~[{fn.name}]", breakpoints=refl, singular=jumps if eps == 0 else (),
              smooth_tail=True, growth="log",
              parity={"even": "odd", "odd": "even"}.get(fn.parity),
              params={"riesz_of": fn, "kappa": k, "eps": eps})


def riesz_images(psis, cfg, eps: float = 0.0) -> list:
    """``riesz_image`` for several functions at once.

    The images share one set of quadrature rules (built from the union of
    the features), so tabulating all of them on a grid costs about as much
    as tabulating one.  The last few evaluations are cached.
    """
    k = as_config(cfg).k
    fns = [_as_fn(p) for p in psis]
    sup = [f.support for f in fns]
    stacked = Fn(lambda t: np.stack([f(t) for f in fns]), "stack",
                 tuple(sorted({b for f in fns for b in f.breakpoints})),
                 tuple(sorted({q for f in fns for q in f.singular})),
                 None if any(q is None for q in sup) else
                 (min(q[0] for q in sup), max(q[1] for q in sup)),
                 smooth_tail=all(f.smooth_tail for f in fns),
                 peaks=tuple(sorted({q for f in fns for q in f.peaks})))
    cache = {}

    def table(x):
        key = (x.shape, x.tobytes())
        if key not in cache:
            if len(cache) >= 4:
                cache.pop(next(iter(cache)))
            vals = [regularized_truncated_riesz(stacked, eps, float(v), k) for v in x.ravel()]
            cache[key] = np.asarray(vals).reshape(x.shape + (len(fns),))
        return cache[key]

    out = []
    for i, fn in enumerate(fns):
        base = riesz_image(fn, k, eps)
        out.append(replace(base, func=lambda x, i=i: table(np.asarray(x, dtype=float))[..., i]))
    return out


def richardson_limit(values, eps) -> float:
    """Limit as eps -> 0 of samples with error model
    a + b eps + c eps log eps + d eps^2 + e eps^2 log eps + g eps^3,
    truncated to as many terms as there are samples."""
    eps = np.asarray(eps, dtype=float)
    le = np.log(eps)
    basis = np.stack([np.ones_like(eps), eps, eps * le, eps ** 2, eps ** 2 * le, eps ** 3], axis=1)
    basis = basis[:, :min(basis.shape[1], len(eps))]
    coef, *_ = np.linalg.lstsq(basis, np.asarray(values, dtype=float), rcond=None)
    return float(coef[0])


LIMIT_EPS = (0.2, 0.1, 0.05, 0.025, 0.0125, 0.00625)


def riesz_limit(f, x: float, cfg, eps=None) -> dict:
    """eps -> 0 limit of R^eps f(x) by extrapolation, refereed by the
    principal-value route.  The default ladder shrinks when |x| is small so
    the windows at x and -x stay apart."""
    if eps is None:
        top = 0.2 if x == 0 else min(0.2, abs(x) / 3)
        eps = tuple(top / 0.2 * e for e in LIMIT_EPS)
    vals = [truncated_riesz(f, e, x, cfg) for e in eps]
    lim = richardson_limit(vals, eps)
    pv = riesz_pv(f, x, cfg)
    return {"eps": list(eps), "values": vals, "extrapolated": lim, "pv": pv,
            "discrepancy": abs(lim - pv)}


def riesz_transform_l2(f, cfg, x=None, xi_grid=None):
    """Spectral route: F^{-1}[-i sgn(xi) F f].

    Returns a ``SampledFunction`` on the input grid, or the real values at
    the points ``x`` when given.
    """
    from .transform import SampledFunction, forward_transform, inverse_at, inverse_transform, multiply
    F = forward_transform(f, xi_grid, cfg)
    G = multiply(F, lambda xi: -1j * np.sign(xi))
    if x is not None:
        return np.real(inverse_at(G, x))
    if G.meta.get("x_grid") is None:
        raise DomainError("pass evaluation points x for Fn input")
    out = inverse_transform(G)
    return SampledFunction(out.grid, np.real(out.values), None, f"R[{F.label}]")


def maximal_riesz(f, x: float, eps_grid, cfg) -> float:
    """sup over the eps grid of |R^eps f(x)|."""
    return float(max(abs(truncated_riesz(f, e, x, cfg)) for e in eps_grid))


# ------------------------------------------------------- Hormander ----

def hormander_integral(t: float, tp: float, eps: float, cfg, order: int = 12,
                       refine: int = 1) -> float:
    """int_{d(x,t) > 2|t - t'|} |K^eps(x,t) - K^eps(x,t')| d omega(x)."""
    if t == tp:
        raise DomainError("need t != t'")
    k = as_config(cfg).k
    delta = abs(t - tp)
    big = 2 * delta
    R = 4.0 * max(1.0, abs(t) + big, abs(tp) + big, eps)
    cuts = set()
    for c in (t, -t, tp, -tp):
        if eps > 0:
            cuts |= {c - eps, c + eps}
    win = [(t - big, t + big), (-t - big, -t + big)] if k > 0 else [(t - big, t + big)]
    edges = {-R, R, 0.0} | cuts
    ratio = 3.0 if refine == 1 else 2.0
    for a, b in win:
        edges |= {a, b} | set(graded_points(0.5 * (a + b), big, 2 * R, ratio))
    for c in (tp, -tp) if k > 0 else (tp,):
        edges |= set(graded_points(c, delta / 2, 2 * R, ratio))
    edges = [e for e in edges if -R <= e <= R]
    centers = [0.5 * (a + b) for a, b in win]
    xs, ws = panel_rule(_refined(edges, centers, delta, refine), order, k)
    inside = np.zeros(xs.shape, dtype=bool)
    for a, b in win:
        inside |= (xs > a) & (xs < b)
    xs, ws = xs[~inside], ws[~inside]
    tt, tw = tail_rule(R, order, k, depth=1e-3, ratio=8.0)
    xs = np.concatenate([xs, tt, -tt])
    ws = np.concatenate([ws, tw, tw])

    def Keps(x, s):
        v = riesz_values(x, np.full_like(x, s), k)
        if eps > 0:
            v = np.where(np.minimum(np.abs(x - s), np.abs(x + s)) > eps, v, 0.0)
        return v
    return float(np.sum(np.abs(Keps(xs, t) - Keps(xs, tp)) * ws))


def hormander_smoothness_ratio(x, t, tp, cfg):
    """|K(x,t) - K(x,t')| |x - t| |B(x, d(x,t))| / |t - t'|."""
    k = as_config(cfg).k
    x, t, tp = (np.asarray(a, float) for a in (x, t, tp))
    d = np.minimum(np.abs(x - t), np.abs(x + t))
    num = np.abs(riesz_values(x, t, k) - riesz_values(x, tp, k))
    return num * np.abs(x - t) * ball_measure(x, d, k) / np.abs(t - tp)


# -------------------------------------------------------- phi0 ----

def phi0_lower_bound(x: float, cfg) -> float:
    k = as_config(cfg).k
    cf = MultiplicityConfig(k)
    return cf.c_kappa * cf.m_kappa * 2.0 ** (-2 * k) * (x + 1) ** (-2 * k) * \
        math.log((x - 0.5) / (x - 1))


def phi0_example(x: float, cfg, order: int = 16):
    """(phi0(x), lower bound) with phi0 = R chi_[-1,1] at x > 1."""
    if not x > 1:
        raise DomainError("phi0 example needs x > 1")
    k = as_config(cfg).k
    c = MultiplicityConfig(k).c_kappa
    gap = x - 1
    edges = {-1.0, 0.0, 1.0}
    edges |= set(graded_points(1.0, gap / 4, 4.0, 3.0))
    edges |= set(graded_points(-1.0, gap / 4, 4.0, 3.0))
    edges = [e for e in edges if -1 <= e <= 1]
    ts, ws = panel_rule(_refined(edges, [1.0, -1.0], gap, 1), order, k)
    val = float(c * np.sum(riesz_values(np.full_like(ts, x), ts, k) * ws))
    return val, phi0_lower_bound(x, k)


__all__ = [
    "RieszKernelEval", "riesz_values", "riesz_kernel", "riesz_kernel_subordinated",
    "riesz_bounds", "windowed_rule", "truncated_riesz", "riesz_pv", "riesz_images",
    "regularized_truncated_riesz", "regularized_riesz", "riesz_image", "richardson_limit", "riesz_limit",
    "riesz_transform_l2", "maximal_riesz", "hormander_integral",
    "hormander_smoothness_ratio", "phi0_example", "phi0_lower_bound", "chi_interval",
]
