"""BMO, orbit-BMO, Carleson and BMC estimators, (1,2)-atoms, H^1 norms and
the H^1-BMC duality pairing, all in rank one.

Sup-type norms are maxima over a finite ``BallFamily``.  Every report
records the family and grid ids so a number can be reproduced; refining the
family can only raise the estimate.

Ball integrals use one composite rule whose panel edges contain every ball
endpoint (and its reflection), so each ball is an exact union of panels.
Tent integrals use a lattice of heights x Gauss nodes in x: for fixed x the
height integral up to r - |x - x'| is read off a per-panel Legendre
antiderivative, so one field evaluation serves every tent.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import legendre as leg

from .dunkl_core import MultiplicityConfig, as_config, ball_measure
from .errors import (DomainError, FamilyOutsideGrid, FrequencyProjectionFailed,
                     GrowthConditionFailed, InvalidAtom, MeanNotZero, TailBoundExceeded)
from .functions import Fn, constant
from .numerics import gauss_legendre, graded_points, panel_rule, tail_rule
from .poisson import _as_fn, kernel_gradients, kernel_rule

SCHEMA = "dunklkit.normreport/1"


# ------------------------------------------------------------ families ----

@dataclass(frozen=True)
class BallFamily:
    balls: tuple                       # ((center, radius), ...)
    rule: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.balls:
            raise DomainError("empty ball family")
        if any(r <= 0 for _, r in self.balls):
            raise DomainError("radii must be positive")

    @classmethod
    def dyadic(cls, L: float = 2.0, m: int = 1, k_min: int = -2, k_max: int = 1) -> "BallFamily":
        """Centers j 2^-m in [-L, L], radii 2^k for k_min <= k <= k_max."""
        h = 2.0 ** -m
        n = int(math.floor(L / h + 1e-12))
        centers = [j * h for j in range(-n, n + 1)]
        radii = [2.0 ** k for k in range(k_min, k_max + 1)]
        balls = tuple((c, r) for r in radii for c in centers)
        return cls(balls, {"kind": "dyadic", "L": L, "m": m, "k_min": k_min, "k_max": k_max})

    def refined(self, steps: int = 1) -> "BallFamily":
        """Superset family: finer centers and one more small radius per step."""
        if self.rule.get("kind") != "dyadic":
            raise DomainError("only dyadic families can be refined")
        r = self.rule
        return BallFamily.dyadic(r["L"], r["m"] + steps, r["k_min"] - steps, r["k_max"])

    @property
    def id(self) -> str:
        h = hashlib.sha1(np.asarray(self.balls, dtype=float).tobytes()).hexdigest()
        return h[:12]

    @property
    def extent(self) -> float:
        return max(abs(c) + r for c, r in self.balls)

    @property
    def spacing(self) -> float:
        """Common lattice step of all ball endpoints (dyadic families)."""
        if self.rule.get("kind") == "dyadic":
            return min(2.0 ** -self.rule["m"], 2.0 ** self.rule["k_min"])
        return min(r for _, r in self.balls) / 2

    def endpoints(self):
        pts = set()
        for c, r in self.balls:
            pts |= {c - r, c + r, -(c - r), -(c + r)}
        return pts

    def describe(self) -> dict:
        return {"id": self.id, "n_balls": len(self.balls), **self.rule}


@dataclass
class NormReport:
    value: float
    kind: str
    family: dict
    grid: str
    per_ball: list               # (center, radius, value) triples
    worst: tuple
    quadrature_error: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.value >= 0:
            raise ArithmeticError(f"{self.kind} estimate is negative or NaN: {self.value}")

    def __float__(self):
        return self.value

    def to_dict(self) -> dict:
        return {"schema": SCHEMA, "kind": self.kind, "value": self.value, "family": self.family,
                "grid": self.grid, "worst": list(self.worst),
                "per_ball": [list(p) for p in self.per_ball],
                "quadrature_error": self.quadrature_error, "meta": self.meta}

    def to_json(self, path=None, indent=1) -> str:
        text = json.dumps(self.to_dict(), indent=indent, default=float)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text


def _report(kind, vals, family, grid_id, err, meta=None, transform=None):
    vals = np.asarray(vals, dtype=float)
    i = int(np.argmax(vals))
    per = [(c, r, float(v)) for (c, r), v in zip(family.balls, vals)]
    value = float(vals[i]) if transform is None else transform(float(vals[i]))
    return NormReport(value, kind, family.describe(), grid_id, per, per[i], float(err), meta or {})


# --------------------------------------------------------- ball rules ----

def _x_edges(family: BallFamily, fns, span=None):
    """Panel edges: the family lattice plus graded points at features."""
    X = family.extent if span is None else span
    h = family.spacing
    n = int(round(X / h))
    edges = set(np.arange(-n, n + 1) * h) | family.endpoints()
    # jumps and kinks only need to be panel edges; integrable singularities
    # get geometric grading (a log point truncated at 1e-8 costs ~1e-7)
    for f in fns:
        for s in f.singular:
            for q in (s, -s):
                edges |= set(graded_points(q, 1e-8 * max(1.0, abs(q)), h, 4.0))
        for b in f.breakpoints:
            edges |= {b, -b}
    return sorted(e for e in edges if -X <= e <= X)


class BallGrid:
    """Composite rule aligned with a ball family; ``mask(c, r)`` selects the
    nodes of a ball exactly."""

    def __init__(self, family: BallFamily, cfg, fns=(), order: int = 8):
        self.family = family
        self.k = as_config(cfg).k
        self.order = order
        self.edges = _x_edges(family, [_as_fn(f) for f in fns])
        self.nodes, self.weights = panel_rule(self.edges, order, self.k)
        br = np.unique(np.append(self.edges, 0.0) if self.edges[0] < 0 < self.edges[-1] else self.edges)
        self.panels = (br[:-1], br[1:])

    @property
    def id(self) -> str:
        h = hashlib.sha1(self.nodes.tobytes() + self.weights.tobytes()).hexdigest()
        return h[:12]

    def mask(self, c, r, orbit=False):
        m = (self.nodes > c - r) & (self.nodes < c + r)
        if orbit:
            m |= (self.nodes > -c - r) & (self.nodes < -c + r)
        return m

    def masks(self, orbit=False):
        return np.stack([self.mask(c, r, orbit) for c, r in self.family.balls])


def _tabulate(f, nodes):
    from .transform import SampledFunction
    if isinstance(f, SampledFunction):
        x = f.grid.nodes
        if nodes.min() < x.min() or nodes.max() > x.max():
            raise FamilyOutsideGrid(f"family reaches [{nodes.min():.3g}, {nodes.max():.3g}] "
                                    f"but samples cover [{x.min():.3g}, {x.max():.3g}]")
        return np.interp(nodes, x, np.real(f.values))
    return np.asarray(_as_fn(f)(nodes), dtype=float)


def _oscillations(vals, w, masks, grid=None):
    """Mean oscillation |B|^-1 int_B |f - f_B| for each mask row."""
    W = masks * w
    mass = W.sum(axis=1)
    mean = (W @ vals) / mass
    num = (W * np.abs(vals[None, :] - mean[:, None])).sum(axis=1)
    if grid is not None and vals.ndim == 1:
        num = num + _kink_fix(vals, grid, masks, mean)
    return num / mass


def _kink_fix(vals, g, masks, mean):
    """|f - f_B| has a kink where f crosses f_B, inside some panel.  Split
    those panels at the roots of the node interpolant and re-integrate it:
    no new evaluations of f."""
    o = g.order
    X, V, W = (a.reshape(-1, o) for a in (g.nodes, vals, g.weights))
    lo, hi = g.panels
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    out = np.zeros(len(mean))
    for b, (m, mu) in enumerate(zip(masks, mean)):
        D = V - mu
        mixed = m.reshape(-1, o).all(axis=1) & (D.min(axis=1) < 0) & (D.max(axis=1) > 0)
        for p in np.flatnonzero(mixed):
            coef = leg.legfit((X[p] - mid[p]) / half[p], D[p], o - 1)
            r = leg.legroots(coef)
            r = np.real(r[(np.abs(np.imag(r)) < 1e-9) & (np.abs(np.real(r)) < 1)])
            if not len(r):
                continue
            xs, ws = panel_rule([lo[p], hi[p], *(mid[p] + half[p] * r)], o, g.k)
            new = np.dot(ws, np.abs(leg.legval((xs - mid[p]) / half[p], coef)))
            out[b] += new - np.dot(W[p], np.abs(D[p]))
    return out


def _bmo(f, family, cfg, orbit, order, check):
    fn_like = [f] if not hasattr(f, "grid") else []
    g = BallGrid(family, cfg, fn_like, order)
    masks = g.masks(orbit)
    osc = _oscillations(_tabulate(f, g.nodes), g.weights, masks, g)
    err = 0.0
    if check:
        g2 = BallGrid(family, cfg, fn_like, max(2, order // 2))
        osc2 = _oscillations(_tabulate(f, g2.nodes), g2.weights, g2.masks(orbit), g2)
        err = float(np.max(np.abs(osc - osc2)))
    return osc, g, err


def bmo_norm(f, family: BallFamily, cfg, order: int = 8, check: bool = True) -> NormReport:
    """max over the family of |B|^-1 int_B |f - f_B| d omega."""
    osc, g, err = _bmo(f, family, cfg, False, order, check)
    return _report("bmo", osc, family, g.id, err, {"kappa": g.k, "order": order})


def bmo_orbit_norm(f, family: BallFamily, cfg, order: int = 8, check: bool = True) -> NormReport:
    """Same with each ball B replaced by its orbit B u (-B)."""
    osc, g, err = _bmo(f, family, cfg, True, order, check)
    return _report("bmo_orbit", osc, family, g.id, err, {"kappa": g.k, "order": order})


def john_nirenberg_profile(f, ball, lams, cfg, order: int = 16, panels: int = 64):
    """[(lam, |{x in B : |f - f_B| > lam}| / |B|)] for lam in ``lams``."""
    k = as_config(cfg).k
    c, r = ball
    fn = _as_fn(f)
    edges = set(np.linspace(c - r, c + r, panels + 1))
    for s in fn.singular:
        if c - r < s < c + r:
            edges |= set(graded_points(s, 1e-12 * max(1.0, abs(s)), 2 * r, 2.0))
    edges |= {b for b in fn.breakpoints if c - r < b < c + r}
    edges = sorted(e for e in edges if c - r <= e <= c + r)
    x, w = panel_rule(edges, order, k)
    v = fn(x)
    dev = np.abs(v - np.dot(w, v) / w.sum())
    return [(float(lam), float(np.dot(w, dev > lam) / w.sum())) for lam in lams]


def exponential_fit(profile, lam_min: float = 0.0):
    """Least-squares fit log ratio = a - b lam over the positive ratios with
    lam >= lam_min; returns (b, R^2)."""
    pts = [(l, q) for l, q in profile if l >= lam_min and q > 0]
    if len(pts) < 3:
        raise DomainError("need at least three positive ratios to fit")
    lam = np.array([p[0] for p in pts])
    y = np.log([p[1] for p in pts])
    A = np.stack([np.ones_like(lam), -lam], axis=1)
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    res = y - A @ coef
    ss = np.sum((y - y.mean()) ** 2)
    return float(coef[1]), float(1 - np.sum(res ** 2) / ss) if ss > 0 else 1.0


# -------------------------------------------------------------- tents ----

def _antiderivative_rows(order):
    """M with (int_{-1}^u p) = sum_i a_i(u) coef_i, coef = Vinv @ values."""
    x, _ = gauss_legendre(order)
    V = leg.legvander(x, order - 1)
    return np.linalg.inv(V)


def _leg_primitive(u, order):
    """a_i(u) = int_{-1}^u P_i for i < order, shape (len(u), order)."""
    P = leg.legvander(u, order)
    a = np.empty((len(u), order))
    a[:, 0] = u + 1
    for i in range(1, order):
        a[:, i] = (P[:, i + 1] - P[:, i - 1]) / (2 * i + 1)
    return a


class TentLattice:
    """Heights x nodes lattice covering every tent T(B) of a family.

    Height panels are dyadic from ``r_min / 2^levels`` up to ``r_max`` plus
    a bottom panel reaching 0.  ``integrate(g)`` returns the tent integrals
    int_{T(B)} g dx0 d omega(x) for every ball.
    """

    def __init__(self, family: BallFamily, cfg, fns=(), order_x: int = 4, order_h: int = 3,
                 levels: int = 6):
        self.family = family
        self.k = as_config(cfg).k
        radii = sorted({r for _, r in family.balls})
        h0 = radii[0] / 2 ** levels
        top = radii[-1]
        n = int(math.ceil(math.log2(top / h0)))
        self.hedges = np.concatenate([[0.0], h0 * 2.0 ** np.arange(n + 1)])
        self.hedges[-1] = max(self.hedges[-1], top)
        gx, _ = gauss_legendre(order_h)
        lo, hi = self.hedges[:-1], self.hedges[1:]
        self.half = 0.5 * (hi - lo)
        self.heights = (0.5 * (lo + hi)[:, None] + self.half[:, None] * gx).ravel()
        self.order_h = order_h
        self.vinv = _antiderivative_rows(order_h)
        self.grid = BallGrid(family, cfg, fns, order_x)
        self.xs, self.wx = self.grid.nodes, self.grid.weights
        self.balls = family.balls
        self._pairs()

    @property
    def id(self) -> str:
        return hashlib.sha1(self.heights.tobytes() + self.xs.tobytes()).hexdigest()[:12]

    @property
    def shape(self):
        return len(self.heights), len(self.xs)

    def _pairs(self):
        bi, xj, hh = [], [], []
        for b, (c, r) in enumerate(self.balls):
            j = np.nonzero(np.abs(self.xs - c) < r)[0]
            bi.append(np.full(len(j), b))
            xj.append(j)
            hh.append(r - np.abs(self.xs[j] - c))
        self.pb = np.concatenate(bi)
        self.pj = np.concatenate(xj)
        h = np.concatenate(hh)
        p = np.clip(np.searchsorted(self.hedges, h, side="right") - 1, 0, len(self.half) - 1)
        u = np.clip((h - self.hedges[p]) / self.half[p] - 1.0, -1.0, 1.0)
        self.pp = p
        self.pa = _leg_primitive(u, self.order_h)

    def integrate(self, g) -> np.ndarray:
        g = np.asarray(g, dtype=float)
        n_p = len(self.half)
        gp = g.reshape(n_p, self.order_h, -1)                       # panel, node, x
        coef = np.einsum("in,pnx->pix", self.vinv, gp)              # Legendre coefficients
        full = 2.0 * coef[:, 0, :] * self.half[:, None]             # whole-panel integrals
        below = np.vstack([np.zeros((1, full.shape[1])), np.cumsum(full, axis=0)[:-1]])
        part = self.half[self.pp] * np.einsum("qi,qi->q", self.pa, coef[self.pp, :, self.pj])
        col = below[self.pp, self.pj] + part
        out = np.zeros(len(self.balls))
        np.add.at(out, self.pb, col * self.wx[self.pj])
        return out

    def ball_measures(self):
        return np.array([ball_measure(c, r, self.k) for c, r in self.balls])


def _envelope(fns) -> Fn:
    """Fn carrying the union of the features of several functions (for
    building one shared kernel rule)."""
    fns = [_as_fn(f) for f in fns]
    sup = [f.support for f in fns]
    support = None
    if all(s is not None for s in sup):
        support = (min(s[0] for s in sup), max(s[1] for s in sup))
    bps = tuple(sorted({b for f in fns for b in f.breakpoints}))
    sing = tuple(sorted({s for f in fns for s in f.singular}))
    peaks = tuple(sorted({p for f in fns for p in f.peaks}))
    return Fn(lambda x: x, "envelope", bps, sing, support, peaks=peaks,
              smooth_tail=all(f.smooth_tail for f in fns))


def gradient_columns(fns, heights, xs, cfg, conjugate: bool = False, order: int = 8):
    """kappa-gradients (d0 u, D u) of the Poisson integrals of each f at every
    (height, x) pair; with ``conjugate`` the conjugate field Q f instead.

    One kernel rule per x (graded down to the lowest height) is shared by
    all heights and all functions.  Returns shape (len(fns), 2, nh, nx).
    """
    k = as_config(cfg).k
    c = MultiplicityConfig(k).c_kappa
    fns = [_as_fn(f) for f in fns]
    env = _envelope(fns)
    heights = np.asarray(heights, dtype=float)
    xs = np.asarray(xs, dtype=float)
    hmin = float(heights.min())
    out = np.empty((len(fns), 2, len(heights), len(xs)))
    d0, dx = ("d0Q", "DQ") if conjugate else ("d0P", "DP")
    for j, x in enumerate(xs):
        ts, ws = kernel_rule(k, hmin, float(x), env, order)
        F = np.stack([f(ts) for f in fns]) * (c * ws)
        g = kernel_gradients(heights[:, None], x, ts[None, :], k)
        out[:, 0, :, j] = F @ g[d0].T
        out[:, 1, :, j] = F @ g[dx].T
    return out


def _field_route(phi):
    """(functions to integrate, conjugate flag): R~psi uses the conjugate
    field of psi, since u_{R~psi} and Q psi differ by a constant."""
    fn = _as_fn(phi)
    psi = fn.params.get("riesz_of") if isinstance(fn.params, dict) else None
    if psi is not None and fn.params.get("eps", 0.0) == 0.0:
        return psi, True
    return fn, False


def carleson_norm(nu, family: BallFamily, cfg, lattice: TentLattice | None = None) -> NormReport:
    """max over the family of nu(T(B)) / |B|, for a density nu(x0, x) with
    respect to dx0 d omega(x)."""
    lat = lattice or TentLattice(family, cfg)
    H, X = np.meshgrid(lat.heights, lat.xs, indexing="ij")
    vals = np.asarray(nu(H, X), dtype=float)
    if np.any(vals < 0):
        raise DomainError("Carleson density must be nonnegative")
    ratio = lat.integrate(vals) / lat.ball_measures()
    return _report("carleson", ratio, family, lat.id, 0.0, {"kappa": lat.k})


def bmc_seminorms(phis, family: BallFamily, cfg, order: int = 8, check_growth: bool = True,
                  levels: int = 6) -> list:
    """BMC seminorms sqrt(sup_B nu_phi(T(B)) / |B|), nu_phi = x0 |grad u_phi|^2,
    for several functions sharing one lattice and one set of kernel rules.

    All entries must take the same field route (all R~psi or none)."""
    k = as_config(cfg).k
    routes = [_field_route(p) for p in phis]
    conj = {r[1] for r in routes}
    if len(conj) != 1:
        raise DomainError("mix of R~psi and plain functions; call separately")
    conj = conj.pop()
    srcs = [r[0] for r in routes]
    if check_growth:
        for p in phis:
            try:
                growth_integral(p, k)
            except TailBoundExceeded as e:
                raise GrowthConditionFailed(str(e)) from e
    lat = TentLattice(family, k, [_as_fn(p) for p in phis] + srcs, levels=levels)
    grads = gradient_columns(srcs, lat.heights, lat.xs, k, conjugate=conj, order=order)
    out = []
    mb = lat.ball_measures()
    for i, p in enumerate(phis):
        dens = lat.heights[:, None] * (grads[i, 0] ** 2 + grads[i, 1] ** 2)
        ratio = lat.integrate(dens) / mb
        # the bottom height panel is unresolved below the lattice scale;
        # its share bounds the truncation error
        n0 = lat.order_h
        bottom = lat.integrate(np.vstack([dens[:n0], np.zeros_like(dens[n0:])])) / mb
        i_max = int(np.argmax(ratio))
        err = 0.5 * math.sqrt(bottom[i_max] / max(ratio[i_max], 1e-300)) * math.sqrt(ratio[i_max])
        out.append(_report("bmc", ratio, family, lat.id, err,
                           {"kappa": k, "route": "conjugate" if conj else "poisson",
                            "heights": len(lat.heights), "x_nodes": len(lat.xs)},
                           transform=math.sqrt))
    return out


def bmc_seminorm(phi, family: BallFamily, cfg, order: int = 8, check_growth: bool = True,
                 levels: int = 6) -> NormReport:
    return bmc_seminorms([phi], family, cfg, order, check_growth, levels)[0]


def growth_integral(phi, cfg, max_shells: int = 400) -> float:
    """int |phi| (1 + |x|)^{-2 kappa - 2} d omega over the line.

    Shells [2^j, 2^{j+1}] are added until they fall below 1e-12 of the
    running sum, with a geometric tail estimate once the ratio settles;
    raises TailBoundExceeded otherwise.
    """
    k = as_config(cfg).k
    fn = _as_fn(phi)
    p = 2 * k + 2

    def g(x):
        with np.errstate(over="ignore", invalid="ignore"):
            return np.abs(fn(x)) * (1 + np.abs(x)) ** (-p)
    edges = {-1.0, 0.0, 1.0} | {e for e in fn.features() if abs(e) < 1}
    for s in fn.singular:
        if abs(s) < 1:
            edges |= set(graded_points(s, 1e-12, 2.0, 4.0))
    edges = sorted(e for e in edges if -1 <= e <= 1)
    x, w = panel_rule(edges, 16, k)
    total = float(np.dot(w, g(x)))
    prev = None
    for j in range(max_shells):
        a, b = 2.0 ** j, 2.0 ** (j + 1)
        br = [a] + sorted({abs(e) for e in fn.features() if a < abs(e) < b}) + [b]
        xs, ws = panel_rule(br, 16, k)
        piece = float(np.dot(ws, g(xs) + g(-xs)))
        if not math.isfinite(piece):
            raise TailBoundExceeded(f"growth integrand not finite on shell [{a:g}, {b:g}]")
        total += piece
        if prev is not None and prev > 0 and j > 4:
            q = piece / prev
            if q < 0.95:
                tail = piece * q / (1 - q)
                if tail <= 1e-10 * total:
                    return total + tail
        if piece <= 1e-14 * total and j > 4:
            return total
        prev = piece
    raise TailBoundExceeded("growth integral does not settle: phi grows too fast")


# -------------------------------------------------------------- atoms ----

@dataclass(frozen=True)
class Atom12:
    center: float
    radius: float
    kappa: float
    shape: str
    fn: Fn
    q: int = 2

    def __call__(self, x):
        return self.fn(x)

    @property
    def support(self):
        return (self.center - self.radius, self.center + self.radius)


def _ball_rule(c, r, k, order=24, extra=()):
    edges = {c - r, c, c + r} | {e for e in extra if c - r < e < c + r}
    if c - r < 0 < c + r:
        edges.add(0.0)
    return panel_rule(sorted(edges), order, k)


def make_atom(center: float, radius: float, shape: str, cfg) -> Atom12:
    """Mean-zero (1,2)-atom supported in B(center, radius), scaled so that
    ||a||_2 = |B|^{-1/2} exactly.

    ``haar-like``: alpha on [c, c+r) and -beta on [c-r, c);
    ``smooth-odd``: s (1 - s^2)^3 - beta (1 - s^2)^4 with s = (x - c) / r.
    """
    if radius <= 0:
        raise InvalidAtom("radius must be positive")
    k = as_config(cfg).k
    c, r = float(center), float(radius)
    x, w = _ball_rule(c, r, k)
    if shape == "haar-like":
        right = w[x >= c].sum()
        left = w[x < c].sum()
        beta = right / left

        def base(t):
            t = np.asarray(t, dtype=float)
            return np.where((t >= c) & (t < c + r), 1.0, 0.0) - beta * np.where((t >= c - r) & (t < c), 1.0, 0.0)
        bps = (c - r, c, c + r)
    elif shape == "smooth-odd":
        s = (x - c) / r
        p = s * (1 - s * s) ** 3
        q = (1 - s * s) ** 4
        beta = np.dot(w, p) / np.dot(w, q)

        def base(t):
            t = np.asarray(t, dtype=float)
            u = (t - c) / r
            inside = np.abs(u) < 1
            return np.where(inside, u * (1 - u * u) ** 3 - beta * (1 - u * u) ** 4, 0.0)
        bps = (c - r, c + r)
    else:
        raise InvalidAtom(f"unknown atom shape {shape!r}")
    norm2 = math.sqrt(np.dot(w, base(x) ** 2))
    scale = 1.0 / (norm2 * math.sqrt(ball_measure(c, r, k)))

    def a(t):
        return scale * base(t)
    fn = Fn(a, f"atom({shape},{c:.4g},{r:.4g})", breakpoints=bps, support=(c - r, c + r),
            params={"center": c, "radius": r, "shape": shape})
    return Atom12(c, r, k, shape, fn)


def validate_atom(a: Atom12, tol: float = 1e-10) -> bool:
    """Check support, size and mean-zero conditions with an independent rule."""
    c, r, k = a.center, a.radius, a.kappa
    x, w = _ball_rule(c, r, k, order=40, extra=list(np.linspace(c - r, c + r, 9)))
    out = np.array([c - 1.5 * r, c - 1.01 * r, c + 1.01 * r, c + 2 * r])
    if np.any(a(out) != 0):
        raise InvalidAtom("atom does not vanish outside its ball")
    size = math.sqrt(np.dot(w, a(x) ** 2))
    bound = ball_measure(c, r, k) ** -0.5
    if size > bound * (1 + 1e-9):
        raise InvalidAtom(f"||a||_2 = {size} exceeds |B|^-1/2 = {bound}")
    mean = np.dot(w, a(x))
    if abs(mean) > tol * max(1.0, np.dot(w, np.abs(a(x)))):
        raise InvalidAtom(f"mean {mean} is not zero")
    return True


def random_atoms(n: int, cfg, seed: int = 0, center_range=3.0, radius_range=(0.05, 2.0)):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        c = rng.uniform(-center_range, center_range)
        r = math.exp(rng.uniform(*np.log(radius_range)))
        shape = "haar-like" if rng.random() < 0.5 else "smooth-odd"
        out.append(make_atom(c, r, shape, cfg))
    return out


# ----------------------------------------------------------------- H^1 ----

def _riesz_on(fn: Fn, xs, k, order=12, near=None):
    """R f at many points: a plain rule on the support where x is well away
    from it and its reflection; near points use ``near(x)`` if given, else
    the principal-value route."""
    from .riesz import riesz_pv, riesz_values
    c = MultiplicityConfig(k).c_kappa
    lo, hi = fn.support
    width = hi - lo
    edges = sorted({lo, hi, *fn.features(), *np.linspace(lo, hi, 9)})
    edges = [e for e in edges if lo <= e <= hi]
    ts, ws = panel_rule(edges, 16, k)
    fw = c * fn(ts) * ws
    out = np.empty(len(xs))
    d = np.minimum(np.minimum(np.abs(xs - lo), np.abs(xs - hi)),
                   np.minimum(np.abs(-xs - lo), np.abs(-xs - hi)))
    inside = ((xs > lo) & (xs < hi)) | ((-xs > lo) & (-xs < hi))
    far = (~inside) & (d > 0.5 * width / 8 * 4)
    if np.any(far):
        K = riesz_values(xs[far][:, None], ts[None, :], k)
        out[far] = K @ fw
    if near is not None and np.any(~far):
        out[~far] = near(xs[~far])
        return out
    for i in np.nonzero(~far)[0]:
        out[i] = riesz_pv(fn, float(xs[i]), k, order)
    return out


def h1_norm(f, cfg, route: str = "kernel", mean_tol: float = 1e-8) -> NormReport:
    """||f||_1 + ||R f||_1 for compactly supported f.

    ``kernel`` evaluates R f by principal values near the support and a plain
    rule elsewhere; ``spectral`` uses the L^2 multiplier near the support
    (the frequency grid cannot resolve the far field, where the kernel is
    smooth and the plain rule is used by both routes).  The far tail of
    R f, which decays like |x|^{-2 kappa - 2}, is integrated in t = 1/u.
    """
    k = as_config(cfg).k
    fn = f.fn if isinstance(f, Atom12) else _as_fn(f)
    if fn.support is None:
        raise DomainError("h1_norm needs a compactly supported f")
    lo, hi = fn.support
    feats = sorted({lo, hi, *fn.features()})
    xf, wf = panel_rule(sorted(set(feats) | set(np.linspace(lo, hi, 9))), 24, k)
    fv = fn(xf)
    l1 = float(np.dot(wf, np.abs(fv)))
    mean = float(np.dot(wf, fv))
    if abs(mean) > mean_tol * max(l1, 1e-300):
        raise MeanNotZero(f"int f d omega = {mean:.3e}: f is not in H^1")
    width = hi - lo
    R = 4 * max(abs(lo), abs(hi), width, 1.0)
    # R f has log singularities at jumps of f and kinks at their reflections
    pts = set()
    for p in feats:
        pts |= {p, -p}
    edges = {-R, R, 0.0} | pts
    for p in pts:
        edges |= set(graded_points(p, 1e-9 * max(1.0, width), 2 * R, 3.0))
    edges = sorted(e for e in edges if -R <= e <= R)
    fine = [edges[0]]
    for a, b in zip(edges[:-1], edges[1:]):
        n = max(1, int(math.ceil((b - a) / (width / 4))))
        fine += list(np.linspace(a, b, n + 1)[1:])
    xs, ws = panel_rule(fine, 8, k)
    tt, tw = tail_rule(R, 8, k, depth=1e-4, ratio=4.0)
    xs = np.concatenate([xs, tt, -tt])
    ws = np.concatenate([ws, tw, tw])
    if route == "kernel":
        rf = _riesz_on(fn, xs, k)
    elif route == "spectral":
        from .riesz import riesz_transform_l2
        rf = _riesz_on(fn, xs, k, near=lambda x: riesz_transform_l2(fn, k, x=x))
    else:
        raise DomainError(f"unknown route {route!r}")
    rl1 = float(np.dot(ws, np.abs(rf)))
    fam = {"kind": "single", "support": [lo, hi]}
    return NormReport(l1 + rl1, "h1", fam, hashlib.sha1(xs.tobytes()).hexdigest()[:12], [],
                      (lo, hi, l1 + rl1), 0.0,
                      {"kappa": k, "l1": l1, "riesz_l1": rl1, "route": route, "nodes": len(xs)})


# ------------------------------------------------------------ duality ----

def smooth_step(t):
    """C-infinity step from 0 (t <= 0) to 1 (t >= 1)."""
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
        b = np.where(t < 1, np.exp(-1.0 / np.where(t < 1, 1.0 - t, 1.0)), 0.0)
    return a / (a + b)


def annulus_cutoff(lo: float = 0.1, hi: float = 8.0, ramp: float = 0.5):
    """chi(|xi|): 0 below lo, 1 on [2 lo, hi (1 - ramp/4)], 0 above hi."""
    top = hi * (1 - ramp / 4)

    def chi(xi):
        a = np.abs(xi)
        return smooth_step((a - lo) / lo) * (1 - smooth_step((a - top) / (hi - top)))
    return chi


@dataclass
class CleanedFunction:
    """f with spectrum restricted to an annulus: g = chi F f on a frequency
    grid; values and Poisson gradients come from the inverse transform."""
    spectrum: object                # SampledFunction on a frequency grid
    kappa: float
    source: str
    band: tuple
    extent: float

    def _coeffs(self):
        # real f: even part of F f is real (e), odd part is i b with b real,
        # and f(x) = 2c sum w [e je(xi|x|) - b jo(xi|x|) sgn x]
        ge, go = self.spectrum.even_odd()
        grid = self.spectrum.grid
        return grid.xp, grid.wp, np.real(ge), np.imag(go)

    def _bessel(self, xs):
        from .dunkl_core import kernel_parts
        xi = self.spectrum.grid.xp
        xs = np.atleast_1d(np.asarray(xs, dtype=float))
        je, jo = kernel_parts(self.kappa, np.outer(np.abs(xs), xi))
        return je, jo * np.sign(xs)[:, None]

    def __call__(self, x):
        xi, w, e, b = self._coeffs()
        je, jo = self._bessel(x)
        c = MultiplicityConfig(self.kappa).c_kappa
        return 2 * c * (je @ (w * e) - jo @ (w * b))

    def fields(self, heights, xs):
        """(d0 u_f, D u_f), each of shape (len(heights), len(xs)).

        F(D f) = i xi F f maps (e, b) to (-xi b, xi e); d0 multiplies by
        -xi; the Poisson extension multiplies by exp(-x0 xi)."""
        xi, w, e, b = self._coeffs()
        je, jo = self._bessel(xs)
        c = MultiplicityConfig(self.kappa).c_kappa
        damp = np.exp(-np.outer(heights, xi)) * w          # (nh, nxi)
        d0 = 2 * c * (damp * (-xi * e)) @ je.T - 2 * c * (damp * (-xi * b)) @ jo.T
        D = 2 * c * (damp * (-xi * b)) @ je.T - 2 * c * (damp * (xi * e)) @ jo.T
        return d0, D

    def field(self, x0, xs):
        d0, D = self.fields(np.array([x0]), xs)
        return d0[0], D[0]


def moment_free_gaussian(cfg, parity: str = "odd", n: int = 3, sigma: float = 1.0) -> Fn:
    """Gaussian times an even/odd polynomial whose first n weighted moments
    of matching parity vanish, so F f = O(|xi|^{2n}) (even) or
    O(|xi|^{2n+1}) (odd) at the origin."""
    k = as_config(cfg).k

    def M(s):
        q = (s + 2 * k + 1) / 2
        return sigma ** (2 * q) * 2 ** q * math.gamma(q)
    off = 0 if parity == "even" else 1
    if parity not in ("even", "odd"):
        raise DomainError("parity must be 'even' or 'odd'")
    A = np.array([[M(2 * i + 2 * j + 2 * off) for i in range(n)] for j in range(n)])
    rhs = -np.array([M(2 * n + 2 * j + 2 * off) for j in range(n)])
    a = np.append(np.linalg.solve(A, rhs), 1.0) if n else np.array([1.0])
    pw = 2 * np.arange(n + 1) + off

    def f(x):
        x = np.asarray(x, dtype=float)
        return np.exp(-0.5 * (x / sigma) ** 2) * sum(ai * x ** p for ai, p in zip(a, pw))
    # effective support: where the Gaussian envelope times the top power dies
    ext = sigma * (9.0 + 2.0 * math.sqrt(n + off))
    return Fn(f, f"mfg({parity},{n},{sigma})", support=(-ext, ext), parity=parity,
              peaks=((0.0, sigma),), params={"coeffs": a.tolist(), "powers": pw.tolist()})


def clean_frequency(f, cfg, band=(0.1, 8.0), width: float | None = None,
                    min_keep: float = 1e-6) -> CleanedFunction:
    """Project f onto frequencies in the annulus ``band`` with a smooth cutoff."""
    from .transform import Grid, forward_transform, multiply
    k = as_config(cfg).k
    fn = _as_fn(f)
    extent = fn.scale()
    w = width or min(0.25, 6.0 / extent)
    grid = Grid.frequency(k, band[1], w)
    F = forward_transform(fn, grid, k)
    G = multiply(F, annulus_cutoff(*band))
    keep = G.norm() / max(F.norm(), 1e-300)
    if not keep > min_keep:
        raise FrequencyProjectionFailed(f"annulus {band} keeps only {keep:.2e} of ||F f||")
    out = CleanedFunction(G, k, fn.name, tuple(band), extent)
    out.removed = float(math.sqrt(max(0.0, 1 - keep ** 2)))
    return out


def _phi_edges(fn: Fn, X, step, smallest):
    n = int(math.ceil(X / step))
    edges = set(np.linspace(-n * step, n * step, 2 * n + 1))
    for p in fn.features():
        for q in (p, -p):
            if -X < q < X:
                edges |= set(graded_points(q, smallest, step, 3.0))
    return sorted(e for e in edges if -n * step <= e <= n * step)


def duality_pairing_lhs(f: CleanedFunction, phi, cfg, X: float | None = None,
                        order: int = 16) -> float:
    """int f phi d omega by direct x-quadrature of the cleaned f."""
    k = as_config(cfg).k
    fn = _as_fn(phi)
    X = X or 2.0 * f.extent
    xs, ws = panel_rule(_phi_edges(fn, X, 0.25, 1e-3), order, k)
    return float(np.dot(ws, f(xs) * fn(xs)))


def duality_pairing_rhs(f: CleanedFunction, phi, cfg, H: float = 64.0, h0: float = 1e-3,
                        order_h: int = 3, order_x: int = 4, kernel_order: int = 8,
                        detail: bool = False):
    """2 int int x0 <grad u_f, grad u_phi> d omega(x) dx0 over the upper
    half-plane.

    Heights run over dyadic bands from 0 to H.  Within a band the x-grid
    spans the region where grad u_f lives and is graded toward the features
    of phi down to the band's lowest height.  grad u_f comes from the
    spectrum of f, grad u_phi from kernel quadrature against phi.
    """
    k = as_config(cfg).k
    fn, conj = _field_route(phi)
    if not isinstance(f, CleanedFunction):
        raise DomainError("f must be a CleanedFunction (see clean_frequency)")
    n = int(math.ceil(math.log2(H / h0)))
    hedges = np.concatenate([[0.0], h0 * 2.0 ** np.arange(n + 1)])
    gx, gw = gauss_legendre(order_h)
    total = 0.0
    bands = []
    for a, b in zip(hedges[:-1], hedges[1:]):
        hs = 0.5 * (a + b) + 0.5 * (b - a) * gx
        hw = 0.5 * (b - a) * gw
        X = f.extent + 4.0 * b
        step = min(0.25 * f.extent / 4, max(b / 2, 0.125))
        xs, wx = panel_rule(_phi_edges(fn, X, step, max(a, h0) / 4), order_x, k)
        G = gradient_columns([fn], hs, xs, k, conjugate=conj, order=kernel_order)[0]
        d0f, Df = f.fields(hs, xs)
        band = float(np.sum((hw * hs)[:, None] * wx[None, :] * (d0f * G[0] + Df * G[1])))
        total += 2 * band
        bands.append((a, b, 2 * band))
    # tail beyond H from the decay rate of the last two bands
    r = bands[-1][2] / bands[-2][2] if bands[-2][2] != 0 else 0.0
    tail = bands[-1][2] * r / (1 - r) if 0 < r < 1 else 0.0
    if detail:
        return total, {"bands": bands, "tail_estimate": tail}
    return total


def duality_residual(f: CleanedFunction, phi, cfg, **kw) -> dict:
    lhs = duality_pairing_lhs(f, phi, cfg)
    rhs, info = duality_pairing_rhs(f, phi, cfg, detail=True, **kw)
    return {"lhs": lhs, "rhs": rhs, "rel": abs(lhs - rhs) / max(abs(lhs), 1e-300),
            "tail_estimate": info["tail_estimate"], "removed": getattr(f, "removed", None)}


__all__ = [
    "BallFamily", "NormReport", "BallGrid", "TentLattice", "bmo_norm", "bmo_orbit_norm",
    "john_nirenberg_profile", "exponential_fit", "carleson_norm", "bmc_seminorm",
    "bmc_seminorms", "gradient_columns", "growth_integral", "Atom12", "make_atom",
    "validate_atom", "random_atoms", "h1_norm", "annulus_cutoff", "smooth_step",
    "CleanedFunction", "clean_frequency", "moment_free_gaussian", "duality_pairing_lhs",
    "duality_pairing_rhs", "duality_residual",
]
