"""Acceptance suite: thirteen property and identity checks with explicit
tolerances.  ``run()`` executes them and prints one pass/fail line each.

Random samples are drawn from ``numpy.random.default_rng(seed)`` per
criterion, so a given seed reproduces every number.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import functions as fns
from .dunkl_core import MultiplicityConfig
from .poisson import (cauchy_riemann_residual, conjugate_kernel, conjugate_kernel_subordinated,
                      conjugate_poisson_integral, default_heights, perp_maximal,
                      poisson_bounds, poisson_integral, poisson_kernel,
                      poisson_kernel_subordinated, poisson_values)
from .riesz import (hormander_integral, phi0_example, riesz_bounds, riesz_images,
                    riesz_values, truncated_riesz)
from .spaces import (BallFamily, bmc_seminorms, bmo_norm, bmo_orbit_norm, clean_frequency,
                     duality_residual, h1_norm, moment_free_gaussian, random_atoms)
from .transform import (Grid, forward_transform, inverse_transform, l2_distance,
                        plancherel_residual, sample)


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    measured: dict = field(default_factory=dict)
    tolerance: str = ""
    seconds: float = 0.0
    note: str = ""

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"[{flag}] {self.number:2d} {self.title} ({self.seconds:.1f}s): {self.note}"

    def to_dict(self) -> dict:
        return {"number": self.number, "title": self.title, "passed": self.passed,
                "measured": _plain(self.measured), "tolerance": self.tolerance,
                "seconds": round(self.seconds, 3), "note": self.note}


def _plain(v):
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def _drift(a, b):
    return abs(b - a) / max(abs(a), 1e-300)


# ------------------------------------------------------------ criteria ----

def c01_plancherel(seed=0, quick=False):
    worst_p = worst_r = 0.0
    for k in (0.0, 0.5, 1.5):
        for f in (fns.gaussian(1.0), fns.bump(8, 1.0)):
            g = Grid.for_function(f, k, width=0.25)
            fs = sample(f, g)
            F = forward_transform(f, Grid.frequency(k, 40.0), k)
            back = inverse_transform(F, g)
            worst_p = max(worst_p, plancherel_residual(fs, F))
            worst_r = max(worst_r, l2_distance(fs, back) / fs.norm(2))
    ok = worst_p <= 1e-6 and worst_r <= 1e-6
    return ok, {"plancherel": worst_p, "roundtrip": worst_r}, "<= 1e-6 each, runtime <= 30 s", \
        f"plancherel {worst_p:.2e}, round trip {worst_r:.2e}"


def c02_poisson_pair(seed=0, quick=False):
    worst_f = worst_s = 0.0
    for k in (0.0, 0.5, 1.5):
        g = Grid.frequency(k, 30.0)
        F = forward_transform(fns.poisson_p(1.0, k), g, k)
        worst_f = max(worst_f, float(np.max(np.abs(F.values - np.exp(-np.abs(g.nodes))))))
        # semigroup in kernel space: u_{P_s}(t, x) against the closed form of P_{s+t}
        for s, t in ((0.5, 1.0), (1.0, 0.25)):
            target = fns.poisson_p(s + t, k)
            for x in (0.0, 0.3, -1.2, 2.5):
                v = poisson_integral(fns.poisson_p(s, k), (t, x), k)
                worst_s = max(worst_s, abs(v - float(target(x))))
    ok = worst_f <= 1e-6 and worst_s <= 1e-6
    return ok, {"transform": worst_f, "semigroup": worst_s}, "<= 1e-6 each", \
        f"max|FP - e^-|xi|| {worst_f:.2e}, semigroup {worst_s:.2e}"


def c03_dual_route(seed=0, quick=False):
    rng = np.random.default_rng(seed + 3)
    worst = 0.0
    for k in (0.0, 0.6, 1.4):
        for _ in range(20):
            x0 = 10 ** rng.uniform(-1, 0.5)
            x, t = rng.uniform(-3, 3, 2)
            p = (x0, x)
            for a, b in ((poisson_kernel(p, t, k), poisson_kernel_subordinated(p, t, k)),
                         (conjugate_kernel(p, t, k), conjugate_kernel_subordinated(p, t, k))):
                a = float(a)
                worst = max(worst, abs(a - b) / max(abs(a), 1e-300))
    return worst <= 1e-7, {"max_rel": worst}, "rel <= 1e-7", f"max rel {worst:.2e}"


def c04_cauchy_riemann(seed=0, quick=False):
    rng = np.random.default_rng(seed + 4)
    f = fns.gaussian(1.0)
    worst = 0.0
    n = 50 if not quick else 12
    ks = (0.0, 0.5, 1.5)
    for i in range(n):
        k = ks[i % 3]
        x0 = 10 ** rng.uniform(-1, 0.3)
        x = rng.uniform(-2.5, 2.5)
        r1, r2 = cauchy_riemann_residual(f, (x0, x), k)
        scale = max(1.0, 1.0 / x0)        # ||f||_inf / x0 bounds the gradients
        worst = max(worst, max(abs(r1), abs(r2)) / scale)
    return worst <= 1e-5, {"max_scaled": worst, "points": n}, "<= 1e-5 * scale", \
        f"max residual/scale {worst:.2e} over {n} points"


def c05_classical(seed=0, quick=False):
    rng = np.random.default_rng(seed + 5)
    c0 = MultiplicityConfig(0.0).c_kappa
    x, t = rng.uniform(-5, 5, (2, 200))
    keep = np.abs(x - t) > 1e-3
    K = c0 * riesz_values(x[keep], t[keep], 0.0)
    rel = float(np.max(np.abs(K * math.pi * (x[keep] - t[keep]) - 1.0)))
    h = truncated_riesz(fns.chi_interval(-1, 1), 0.1, 2.0, 0.0)
    ref = math.log(3.0) / math.pi
    ok = rel <= 1e-10 and abs(h - ref) <= 1e-6
    return ok, {"kernel_rel": rel, "hilbert": h, "reference": ref}, \
        "kernel rel <= 1e-10; |H - ln3/pi| <= 1e-6", \
        f"kernel rel {rel:.1e}, H^0.1 chi(2) = {h:.7f} vs ln3/pi {ref:.7f}"


C6_SIGMA = 256.0
C6_EPS = (0.5, 0.25, 0.1, 0.05, 0.025)


def c06_truncation(seed=0, quick=False):
    sigma = C6_SIGMA
    f = fns.odd_gaussian(sigma)
    absf = replace(f, func=lambda x: np.abs(f.func(x)), parity="even", name="|f|")
    xs = sigma * np.linspace(-2.5, 2.5, 25)
    ks = (0.5,) if quick else (0.0, 0.5, 1.5)
    heights = default_heights(1e-2, 10 * sigma)
    out, ok, C = {}, True, 0.0
    for k in ks:
        pplus = np.array([perp_maximal(absf, x, heights, k) for x in xs])
        maxima = []
        for e in C6_EPS:
            res = np.array([abs(conjugate_poisson_integral(f, (e, x), k) - truncated_riesz(f, e, x, k))
                            for x in xs])
            maxima.append(float(res.max()))
            mask = pplus > 0
            C = max(C, float(np.max(res[mask] / pplus[mask])))
        mono = all(b < a for a, b in zip(maxima[:-1], maxima[1:]))
        ok &= mono and maxima[-1] <= 1e-3
        out[k] = maxima
    return ok, {"maxima": out, "C": C, "sigma": sigma}, \
        "monotone in eps, final <= 1e-3, one C for all", \
        "; ".join(f"k={k}: {m[0]:.1e}->{m[-1]:.1e}" for k, m in out.items()) + f"; C={C:.3g}"


def kernel_ratio_samples(n: int, k: float, seed: int):
    """Ratios of the Riesz and Poisson kernels to their comparison
    expressions at n random configurations (log-uniform magnitudes, random
    signs)."""
    rng = np.random.default_rng(seed)

    def mag():
        return 10 ** rng.uniform(-2, 2, n) * rng.choice([-1.0, 1.0], n)
    x, t = mag(), mag()
    x0 = 10 ** rng.uniform(-2, 2, n)
    K = np.abs(riesz_values(x, t, k))
    lo, up = riesz_bounds(x, t, k)
    P = poisson_values(x0, x, t, k)
    pl, pu = poisson_bounds(x0, x, t, k)
    return {"riesz_lower": K / lo, "riesz_upper": K / up, "poisson_lower": P / pl,
            "poisson_upper": P / pu}


def c07_kernel_ratios(seed=0, quick=False):
    """Binding sides: min of f/lower and max of f/upper must be stable."""
    n = 10_000
    out, ok, notes = {}, True, []
    for k in (0.0, 0.5, 1.5):
        a = kernel_ratio_samples(n, k, seed + 7)
        b = kernel_ratio_samples(2 * n, k, seed + 7)
        row = {}
        for name in a:
            va, vb = a[name], b[name]
            finite = bool(np.all(np.isfinite(va)) and np.all(va > 0) and np.all(np.isfinite(vb)))
            side = np.min if name.endswith("lower") else np.max
            d = _drift(side(va), side(vb))
            row[name] = {"min": float(va.min()), "max": float(va.max()), "binding": float(side(va)),
                         "binding_2n": float(side(vb)), "drift": d}
            if not finite or d >= 0.10:
                ok = False
                notes.append(f"k={k} {name} drift {d:.1%}")
        out[k] = row
    note = "all binding ratios stable" if ok else "; ".join(notes)
    return ok, out, ">= 1e4 samples, finite, positive, drift < 10% at 2n", note


C8_PAIRS = ((0.5, 0.6), (1.0, 1.1), (-0.7, -0.5), (2.0, 1.8), (0.3, 0.2),
            (1.5, 1.45), (-2.0, -2.3), (0.8, 1.0), (3.0, 3.2), (-1.2, -1.25))


def c08_hormander(seed=0, quick=False):
    worst_change, C = 0.0, 0.0
    ks = (0.5,) if quick else (0.0, 0.5, 1.5)
    for k in ks:
        for eps in (0.0, 0.1, 0.5):
            for t, tp in C8_PAIRS:
                v1 = hormander_integral(t, tp, eps, k)
                v2 = hormander_integral(t, tp, eps, k, refine=2)
                worst_change = max(worst_change, _drift(v2, v1))
                C = max(C, v1, v2)
    ok = worst_change < 0.01 and math.isfinite(C)
    return ok, {"max_refinement_change": worst_change, "C": C}, \
        "< 1% change under refinement; one bound for eps in {0, 0.1, 0.5}", \
        f"max change {worst_change:.1e}, bound C = {C:.4g}"


def c09_phi0(seed=0, quick=False):
    ok, rows = True, {}
    for k in (0.5, 1.0):
        vals = [phi0_example(x, k) for x in (1.1, 1.01, 1.001)]
        ok &= all(v >= lb for v, lb in vals)
        ok &= vals[2][0] > vals[1][0] > vals[0][0]
        rows[k] = vals
    return ok, {"values": rows}, "phi0 >= lower bound; increasing toward 1", \
        "; ".join(f"k={k}: " + ", ".join(f"{v:.4f}>={lb:.4f}" for v, lb in r) for k, r in rows.items())


def random_bounded_functions(n: int, seed: int, breaks: int = 5, L: float = 2.0):
    """n piecewise-constant functions on one random partition of [-L, L]."""
    rng = np.random.default_rng(seed)
    br = np.sort(np.concatenate([[-L, L], rng.uniform(-L, L, breaks)]))
    return [fns.piecewise_constant(br, rng.uniform(-1, 1, len(br) - 1)) for _ in range(n)]


def c10_bmo_bmc(seed=0, quick=False):
    k = 0.5
    psis = random_bounded_functions(4 if quick else 10, seed + 10)
    images = riesz_images(psis, k)
    fams = (BallFamily.dyadic(), BallFamily.dyadic().refined())
    Cs = []
    for fam in fams:
        b = max(bmo_norm(r, fam, k).value / p.bound for r, p in zip(images, psis))
        c = max(r.value / p.bound for r, p in zip(bmc_seminorms(images, fam, k), psis))
        Cs.append((b, c))
    db, dc = _drift(Cs[0][0], Cs[1][0]), _drift(Cs[0][1], Cs[1][1])
    ok = db < 0.10 and dc < 0.10
    return ok, {"C_bmo": [c[0] for c in Cs], "C_bmc": [c[1] for c in Cs], "functions": len(psis)}, \
        "C, C' stable (< 10%) under family refinement", \
        f"C = {Cs[0][0]:.4f} -> {Cs[1][0]:.4f}, C' = {Cs[0][1]:.4f} -> {Cs[1][1]:.4f}"


def duality_pairs():
    """(kappa, f parity, phi) for the five duality checks."""
    return [(0.0, "odd", fns.sign()),
            (0.8, "odd", fns.sign()),
            (0.5, "even", fns.chi_interval(-1.0, 1.0)),
            (1.5, "odd", fns.piecewise_constant([-2.0, -0.5, 0.7, 2.0], [0.4, -1.0, 0.8])),
            (0.3, "odd", fns.chi_interval(-0.5, 1.5))]


def c11_duality(seed=0, quick=False):
    pairs = duality_pairs()[:1] if quick else duality_pairs()
    rels = []
    for k, parity, phi in pairs:
        f = clean_frequency(moment_free_gaussian(k, parity), k)
        rels.append(duality_residual(f, phi, k)["rel"])
    worst = max(rels)
    return worst <= 1e-3, {"rel": rels}, "rel <= 1e-3 for 5 pairs, runtime <= 5 min", \
        "rel " + ", ".join(f"{r:.1e}" for r in rels)


def c12_atoms(seed=0, quick=False):
    k = 0.5
    n = 10 if quick else 50
    sups = [max(h1_norm(a, k).value for a in random_atoms(n, k, seed=s))
            for s in (seed + 12, seed + 1012)]
    d = _drift(sups[0], sups[1])
    return d < 0.10, {"sup": sups, "atoms": n}, "sup stable (< 10%) across two seeds", \
        f"sup ||a||_H1 = {sups[0]:.4f} vs {sups[1]:.4f} ({n} atoms each)"


def chain_corpus(k):
    plain = [fns.sign(), fns.chi_interval(-1, 1), fns.chi_interval(0.5, 1.5),
             fns.odd_gaussian(1.0), fns.piecewise_constant([-2, -0.7, 0.4, 2], [0.3, -1, 0.6])]
    sgnchi = fns.Fn(lambda x: np.sign(x) * (np.abs(x) < 2), "sign*chi[-2,2]",
                    breakpoints=(-2.0, 0.0, 2.0), support=(-2.0, 2.0), parity="odd", bound=1.0)
    images = riesz_images([fns.chi_interval(-1, 1), sgnchi], k)
    return plain, images


def c13_orbit_chain(seed=0, quick=False):
    k = 0.5
    plain, images = chain_corpus(k)
    corpus = plain + images
    fams = (BallFamily.dyadic(), BallFamily.dyadic().refined())
    rows = []
    for fam in fams:
        b = [bmo_norm(f, fam, k).value for f in corpus]
        o = [bmo_orbit_norm(f, fam, k).value for f in corpus]
        c = [r.value for r in bmc_seminorms(plain, fam, k)] + \
            [r.value for r in bmc_seminorms(images, fam, k)]
        rows.append((np.array(b), np.array(c), np.array(o)))
    (b0, c0, o0), (b1, c1, o1) = rows
    finite = o1 / o0 < 1.10                  # orbit norm settles under refinement
    C1 = [float(np.max(b / c)) for b, c, _ in rows]
    C2 = [float(np.max(C * c[finite] / o[finite])) for C, (_, c, o) in zip(C1, rows)]
    # Lemma check: odd members with a settled orbit norm are bounded by it
    grid = np.linspace(-4, 4, 2001)
    odd = [i for i, f in enumerate(corpus) if f.parity == "odd" and finite[i]]
    sup = np.array([np.max(np.abs(corpus[i](grid))) for i in odd])
    CL = [float(np.max(sup / o[odd])) for _, _, o in rows]
    ok = all(_drift(a, b) < 0.10 for a, b in (C1, C2, CL)) and bool(np.all(np.isfinite(C1 + C2 + CL)))
    grown = [corpus[i].name for i in np.nonzero(~finite)[0]]
    return ok, {"C1": C1, "C2": C2, "C_lemma": CL, "bmo": b1, "bmc": c1, "orbit": o1,
                "orbit_unsettled": grown}, \
        "bmo <= C1 bmc <= C2 orbit with constants stable (< 10%) under refinement", \
        f"C1 {C1[0]:.3f}->{C1[1]:.3f}, C2 {C2[0]:.3f}->{C2[1]:.3f}, " \
        f"lemma C {CL[0]:.3f}->{CL[1]:.3f}; orbit norm grows for {', '.join(grown) or 'none'}"


CRITERIA = {
    1: ("Plancherel and inversion", c01_plancherel),
    2: ("Poisson pair and semigroup", c02_poisson_pair),
    3: ("Dual-route kernel agreement", c03_dual_route),
    4: ("Cauchy-Riemann residual", c04_cauchy_riemann),
    5: ("Classical reduction", c05_classical),
    6: ("Truncation residual", c06_truncation),
    7: ("Kernel estimate ratios", c07_kernel_ratios),
    8: ("Hormander integral", c08_hormander),
    9: ("phi0 example", c09_phi0),
    10: ("BMO/BMC boundedness", c10_bmo_bmc),
    11: ("Duality identity", c11_duality),
    12: ("Atom uniformity", c12_atoms),
    13: ("Orbit-BMO chain", c13_orbit_chain),
}

QUICK = (1, 2, 3, 5, 7, 9)


def run_one(number: int, seed: int = 0, quick: bool = False) -> CriterionResult:
    title, fn = CRITERIA[number]
    t0 = time.perf_counter()
    try:
        ok, measured, tol, note = fn(seed=seed, quick=quick)
    except Exception as e:                      # a crash is a failure, not an abort
        ok, measured, tol, note = False, {"error": repr(e)}, "", f"error: {e!r}"
    return CriterionResult(number, title, bool(ok), measured, tol, time.perf_counter() - t0, note)


def run(numbers=None, seed: int = 0, quick: bool = False, echo=print) -> list:
    if numbers is None:
        numbers = QUICK if quick else tuple(CRITERIA)
    out = []
    for n in numbers:
        r = run_one(n, seed, quick)
        if echo:
            echo(r.line())
        out.append(r)
    return out


__all__ = ["CriterionResult", "CRITERIA", "QUICK", "run", "run_one", "kernel_ratio_samples",
           "random_bounded_functions", "duality_pairs", "chain_corpus"]
