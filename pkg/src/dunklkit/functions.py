"""Callable test functions with the metadata the quadrature layer needs.

An ``Fn`` bundles a vectorized callable with its breakpoints (jumps or
kinks), integrable singular points, effective support, parity and decay
information.  Builtins cover the families used in tests and the CLI.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class Fn:
    func: Callable
    name: str = "f"
    breakpoints: tuple = ()
    singular: tuple = ()
    support: tuple | None = None
    parity: str | None = None
    bound: float | None = None
    smooth_tail: bool = True       # analytic in 1/t at infinity
    growth: str = "decay"          # "decay", "bounded", "log" or "power"
    peaks: tuple = ()              # (center, width) pairs of narrow features
    params: dict = field(default_factory=dict, compare=False)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.func(x)

    def features(self) -> list:
        return sorted(set(float(p) for p in self.breakpoints + self.singular))

    def scale(self) -> float:
        pts = [abs(p) for p in self.features()]
        if self.support is not None:
            pts += [abs(self.support[0]), abs(self.support[1])]
        return max([1.0] + pts)

    def renamed(self, name):
        return replace(self, name=name)

    def scaled(self, c: float) -> "Fn":
        g = self.func
        return replace(self, func=lambda x: c * g(x), name=f"{c}*{self.name}",
                       bound=None if self.bound is None else abs(c) * self.bound)

    def dilated(self, s: float) -> "Fn":
        """x -> f(x / s)."""
        g = self.func
        sup = None if self.support is None else (self.support[0] * s, self.support[1] * s)
        return replace(self, func=lambda x: g(x / s), name=f"{self.name}(x/{s})",
                       peaks=tuple((c * s, w * s) for c, w in self.peaks),
                       breakpoints=tuple(p * s for p in self.breakpoints),
                       singular=tuple(p * s for p in self.singular), support=sup)

    def even_part(self) -> "Fn":
        g = self.func
        return replace(self, func=lambda x: 0.5 * (g(x) + g(-x)), parity="even",
                       peaks=_sym_peaks(self.peaks),
                       name=f"even({self.name})",
                       breakpoints=_sym(self.breakpoints), singular=_sym(self.singular),
                       support=_sym_support(self.support))

    def odd_part(self) -> "Fn":
        g = self.func
        return replace(self, func=lambda x: 0.5 * (g(x) - g(-x)), parity="odd",
                       peaks=_sym_peaks(self.peaks),
                       name=f"odd({self.name})",
                       breakpoints=_sym(self.breakpoints), singular=_sym(self.singular),
                       support=_sym_support(self.support))


def _sym(pts):
    return tuple(sorted(set(pts) | {-p for p in pts}))


def _sym_peaks(peaks):
    return tuple(sorted(set(peaks) | {(-c, w) for c, w in peaks}))


def _sym_support(sup):
    if sup is None:
        return None
    r = max(abs(sup[0]), abs(sup[1]))
    return (-r, r)


def combine(terms, name="sum") -> Fn:
    """Linear combination of (coefficient, Fn) pairs."""
    terms = list(terms)
    bps, sing = set(), set()
    sup = []
    growth = "decay"
    order = {"decay": 0, "bounded": 1, "log": 2, "power": 3}
    for _, f in terms:
        bps |= set(f.breakpoints)
        sing |= set(f.singular)
        sup.append(f.support)
        if order[f.growth] > order[growth]:
            growth = f.growth
    support = None
    if all(s is not None for s in sup):
        support = (min(s[0] for s in sup), max(s[1] for s in sup))

    def g(x):
        return sum(c * f(x) for c, f in terms)
    peaks = tuple(p for _, f in terms for p in f.peaks)
    return Fn(g, name, tuple(sorted(bps)), tuple(sorted(sing)), support,
              smooth_tail=all(f.smooth_tail for _, f in terms), growth=growth, peaks=peaks)


# ------------------------------------------------------------ builtins ----

def gaussian(sigma: float = 1.0, center: float = 0.0) -> Fn:
    """exp(-(x-center)^2 / (2 sigma^2)); effective support +-9 sigma."""
    if sigma <= 0:
        raise DomainError("sigma must be positive")
    r = 9.0 * sigma
    return Fn(lambda x: np.exp(-0.5 * ((x - center) / sigma) ** 2), f"gaussian({sigma})",
              support=(center - r, center + r), parity="even" if center == 0 else None,
              bound=1.0, peaks=((center, sigma),), params={"sigma": sigma, "center": center})


def bump(power: int = 8, radius: float = 1.0) -> Fn:
    """(1 - (x/radius)^2)^power on |x| < radius."""
    def g(x):
        u = 1.0 - (x / radius) ** 2
        return np.where(u > 0, np.maximum(u, 0.0) ** power, 0.0)
    return Fn(g, f"bump({power},{radius})", breakpoints=(-radius, radius),
              support=(-radius, radius), parity="even", bound=1.0,
              params={"power": power, "radius": radius})


def chi_interval(a: float = -1.0, b: float = 1.0) -> Fn:
    if not a < b:
        raise DomainError("need a < b")
    return Fn(lambda x: ((x >= a) & (x < b)).astype(float), f"chi[{a},{b})",
              breakpoints=(a, b), support=(a, b), bound=1.0,
              params={"a": a, "b": b})


def sign() -> Fn:
    return Fn(np.sign, "sign", breakpoints=(0.0,), parity="odd", bound=1.0,
              growth="bounded")


def constant(c: float = 1.0) -> Fn:
    return Fn(lambda x: np.full_like(x, c, dtype=float), f"const({c})", parity="even",
              bound=abs(c), growth="bounded")


def log_abs(center: float = 0.0) -> Fn:
    """log|x - center|: the standard unbounded BMO example."""
    def g(x):
        with np.errstate(divide="ignore"):
            return np.log(np.abs(x - center))
    return Fn(g, f"log|x-{center}|", singular=(center,), smooth_tail=False, growth="log",
              parity="even" if center == 0 else None, params={"center": center})


def piecewise_constant(breaks, values) -> Fn:
    """values[i] on [breaks[i], breaks[i+1]), zero outside."""
    br = np.asarray(breaks, dtype=float)
    vals = np.asarray(values, dtype=float)
    if len(vals) != len(br) - 1 or np.any(np.diff(br) <= 0):
        raise DomainError("need increasing breaks and len(values) == len(breaks) - 1")

    def g(x):
        idx = np.searchsorted(br, x, side="right") - 1
        inside = (idx >= 0) & (idx < len(vals))
        return np.where(inside, vals[np.clip(idx, 0, len(vals) - 1)], 0.0)
    return Fn(g, "piecewise", breakpoints=tuple(br), support=(br[0], br[-1]),
              bound=float(np.max(np.abs(vals))), params={"breaks": br.tolist(), "values": vals.tolist()})


def sqrt_growth() -> Fn:
    """(1 + |x|)^{1/2}: a function of polynomial growth outside L^infinity."""
    return Fn(lambda x: np.sqrt(1 + np.abs(x)), "sqrt(1+|x|)", breakpoints=(0.0,),
              smooth_tail=False, growth="power", parity="even")


def odd_gaussian(sigma: float = 1.0) -> Fn:
    return Fn(lambda x: x / sigma * np.exp(-0.5 * (x / sigma) ** 2), f"x*gaussian({sigma})",
              support=(-9 * sigma, 9 * sigma), parity="odd", bound=math.exp(-0.5),
              peaks=((0.0, sigma),))


def poisson_p(x0: float, kappa: float) -> Fn:
    """t -> P_kappa(x0, 0, t) = m_kappa x0 (x0^2 + t^2)^{-kappa-1}."""
    from .dunkl_core import MultiplicityConfig
    m = MultiplicityConfig(kappa).m_kappa
    return Fn(lambda t: m * x0 * (x0 * x0 + t * t) ** (-kappa - 1.0), f"P({x0})",
              parity="even", bound=m * x0 ** (-2 * kappa - 1), peaks=((0.0, x0),), params={"x0": x0, "kappa": kappa})


def from_samples(x, y, name="samples") -> Fn:
    """Piecewise-linear interpolant of tabulated data, zero outside."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(np.diff(x) <= 0):
        raise DomainError("sample abscissae must increase")
    return Fn(lambda t: np.interp(t, x, y, left=0.0, right=0.0), name,
              breakpoints=(x[0], x[-1]), support=(x[0], x[-1]))


BUILTINS = {
    "gaussian": gaussian,
    "bump": bump,
    "chi": chi_interval,
    "sign": sign,
    "const": constant,
    "log": log_abs,
    "odd_gaussian": odd_gaussian,
    "sqrt_growth": sqrt_growth,
}
# hyphenated spellings used on the command line
BUILTINS.update({"chi-interval": chi_interval, "log-abs": log_abs,
                 "odd-gaussian": odd_gaussian, "sqrt-growth": sqrt_growth})


def parse_fn(spec: str) -> Fn:
    """Parse ``name`` or ``name:arg1,arg2`` into a builtin Fn."""
    name, _, args = spec.partition(":")
    if name not in BUILTINS:
        raise DomainError(f"unknown function {name!r}; choose from {sorted(BUILTINS)}")
    vals = [float(a) for a in args.split(",") if a.strip()]
    if name == "bump" and vals:
        vals[0] = int(vals[0])
    return BUILTINS[name](*vals)
