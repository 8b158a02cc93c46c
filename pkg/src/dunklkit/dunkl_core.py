"""Multiplicity configuration, weights, ball measures, the Dunkl kernel, the
rank-one intertwining measure and the Dunkl derivative.

Rank one means the reflection group Z_2 acting on the real line; the
measure is ``d omega_kappa = |x|^{2 kappa} dx``.  Products Z_2^d are
supported where they factor coordinatewise (weight, kernels, constants).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Callable

import numpy as np
from scipy.special import jv, roots_genlaguerre

from ._backend import core
from .errors import DomainError, NonConvergence, StepUnderflow
from .numerics import gauss_jacobi


@dataclass(frozen=True)
class MultiplicityConfig:
    """Multiplicity ``kappa >= 0``: a scalar (rank one) or one value per
    Z_2 factor of a product group."""

    kappa: float | tuple = 0.0

    def __post_init__(self):
        ks = self.kappas
        if any((not math.isfinite(k)) or k < 0 for k in ks):
            raise DomainError(f"multiplicity must be finite and >= 0, got {self.kappa}")

    @property
    def kappas(self) -> tuple:
        k = self.kappa
        return tuple(float(v) for v in k) if isinstance(k, (tuple, list)) else (float(k),)

    @property
    def d(self) -> int:
        return len(self.kappas)

    @property
    def rank_one(self) -> bool:
        return self.d == 1

    @property
    def k(self) -> float:
        """Scalar multiplicity (rank one only)."""
        if not self.rank_one:
            raise DomainError("scalar kappa requested for a product configuration")
        return self.kappas[0]

    @property
    def abs_kappa(self) -> float:
        return float(sum(self.kappas))

    @property
    def N(self) -> float:
        """Homogeneous dimension 2|kappa| + d."""
        return 2.0 * self.abs_kappa + self.d

    @cached_property
    def c_kappa(self) -> float:
        """Normalization: 1 / int exp(-|x|^2/2) d omega_kappa."""
        return math.prod(1.0 / (2.0 ** (k + 0.5) * math.gamma(k + 0.5)) for k in self.kappas)

    @cached_property
    def c_dk(self) -> float:
        """Poisson-kernel constant c_{d,kappa}."""
        a = self.abs_kappa
        return 2.0 ** (a + self.d / 2) * math.gamma(a + (self.d + 1) / 2) / math.sqrt(math.pi)

    @cached_property
    def m_kappa(self) -> float:
        return 2.0 ** (self.k + 0.5) * math.gamma(self.k + 1.0) / math.sqrt(math.pi)

    def __hash__(self):
        return hash(self.kappas)


def as_config(cfg) -> MultiplicityConfig:
    return cfg if isinstance(cfg, MultiplicityConfig) else MultiplicityConfig(cfg)


# ------------------------------------------------------------ measures ----

def weight(x, cfg):
    """W_kappa(x): |x|^{2 kappa} in rank one, coordinate product otherwise
    (last axis of ``x`` indexes coordinates)."""
    cfg = as_config(cfg)
    x = np.asarray(x, dtype=float)
    if cfg.rank_one:
        return np.abs(x) ** (2 * cfg.k)
    if x.shape[-1] != cfg.d:
        raise DomainError("point dimension does not match configuration")
    return np.prod(np.abs(x) ** (2 * np.asarray(cfg.kappas)), axis=-1)


def _antiderivative(x, k):
    return np.sign(x) * np.abs(x) ** (2 * k + 1) / (2 * k + 1)


def ball_measure(center, radius, cfg):
    """|B_r(x')|_kappa = int_{x'-r}^{x'+r} |x|^{2 kappa} dx (rank one)."""
    cfg = as_config(cfg)
    r = np.asarray(radius, dtype=float)
    if np.any(r <= 0):
        raise DomainError("radius must be positive")
    c = np.asarray(center, dtype=float)
    out = _antiderivative(c + r, cfg.k) - _antiderivative(c - r, cfg.k)
    return float(out) if np.ndim(out) == 0 else out


def orbit_ball_measure(center, radius, cfg):
    """Measure of the orbit B u (-B) of a ball."""
    cfg = as_config(cfg)
    c = np.abs(np.asarray(center, dtype=float))
    r = np.asarray(radius, dtype=float)
    if np.any(r <= 0):
        raise DomainError("radius must be positive")
    overlap = c < r
    union = 2 * _antiderivative(c + r, cfg.k)
    disjoint = 2 * (_antiderivative(c + r, cfg.k) - _antiderivative(c - r, cfg.k))
    out = np.where(overlap, union, disjoint)
    return float(out) if np.ndim(out) == 0 else out


def orbit_distance(x, t):
    """Rank-one orbit distance min(|x - t|, |x + t|), elementwise."""
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    per = np.minimum(np.abs(x - t), np.abs(x + t))
    return float(per) if per.ndim == 0 else per


def orbit_distance_nd(x, t):
    """Orbit distance for points of R^d under Z_2^d."""
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    per = np.minimum(np.abs(x - t), np.abs(x + t))
    return np.sqrt(np.sum(per ** 2, axis=-1))


# ---------------------------------------------------- intertwining ----

def intertwining_constant(k: float) -> float:
    return math.gamma(k + 0.5) / (math.sqrt(math.pi) * math.gamma(k))


def intertwining_density(x: float, xi, cfg):
    """Density of mu_x on (-|x|, |x|) against Lebesgue measure in xi."""
    cfg = as_config(cfg)
    k = cfg.k
    if k == 0:
        raise DomainError("kappa = 0: mu_x is the point mass at x (atomic branch)")
    if x == 0:
        raise DomainError("x must be nonzero")
    xi = np.asarray(xi, dtype=float)
    if np.any(np.abs(xi) >= abs(x)):
        raise DomainError("xi must lie strictly inside (-|x|, |x|)")
    s = xi / x
    out = intertwining_constant(k) * (1 + s) * (1 - s * s) ** (k - 1) / abs(x)
    return float(out) if out.ndim == 0 else out


def intertwining_is_atomic(cfg) -> bool:
    return as_config(cfg).k == 0


def intertwining_rule(cfg, n: int = 64):
    """Nodes ``s`` in (-1, 1) and weights for ``int g(s x) d mu_x``:
    Gauss-Jacobi for (1-s)^{k-1} (1+s)^k times the normalizing constant."""
    k = as_config(cfg).k
    if k == 0:
        return np.array([1.0]), np.array([1.0])
    s, w = gauss_jacobi(n, k - 1.0, k)
    return s, w * intertwining_constant(k)


def intertwine(g: Callable, x, cfg, n: int = 64):
    """(V_kappa g)(x) = int g(xi) d mu_x(xi) for smooth g."""
    s, w = intertwining_rule(cfg, n)
    x = np.asarray(x, dtype=float)
    vals = g(x[..., None] * s)
    return vals @ w


# ------------------------------------------------------- the kernel ----

def _kernel_closed(x, y, k):
    z = np.asarray(x, dtype=float) * np.asarray(y, dtype=float)
    zz = np.atleast_1d(z).ravel()
    out = np.exp(np.abs(zz)) * core.dunkl_scaled(k, zz)
    return out.reshape(np.shape(z))


def dunkl_kernel(x, y, cfg, method: str = "intertwining"):
    """E_kappa(x, y) for real arguments.

    ``method="intertwining"`` integrates exp(xi y) against mu_x by
    Gauss-Jacobi; ``"closed"`` uses exp(xy) 1F1(k; 2k+1; -2xy) from the
    compiled core.  For product configurations, x and y carry coordinates
    on the last axis and the kernel is the coordinate product.
    """
    cfg = as_config(cfg)
    if not cfg.rank_one:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        out = 1.0
        for j, k in enumerate(cfg.kappas):
            out = out * dunkl_kernel(x[..., j], y[..., j], MultiplicityConfig(k), method)
        return out
    k = cfg.k
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if k == 0:
        out = np.exp(x * y)
    elif method == "closed":
        out = _kernel_closed(x, y, k)
    elif method == "intertwining":
        z = np.broadcast_to(x * y, np.broadcast(x, y).shape)
        n = int(min(600, 48 + 2 * np.max(np.abs(z), initial=0.0)))
        s, w = intertwining_rule(cfg, n)
        s2, w2 = intertwining_rule(cfg, n + 16)
        out = np.exp(z[..., None] * s) @ w
        alt = np.exp(z[..., None] * s2) @ w2
        if np.any(np.abs(out - alt) > 1e-10 * np.abs(out)):
            raise NonConvergence("intertwining quadrature for E_kappa did not settle")
    else:
        raise DomainError(f"unknown method {method!r}")
    return float(out) if np.ndim(out) == 0 else out


@lru_cache(maxsize=None)
def _laguerre(n, alpha):
    x, w = roots_genlaguerre(n, alpha)
    return x, w


def _scaled_rule(z, k, n):
    # exp(-|z|) int exp(z s) d mu(s), vectorized over z
    C = intertwining_constant(k)
    a = np.abs(z)
    out = np.empty_like(z)
    mid = a <= 20.0
    if mid.any():
        s, w = intertwining_rule(MultiplicityConfig(k), n)
        out[mid] = np.exp(z[mid, None] * s - a[mid, None]) @ w
    for sel, alpha, power, shift in ((z > 20.0, k - 1.0, k, -k), (z < -20.0, k, k - 1.0, -k - 1.0)):
        if sel.any():
            # boundary layer at s = sign(z): w = |z| (1 -+ s)
            u, wt = _laguerre(n, alpha)
            aa = a[sel, None]
            g = np.where(u < 2 * aa, np.abs(2 - u / aa) ** power, 0.0)
            out[sel] = C * a[sel] ** shift * (g @ wt)
    return out


def dunkl_kernel_scaled(z, cfg):
    """exp(-|z|) E_kappa(z, 1) from the intertwining integral, stable for
    large |z| (Gauss-Laguerre in the boundary layer at s = sign(z))."""
    k = as_config(cfg).k
    z = np.asarray(z, dtype=float)
    if k == 0:
        out = np.where(z >= 0, 1.0, np.exp(-2 * np.abs(z)))
        return float(out) if out.ndim == 0 else out
    flat = np.ascontiguousarray(z.ravel())
    lo = _scaled_rule(flat, k, 64)
    out = _scaled_rule(flat, k, 80)
    bad = np.abs(lo - out) > 1e-11 * np.abs(out)
    if bad.any():
        raise NonConvergence("scaled intertwining quadrature did not settle",
                             out, float(np.max(np.abs(lo - out))))
    out = out.reshape(z.shape)
    return float(out) if out.ndim == 0 else out


def bessel_j_normalized(alpha: float, r):
    """j_alpha(r) = Gamma(alpha+1) (2/r)^alpha J_alpha(r), even in r, j(0) = 1."""
    r = np.abs(np.asarray(r, dtype=float))
    out = np.empty_like(r)
    small = r < 2.0
    if np.any(small):
        q = -0.25 * r[small] ** 2
        s = np.ones_like(q)
        t = np.ones_like(q)
        for n in range(1, 40):
            t = t * q / (n * (alpha + n))
            s = s + t
        out[small] = s
    big = ~small
    if np.any(big):
        rb = r[big]
        out[big] = np.exp(math.lgamma(alpha + 1) + alpha * np.log(2.0 / rb)) * jv(alpha, rb)
    return out


def kernel_parts(k: float, r):
    """Even and odd parts of E_kappa(i r, 1): (j_{k-1/2}(r), r j_{k+1/2}(r)/(2k+1))."""
    r = np.asarray(r, dtype=float)
    if k == 0:
        return np.cos(r), np.sin(r)
    je = bessel_j_normalized(k - 0.5, r)
    jo = r / (2 * k + 1) * bessel_j_normalized(k + 0.5, r)
    return je, jo


def dunkl_kernel_i(x, xi, cfg, method: str = "bessel"):
    """E_kappa(x, i xi) as a complex number (array).

    ``"bessel"`` uses normalized Bessel functions; ``"intertwining"``
    integrates exp(i s x xi) against mu_x.  The bound |E| <= 1 is checked.
    """
    cfg = as_config(cfg)
    if not cfg.rank_one:
        x = np.asarray(x, dtype=float)
        xi = np.asarray(xi, dtype=float)
        out = 1.0 + 0j
        for j, k in enumerate(cfg.kappas):
            out = out * dunkl_kernel_i(x[..., j], xi[..., j], MultiplicityConfig(k), method)
        return out
    k = cfg.k
    r = np.asarray(x, dtype=float) * np.asarray(xi, dtype=float)
    if method == "bessel":
        je, jo = kernel_parts(k, r)
        out = je + 1j * jo
    elif method == "intertwining":
        if k == 0:
            out = np.exp(1j * r)
        else:
            n = int(min(800, 48 + 2 * np.max(np.abs(r), initial=0.0)))
            s, w = intertwining_rule(cfg, n)
            out = np.exp(1j * r[..., None] * s) @ w
    else:
        raise DomainError(f"unknown method {method!r}")
    if np.any(np.abs(out) > 1.0 + 1e-12):
        raise NonConvergence("|E_kappa(x, i xi)| exceeded 1")
    return complex(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------- Dunkl derivative ----

def _five_point(f, x, h):
    return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h)


def dunkl_derivative(f: Callable, x: float, cfg, fprime: Callable | None = None,
                     h: float | None = None, axis: int | None = None) -> float:
    """Df(x) = f'(x) + kappa (f(x) - f(-x)) / x.

    ``f'`` comes from ``fprime`` when given, else a 5-point central
    difference.  For |x| < 1e-6 * scale the limit (1 + 2 kappa) f'(0) is
    used.  For products pass the coordinate index ``axis``; ``x`` is then
    a point of R^d.
    """
    cfg = as_config(cfg)
    if axis is not None:
        xv = np.asarray(x, dtype=float)
        k = cfg.kappas[axis]
        xj = float(xv[axis])

        def along(s):
            p = xv.copy()
            p[axis] = s
            return f(p)
        return dunkl_derivative(along, xj, MultiplicityConfig(k), fprime=None, h=h)

    k = cfg.k
    x = float(x)
    scale = max(1.0, abs(x))
    if h is None:
        h = 1e-3 * scale
    if h < 1e-300 or x + h == x:
        raise StepUnderflow("finite-difference step underflowed")
    deriv = fprime if fprime is not None else (lambda s: _five_point(f, s, h))
    if abs(x) < 1e-6 * scale:
        return float((1 + 2 * k) * deriv(0.0))
    return float(deriv(x) + k * (f(x) - f(-x)) / x)


def intertwining_moment_recursion(n: int, k: float) -> float:
    """m_n with V_kappa(xi^n)(x) = m_n x^n, from D V = V d/dx on monomials:
    m_n (n + 2 kappa [n odd]) = n m_{n-1}, m_0 = 1."""
    m = 1.0
    for j in range(1, n + 1):
        m *= j / (j + (2 * k if j % 2 else 0.0))
    return m
