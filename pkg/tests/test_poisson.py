import numpy as np
import pytest

from dunklkit import conjugate_kernel, poisson_integral, poisson_kernel
from dunklkit import functions as fns
from dunklkit.poisson import (cauchy_riemann_residual, laplacian_residual, poisson_bounds,
                              poisson_kernel_subordinated)

# mpmath, from the intertwining integral of the classical kernel
ORACLE = [((0.5, 1.0, 0.7, -0.4), 0.39202718657380826547),
          ((1.5, 0.3, -1.2, 0.9), 0.18139284381951754948),
          ((0.6, 2.0, 0.5, 0.5), 0.21304346401368095004)]


@pytest.mark.parametrize("args,ref", ORACLE)
def test_kernel_against_mpmath(args, ref):
    k, x0, x, t = args
    assert float(poisson_kernel((x0, x), t, k)) == pytest.approx(ref, rel=1e-12)
    assert poisson_kernel_subordinated((x0, x), t, k) == pytest.approx(ref, rel=1e-9)


def test_kappa_zero_is_classical():
    # kernels exclude c_kappa; c_0 P is the classical Poisson kernel
    x0, x, t = 0.4, 0.3, -1.0
    c0 = 0.39894228040143267794
    assert c0 * float(poisson_kernel((x0, x), t, 0.0)) == pytest.approx(x0 / np.pi / (x0 ** 2 + (x - t) ** 2), rel=1e-13)


def test_total_mass_one():
    k = 0.7
    assert poisson_integral(fns.constant(1.0), (0.3, 0.8), k) == pytest.approx(1.0, abs=1e-9)


def test_conjugate_kernel_limit_is_riesz():
    # x0 -> 0 limit of the conjugate kernel at (x, t) = (1, -0.3), kappa 1/2
    v = float(conjugate_kernel((1e-7, 1.0), -0.3, 0.5))
    assert v == pytest.approx(0.90698686981392655043, rel=1e-6)


@pytest.mark.parametrize("k", [0.0, 1.2])
def test_harmonic(k):
    f = fns.gaussian(1.0)
    r1, r2 = cauchy_riemann_residual(f, (0.5, 0.7), k)
    assert max(abs(r1), abs(r2)) < 1e-6
    assert abs(laplacian_residual(f, (0.5, 0.7), k)) < 1e-4


def test_two_sided_bounds_hold():
    rng = np.random.default_rng(2)
    x0 = 10 ** rng.uniform(-2, 1, 500)
    x, t = rng.uniform(-5, 5, (2, 500))
    P = np.array([float(poisson_kernel((a, b), c, 0.5)) for a, b, c in zip(x0, x, t)])
    lo, hi = poisson_bounds(x0, x, t, 0.5)
    r_lo, r_hi = P / lo, P / hi
    assert r_lo.min() > 0.05 and r_hi.max() < 20
