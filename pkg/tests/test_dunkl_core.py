import math

import numpy as np
import pytest

from dunklkit import MultiplicityConfig, ball_measure, dunkl_derivative, dunkl_kernel, dunkl_kernel_i
from dunklkit.errors import DomainError

# mpmath references
C_KAPPA = {0.0: 0.39894228040143267794, 0.5: 0.5, 1.5: 0.25}
M_KAPPA = {0.0: 0.79788456080286535588, 0.5: 1.0, 1.5: 3.0}


@pytest.mark.parametrize("k", sorted(C_KAPPA))
def test_constants(k):
    cfg = MultiplicityConfig(k)
    assert cfg.c_kappa == pytest.approx(C_KAPPA[k], rel=1e-14)
    assert cfg.m_kappa == pytest.approx(M_KAPPA[k], rel=1e-14)


@pytest.mark.parametrize("bad", [-0.1, math.nan, math.inf])
def test_bad_multiplicity(bad):
    with pytest.raises(DomainError):
        MultiplicityConfig(bad)


def test_ball_measure_closed_form():
    # |B(0.5, 0.5)| at kappa = 1/2 is int_0^1 |x| dx
    assert ball_measure(0.5, 0.5, 0.5) == pytest.approx(0.5, rel=1e-14)
    assert ball_measure(0.0, 2.0, 0.0) == pytest.approx(4.0)


@pytest.mark.parametrize("args,ref", [((0.7, 1.3, 0.5), 1.7217411238631861606),
                                      ((-0.7, 1.3, 1.5), 0.86353504992108059531),
                                      ((2.0, 1.5, 0.3), 11.487691068595433942)])
def test_kernel_against_mpmath(args, ref):
    assert dunkl_kernel(*args) == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("args,ref", [((0.7, 2.0, 0.5), 0.5668551203742887695 + 0.54194771393085451719j),
                                      ((-1.1, 3.0, 1.5), 0.13373542605166118505 - 0.28971617360639141978j)])
def test_oscillatory_kernel_against_mpmath(args, ref):
    v = dunkl_kernel_i(*args)
    assert abs(v - ref) <= 1e-12 * abs(ref)


def test_kappa_zero_is_exponential():
    assert dunkl_kernel(0.8, -1.7, 0.0) == pytest.approx(math.exp(-1.36), rel=1e-13)
    assert dunkl_kernel_i(0.8, 1.7, 0.0) == pytest.approx(np.exp(1j * 1.36), rel=1e-13)


def test_kernel_is_eigenfunction():
    # T_x E(x, y) = y E(x, y)
    k, y = 0.7, 1.3
    for x in (0.4, -1.1, 2.0):
        Tx = dunkl_derivative(lambda s: dunkl_kernel(s, y, k), x, k)
        assert Tx == pytest.approx(y * dunkl_kernel(x, y, k), rel=1e-7)


def test_dunkl_derivative_of_odd_monomial():
    # T x = 1 + 2k
    k = 0.9
    assert dunkl_derivative(lambda s: s, 0.6, k, fprime=lambda s: 1.0) == pytest.approx(1 + 2 * k)
