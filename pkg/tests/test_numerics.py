import math

import numpy as np
import pytest

from dunklkit.errors import DomainError, SingularInteriorUnhandled
from dunklkit.numerics import (QuadratureSpec, adaptive_integrate, bessel_i, gauss_2f1,
                               gauss_2f1_series, gauss_2f1_transformed, graded_points,
                               panel_rule, tail_rule, tanh_sinh, wynn_epsilon)
from dunklkit._backend import core

# mpmath (30 digits) values
HYP = [((0.5, 0.5, 2.0, 0.3), 1.0425304520063578181),
       ((1.5, 1.5, 4.0, 0.999999), 3.3952118328021374187)]


@pytest.mark.parametrize("args,ref", HYP)
def test_2f1_against_mpmath(args, ref):
    assert gauss_2f1(*args) == pytest.approx(ref, rel=1e-12)


def test_2f1_exact_complement_log_case():
    # c - a - b = 0: log singular; 1 - z = 1e-10 passed exactly
    v = core.hyp2f1_vec(0.5, 1.5, 2.0, np.array([1 - 1e-10]), np.array([1e-10]))[0]
    assert v == pytest.approx(15.150557235179065683, rel=1e-11)


def test_2f1_branches_agree():
    for a, b, c in ((0.3, 0.7, 1.9), (1.0, 1.0, 2.0), (0.5, 1.5, 2.0)):
        z = 0.45
        assert gauss_2f1_transformed(a, b, c, z) == pytest.approx(gauss_2f1_series(a, b, c, z), rel=1e-11)


def test_2f1_domain():
    with pytest.raises(DomainError):
        gauss_2f1(0.5, 0.5, 1.0, 1.0)
    with pytest.raises(DomainError):
        gauss_2f1(0.5, 0.5, -2.0, 0.2)


def test_bessel_i_against_mpmath():
    assert bessel_i(0.3, 2.5) == pytest.approx(3.1939093578017904979, rel=1e-12)
    assert bessel_i(1.7, 0.2) == pytest.approx(0.012964850905818777373, rel=1e-12)


@pytest.mark.parametrize("kappa", [0.0, 0.5, 1.3])
def test_panel_rule_weighted_moments(kappa):
    x, w = panel_rule([-2.0, -0.5, 0.0, 1.0, 3.0], 12, kappa)
    for n in (0, 2, 3):
        exact = (3.0 ** (2 * kappa + n + 1) + (-1) ** n * 2.0 ** (2 * kappa + n + 1)) / (2 * kappa + n + 1)
        assert np.dot(w, x ** n) == pytest.approx(exact, rel=1e-12)


def test_tail_rule_power_decay():
    # int_2^inf t^-3 t^{2k} dt with k = 0.25
    t, w = tail_rule(2.0, 12, 0.25)
    assert np.dot(w, t ** -3.0) == pytest.approx(2.0 ** -1.5 / 1.5, rel=1e-9)


def test_adaptive_integrate_known():
    r = adaptive_integrate(lambda x: np.exp(-x * x), -math.inf, math.inf)
    assert r.value == pytest.approx(math.sqrt(math.pi), rel=1e-10)
    spec = QuadratureSpec(singular_points=((0.0, -0.5),))
    r = adaptive_integrate(lambda x: 1 / np.sqrt(np.abs(x)), -1.0, 1.0, spec)
    assert r.value == pytest.approx(4.0, rel=1e-9)


def test_nonintegrable_hint_rejected():
    with pytest.raises(SingularInteriorUnhandled):
        QuadratureSpec(singular_points=((0.0, -1.0),))


def test_tanh_sinh_log_endpoint():
    r = tanh_sinh(lambda x: np.log(x), 0.0, 1.0)
    assert r.value == pytest.approx(-1.0, abs=1e-10)


def test_wynn_accelerates_alternating_series():
    s = np.cumsum([(-1) ** n / (n + 1) for n in range(20)])
    assert wynn_epsilon(s) == pytest.approx(math.log(2), abs=1e-9)


def test_graded_points_symmetric():
    g = graded_points(1.0, 1e-3, 1.0, 3.0)
    assert np.allclose(g - 1.0, -(g[::-1] - 1.0))
    assert 1.0 in g
