import math

import numpy as np
import pytest

from dunklkit import functions as fns
from dunklkit import phi0_example, riesz_kernel, riesz_pv, riesz_transform_l2, truncated_riesz
from dunklkit.errors import SingularPoint
from dunklkit.riesz import (hormander_integral, riesz_kernel_subordinated, riesz_limit,
                            riesz_values)

# mpmath; K excludes c_kappa
K_ORACLE = [((1.0, 0.3, 0.5), 1.2404973742774689296),
            ((1.0, -0.3, 0.5), 0.90698686981392655043),
            ((-2.0, 0.7, 1.5), -0.18428997430999022893),
            ((0.4, 1.9, 0.6), -0.29865314699525588912)]


@pytest.mark.parametrize("args,ref", K_ORACLE)
def test_kernel_against_mpmath(args, ref):
    assert riesz_values(*args) == pytest.approx(ref, rel=1e-12)
    assert riesz_kernel(*args).value == pytest.approx(ref, rel=1e-12)


def test_subordination_route_agrees():
    for x, t, k in ((1.0, 0.3, 0.5), (-2.0, 0.7, 1.5)):
        assert riesz_kernel_subordinated(x, t, k) == pytest.approx(riesz_values(x, t, k), rel=1e-9)


def test_axis_points_match_closed_form():
    assert riesz_kernel(0.0, 0.7, 0.5).value == pytest.approx(riesz_values(0.0, 0.7, 0.5), rel=1e-10)


def test_antisymmetry():
    rng = np.random.default_rng(5)
    x, t = rng.uniform(-3, 3, (2, 100))
    assert np.allclose(riesz_values(x, t, 0.8), -riesz_values(t, x, 0.8), rtol=1e-12)


def test_singular_on_orbit():
    with pytest.raises(SingularPoint):
        riesz_kernel(1.0, -1.0, 0.5)


def test_classical_hilbert():
    ref = math.log(3.0) / math.pi          # H^0.1 chi[-1,1](2)
    assert truncated_riesz(fns.chi_interval(-1, 1), 0.1, 2.0, 0.0) == pytest.approx(ref, abs=1e-9)


@pytest.mark.parametrize("k", [0.0, 0.5, 1.5])
def test_pv_matches_spectral(k):
    f = fns.odd_gaussian(1.0)
    xs = np.array([-2.0, -1.3, 0.4, 1.0, 2.0, 4.0])   # binade edges included
    spec = riesz_transform_l2(f, k, x=xs)
    pv = np.array([riesz_pv(f, x, k) for x in xs])
    assert np.allclose(pv, spec, atol=1e-10)


def test_truncation_limit():
    r = riesz_limit(fns.gaussian(1.0), 0.8, 0.5)
    assert r["discrepancy"] < 1e-4


PHI0 = [((0.5, 1.1), 0.73951795717509847295), ((1.0, 1.01), 1.3563050143833940979),
        ((0.0, 1.1), 0.96910159063573969689)]


@pytest.mark.parametrize("args,ref", PHI0)
def test_phi0_against_mpmath(args, ref):
    k, x = args
    v, lb = phi0_example(x, k)
    assert v == pytest.approx(ref, rel=1e-10)
    assert v >= lb


def test_hormander_kappa_zero_closed_form():
    # m_0 ln 3
    assert hormander_integral(0.5, 0.6, 0.0, 0.0) == pytest.approx(0.87656578343658543327, rel=1e-8)
