"""The compiled core and the numpy fallback must agree."""
import numpy as np
import pytest

from dunklkit import _core_py
from dunklkit._backend import BACKEND

compiled = pytest.importorskip("dunklkit._core")

rng = np.random.default_rng(11)


def test_selected_backend():
    assert BACKEND in ("cython", "python")


@pytest.mark.parametrize("kappa", [0.0, 0.3, 0.5, 1.0, 1.5, 2.7])
def test_riesz_kernel_agree(kappa):
    x = rng.uniform(-4, 4, 400)
    t = rng.uniform(-4, 4, 400)
    t[:20] = -x[:20] * (1 + 1e-9)        # near the reflected point
    a = compiled.riesz_kernel(kappa, x, t)
    b = _core_py.riesz_kernel(kappa, x, t)
    assert np.allclose(a, b, rtol=1e-12, atol=0)


@pytest.mark.parametrize("kappa", [0.0, 0.6, 1.4])
def test_poisson_agree(kappa):
    x0 = 10 ** rng.uniform(-3, 1, 300)
    x, t = rng.uniform(-3, 3, (2, 300))
    assert np.allclose(compiled.poisson_kernel(kappa, x0, x, t),
                       _core_py.poisson_kernel(kappa, x0, x, t), rtol=1e-12, atol=0)
    ga = compiled.poisson_grad(kappa, x0, x, t)
    gb = _core_py.poisson_grad(kappa, x0, x, t)
    for u, v in zip(ga, gb):
        assert np.allclose(u, v, rtol=1e-10, atol=1e-300)


@pytest.mark.parametrize("abc", [(0.5, 0.5, 2.0), (0.8, 1.8, 2.6), (1.5, 1.5, 4.0), (0.3, 1.1, 1.4)])
def test_hyp2f1_agree(abc):
    z = np.concatenate([rng.uniform(0, 1, 200), 1 - 10.0 ** -rng.uniform(3, 15, 50)])
    y = 1 - z
    assert np.allclose(compiled.hyp2f1_vec(*abc, z, y), _core_py.hyp2f1_vec(*abc, z, y), rtol=1e-12)


def test_dunkl_scaled_agree():
    z = rng.uniform(-30, 30, 200)
    for k in (0.2, 1.5):
        assert np.allclose(compiled.dunkl_scaled(k, z), _core_py.dunkl_scaled(k, z), rtol=1e-12)
