import numpy as np
import pytest

from dunklkit import Grid, forward_transform, inverse_transform, sample
from dunklkit import functions as fns
from dunklkit.transform import l2_distance, plancherel_residual


@pytest.mark.parametrize("k", [0.0, 0.5, 1.5])
def test_gaussian_is_self_dual(k):
    g = Grid.frequency(k, 12.0)
    F = forward_transform(fns.gaussian(1.0), g, k)
    assert np.max(np.abs(F.values - np.exp(-g.nodes ** 2 / 2))) < 1e-10


@pytest.mark.parametrize("k", [0.0, 0.8])
def test_plancherel_and_round_trip(k):
    f = fns.bump(8, 1.0)
    g = Grid.for_function(f, k, width=0.25)
    fs = sample(f, g)
    F = forward_transform(f, Grid.frequency(k, 40.0), k)
    assert plancherel_residual(fs, F) < 1e-6
    back = inverse_transform(F, g)
    assert l2_distance(fs, back) / fs.norm(2) < 1e-6


def test_odd_input_has_imaginary_transform():
    k = 0.5
    g = Grid.frequency(k, 10.0)
    F = forward_transform(fns.odd_gaussian(1.0), g, k)
    assert np.max(np.abs(F.values.real)) < 1e-12
    assert np.max(np.abs(F.values.imag)) > 0.1


def test_poisson_profile_transform():
    k = 0.5
    g = Grid.frequency(k, 20.0)
    F = forward_transform(fns.poisson_p(1.0, k), g, k)
    assert np.max(np.abs(F.values - np.exp(-np.abs(g.nodes)))) < 1e-6
