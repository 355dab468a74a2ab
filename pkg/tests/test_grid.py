import math

import numpy as np
import pytest

from src.errors import DiscretizationError, GridMismatchError
from src.expressions import X, const, exp_, mul, power
from src.grid import GridFunction, cumulative_integral, cumulative_quadrature, inner_product, make_grid, sample


def test_samples_include_both_ends():
    g = make_grid(-1.0, 1.0, 21)
    assert g.samples[0] == -1.0
    assert g.samples[-1] == 1.0
    assert g.spacing == pytest.approx(0.1)


@pytest.mark.parametrize("args", [(-1.0, 1.0, 8), (1.0, 1.0, 64), (2.0, -2.0, 64), (-np.inf, 1.0, 64), (-1.0, 1.0, 64.5)])
def test_invalid_grids_rejected(args):
    with pytest.raises(DiscretizationError):
        make_grid(*args)


def test_interior_is_central_fraction():
    g = make_grid(-10.0, 10.0, 201)
    region = g.interior(0.9)
    x = g.samples[region]
    assert x[0] == pytest.approx(-9.0)
    assert x[-1] == pytest.approx(9.0)


def test_gaussian_norm(grid):
    gauss = sample(grid, exp_(mul(-1.0, power(X, 2))))
    assert inner_product(gauss, gauss) == pytest.approx(math.sqrt(math.pi / 2.0), rel=1e-10)


def test_normalized_function_has_unit_norm(grid):
    f = sample(grid, exp_(mul(-0.5, power(X, 2)))) * 3.0
    assert f.normalized().norm() == pytest.approx(1.0, rel=1e-12)


def test_wrong_sample_count_rejected(grid):
    with pytest.raises(DiscretizationError):
        GridFunction(grid, np.zeros(grid.n - 1))


def test_mixing_grids_rejected(grid, small_grid):
    f = sample(grid, X)
    g = sample(small_grid, X)
    with pytest.raises(GridMismatchError):
        inner_product(f, g)
    with pytest.raises(GridMismatchError):
        f + g


def test_cumulative_integral_of_polynomial(small_grid):
    F = cumulative_integral(power(X, 2), 0.0, small_grid)
    assert np.allclose(F.values, small_grid.samples ** 3 / 3.0, rtol=1e-12, atol=1e-9)


def test_cumulative_quadrature_anchor_and_sign():
    values = cumulative_quadrature(np.cos, 0.0, np.array([-1.0, 0.0, 2.0]))
    assert values == pytest.approx([-math.sin(1.0), 0.0, math.sin(2.0)], abs=1e-13)


def test_constant_integrand(small_grid):
    F = cumulative_integral(const(2.0), 1.0, small_grid)
    assert np.allclose(F.values, 2.0 * (small_grid.samples - 1.0), atol=1e-10)


def test_quadrature_error_falls_with_spacing():
    errors = []
    for n in (65, 129):
        box = make_grid(0.0, 1.0, n)
        f = sample(box, exp_(X))
        one = GridFunction(box, np.ones(n))
        errors.append(abs(inner_product(f, one) - (math.e - 1.0)))
    assert errors[1] > 0.0
    assert errors[0] / errors[1] >= 8.0


def test_inner_product_is_conjugate_symmetric(small_grid):
    x = small_grid.samples
    f = GridFunction(small_grid, np.exp(1j * x - 0.5 * x ** 2))
    g = GridFunction(small_grid, (1.0 + 2j * x) * np.exp(-0.25 * x ** 2))
    assert inner_product(f, g) == pytest.approx(np.conj(inner_product(g, f)), abs=1e-14)
    assert inner_product(f, f) == pytest.approx(math.sqrt(math.pi), rel=1e-10)
