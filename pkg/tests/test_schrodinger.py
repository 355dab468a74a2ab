import numpy as np
import pytest

from src.errors import ConfigError, DomainError
from src.expressions import X, add, const, mul, power
from src.grid import make_grid
from src.schrodinger import eigensolve, hamiltonian, separable_2d


@pytest.fixture(scope="module")
def harmonic(grid):
    return eigensolve(hamiltonian(mul(0.5, power(X, 2))), grid, 10, label="H_osc")


def test_oscillator_levels(harmonic):
    expected = np.arange(10) + 0.5
    assert np.allclose(harmonic.energies, expected, rtol=1e-6)
    assert np.max(harmonic.residuals) < 1e-8


def test_states_are_normalized_with_fixed_sign(harmonic):
    for psi in harmonic.states:
        assert psi.norm() == pytest.approx(1.0, rel=1e-12)
    ground = harmonic.states[0].values
    assert ground[np.argmax(np.abs(ground))] > 0


def test_zero_referenced(harmonic):
    shifted = harmonic.zero_referenced()
    assert shifted[0] == 0.0
    assert np.allclose(np.diff(shifted), 1.0, rtol=1e-6)


def test_grid_refinement_is_stable():
    H = hamiltonian(add(mul(0.5, power(X, 2)), mul(0.1, power(X, 4))))
    coarse = eigensolve(H, make_grid(-10.0, 10.0, 1024), 8)
    fine = eigensolve(H, make_grid(-10.0, 10.0, 2048), 8)
    assert np.max(np.abs(coarse.energies - fine.energies)) < 1e-7


@pytest.mark.parametrize("k", [0, 41])
def test_level_count_bounds(grid, k):
    with pytest.raises(ConfigError):
        eigensolve(hamiltonian(mul(0.5, power(X, 2))), grid, k)


def test_singular_potential_rejected():
    # x = 0 is a sample of this grid
    with pytest.raises(DomainError):
        hamiltonian(power(X, -2), grid=make_grid(-8.0, 8.0, 17))


def test_two_axis_degeneracies(harmonic):
    multiplets = separable_2d(harmonic, harmonic)
    sizes = [m.size for m in multiplets]
    energies = [m.energy for m in multiplets]
    assert sizes[:5] == [1, 2, 3, 4, 5]
    assert energies[:5] == pytest.approx([1.0, 2.0, 3.0, 4.0, 5.0], rel=1e-6)
    assert energies[-1] <= harmonic.energies[-1] + harmonic.energies[0] + 1e-6


def test_shifted_axes_degeneracies(harmonic, grid):
    shifted = eigensolve(hamiltonian(add(mul(0.5, power(X, 2)), const(0.5))), grid, 10)
    multiplets = separable_2d(harmonic, shifted)
    assert multiplets[0].members == ((0, 0),)
    assert multiplets[1].energy == pytest.approx(2.5, rel=1e-6)
    assert sorted(multiplets[1].members) == [(0, 1), (1, 0)]
