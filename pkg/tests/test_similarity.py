import numpy as np
import pytest

from src.errors import GridMismatchError
from src.expressions import X, exp_, mul, power
from src.grid import GridFunction, sample
from src.similarity import compute_overlap, overlap_matrix


@pytest.fixture(scope="module")
def states(small_grid):
    gauss = exp_(mul(-0.5, power(X, 2)))
    return sample(small_grid, gauss), sample(small_grid, mul(X, gauss))


def test_overlap_is_scale_and_sign_invariant(states):
    even, _ = states
    assert compute_overlap(even * -3.0, even) == pytest.approx(1.0, abs=1e-12)


def test_orthogonal_states(states):
    even, odd = states
    assert compute_overlap(even, odd) < 1e-12


def test_zero_state_has_no_overlap(states, small_grid):
    even, _ = states
    assert compute_overlap(GridFunction(small_grid, np.zeros(small_grid.n)), even) == 0.0


def test_grid_mismatch(states, grid):
    even, _ = states
    with pytest.raises(GridMismatchError):
        compute_overlap(even, sample(grid, X))


def test_overlap_matrix_is_identity_on_eigenstates(oscillator_spectrum):
    matrix = overlap_matrix(oscillator_spectrum.states[:5], oscillator_spectrum.states[:5])
    assert np.allclose(matrix, np.eye(5), atol=1e-8)
