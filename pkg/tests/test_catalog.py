import numpy as np
import pytest

from src.catalog import (
    PotentialSpec,
    build,
    erf_closed_form_z,
    erf_family,
    erf_ladders,
    erf_potentials,
    erf_sum_defect,
    erf_superpotential,
    factorization_defect,
    mielnik_family,
    mielnik_ladder,
    p4_compatibility,
    p4_g1,
    p4_intertwiner,
    p4_intertwining_residual,
    p4_superpotential,
    p4_W12,
    painleve_system,
)
from src.config import PROBE_POINTS
from src.errors import ConfigError, SingularParameterError
from src.grid import cumulative_integral
from src.painleve import p4_rational
from src.susy import factorize, ladder_defect, z_equation_residual

P = np.asarray(PROBE_POINTS)


@pytest.fixture(scope="module")
def erf_member(grid):
    return erf_family(1.0, 2.0, grid)


@pytest.mark.parametrize(
    "spec",
    [
        PotentialSpec("square_well"),
        PotentialSpec("harmonic", omega=0.0),
        PotentialSpec("erf_s1", a0=-1.0),
        PotentialSpec("p4_g1", eps=0),
        PotentialSpec("mielnik", gamma=float("nan")),
        PotentialSpec("p4_susy", p4_initial=(0.1, 1.0)),
    ],
)
def test_invalid_specs(spec):
    with pytest.raises(ConfigError):
        spec.validate()


def test_harmonic_and_limit_entries(grid):
    assert np.allclose(build(PotentialSpec("harmonic", omega=2.0)).eval(P), 2.0 * P ** 2)
    # gamma -> infinity leaves the undeformed partner
    assert np.allclose(build(PotentialSpec("mielnik"), grid).eval(P), 0.5 * (P ** 2 - 1.0))
    V_s1, _ = erf_potentials(1.0)
    assert np.allclose(build(PotentialSpec("erf_gamma", gamma=float("inf")), grid).eval(P), V_s1.eval(P))


def test_large_gamma_approaches_V1(grid):
    # H' = H1 - phi' and phi' = O(1/gamma)
    V = build(PotentialSpec("mielnik", gamma=1e6), grid)
    assert np.allclose(V.eval(P), 0.5 * (P ** 2 - 1.0), atol=1e-5)


def test_singular_mielnik_member(grid):
    with pytest.raises(SingularParameterError):
        build(PotentialSpec("mielnik", gamma=0.5), grid)


def test_mielnik_member_is_finite(grid):
    V = build(PotentialSpec("mielnik", gamma=1.5), grid)
    values = V.eval(grid.samples)
    assert np.all(np.isfinite(values))


def test_mielnik_ladder_order(grid):
    family = mielnik_family(1.0, 1.5, grid)
    s = mielnik_ladder(family, 1.0)
    assert s.raising.nominal_order == 3
    assert ladder_defect(s) < 1e-8


@pytest.mark.parametrize("a0", [1.0, 2.0])
def test_erf_factorization_matches_closed_forms(grid, a0):
    fp = factorize(erf_superpotential(a0), grid=grid)
    V_s1, V_s2 = erf_potentials(a0)
    assert factorization_defect(fp, V_s1, V_s2) < 1e-10


@pytest.mark.parametrize("a0", [1.0, 2.0])
def test_erf_axes_sum_to_two_axis_potential(a0):
    assert erf_sum_defect(a0) < 1e-12


def test_erf_closed_form_z(erf_member, grid):
    closed = erf_closed_form_z(1.0, 2.0)
    assert closed.eval(0.0) == pytest.approx(2.0)
    assert z_equation_residual(closed, erf_superpotential(1.0), grid) < 1e-7
    numeric = erf_member.riccati.z.eval(P)
    assert np.allclose(numeric, closed.eval(P), rtol=1e-7)


def test_erf_closed_form_scales_with_a0():
    assert erf_closed_form_z(2.0, 0.5).eval(0.0) == pytest.approx(8.0)


def test_erf_ladders(erf_member):
    oscillator, m, r = erf_ladders(erf_member, 1.0)
    assert oscillator.lam == 0.5
    assert m.raising.nominal_order == 3
    assert r.raising.nominal_order == 5
    assert ladder_defect(m) < 1e-8


@pytest.mark.parametrize("omega", [1.0, 2.0])
def test_g1_for_linear_solution(omega):
    # f = -2z gives omega^2 x^2 / 2 - omega + omega / 3 for eps = +1
    solution = p4_rational(0.0, -2.0)
    g1 = p4_g1(omega, 1, 0.0, solution)
    expected = 0.5 * omega ** 2 * P ** 2 - 2.0 * omega / 3.0
    assert np.allclose(g1.eval(P), expected, atol=1e-10)


def test_g1_rejects_bad_sign():
    with pytest.raises(ConfigError):
        p4_g1(1.0, 2, 0.0, p4_rational(0.0, -2.0))


def test_linear_solution_gives_oscillator_superpotential():
    solution = p4_rational(0.0, -2.0)
    assert np.allclose(p4_superpotential(1.0, solution).eval(P), P)
    W1, W2 = p4_W12(1.0, -2.0, solution)
    assert np.allclose(W1.eval(P), P)
    assert np.allclose(W2.eval(P), P)


def test_W12_needs_nonpositive_beta():
    with pytest.raises(ConfigError):
        p4_W12(1.0, 0.5, p4_rational(0.0, -2.0))


@pytest.mark.parametrize("beta", [-2.0, -2.0 / 9.0])
def test_intertwiner_and_compatibility(beta):
    solution = p4_rational(0.0, beta)
    fp = factorize(p4_superpotential(1.0, solution))
    N = p4_intertwiner(1.0, beta, solution)
    assert N.nominal_order == 2
    assert p4_intertwining_residual(fp, N, 1.0) < 1e-10
    deviations = p4_compatibility(1.0, 0.0, solution, fp)
    assert max(deviations.values()) < 1e-10


def test_missing_rational_solution_needs_initial_data(grid):
    with pytest.raises(ConfigError):
        painleve_system(1.0, 1.0, -2.0, grid=grid)


def test_painleve_system(grid):
    system = painleve_system(1.0, 0.0, -2.0, gamma=1.5, grid=grid)
    assert system.grid is grid
    assert system.ladder1.lam == 1.0
    assert system.ladder1.raising.nominal_order == 3
    assert system.ladder_susy.raising.nominal_order == 5
    assert ladder_defect(system.ladder1) < 1e-10


def test_painleve_system_from_initial_data(small_grid):
    system = painleve_system(1.0, 0.0, 0.0, grid=small_grid, initial=(0.0, -1.0, 0.0))
    assert system.solution.source == "numeric"
    assert system.grid.x_min < 0.0 < system.grid.x_max
    assert small_grid.x_min <= system.grid.x_min and system.grid.x_max <= small_grid.x_max
    # W = -sqrt(omega) f(sqrt(omega) x) - omega x
    assert system.pair.W.eval(0.0) == pytest.approx(1.0, abs=1e-12)
    assert system.ladder1.raising.nominal_order == 3


@pytest.mark.parametrize("a0", [1.0, 1.7])
def test_exponent_of_erf_family(small_grid, a0):
    F = cumulative_integral(erf_superpotential(a0) * 2.0, 0.0, small_grid)
    x = small_grid.samples
    expected = x ** 2 / (2.0 * a0 ** 2) + 2.0 * np.log(x ** 2 + a0 ** 2) - 2.0 * np.log(a0 ** 2)
    assert np.allclose(F.values, expected, rtol=1e-10, atol=1e-8)
