import math

import numpy as np
import pytest

from src.catalog import mielnik_family, mielnik_ladder, oscillator_ladder, oscillator_superpotential
from src.config import PROBE_POINTS
from src.errors import ConsistencyError, SingularParameterError
from src.expressions import X, add, exp_, mul, power
from src.grid import sample
from src.schrodinger import eigensolve
from src.susy import (
    adjoint_mismatch,
    dressed_ladder,
    dual_zero_mode,
    energy_weighted,
    factorize,
    intertwining_residual,
    is_zero_mode,
    ladder_defect,
    ladder_residual,
    mielnik_partner,
    pairing_report,
    particular_residual,
    partner_factorization,
    riccati_family,
    riccati_residual,
    supercharge_residual,
    z_equation_residual,
    zero_mode,
    zero_mode_residual,
)

P = np.asarray(PROBE_POINTS)


def test_partner_potentials(oscillator_pair):
    assert np.allclose(oscillator_pair.V1.eval(P), 0.5 * (P ** 2 - 1.0))
    assert np.allclose(oscillator_pair.V2.eval(P), 0.5 * (P ** 2 + 1.0))
    assert not oscillator_pair.broken


def test_zero_mode(oscillator_pair, oscillator_spectrum, grid):
    psi = zero_mode(oscillator_pair, grid)
    assert psi is not None
    assert zero_mode_residual(oscillator_pair, psi) < 1e-6
    assert abs(oscillator_spectrum.energies[0]) < 1e-6
    assert is_zero_mode(oscillator_spectrum.energies[0], oscillator_spectrum.states[0], oscillator_pair.A)
    assert dual_zero_mode(oscillator_pair, grid) is None


def test_oscillator_pairing(oscillator_pair, grid):
    report = pairing_report(oscillator_pair, grid, 10)
    assert report.shift == 1
    assert report.energy_defect < 2e-5
    assert report.min_overlap > 1.0 - 1e-6
    assert report.max_leakage < 1e-6
    assert abs(report.zero_mode_energy) < 1e-6


def test_reversed_superpotential_pairs_the_other_way(grid):
    fp = factorize(mul(-1.0, X), grid=grid)
    report = pairing_report(fp, grid, 6)
    assert report.shift == -1
    assert report.energy_defect < 2e-5


def test_broken_supersymmetry(grid):
    # exp(-x^3/3) is normalizable on neither side
    fp = factorize(power(X, 2), grid=grid)
    assert fp.broken
    assert zero_mode(fp, grid) is None


def test_intertwining_and_supercharges(oscillator_pair, grid):
    gauss = exp_(mul(-0.5, power(X, 2)))
    f1 = sample(grid, mul(add(X, power(X, 3)), gauss))
    f2 = sample(grid, mul(add(1.0, power(X, 2)), gauss))
    assert intertwining_residual(oscillator_pair, f1) < 1e-8
    residual = supercharge_residual(oscillator_pair, f1, f2)
    assert residual["anticommutator"] < 1e-8
    assert residual["nilpotency"] == 0.0
    assert residual["commutator"] < 1e-8


@pytest.mark.parametrize("gamma", [1.0, 1.5, 5.0])
def test_riccati_family_of_oscillator(oscillator_pair, grid, gamma):
    U = mul(2.0, oscillator_pair.V2)
    rs = riccati_family(U, X, gamma, grid=grid)
    assert rs.z.eval(0.0) == pytest.approx(gamma)
    assert particular_residual(U, X, grid) < 1e-12
    assert riccati_residual(rs, grid) < 1e-8
    assert z_equation_residual(rs.z, rs.beta0, grid) < 1e-8


@pytest.mark.parametrize("gamma", [0.5, -0.5])
def test_singular_gamma_is_located(oscillator_pair, grid, gamma):
    U = mul(2.0, oscillator_pair.V2)
    with pytest.raises(SingularParameterError) as info:
        riccati_family(U, X, gamma, grid=grid)
    location = info.value.location
    # the zero of gamma + J(x) with J(x) = sqrt(pi)/2 erf(x)
    assert math.erf(location) * math.sqrt(math.pi) / 2.0 == pytest.approx(-gamma, abs=1e-3)


def test_wrong_particular_solution_rejected(oscillator_pair, grid):
    with pytest.raises(ConsistencyError):
        riccati_family(mul(2.0, oscillator_pair.V2), mul(2.0, X), 1.5, grid=grid)


def test_mielnik_partner_forms_agree(oscillator_pair, grid):
    rs = riccati_family(mul(2.0, oscillator_pair.V2), X, 1.5, grid=grid)
    partner = mielnik_partner(oscillator_pair, rs, grid=grid)
    b_pair = partner_factorization(rs, grid=grid)
    assert np.allclose(b_pair.V2.eval(P), oscillator_pair.V2.eval(P), atol=1e-10)
    assert np.allclose(b_pair.V1.eval(P), partner.coefficient(0).eval(P), atol=1e-10)


def test_oscillator_ladder(oscillator_pair, oscillator_spectrum):
    ladder = oscillator_ladder(1.0, oscillator_pair.H1)
    assert ladder_defect(ladder) < 1e-12
    assert adjoint_mismatch(ladder) < 1e-12
    report = ladder_residual(ladder, oscillator_spectrum)
    assert max(r for _, r in report["raising"]) < 1e-5
    # the ground state is annihilated by the lowering operator
    assert [n for n, _ in report["lowering"]] == [1, 2, 3, 4, 5]


def test_dressed_ladder_is_third_order(oscillator_pair, grid):
    rs = riccati_family(mul(2.0, oscillator_pair.V2), X, 1.5, grid=grid)
    b_pair = partner_factorization(rs, grid=grid)
    inner = oscillator_ladder(1.0, oscillator_pair.H2)
    s = dressed_ladder(b_pair, inner, label="s")
    assert s.raising.nominal_order == 3
    assert s.lam == 1.0
    assert ladder_defect(s) < 1e-8
    assert adjoint_mismatch(s) < 1e-10


def test_dressed_ladder_precheck(oscillator_pair):
    broken = oscillator_ladder(1.0, oscillator_pair.H2)
    wrong = type(broken)(broken.raising, broken.lowering, 2.0, broken.H, "wrong")
    with pytest.raises(ConsistencyError):
        dressed_ladder(oscillator_pair, wrong)
    with pytest.raises(ValueError):
        dressed_ladder(oscillator_pair, broken, orientation="sideways")


def test_energy_weighted_ladder(oscillator_pair, oscillator_spectrum):
    weighted = energy_weighted(oscillator_ladder(1.0, oscillator_pair.H1))
    assert weighted.raising.nominal_order == 3
    assert ladder_defect(weighted) < 1e-12
    report = ladder_residual(weighted, oscillator_spectrum)
    # H a_dag psi_n = (n + 1) a_dag psi_n never vanishes
    assert len(report["raising"]) == 6


def test_conjugated_ladder_acts_on_H1(oscillator_pair):
    dressed = dressed_ladder(oscillator_pair, oscillator_ladder(1.0, oscillator_pair.H2))
    assert dressed.H.coefficient(0).eval(0.0) == pytest.approx(-0.5)
    assert dressed.raising.nominal_order == 3
    assert ladder_defect(dressed) < 1e-12


def test_third_order_ladder_on_deformed_oscillator(grid):
    family = mielnik_family(1.0, 1.5, grid)
    s = mielnik_ladder(family, 1.0)
    spectrum = eigensolve(family.partner, grid, 12, label="H'")
    report = ladder_residual(s, spectrum)
    assert report["raising"] and report["lowering"]
    assert max(r for _, r in report["raising"]) < 1e-6
    assert max(r for _, r in report["lowering"]) < 1e-6


def test_ladder_residual_flags_wrong_spacing(oscillator_pair, oscillator_spectrum):
    ladder = oscillator_ladder(1.0, oscillator_pair.H1)
    wrong = type(ladder)(ladder.raising, ladder.lowering, 1.5, ladder.H, "wrong")
    report = ladder_residual(wrong, oscillator_spectrum)
    assert max(r for _, r in report["raising"]) > 0.1
