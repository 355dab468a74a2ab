"""
catalog.py

Closed-form potentials, isospectral families and ladder operators for
the oscillator, the error-function family and the Painleve-IV family.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from src.config import (
    PROBE_POINTS,
    SUPERCHARGE_SCALE,
)
from src.errors import ConfigError, DomainError
from src.expressions import Const, X, add, const, erf_, exp_, mul, power
from src.grid import make_grid
from src.operators import (
    DiffOperator,
    adjoint,
    coefficient_mismatch,
    coefficient_values,
    compose,
    first_order,
)
from src.painleve import p4_integrate_two_sided, p4_rational
from src.schrodinger import hamiltonian
from src.susy import (
    LadderPair,
    dressed_ladder,
    energy_weighted,
    factorize,
    mielnik_partner,
    partner_factorization,
    riccati_family,
)

logger = logging.getLogger(__name__)

FAMILIES = ("harmonic", "mielnik", "erf_s1", "erf_s2", "erf_gamma", "p4_g1", "p4_susy")

# numerators below this are folded to zero in the W1, W2 pair
FOLD_TOLERANCE = 1e-12


@dataclass(frozen=True)
class PotentialSpec:
    """
    A named potential and its parameters.

    Attributes:
        family (str): One of FAMILIES
        omega (float): Oscillator frequency
        gamma (float | None): Family parameter; None means the gamma -> infinity limit
        a0 (float): Length scale of the error-function family
        alpha_p4, beta_p4 (float): Painleve parameters
        eps (int): Sign selecting the partner in g1
        p4_initial (tuple | None): (z0, f0, f0p) for a numerically integrated transcendent
    """

    family: str
    omega: float = 1.0
    gamma: float = None
    a0: float = 1.0
    alpha_p4: float = 0.0
    beta_p4: float = -2.0
    eps: int = 1
    p4_initial: tuple = None

    def validate(self):
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown potential family {self.family!r}; expected one of {FAMILIES}")
        if not (np.isfinite(self.omega) and self.omega > 0):
            raise ConfigError(f"omega must be positive, got {self.omega}")
        if not (np.isfinite(self.a0) and self.a0 > 0):
            raise ConfigError(f"a0 must be positive, got {self.a0}")
        if self.eps not in (-1, 1):
            raise ConfigError(f"eps must be +1 or -1, got {self.eps}")
        if self.gamma is not None and np.isnan(self.gamma):
            raise ConfigError("gamma is NaN")
        if self.p4_initial is not None and len(self.p4_initial) != 3:
            raise ConfigError("p4_initial must be (z0, f0, f0p)")
        return self


@dataclass(frozen=True, eq=False)
class IsospectralFamily:
    """
    One member of the one-parameter family built on a factorization.

    Attributes:
        base (FactorizationPair): A, A_dag with H1 = A_dag A, H2 = A A_dag
        riccati (RiccatiSolution): beta = beta0 + 1/z
        partner (DiffOperator): H' = b_dag b, isospectral to H1 up to the zero mode
        partner_pair (FactorizationPair): (b, b_dag) with b b_dag = H2
    """

    base: object
    riccati: object
    partner: DiffOperator
    partner_pair: object


def isospectral_family(W, gamma, grid=None, scale=SUPERCHARGE_SCALE):
    """
    Deform H1 = A_dag A through the general solution of b b_dag = A A_dag.

    Parameters:
        W (ScalarExpr): Superpotential, used as the particular solution
        gamma (float): Integration constant, z(0) = gamma
        grid (Grid | None): Verification box

    Returns:
        IsospectralFamily: The family member
    """

    grid = grid or make_grid()
    base = factorize(W, grid=grid, scale=scale)
    U = mul(1.0 / scale ** 2, base.V2)
    rs = riccati_family(U, W, gamma, grid=grid)
    partner = mielnik_partner(base, rs, grid=grid)
    return IsospectralFamily(
        base=base,
        riccati=rs,
        partner=partner,
        partner_pair=partner_factorization(rs, grid=grid, scale=scale),
    )


# oscillator

def oscillator_superpotential(omega=1.0):
    return mul(float(omega), X)


def oscillator_potential(omega=1.0, shift=0.0):
    return add(mul(0.5 * omega ** 2, power(X, 2)), shift)


def oscillator_ladder(omega, H, label="a"):
    """
    a_dag = (-d + omega x) / sqrt(2 omega) and its adjoint.

    H must be -1/2 d^2 + omega^2 x^2 / 2 plus a constant; the spacing is omega.
    """

    scale = 1.0 / math.sqrt(2.0 * omega)
    return LadderPair(
        raising=first_order("-", oscillator_superpotential(omega), scale).named(f"{label}_dag"),
        lowering=first_order("+", oscillator_superpotential(omega), scale).named(label),
        lam=float(omega),
        H=H,
        label=label,
    )


def mielnik_family(omega, gamma, grid=None):
    """Family partners of the oscillator, W = omega x."""
    return isospectral_family(oscillator_superpotential(omega), gamma, grid=grid)


def mielnik_ladder(family, omega):
    """s_dag = b_dag a_dag b, order 3, laddering H'."""
    inner = oscillator_ladder(omega, family.base.H2)
    return dressed_ladder(family.partner_pair, inner, orientation="conjugate", label="s")


# error-function family

def erf_frequency(a0):
    return 1.0 / (2.0 * a0 ** 2)


def erf_superpotential(a0):
    """beta0 = x / (2 a0^2) + 2x / (x^2 + a0^2)."""
    q = add(power(X, 2), a0 ** 2)
    return add(mul(erf_frequency(a0), X), mul(2.0, X, power(q, -1)))


def erf_potentials(a0):
    """
    Closed forms of the partner potentials of erf_superpotential(a0).

    The complex pair 1/(x - i a0)^2 + 1/(x + i a0)^2 is written in the
    real form 2(x^2 - a0^2)/(x^2 + a0^2)^2.

    Returns:
        tuple[ScalarExpr, ScalarExpr]: (V_s1, V_s2)
    """

    a2 = a0 ** 2
    q = add(power(X, 2), a2)
    quadratic = mul(1.0 / (8.0 * a2 ** 2), power(X, 2))
    pair = mul(2.0, add(power(X, 2), -a2), power(q, -2))
    V_s1 = add(quadratic, pair, 3.0 / (4.0 * a2))
    V_s2 = add(quadratic, 5.0 / (4.0 * a2))
    return V_s1, V_s2


def erf_pair_potential(a0):
    """Two-axis potential whose axes are H_s1(x) and H_s2(y) up to a constant."""
    a2 = a0 ** 2
    q = add(power(X, 2), a2)
    V_x = add(mul(1.0 / (8.0 * a2 ** 2), power(X, 2)), mul(2.0, add(power(X, 2), -a2), power(q, -2)))
    V_y = mul(1.0 / (8.0 * a2 ** 2), power(X, 2))
    return V_x, V_y


def erf_closed_form_z(a0, gamma):
    """
    Explicit z with z(0) = a0^4 gamma solving -z' + 2 beta0 z + 1 = 0.
    """

    a2 = a0 ** 2
    q = add(power(X, 2), a2)
    gauss = exp_(mul(1.0 / (2.0 * a2), power(X, 2)))
    first = mul(float(gamma), gauss, power(q, 2))
    inner = add(
        mul(2.0 * a0, X),
        mul(math.sqrt(2.0 * math.pi), gauss, q, erf_(mul(1.0 / (math.sqrt(2.0) * a0), X))),
    )
    return add(first, mul(1.0 / (4.0 * a0 ** 3), q, inner))


def erf_family(a0, gamma, grid=None):
    """
    H_gamma = H_s1 - phi' with the catalog gamma, i.e. z(0) = a0^4 gamma.
    """
    return isospectral_family(erf_superpotential(a0), a0 ** 4 * float(gamma), grid=grid)


def erf_ladders(family, a0):
    """
    Ladders of the two deformed members of the error-function family.

    Returns:
        tuple[LadderPair, LadderPair, LadderPair]: (a on H_s2, m on H_s1, r on H_gamma)
    """

    omega = erf_frequency(a0)
    _, V_s2 = erf_potentials(a0)
    oscillator = oscillator_ladder(omega, hamiltonian(V_s2, label="H_s2"))
    m = dressed_ladder(family.base, oscillator, orientation="conjugate", label="m")
    r = dressed_ladder(family.partner_pair, energy_weighted(oscillator), orientation="conjugate", label="r")
    return oscillator, m, r


def factorization_defect(fp, V1, V2, probes=PROBE_POINTS):
    """
    Largest coefficient mismatch between A_dag A, A A_dag and the closed forms.
    """

    return max(
        coefficient_mismatch(fp.H1, hamiltonian(V1), probes),
        coefficient_mismatch(fp.H2, hamiltonian(V2), probes),
    )


def erf_sum_defect(a0, probes=PROBE_POINTS):
    """
    Spread of V_s1(x) + V_s2(y) - V_g(x, y) over a probe lattice.

    The sum of the two axes must reproduce the two-axis potential up to an
    additive constant, so the spread (max - min) vanishes.
    """

    V_s1, V_s2 = erf_potentials(a0)
    V_x, V_y = erf_pair_potential(a0)
    p = np.asarray(probes, dtype=float)
    difference = (V_s1.eval(p) - V_x.eval(p))[:, None] + (V_s2.eval(p) - V_y.eval(p))[None, :]
    return float(np.max(difference) - np.min(difference))


# Painleve-IV family

def _mapped_argument(omega):
    return mul(math.sqrt(omega), X)


def _require_cover(solution, grid, omega):
    if grid is None:
        return
    lo, hi = math.sqrt(omega) * grid.x_min, math.sqrt(omega) * grid.x_max
    if not solution.covers(lo, hi):
        raise DomainError(
            f"Painleve table [{solution.domain[0]:.6g}, {solution.domain[1]:.6g}] "
            f"does not cover z in [{lo:.6g}, {hi:.6g}]",
            location=lo if lo < solution.domain[0] else hi,
        )


def p4_solution(alpha, beta, omega=1.0, grid=None, initial=None):
    """
    The transcendent behind a Painleve-family potential.

    Catalogued rational cases are exact; anything else is integrated both
    ways from `initial` = (z0, f0, f0p) over the mapped box z = sqrt(omega) x.
    """

    if initial is None:
        rational = p4_rational(alpha, beta)
        if rational is None:
            raise ConfigError(
                f"no rational solution for (alpha, beta) = ({alpha:g}, {beta:g}); give p4_initial = (z0, f0, f0p)"
            )
        return rational
    grid = grid or make_grid()
    z0, f0, f0p = (float(v) for v in initial)
    root = math.sqrt(omega)
    return p4_integrate_two_sided(alpha, beta, z0, f0, f0p, root * grid.x_min, root * grid.x_max)


def pole_free_grid(solution, grid, omega=1.0):
    """
    The part of the box on which the table is defined, at the same spacing.

    Raises:
        DomainError: the domain does not contain the anchor x = 0
    """

    root = math.sqrt(omega)
    lo = max(grid.x_min, solution.domain[0] / root)
    hi = min(grid.x_max, solution.domain[1] / root)
    if not lo < 0.0 < hi:
        raise DomainError(
            f"pole-free interval [{lo:.6g}, {hi:.6g}] does not contain x = 0", location=lo if lo >= 0 else hi
        )
    if lo == grid.x_min and hi == grid.x_max:
        return grid
    n = int(round((hi - lo) / grid.spacing)) + 1
    logger.warning("Painleve table limits the box to [%.6g, %.6g] (%d points)", lo, hi, n)
    return make_grid(lo, hi, n)


def p4_g1(omega, eps, alpha, solution, grid=None):
    """
    g1(x) = omega^2 x^2/2 + eps omega/2 f'(z) + omega/2 f(z)^2
            + omega^(3/2) x f(z) + omega/3 (eps - alpha),  z = sqrt(omega) x.
    """

    if eps not in (-1, 1):
        raise ConfigError(f"eps must be +1 or -1, got {eps}")
    _require_cover(solution, grid, omega)
    u = _mapped_argument(omega)
    f = solution.function_expr(u)
    fp = solution.derivative_expr(u)
    return add(
        mul(0.5 * omega ** 2, power(X, 2)),
        mul(0.5 * eps * omega, fp),
        mul(0.5 * omega, power(f, 2)),
        mul(omega ** 1.5, X, f),
        omega * (eps - alpha) / 3.0,
    )


def p4_superpotential(omega, solution, grid=None):
    """W = -sqrt(omega) f(sqrt(omega) x) - omega x."""
    _require_cover(solution, grid, omega)
    f = solution.function_expr(_mapped_argument(omega))
    return add(mul(-math.sqrt(omega), f), mul(-float(omega), X))


def p4_W12(omega, beta, solution, grid=None):
    """
    W1, W2 = sqrt(omega) [-f/2 +- (f' + sqrt(-2 beta)) / (2f)].

    Raises:
        ConfigError: beta > 0 leaves the square root undefined
    """

    if beta > 0:
        raise ConfigError(f"beta_p4 must be <= 0 for a real sqrt(-2 beta), got {beta}")
    _require_cover(solution, grid, omega)
    u = _mapped_argument(omega)
    f = solution.function_expr(u)
    numerator = add(solution.derivative_expr(u), math.sqrt(-2.0 * beta))
    if isinstance(numerator, Const) and abs(numerator.value) < FOLD_TOLERANCE:
        numerator = const(0.0)
    half = mul(-0.5, f)
    ratio = mul(0.5, numerator, power(f, -1))
    root = math.sqrt(omega)
    return mul(root, add(half, ratio)), mul(root, add(half, mul(-1.0, ratio)))


def p4_intertwiner(omega, beta, solution, grid=None):
    """N = (d + W1)(d + W2), second order."""
    W1, W2 = p4_W12(omega, beta, solution, grid)
    return compose(first_order("+", W1, 1.0), first_order("+", W2, 1.0)).named("N")


def p4_intertwining_residual(fp, N, omega, probes=PROBE_POINTS):
    """Relative coefficient mismatch of N H1 and (H2 + omega) N."""

    left = compose(N, fp.H1)
    right = compose(fp.H2 + float(omega), N)
    reference = coefficient_values(left, probes)
    scale = max(1.0, max(float(np.max(np.abs(v))) for v in reference.values()))
    return coefficient_mismatch(left, right, probes) / scale


def p4_ladders(fp, N, omega):
    """
    Third-order ladders with spacing omega.

    Returns:
        tuple[LadderPair, LadderPair]: N_dag A on H1 and A N_dag on H2
    """

    N_dag = adjoint(N)
    ladder1 = LadderPair(
        raising=compose(N_dag, fp.A),
        lowering=compose(fp.A_dag, N),
        lam=float(omega),
        H=fp.H1,
        label="q",
    )
    ladder2 = LadderPair(
        raising=compose(fp.A, N_dag),
        lowering=compose(N, fp.A_dag),
        lam=float(omega),
        H=fp.H2,
        label="q2",
    )
    return ladder1, ladder2


def p4_compatibility(omega, alpha, solution, fp, probes=PROBE_POINTS):
    """
    Pointwise deviations of the partner potentials from the shifted g1.

    V1 = g1(eps=+1) + omega/2 - omega (1 - alpha)/3 and
    V2 = g1(eps=-1) - omega/2 + omega (1 + alpha)/3.

    Returns:
        dict[str, float]: Max deviation per partner
    """

    p = np.asarray(probes, dtype=float)
    plus = p4_g1(omega, 1, alpha, solution)
    minus = p4_g1(omega, -1, alpha, solution)
    shift1 = 0.5 * omega - omega * (1.0 - alpha) / 3.0
    shift2 = -0.5 * omega + omega * (1.0 + alpha) / 3.0
    return {
        "V1": float(np.max(np.abs(fp.V1.eval(p) - plus.eval(p) - shift1))),
        "V2": float(np.max(np.abs(fp.V2.eval(p) - minus.eval(p) - shift2))),
    }


@dataclass(frozen=True, eq=False)
class PainleveSystem:
    """
    Everything built from one transcendent.

    Attributes:
        solution (P4Solution): The transcendent
        grid (Grid): Box restricted to the pole-free domain
        pair (FactorizationPair): W = -sqrt(omega) f - omega x
        N (DiffOperator): Second-order intertwiner
        ladder1, ladder2 (LadderPair): Ladders of H1 and H2
        family (IsospectralFamily | None): H_susy = k_dag k
        ladder_susy (LadderPair | None): v_dag = k_dag (A N_dag) k
    """

    omega: float
    alpha: float
    beta: float
    solution: object
    grid: object
    pair: object
    N: DiffOperator
    ladder1: LadderPair
    ladder2: LadderPair
    family: IsospectralFamily = None
    ladder_susy: LadderPair = None


def painleve_system(omega, alpha, beta, gamma=None, grid=None, initial=None):
    """
    Build the Painleve-family factorization, intertwiner, ladders and,
    when gamma is given, the deformed H_susy with its quintic ladder.
    """

    grid = grid or make_grid()
    solution = p4_solution(alpha, beta, omega, grid, initial)
    box = pole_free_grid(solution, grid, omega)
    W = p4_superpotential(omega, solution, box)
    pair = factorize(W, grid=box)
    N = p4_intertwiner(omega, beta, solution, box)
    ladder1, ladder2 = p4_ladders(pair, N, omega)
    family = None
    ladder_susy = None
    if gamma is not None:
        family = isospectral_family(W, gamma, grid=box)
        ladder_susy = dressed_ladder(family.partner_pair, ladder2, orientation="conjugate", label="v")
    return PainleveSystem(
        omega=float(omega),
        alpha=float(alpha),
        beta=float(beta),
        solution=solution,
        grid=box,
        pair=pair,
        N=N,
        ladder1=ladder1,
        ladder2=ladder2,
        family=family,
        ladder_susy=ladder_susy,
    )


# catalog entry point

def build(spec, grid=None):
    """
    Potential of a catalog entry.

    Deformed families take gamma = None or inf as the undeformed limit:
    H' = H1 - phi' with phi = 1/z, and z grows without bound as gamma
    does, so phi' vanishes and "mielnik" returns V1 of the oscillator
    factorization (likewise H_gamma tends to H_s1 for the erf family).

    Parameters:
        spec (PotentialSpec): Family and parameters
        grid (Grid | None): Verification box for families that need one

    Returns:
        ScalarExpr: V(x)

    Raises:
        ConfigError: invalid parameters
        SingularParameterError: gamma gives a singular family member
    """

    spec.validate()
    grid = grid or make_grid()
    family = spec.family
    limit = spec.gamma is None or np.isinf(spec.gamma)

    if family == "harmonic":
        return oscillator_potential(spec.omega)
    if family == "mielnik":
        if limit:
            return factorize(oscillator_superpotential(spec.omega), grid).V1
        return mielnik_family(spec.omega, spec.gamma, grid).partner.coefficient(0)
    if family == "erf_s1":
        return erf_potentials(spec.a0)[0]
    if family == "erf_s2":
        return erf_potentials(spec.a0)[1]
    if family == "erf_gamma":
        if limit:
            return erf_potentials(spec.a0)[0]
        return erf_family(spec.a0, spec.gamma, grid).partner.coefficient(0)

    solution = p4_solution(spec.alpha_p4, spec.beta_p4, spec.omega, grid, spec.p4_initial)
    if family == "p4_g1":
        return p4_g1(spec.omega, spec.eps, spec.alpha_p4, solution, pole_free_grid(solution, grid, spec.omega))
    box = pole_free_grid(solution, grid, spec.omega)
    W = p4_superpotential(spec.omega, solution, box)
    if limit:
        return factorize(W, box).V1
    return isospectral_family(W, spec.gamma, grid=box).partner.coefficient(0)
