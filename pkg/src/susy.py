"""
susy.py

First-order supersymmetric factorizations, the Riccati family of
partners built from a particular solution, zero modes, and ladder
operators carried across a factorization.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from src.config import (
    ANNIHILATED_TOLERANCE,
    LADDER_LEVELS,
    LADDER_PRECHECK_TOLERANCE,
    PARTNER_TOLERANCE,
    PROBE_POINTS,
    RICCATI_TOLERANCE,
    SUPERCHARGE_SCALE,
    TAIL_TOLERANCE,
    ZERO_ENERGY_TOL,
    ZERO_MODE_KERNEL_TOL,
)
from src.errors import ConsistencyError, DomainError, SingularParameterError
from src.expressions import add, const, cumulative, exp_, mul, power
from src.grid import GridFunction, inner_product, make_grid
from src.operators import (
    DiffOperator,
    adjoint,
    apply,
    coefficient_mismatch,
    coefficient_values,
    commutator,
    compose,
    expanded,
    first_order,
)
from src.schrodinger import eigensolve
from src.similarity import compute_overlap, overlap_matrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class FactorizationPair:
    """
    A = s(d + W), A_dag = s(-d + W), H1 = A_dag A, H2 = A A_dag.
    """

    W: object
    A: DiffOperator
    A_dag: DiffOperator
    H1: DiffOperator
    H2: DiffOperator
    broken: bool
    scale: float = SUPERCHARGE_SCALE

    @property
    def V1(self):
        return self.H1.coefficient(0)

    @property
    def V2(self):
        return self.H2.coefficient(0)


@dataclass(frozen=True, eq=False)
class RiccatiSolution:
    """
    beta = beta0 + 1/z solving beta' + beta^2 = U.
    """

    U: object
    beta0: object
    gamma: float
    z: object
    phi: object
    beta: object
    exponent: object = None


@dataclass(frozen=True, eq=False)
class LadderPair:
    """
    [H, raising] = lam * raising, lowering the formal adjoint of raising.
    """

    raising: DiffOperator
    lowering: DiffOperator
    lam: float
    H: DiffOperator
    label: str = "ladder"


@dataclass
class PairingReport:
    shift: int
    energy_defect: float
    min_overlap: float
    zero_mode_energy: float = None
    zero_mode_kernel: float = None
    max_leakage: float = 0.0
    energies1: np.ndarray = field(default=None, repr=False)
    energies2: np.ndarray = field(default=None, repr=False)


# factorization

def _decays(values, tail_tolerance=TAIL_TOLERANCE):
    if not np.all(np.isfinite(values)):
        return False
    peak = float(np.max(np.abs(values)))
    if peak == 0.0:
        return False
    edge = max(abs(values[0]), abs(values[-1]))
    return edge <= tail_tolerance * peak


def _exponential_mode(W, grid, sign):
    exponent = mul(-sign, cumulative(W, 0.0))
    with np.errstate(over="ignore", invalid="ignore"):
        try:
            values = exp_(exponent).eval(grid.samples)
        except DomainError:
            return None
    if not _decays(values):
        return None
    return GridFunction(grid, values).normalized()


def zero_mode(fp, grid=None):
    """
    Normalizable kernel state of A, psi0 ~ exp(-integral of W), or None.

    Parameters:
        fp (FactorizationPair | ScalarExpr): Pair or its superpotential
        grid (Grid | None): Box used for the normalizability scan

    Returns:
        GridFunction | None: Unit-norm zero mode
    """

    W = fp.W if isinstance(fp, FactorizationPair) else fp
    return _exponential_mode(W, grid or make_grid(), 1.0)


def dual_zero_mode(fp, grid=None):
    """Kernel state of A_dag, exp(+integral of W), or None."""
    W = fp.W if isinstance(fp, FactorizationPair) else fp
    return _exponential_mode(W, grid or make_grid(), -1.0)


def factorize(W, grid=None, scale=SUPERCHARGE_SCALE):
    """
    Build the superpartner pair of a superpotential.

    Parameters:
        W (ScalarExpr): Superpotential
        grid (Grid | None): Box for the broken-supersymmetry scan
        scale (float): Factor in front of (+-d + W)

    Returns:
        FactorizationPair: Operators and partner Hamiltonians
    """

    grid = grid or make_grid()
    A = first_order("+", W, scale).named("A")
    A_dag = first_order("-", W, scale).named("A_dag")
    H1 = expanded(compose(A_dag, A)).named("H1")
    H2 = expanded(compose(A, A_dag)).named("H2")
    broken = zero_mode(W, grid) is None and dual_zero_mode(W, grid) is None
    if broken:
        logger.info("supersymmetry is broken: neither zero mode is normalizable")
    return FactorizationPair(W=W, A=A, A_dag=A_dag, H1=H1, H2=H2, broken=broken, scale=scale)


def zero_mode_residual(fp, psi, region=None):
    """||A psi|| / ||psi|| on the interior of the box."""
    region = region or psi.grid.interior()
    return apply(fp.A, psi).norm(region) / psi.norm(region)


def intertwining_residual(fp, f):
    """
    Interior norm of (A H1 - H2 A) f relative to ||f||.
    """

    region = f.grid.interior()
    left = apply(fp.A, apply(fp.H1, f))
    right = apply(fp.H2, apply(fp.A, f))
    return (left - right).norm(region) / f.norm(region)


# supercharges

@dataclass(frozen=True, eq=False)
class BlockOperator:
    """2x2 matrix of operators acting on (f1, f2); None marks a zero entry."""

    entries: tuple

    def apply(self, pair):
        out = []
        for row in self.entries:
            total = None
            for op, f in zip(row, pair):
                if op is None:
                    continue
                term = apply(op, f)
                total = term if total is None else total + term
            out.append(total if total is not None else GridFunction(pair[0].grid, np.zeros(pair[0].grid.n)))
        return tuple(out)


def supercharges(fp):
    """
    Q = [[0, 0], [A, 0]], Q_dag = [[0, A_dag], [0, 0]] and H = diag(H1, H2).
    """

    Q = BlockOperator(((None, None), (fp.A, None)))
    Q_dag = BlockOperator(((None, fp.A_dag), (None, None)))
    H = BlockOperator(((fp.H1, None), (None, fp.H2)))
    return Q, Q_dag, H


def supercharge_residual(fp, f1, f2):
    """
    Residuals of {Q, Q_dag} = H, Q^2 = 0 and [H, Q] = 0 on (f1, f2).

    Returns:
        dict[str, float]: Interior norms relative to ||(f1, f2)||
    """

    Q, Q_dag, H = supercharges(fp)
    region = f1.grid.interior()
    size = np.hypot(f1.norm(region), f2.norm(region))
    pair = (f1, f2)

    def norm(block):
        return float(np.hypot(block[0].norm(region), block[1].norm(region))) / size

    qd_q = Q_dag.apply(Q.apply(pair))
    q_qd = Q.apply(Q_dag.apply(pair))
    h = H.apply(pair)
    anticommutator = tuple(a + b - c for a, b, c in zip(qd_q, q_qd, h))
    square = Q.apply(Q.apply(pair))
    h_q = H.apply(Q.apply(pair))
    q_h = Q.apply(H.apply(pair))
    return {
        "anticommutator": norm(anticommutator),
        "nilpotency": norm(square),
        "commutator": norm(tuple(a - b for a, b in zip(h_q, q_h))),
    }


# Riccati family

def particular_residual(U, beta0, grid):
    """Sup of |beta0' + beta0^2 - U| on the interior of the box."""
    region = grid.interior()
    x = grid.samples[region]
    defect = add(beta0.derivative, power(beta0, 2), mul(-1.0, U))
    return float(np.max(np.abs(defect.eval(x))))


def _scan_points(grid, reach=3.0, count=64):
    """Box samples plus sparse points out to `reach` box half-widths."""
    extra = (reach - 1.0) * max(abs(grid.x_min), abs(grid.x_max))
    left = np.linspace(grid.x_min - extra, grid.x_min, count)[:-1]
    right = np.linspace(grid.x_max, grid.x_max + extra, count)[1:]
    return np.concatenate([left, grid.samples, right])


def _locate_zero(points, values):
    signs = np.sign(values)
    exact = np.flatnonzero(signs == 0)
    if exact.size:
        return float(points[exact[0]])
    change = np.flatnonzero(signs[:-1] * signs[1:] < 0)
    if change.size == 0:
        return None
    i = change[0]
    x0, x1, v0, v1 = points[i], points[i + 1], values[i], values[i + 1]
    return float(x0 - v0 * (x1 - x0) / (v1 - v0))


def riccati_family(U, beta0, gamma, grid=None, tolerance=RICCATI_TOLERANCE, check=True):
    """
    General solution of beta' + beta^2 = U from a particular solution.

    z = exp(I) (gamma + J) with I = integral of 2 beta0 and J = integral of
    exp(-I), both from 0. Then z solves -z' + 2 beta0 z + 1 = 0 and
    beta = beta0 + 1/z.

    Parameters:
        U (ScalarExpr): Right side
        beta0 (ScalarExpr): Particular solution
        gamma (float): Integration constant, z(0) = gamma
        grid (Grid | None): Verification box
        tolerance (float): Allowed particular-solution residual
        check (bool): Verify beta0 before building the family

    Returns:
        RiccatiSolution: The family member

    Raises:
        ConsistencyError: beta0 does not solve the equation
        SingularParameterError: z vanishes (the partner has a pole)
    """

    grid = grid or make_grid()
    if check:
        defect = particular_residual(U, beta0, grid)
        if defect > tolerance:
            raise ConsistencyError(f"particular solution residual {defect:.3e} exceeds {tolerance:.1e}")

    gamma = float(gamma)
    exponent = cumulative(mul(2.0, beta0), 0.0)
    J = cumulative(exp_(mul(-1.0, exponent)), 0.0)
    shifted = add(gamma, J)

    points = _scan_points(grid)
    with np.errstate(over="ignore", invalid="ignore"):
        try:
            values = shifted.eval(points)
        except DomainError:
            values = np.array([np.nan])
        if not np.all(np.isfinite(values)):
            logger.info("far-field scan of z overflowed; scanning the box only")
            points = grid.samples
            values = shifted.eval(points)
    location = _locate_zero(points, values)
    if location is not None:
        raise SingularParameterError(
            f"gamma = {gamma:g} gives a zero of z at x = {location:.6g}", location=location
        )

    z = mul(exp_(exponent), shifted)
    phi = power(z, -1)
    beta = add(beta0, phi)
    return RiccatiSolution(U=U, beta0=beta0, gamma=gamma, z=z, phi=phi, beta=beta, exponent=exponent)


def riccati_residual(rs, grid):
    """Sup of |beta' + beta^2 - U| on the interior of the box."""
    return particular_residual(rs.U, rs.beta, grid)


def z_equation_residual(z, beta0, grid):
    """Sup of |-z' + 2 beta0 z + 1| relative to max(1, |z'|) on the interior."""

    x = grid.samples[grid.interior()]
    derivative = z.derivative.eval(x)
    defect = -derivative + 2.0 * beta0.eval(x) * z.eval(x) + 1.0
    return float(np.max(np.abs(defect) / np.maximum(1.0, np.abs(derivative))))


def mielnik_partner(fp, rs, grid=None, tolerance=PARTNER_TOLERANCE):
    """
    H' = b_dag b for b = s(d + beta), written as H1 - 2 s^2 phi'.

    Parameters:
        fp (FactorizationPair): Pair whose partner H2 = b b_dag
        rs (RiccatiSolution): Family member built from U = V2 / s^2

    Returns:
        DiffOperator: The new Hamiltonian

    Raises:
        ConsistencyError: U does not match H2 or the two forms disagree
    """

    grid = grid or make_grid()
    probes = grid.samples[grid.interior()][:: max(1, grid.n // 64)]
    s2 = fp.scale ** 2
    u_defect = float(np.max(np.abs(rs.U.eval(probes) - fp.V2.eval(probes) / s2)))
    if u_defect > tolerance * max(1.0, float(np.max(np.abs(rs.U.eval(probes))))):
        raise ConsistencyError(f"Riccati right side does not match the partner potential ({u_defect:.3e})")

    partner = DiffOperator(
        terms={2: const(-s2), 0: add(fp.V1, mul(-2.0 * s2, rs.phi.derivative))},
        label="H_partner",
    )
    b = first_order("+", rs.beta, fp.scale)
    b_dag = first_order("-", rs.beta, fp.scale)
    mismatch = coefficient_mismatch(compose(b_dag, b), partner, PROBE_POINTS)
    if mismatch > tolerance * max(1.0, float(np.max(np.abs(fp.V1.eval(np.asarray(PROBE_POINTS)))))):
        raise ConsistencyError(f"b_dag b and H1 - phi' disagree by {mismatch:.3e}")
    return partner


def partner_factorization(rs, grid=None, scale=SUPERCHARGE_SCALE):
    """Pair (b, b_dag) with H1 = H' and H2 = b b_dag."""
    return factorize(rs.beta, grid=grid, scale=scale)


# ladders

def ladder_defect(pair, probes=PROBE_POINTS):
    """
    Coefficient-level size of [H, raising] - lam raising relative to raising.
    """

    defect = commutator(pair.H, pair.raising) - pair.lam * pair.raising
    values = coefficient_values(defect, probes)
    reference = coefficient_values(pair.raising, probes)
    scale = max(1.0, max(float(np.max(np.abs(v))) for v in reference.values()))
    worst = max((float(np.max(np.abs(v))) for v in values.values()), default=0.0)
    return worst / scale


def dressed_ladder(outer, inner, orientation="conjugate", precheck=True,
                   tolerance=LADDER_PRECHECK_TOLERANCE, label=None):
    """
    Carry a ladder pair across a factorization.

    With orientation 'conjugate' the result is X = A_dag . inner . A, which
    ladders A_dag A when the inner pair ladders A A_dag. With 'reverse'
    it is A . inner . A_dag, laddering A A_dag from a ladder of A_dag A.

    Parameters:
        outer (FactorizationPair | tuple): Pair or (A, A_dag)
        inner (LadderPair): Ladder of the intermediate Hamiltonian

    Returns:
        LadderPair: Dressed operators with the same spacing
    """

    A, A_dag = (outer.A, outer.A_dag) if isinstance(outer, FactorizationPair) else outer
    if precheck:
        defect = ladder_defect(inner)
        if defect > tolerance:
            raise ConsistencyError(f"inner ladder relation fails ({defect:.3e} > {tolerance:.1e})")
    if orientation == "conjugate":
        left, right = A_dag, A
    elif orientation == "reverse":
        left, right = A, A_dag
    else:
        raise ValueError(f"orientation must be 'conjugate' or 'reverse', got {orientation!r}")
    H = expanded(compose(left, right))
    return LadderPair(
        raising=compose(left, inner.raising, right),
        lowering=compose(left, inner.lowering, right),
        lam=inner.lam,
        H=H,
        label=label or f"dressed({inner.label})",
    )


def energy_weighted(pair, label=None):
    """(H raising, lowering H) ladders H with the same spacing."""
    return LadderPair(
        raising=compose(pair.H, pair.raising),
        lowering=compose(pair.lowering, pair.H),
        lam=pair.lam,
        H=pair.H,
        label=label or f"H.{pair.label}",
    )


def transport_residual(A, inner, dressed, probes=PROBE_POINTS):
    """
    Coefficient mismatch of A . X_dressed and (H inner) . A.
    """
    weighted = energy_weighted(inner)
    return coefficient_mismatch(compose(A, dressed.raising), compose(weighted.raising, A), probes)


def ladder_residual(pair, spectrum, levels=LADDER_LEVELS, annihilated=ANNIHILATED_TOLERANCE):
    """
    Relative residuals of the ladder relation on eigenstates.

    For H psi_n = E_n psi_n the raised state X psi_n must be the eigenstate
    at E_n + lam (the lowered one X' psi_n the eigenstate at E_n - lam).
    The residual is the part of X psi_n outside the resolved eigenstate
    nearest that energy, or the relative energy mismatch if larger.

    States annihilated by an operator are skipped, as are raised states
    whose target lies above the resolved levels.

    Returns:
        dict: 'raising' and 'lowering' lists of (level, residual)
    """

    grid = spectrum.grid
    region = grid.interior()
    energies = np.asarray(spectrum.energies)
    count = min(levels, len(spectrum))
    report = {"raising": [], "lowering": []}
    for name, op, shift in (("raising", pair.raising, pair.lam), ("lowering", pair.lowering, -pair.lam)):
        moved = [apply(op, spectrum.states[n]) for n in range(count)]
        sizes = [m.norm(region) for m in moved]
        largest = max(sizes, default=0.0)
        for n in range(count):
            if sizes[n] <= annihilated * largest:
                continue
            target = energies[n] + shift
            if target > energies[-1] + 0.5 * abs(pair.lam):
                logger.debug("%s target %.6g of level %d is above the resolved spectrum", name, target, n)
                continue
            k = int(np.argmin(np.abs(energies - target)))
            psi = spectrum.states[k]
            remainder = moved[n] - psi * inner_product(psi, moved[n])
            mismatch = abs(energies[k] - target) / max(1.0, abs(target))
            report[name].append((n, max(remainder.norm(region) / sizes[n], mismatch)))
    return report


def adjoint_mismatch(pair, probes=PROBE_POINTS):
    """Relative coefficient mismatch between adjoint(raising) and lowering."""

    reference = coefficient_values(pair.lowering, probes)
    scale = max(1.0, max((float(np.max(np.abs(v))) for v in reference.values()), default=1.0))
    return coefficient_mismatch(adjoint(pair.raising), pair.lowering, probes) / scale


# spectra

def is_zero_mode(energy, psi, A, energy_tolerance=ZERO_ENERGY_TOL, kernel_tolerance=ZERO_MODE_KERNEL_TOL):
    """Zero eigenvalue tied to the kernel condition A psi = 0."""
    if abs(energy) >= energy_tolerance:
        return False
    region = psi.grid.interior()
    return apply(A, psi).norm(region) / psi.norm(region) < kernel_tolerance


def pairing_report(fp, grid, levels):
    """
    Compare the spectra of H1 and H2 level by level.

    Unbroken supersymmetry (zero mode of A) pairs E2_n with E1_{n+1} and
    A psi1_{n+1} with psi2_n; a zero mode of A_dag pairs the other way;
    broken supersymmetry pairs equal indices.

    Returns:
        PairingReport: Index shift, worst energy defect, weakest overlap
    """

    spectrum1 = eigensolve(fp.H1, grid, levels + 1, label="H1")
    spectrum2 = eigensolve(fp.H2, grid, levels + 1, label="H2")

    zero_energy = None
    kernel = None
    if is_zero_mode(spectrum1.energies[0], spectrum1.states[0], fp.A):
        shift, source, target, mapper = 1, spectrum1, spectrum2, fp.A
        zero_energy = float(spectrum1.energies[0])
        kernel = zero_mode_residual(fp, spectrum1.states[0])
    elif is_zero_mode(spectrum2.energies[0], spectrum2.states[0], fp.A_dag):
        shift, source, target, mapper = -1, spectrum2, spectrum1, fp.A_dag
        zero_energy = float(spectrum2.energies[0])
        region = grid.interior()
        kernel = apply(fp.A_dag, spectrum2.states[0]).norm(region) / spectrum2.states[0].norm(region)
    else:
        shift, source, target, mapper = 0, spectrum1, spectrum2, fp.A

    step = abs(shift)
    region = grid.interior()
    defects = []
    overlaps = []
    mapped = []
    for n in range(levels):
        defects.append(abs(target.energies[n] - source.energies[n + step]))
        mapped.append(apply(mapper, source.states[n + step]))
        overlaps.append(compute_overlap(mapped[n], target.states[n], region=region))

    # overlap of a mapped state with any non-partner level
    cross = overlap_matrix(mapped, target.states[:levels], region=region)
    np.fill_diagonal(cross, 0.0)

    return PairingReport(
        shift=shift,
        energy_defect=float(max(defects)),
        min_overlap=float(min(overlaps)),
        zero_mode_energy=zero_energy,
        zero_mode_kernel=kernel,
        max_leakage=float(cross.max()),
        energies1=spectrum1.energies,
        energies2=spectrum2.energies,
    )
