"""
superintegrability.py

Two-axis Hamiltonians H = H_x(x) + H_y(y) with the integrals

    K  = H_x - H_y
    I1 = X_dag^m Y^n - X^m Y_dag^n
    I2 = X_dag^m Y^n + X^m Y_dag^n

built from one ladder pair per axis, and their verification on
product eigenstates. Operators are never assembled as 2-D matrices:
each term acts axis by axis on sums of products f(x) g(y).
"""

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson

from src.config import (
    ANNIHILATED_TOLERANCE,
    COEFFICIENT_TOLERANCE,
    DEFAULT_PROBE_STATES,
    DEGENERACY_RTOL,
    PROBE_POINTS,
    RESONANCE_RTOL,
)
from src.errors import ConfigError
from src.grid import inner_product
from src.operators import adjoint, apply, coefficient_values, compose
from src.schrodinger import separable_2d

logger = logging.getLogger(__name__)


class TwoAxisOperator:
    """
    Sum of products c * X(x) Y(y); None stands for the identity on an axis.

    Parameters:
        terms (tuple): ((coef, x_op, y_op), ...)
        label (str | None): Name used in reports
    """

    def __init__(self, terms, label=None):
        self.terms = tuple((float(c), x, y) for c, x, y in terms if c != 0.0)
        self.label = label

    @classmethod
    def x(cls, op, label=None):
        return cls(((1.0, op, None),), label=label)

    @classmethod
    def y(cls, op, label=None):
        return cls(((1.0, None, op),), label=label)

    def named(self, label):
        return TwoAxisOperator(self.terms, label=label)

    def __add__(self, other):
        return TwoAxisOperator(self.terms + other.terms)

    def __sub__(self, other):
        return self + (-1.0) * other

    def __mul__(self, scalar):
        return TwoAxisOperator(tuple((scalar * c, x, y) for c, x, y in self.terms))

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __matmul__(self, other):
        return TwoAxisOperator(
            tuple(
                (c1 * c2, _compose_axis(x1, x2), _compose_axis(y1, y2))
                for c1, x1, y1 in self.terms
                for c2, x2, y2 in other.terms
            )
        )

    def adjoint(self):
        return TwoAxisOperator(
            tuple(
                (c, None if x is None else adjoint(x), None if y is None else adjoint(y))
                for c, x, y in self.terms
            )
        )

    def apply(self, psi):
        """Act on a SeparableField axis by axis."""

        cache = {}

        def act(op, f):
            if op is None:
                return f
            key = (id(op), id(f))
            if key not in cache:
                cache[key] = apply(op, f)
            return cache[key]

        out = []
        for c1, x, y in self.terms:
            for c2, f, g in psi.terms:
                out.append((c1 * c2, act(x, f), act(y, g)))
        return SeparableField(psi.grid_x, psi.grid_y, tuple(out))

    @property
    def nominal_order(self):
        return max(
            ((0 if x is None else x.nominal_order) + (0 if y is None else y.nominal_order) for _, x, y in self.terms),
            default=0,
        )

    def monomials(self, probes=PROBE_POINTS):
        """
        Coefficients of d_x^a d_y^b on the probe lattice.

        Returns:
            dict[(int, int), (np.ndarray, np.ndarray)]: (value, magnitude) per
            monomial; magnitude sums |contributions| so cancellations show up
        """

        probes = np.asarray(probes, dtype=float)
        ones = {0: np.ones_like(probes)}
        collected = {}
        for c, x, y in self.terms:
            cx = ones if x is None else coefficient_values(x, probes)
            cy = ones if y is None else coefficient_values(y, probes)
            for a, vx in cx.items():
                for b, vy in cy.items():
                    contribution = c * np.outer(np.broadcast_to(vx, probes.shape), np.broadcast_to(vy, probes.shape))
                    value, magnitude = collected.get((a, b), (0.0, 0.0))
                    collected[(a, b)] = (value + contribution, magnitude + np.abs(contribution))
        return collected

    def measured_order(self, probes=PROBE_POINTS, tol=COEFFICIENT_TOLERANCE):
        """
        Largest a + b whose monomial survives cancellation on the probes.
        """

        live = [
            a + b
            for (a, b), (value, magnitude) in self.monomials(probes).items()
            if float(np.max(np.abs(value))) > tol * max(1.0, float(np.max(magnitude)))
        ]
        return max(live, default=-1)

    def __repr__(self):
        return f"TwoAxisOperator({self.label or len(self.terms)}, order<={self.nominal_order})"


def _compose_axis(p, q):
    if p is None:
        return q
    if q is None:
        return p
    return compose(p, q)


def _power(op, k):
    return compose(*([op] * k)) if k > 1 else op


@dataclass(frozen=True, eq=False)
class SeparableField:
    """
    F(x, y) = sum c_k f_k(x) g_k(y) on a product of two 1-D grids.
    """

    grid_x: object
    grid_y: object
    terms: tuple

    @classmethod
    def product(cls, f, g):
        return cls(f.grid, g.grid, ((1.0, f, g),))

    def __add__(self, other):
        return SeparableField(self.grid_x, self.grid_y, self.terms + other.terms)

    def __sub__(self, other):
        return self + other * -1.0

    def __mul__(self, scalar):
        return SeparableField(self.grid_x, self.grid_y, tuple((scalar * c, f, g) for c, f, g in self.terms))

    __rmul__ = __mul__

    def _regions(self, interior):
        if interior:
            return self.grid_x.interior(), self.grid_y.interior()
        return slice(None), slice(None)

    def to_array(self, interior=True):
        """Samples on the (interior) product lattice."""
        rx, ry = self._regions(interior)
        total = np.zeros((len(self.grid_x.samples[rx]), len(self.grid_y.samples[ry])))
        for c, f, g in self.terms:
            total += c * np.outer(f.values[rx], g.values[ry])
        return total

    def inner(self, other, interior=True):
        rx, ry = self._regions(interior)
        integrand = self.to_array(interior) * other.to_array(interior)
        inner_y = simpson(integrand, x=self.grid_y.samples[ry], axis=1)
        return float(simpson(inner_y, x=self.grid_x.samples[rx]))

    def norm(self, interior=True):
        return float(np.sqrt(max(self.inner(self, interior), 0.0)))

    def amplitude(self, fx, gy):
        """<fx gy, F> from 1-D inner products on the full box."""
        return float(sum(c * inner_product(fx, f) * inner_product(gy, g) for c, f, g in self.terms))


@dataclass(frozen=True, eq=False)
class IntegralTriple:
    """
    K, I1, I2 of a resonant two-axis system.

    Attributes:
        lam (float): Common spacing m * lam_x = n * lam_y
        orders (tuple[int, int, int]): Measured orders of (K, I1, I2)
        nominal_orders (tuple[int, int, int]): Orders before cancellation
    """

    K: TwoAxisOperator
    I1: TwoAxisOperator
    I2: TwoAxisOperator
    H: TwoAxisOperator
    lam: float
    m: int
    n: int
    ladder_x: object
    ladder_y: object
    orders: tuple
    nominal_orders: tuple


def resonance(m, n, lam_x, lam_y, rtol=RESONANCE_RTOL):
    """
    m lam_x - n lam_y = 0 within rtol * max(lam_x, lam_y).

    Raises:
        ConfigError: non-positive spacings or powers
    """

    if m < 1 or n < 1:
        raise ConfigError(f"powers must be positive, got m = {m}, n = {n}")
    if not (lam_x > 0 and lam_y > 0):
        raise ConfigError(f"ladder spacings must be positive, got {lam_x}, {lam_y}")
    return abs(m * lam_x - n * lam_y) < rtol * max(lam_x, lam_y)


def build_triple(ladder_x, ladder_y, m=1, n=1, probes=PROBE_POINTS):
    """
    Integrals of H_x + H_y from one ladder pair per axis.

    Parameters:
        ladder_x, ladder_y (LadderPair): Ladders of H_x and H_y
        m, n (int): Powers with m lam_x = n lam_y

    Returns:
        IntegralTriple: Operators with measured orders

    Raises:
        ConfigError: the spacings are not resonant
    """

    if not resonance(m, n, ladder_x.lam, ladder_y.lam):
        raise ConfigError(
            f"no resonance: {m} * {ladder_x.lam:g} != {n} * {ladder_y.lam:g}"
        )

    Hx = TwoAxisOperator.x(ladder_x.H)
    Hy = TwoAxisOperator.y(ladder_y.H)
    up = TwoAxisOperator(((1.0, _power(ladder_x.raising, m), _power(ladder_y.lowering, n)),))
    down = TwoAxisOperator(((1.0, _power(ladder_x.lowering, m), _power(ladder_y.raising, n)),))
    K = (Hx - Hy).named("K")
    I1 = (up - down).named("I1")
    I2 = (up + down).named("I2")

    orders = tuple(op.measured_order(probes) for op in (K, I1, I2))
    nominal = tuple(op.nominal_order for op in (K, I1, I2))
    if orders != nominal:
        logger.info("integral orders after cancellation %s (nominal %s)", orders, nominal)

    return IntegralTriple(
        K=K,
        I1=I1,
        I2=I2,
        H=(Hx + Hy).named("H"),
        lam=float(m * ladder_x.lam),
        m=m,
        n=n,
        ladder_x=ladder_x,
        ladder_y=ladder_y,
        orders=orders,
        nominal_orders=nominal,
    )


def probe_states(Sx, Sy, count=DEFAULT_PROBE_STATES, tol=DEGENERACY_RTOL):
    """
    The lowest product states, completing the last multiplet.

    Returns:
        list[tuple[Multiplet, tuple[int, int]]]: Multiplet and index pair
    """

    chosen = []
    for multiplet in separable_2d(Sx, Sy, tol):
        if len(chosen) >= count:
            break
        chosen.extend((multiplet, member) for member in multiplet.members)
    return chosen


def _multiplet_projection(f, multiplet, Sx, Sy):
    """
    Amplitudes of f on the members of one multiplet and the part left over.

    Returns:
        tuple[dict, SeparableField]: {(k, l): <psi_kl, f>} and f minus its projection
    """

    amplitudes = {(k, l): f.amplitude(Sx.states[k], Sy.states[l]) for k, l in multiplet.members}
    projection = SeparableField(
        f.grid_x,
        f.grid_y,
        tuple((a, Sx.states[k], Sy.states[l]) for (k, l), a in amplitudes.items()),
    )
    return amplitudes, f - projection


@dataclass
class CommutationReport:
    residuals: dict
    worst: float
    states: int
    mapping: list = field(default_factory=list)
    captured_min: float = 1.0


def verify_commutation(triple, Sx, Sy, probes=DEFAULT_PROBE_STATES, tol=DEGENERACY_RTOL,
                       annihilated=ANNIHILATED_TOLERANCE):
    """
    Relative part of I psi outside the multiplet of psi, over product eigenstates.

    An integral maps each eigenspace of H = H_x + H_y into itself, so I psi
    must lie in the span of the multiplet psi belongs to.

    For I1 the report also lists how each state is spread over the members
    of its own multiplet (the degeneracy mapping).

    Parameters:
        triple (IntegralTriple): Integrals of H = H_x + H_y
        Sx, Sy (SpectrumResult): 1-D spectra of H_x and H_y
        probes (int): Number of lowest product states

    Returns:
        CommutationReport: Worst residual per integral and the mapping table
    """

    states = probe_states(Sx, Sy, probes, tol)
    integrals = {"K": triple.K, "I1": triple.I1, "I2": triple.I2}
    residuals = {name: 0.0 for name in integrals}
    mapping = []
    captured_min = 1.0

    for name, op in integrals.items():
        moved = []
        for multiplet, (i, j) in states:
            psi = SeparableField.product(Sx.states[i], Sy.states[j])
            moved.append(op.apply(psi))
        sizes = [f.norm() for f in moved]
        largest = max(sizes, default=0.0)

        for (multiplet, (i, j)), f, size in zip(states, moved, sizes):
            if size <= annihilated * largest:
                continue
            amplitudes, remainder = _multiplet_projection(f, multiplet, Sx, Sy)
            residuals[name] = max(residuals[name], remainder.norm() / size)

            if name == "I1":
                total = f.norm(interior=False)
                captured = 0.0
                for (k, l), value in amplitudes.items():
                    amplitude = value / total
                    captured += amplitude ** 2
                    if abs(amplitude) > 1e-6:
                        mapping.append({"source": [i, j], "target": [k, l], "amplitude": amplitude})
                captured_min = min(captured_min, captured)

    worst = max(residuals.values())
    logger.info("commutation residuals on %d product states: %s", len(states), residuals)
    return CommutationReport(
        residuals=residuals,
        worst=worst,
        states=len(states),
        mapping=mapping,
        captured_min=captured_min,
    )


@dataclass
class BracketReport:
    constant: float
    expected: float
    residual: float


def verify_I2_bracket(triple, Sx, Sy, probes=DEFAULT_PROBE_STATES, tol=DEGENERACY_RTOL,
                      annihilated=ANNIHILATED_TOLERANCE):
    """
    Fit [K, I1] psi = c I2 psi over the probe states.

    Both sides live in the multiplet of psi, so they are compared through
    their amplitudes on its members. With I1 psi_ij = sum a_kl psi_kl the
    bracket has amplitudes a_kl (k_kl - k_ij), where k_kl = E_x,k - E_y,l
    is the eigenvalue of K. The expected constant is 2 m lam_x.

    Returns:
        BracketReport: Fitted constant, expected value, worst relative residual
    """

    states = probe_states(Sx, Sy, probes, tol)

    def k_value(k, l):
        return Sx.energies[k] - Sy.energies[l]

    brackets = []
    targets = []
    for multiplet, (i, j) in states:
        psi = SeparableField.product(Sx.states[i], Sy.states[j])
        a, _ = _multiplet_projection(triple.I1.apply(psi), multiplet, Sx, Sy)
        b, _ = _multiplet_projection(triple.I2.apply(psi), multiplet, Sx, Sy)
        members = list(multiplet.members)
        brackets.append(np.array([a[kl] * (k_value(*kl) - k_value(i, j)) for kl in members]))
        targets.append(np.array([b[kl] for kl in members]))

    sizes = [float(np.linalg.norm(t)) for t in targets]
    largest = max(sizes, default=0.0)
    keep = [k for k, size in enumerate(sizes) if size > annihilated * largest]
    if not keep:
        raise ConfigError("every probe state is annihilated by I2")

    numerator = sum(float(np.dot(targets[k], brackets[k])) for k in keep)
    denominator = sum(sizes[k] ** 2 for k in keep)
    constant = numerator / denominator
    residual = max(
        float(np.linalg.norm(brackets[k] - constant * targets[k])) / max(float(np.linalg.norm(brackets[k])), 1e-300)
        for k in keep
    )
    return BracketReport(constant=float(constant), expected=2.0 * triple.lam, residual=float(residual))


def independence_proxy(triple, Sx, Sy, probes=DEFAULT_PROBE_STATES, tol=DEGENERACY_RTOL):
    """
    Singular values of the normalized matrix-element vectors of H, K and I1.

    Matrix elements <psi_p, O psi_q> between probe product states come from
    1-D inner products, one axis at a time.

    Returns:
        np.ndarray: Three singular values in descending order
    """

    states = [pair for _, pair in probe_states(Sx, Sy, probes, tol)]
    xs = sorted({i for i, _ in states})
    ys = sorted({j for _, j in states})

    def axis_matrix(op, spectrum, indices):
        if op is None:
            return {(k, i): float(k == i) for k in indices for i in indices}
        moved = {i: apply(op, spectrum.states[i]) for i in indices}
        return {(k, i): inner_product(spectrum.states[k], moved[i]) for k in indices for i in indices}

    rows = []
    for op in (triple.H, triple.K, triple.I1):
        elements = np.zeros((len(states), len(states)))
        for c, x_op, y_op in op.terms:
            mx = axis_matrix(x_op, Sx, xs)
            my = axis_matrix(y_op, Sy, ys)
            for p, (k, l) in enumerate(states):
                for q, (i, j) in enumerate(states):
                    elements[p, q] += c * mx[(k, i)] * my[(l, j)]
        vector = elements.ravel()
        rows.append(vector / max(np.linalg.norm(vector), 1e-300))
    return np.linalg.svd(np.vstack(rows), compute_uv=False)


def adjointness_defect(triple, probes=PROBE_POINTS):
    """
    Relative coefficient defects of I1_dag + I1 and I2_dag - I2.

    Returns:
        dict[str, float]: 'I1' (anti-self-adjoint) and 'I2' (self-adjoint)
    """

    def defect(op, sign):
        combined = op.adjoint() + sign * op
        values = combined.monomials(probes)
        reference = op.monomials(probes)
        scale = max(1.0, max(float(np.max(np.abs(v))) for v, _ in reference.values()))
        return max((float(np.max(np.abs(v))) for v, _ in values.values()), default=0.0) / scale

    return {"I1": defect(triple.I1, 1.0), "I2": defect(triple.I2, -1.0)}
