"""
operators.py

Linear differential operators sum_k c_k(x) d^k/dx^k with expression
coefficients.

An operator is either an atom (explicit coefficient map) or a chain: a
linear combination of products of atoms. Chains keep composition exact
without expanding, and `apply` walks them atom by atom so only low-order
stencils are ever used on grid data. Coefficients of a chain are expanded
by the Leibniz rule on demand.
"""

import logging
import math
from functools import cached_property, lru_cache

import numpy as np
from scipy import sparse
from scipy.ndimage import correlate1d
from sympy import Rational
from sympy.calculus.finite_diff import finite_diff_weights

from src.config import (
    COEFFICIENT_TOLERANCE,
    HIGH_ORDER_LIMIT,
    HIGH_ORDER_MIN_POINTS,
    PROBE_POINTS,
    STENCIL_ACCURACY,
)
from src.errors import DiscretizationError
from src.expressions import ZERO, ONE, ScalarExpr, add, const, mul
from src.grid import GridFunction

logger = logging.getLogger(__name__)


class DiffOperator:
    """
    Immutable differential operator.

    Parameters:
        terms (dict[int, ScalarExpr] | None): Coefficient map of an atom
        chain (tuple | None): ((coef, (atom, ...)), ...) for composites
        label (str | None): Name used in logs and reports
    """

    def __init__(self, terms=None, chain=None, label=None):
        if (terms is None) == (chain is None):
            raise ValueError("give exactly one of terms or chain")
        self.label = label
        self._chain = None
        self._terms = None
        if terms is not None:
            cleaned = {}
            for k, coef in terms.items():
                if int(k) != k or k < 0:
                    raise ValueError(f"derivative order must be a non-negative integer, got {k}")
                coef = coef if isinstance(coef, ScalarExpr) else const(coef)
                if coef is not ZERO:
                    cleaned[int(k)] = coef
            self._terms = cleaned
        else:
            self._chain = tuple((float(c), tuple(atoms)) for c, atoms in chain if c != 0.0)

    @property
    def is_atom(self):
        return self._chain is None

    @property
    def chain(self):
        if self._chain is None:
            return ((1.0, (self,)),)
        return self._chain

    @cached_property
    def coefficients(self):
        """Expanded coefficient map {order: expression}."""
        if self._terms is not None:
            return dict(self._terms)
        collected = {}
        for coef, atoms in self._chain:
            terms = atoms[0].coefficients
            for atom in atoms[1:]:
                terms = _compose_terms(terms, atom.coefficients)
            for k, c in terms.items():
                collected.setdefault(k, []).append(mul(coef, c))
        expanded = {}
        for k, parts in collected.items():
            total = add(*parts)
            if total is not ZERO:
                expanded[k] = total
        return expanded

    @property
    def order(self):
        return max(self.coefficients, default=0)

    @property
    def nominal_order(self):
        if self._terms is not None:
            return max(self._terms, default=0)
        return max((sum(a.nominal_order for a in atoms) for _, atoms in self._chain), default=0)

    def coefficient(self, k):
        return self.coefficients.get(k, ZERO)

    @cached_property
    def adjoint_atom(self):
        return DiffOperator(terms=_adjoint_terms(self.coefficients))

    def named(self, label):
        if self._terms is not None:
            return DiffOperator(terms=self._terms, label=label)
        return DiffOperator(chain=self._chain, label=label)

    # algebra

    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = identity() * float(other)
        if self.is_atom and other.is_atom:
            merged = {}
            for k in set(self._terms) | set(other._terms):
                merged[k] = add(self._terms.get(k, ZERO), other._terms.get(k, ZERO))
            return DiffOperator(terms=merged)
        return DiffOperator(chain=self.chain + other.chain)

    __radd__ = __add__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-1.0) * other

    def __rsub__(self, other):
        return (-1.0) * self + other

    def __mul__(self, scalar):
        if isinstance(scalar, DiffOperator):
            return compose(self, scalar)
        scalar = float(scalar)
        if self.is_atom:
            return DiffOperator(terms={k: mul(scalar, c) for k, c in self._terms.items()})
        return DiffOperator(chain=tuple((scalar * c, atoms) for c, atoms in self._chain))

    __rmul__ = __mul__

    def __matmul__(self, other):
        return compose(self, other)

    def __repr__(self):
        name = self.label or ("atom" if self.is_atom else f"chain[{len(self._chain)}]")
        return f"DiffOperator({name}, order<={self.nominal_order})"


def _compose_terms(left, right):
    """Leibniz rule: p d^i . q d^j = sum_l C(i,l) p q^(l) d^(i-l+j)."""

    collected = {}
    for i, p in left.items():
        for j, q in right.items():
            for l in range(i + 1):
                term = mul(float(math.comb(i, l)), p, q.nth_derivative(l))
                if term is not ZERO:
                    collected.setdefault(i - l + j, []).append(term)
    return {k: add(*parts) for k, parts in collected.items()}


def _adjoint_terms(terms):
    """Formal L2 adjoint: sum_k (-1)^k d^k . c_k in standard form."""

    collected = {}
    for k, c in terms.items():
        sign = -1.0 if k % 2 else 1.0
        for l in range(k + 1):
            collected.setdefault(k - l, []).append(
                mul(sign * math.comb(k, l), c.nth_derivative(l))
            )
    return {k: add(*parts) for k, parts in collected.items()}


# constructors

def identity():
    return DiffOperator(terms={0: ONE}, label="1")


def multiplication(expr):
    return DiffOperator(terms={0: expr})


def derivative_operator(k=1):
    return DiffOperator(terms={k: ONE}, label=f"d^{k}")


def first_order(sign, w, scale):
    """
    scale * (sign * d/dx + w).

    Parameters:
        sign (int | str): +1/'+' or -1/'-'
        w (ScalarExpr): Multiplicative part
        scale (float): Overall factor

    Returns:
        DiffOperator: First-order atom
    """

    if sign in ("+", 1, 1.0):
        s = 1.0
    elif sign in ("-", -1, -1.0):
        s = -1.0
    else:
        raise ValueError(f"sign must be + or -, got {sign!r}")
    return DiffOperator(terms={1: const(s * scale), 0: mul(float(scale), w)})


def compose(*operators):
    """Product of operators, rightmost acting first."""

    chain = ((1.0, ()),)
    for op in operators:
        chain = tuple(
            (c1 * c2, atoms1 + atoms2)
            for c1, atoms1 in chain
            for c2, atoms2 in op.chain
        )
    return DiffOperator(chain=chain)


def adjoint(op):
    """Formal adjoint; chains are reversed atom by atom."""
    if op.is_atom:
        return op.adjoint_atom
    return DiffOperator(
        chain=tuple((c, tuple(a.adjoint_atom for a in reversed(atoms))) for c, atoms in op.chain)
    )


def commutator(p, q):
    return compose(p, q) - compose(q, p)


def expanded(op):
    """Collapse a chain into a single atom."""
    return DiffOperator(terms=op.coefficients, label=op.label)


# coefficient-level comparisons

def coefficient_values(op, probes=PROBE_POINTS):
    probes = np.asarray(probes, dtype=float)
    return {k: c.eval(probes) for k, c in op.coefficients.items()}


def coefficient_mismatch(p, q, probes=PROBE_POINTS):
    """Largest |p_k(x) - q_k(x)| over all orders and probe points."""

    values_p = coefficient_values(p, probes)
    values_q = coefficient_values(q, probes)
    worst = 0.0
    for k in set(values_p) | set(values_q):
        diff = values_p.get(k, 0.0) - values_q.get(k, 0.0)
        worst = max(worst, float(np.max(np.abs(diff))))
    return worst


def measured_order(op, probes=PROBE_POINTS, tol=COEFFICIENT_TOLERANCE):
    """
    Highest k whose coefficient is numerically nonzero on the probes.

    Returns -1 for an operator that vanishes identically on the probes.
    """

    values = coefficient_values(op, probes)
    if not values:
        return -1
    scale = max(1.0, max(float(np.max(np.abs(v))) for v in values.values()))
    live = [k for k, v in values.items() if float(np.max(np.abs(v))) > tol * scale]
    return max(live, default=-1)


# discretization

@lru_cache(maxsize=None)
def stencil(m, accuracy=STENCIL_ACCURACY):
    """
    Centered finite-difference weights for d^m with the given accuracy.

    Returns:
        np.ndarray: Weights on offsets -p..p (unit spacing)
    """

    if m < 1:
        raise ValueError("stencil order must be positive")
    half = (m + 1) // 2 - 1 + accuracy // 2
    offsets = list(range(-half, half + 1))
    weights = finite_diff_weights(m, offsets, Rational(0))[m][-1]
    table = np.array([float(w) for w in weights])
    table.setflags(write=False)
    return table


def _check_resolvable(order, grid):
    if order > HIGH_ORDER_LIMIT and grid.n < HIGH_ORDER_MIN_POINTS:
        raise DiscretizationError(
            f"operator of order {order} needs at least {HIGH_ORDER_MIN_POINTS} points, grid has {grid.n}"
        )


def _sampled_terms(atom, grid):
    cache = atom.__dict__.setdefault("_samples", {})
    if grid not in cache:
        cache[grid] = {k: np.broadcast_to(c.eval(grid.samples), (grid.n,)) for k, c in atom.coefficients.items()}
    return cache[grid]


def _derivative(values, m, spacing):
    if m == 0:
        return values
    return correlate1d(values, stencil(m), mode="constant", cval=0.0) / spacing ** m


def _apply_terms(samples, values, spacing):
    total = np.zeros_like(values, dtype=float)
    for k, coef in samples.items():
        total = total + coef * _derivative(values, k, spacing)
    return total


def apply(op, f, expanded_form=False):
    """
    Apply an operator to a grid function with centered stencils.

    Chains are applied atom by atom (right to left). Samples outside the
    box are taken as zero.

    Parameters:
        op (DiffOperator): Operator
        f (GridFunction): Input samples
        expanded_form (bool): Use the expanded coefficients instead of the chain

    Returns:
        GridFunction: op f on the same grid
    """

    grid = f.grid
    _check_resolvable(op.nominal_order, grid)
    values = np.asarray(f.values, dtype=float)
    if op.is_atom or expanded_form:
        atom = op if op.is_atom else expanded(op)
        return GridFunction(grid, _apply_terms(_sampled_terms(atom, grid), values, grid.spacing))

    total = np.zeros(grid.n)
    for coef, atoms in op.chain:
        current = values
        for atom in reversed(atoms):
            current = _apply_terms(_sampled_terms(atom, grid), current, grid.spacing)
        total = total + coef * current
    return GridFunction(grid, total)


def to_matrix(op, grid):
    """
    Banded matrix of the operator with zero (Dirichlet) boundary values.

    Parameters:
        op (DiffOperator): Operator, expanded if it is a chain
        grid (Grid): Lattice

    Returns:
        scipy.sparse.csr_matrix: n x n matrix
    """

    _check_resolvable(op.order, grid)
    n = grid.n
    diagonals = {}
    for k, coef in op.coefficients.items():
        values = np.broadcast_to(coef.eval(grid.samples), (n,))
        if k == 0:
            diagonals[0] = diagonals.get(0, 0.0) + values
            continue
        weights = stencil(k) / grid.spacing ** k
        half = len(weights) // 2
        for offset, w in zip(range(-half, half + 1), weights):
            if w == 0.0:
                continue
            rows = values[max(0, -offset): n - max(0, offset)]
            diagonals[offset] = diagonals.get(offset, 0.0) + w * rows
    offsets = sorted(diagonals)
    bands = [np.broadcast_to(diagonals[o], (n - abs(o),)) for o in offsets]
    return sparse.diags(bands, offsets, shape=(n, n), format="csr")
