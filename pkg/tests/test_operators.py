import numpy as np
import pytest

from src.errors import DiscretizationError
from src.expressions import X, add, const, exp_, mul, power
from src.grid import make_grid, sample
from src.operators import (
    DiffOperator,
    adjoint,
    apply,
    coefficient_mismatch,
    commutator,
    compose,
    derivative_operator,
    expanded,
    first_order,
    identity,
    measured_order,
    multiplication,
    stencil,
    to_matrix,
)
from src.schrodinger import hamiltonian


def test_canonical_commutator():
    bracket = commutator(derivative_operator(1), multiplication(X))
    assert coefficient_mismatch(bracket, identity()) == 0.0
    assert measured_order(bracket) == 0


def test_leibniz_rule_on_second_order():
    w = exp_(X)
    op = compose(derivative_operator(2), multiplication(w))
    # d^2 (w f) = w f'' + 2 w' f' + w'' f with w = exp(x)
    assert coefficient_mismatch(op, DiffOperator(terms={2: w, 1: mul(2.0, w), 0: w})) == pytest.approx(0.0, abs=1e-14)


def test_first_order_adjoint_flips_derivative():
    W = add(X, power(X, 3))
    A = first_order("+", W, 0.5)
    A_dag = first_order("-", W, 0.5)
    assert coefficient_mismatch(adjoint(A), A_dag) == pytest.approx(0.0, abs=1e-14)


def test_adjoint_of_product_reverses_order():
    A = first_order("+", X, 1.0)
    B = DiffOperator(terms={2: const(1.0), 0: power(X, 2)})
    left = adjoint(compose(A, B))
    right = compose(adjoint(B), adjoint(A))
    assert coefficient_mismatch(left, right) == pytest.approx(0.0, abs=1e-12)


def test_nominal_and_measured_order():
    a_dag = first_order("-", X, 1.0)
    a = first_order("+", X, 1.0)
    number = compose(a_dag, a) - compose(a, a_dag)
    assert number.nominal_order == 2
    assert measured_order(number) == 0


def test_bad_sign_rejected():
    with pytest.raises(ValueError):
        first_order("*", X, 1.0)


def test_stencil_weights_sum_rules():
    weights = stencil(2)
    offsets = np.arange(len(weights)) - len(weights) // 2
    assert weights.sum() == pytest.approx(0.0, abs=1e-14)
    assert (weights * offsets ** 2).sum() == pytest.approx(2.0, rel=1e-14)


def test_apply_is_exact_on_low_polynomials():
    g = make_grid(-2.0, 2.0, 401)
    f = sample(g, power(X, 5))
    d2 = apply(derivative_operator(2), f)
    inner = g.interior(0.8)
    assert np.allclose(d2.values[inner], 20.0 * g.samples[inner] ** 3, atol=1e-8)


def test_chain_and_expanded_forms_agree(grid):
    W = X
    A = first_order("+", W, np.sqrt(0.5))
    A_dag = first_order("-", W, np.sqrt(0.5))
    chain = compose(A_dag, A)
    f = sample(grid, mul(power(X, 2), exp_(mul(-0.5, power(X, 2)))))
    region = grid.interior()
    by_chain = apply(chain, f)
    by_expansion = apply(chain, f, expanded_form=True)
    assert (by_chain - by_expansion).norm(region) / by_chain.norm(region) < 1e-9


def test_hamiltonian_matrix_is_symmetric(small_grid):
    H = hamiltonian(mul(0.5, power(X, 2)))
    matrix = to_matrix(H, small_grid)
    assert abs(matrix - matrix.T).max() < 1e-10 * abs(matrix).max()


def test_high_order_needs_fine_grid():
    coarse = make_grid(-1.0, 1.0, 64)
    op = compose(*([derivative_operator(3)] * 3))
    with pytest.raises(DiscretizationError):
        apply(op, sample(coarse, X))


def test_expanded_keeps_label():
    op = compose(first_order("+", X, 1.0), first_order("-", X, 1.0)).named("N")
    assert expanded(op).label == "N"
    assert expanded(op).is_atom


def test_jacobi_identity():
    A = first_order("+", X, 1.0)
    B = DiffOperator(terms={2: const(1.0), 0: exp_(mul(0.5, X))})
    C = DiffOperator(terms={1: power(X, 2), 0: X})
    total = expanded(
        commutator(A, commutator(B, C)) + commutator(B, commutator(C, A)) + commutator(C, commutator(A, B))
    )
    assert coefficient_mismatch(total, DiffOperator(terms={0: const(0.0)})) < 1e-10


def test_matrix_of_product_matches_product_of_matrices(grid):
    A = first_order("+", X, np.sqrt(0.5))
    A_dag = adjoint(A)
    product = to_matrix(A_dag, grid) @ to_matrix(A, grid)
    direct = to_matrix(expanded(compose(A_dag, A)), grid)
    v = np.exp(-0.5 * (grid.samples - 0.7) ** 2) * np.cos(grid.samples)
    region = grid.interior()
    left = (product @ v)[region]
    right = (direct @ v)[region]
    assert np.linalg.norm(left - right) < 1e-8 * np.linalg.norm(right)


def test_oscillator_ground_state(grid):
    H = hamiltonian(mul(0.5, power(X, 2)), label="H_osc")
    psi0 = sample(grid, exp_(mul(-0.5, power(X, 2)))).normalized()
    region = grid.interior()
    assert (apply(H, psi0) - psi0 * 0.5).norm(region) < 1e-9
