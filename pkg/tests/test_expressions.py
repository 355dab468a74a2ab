import math

import numpy as np
import pytest
from numpy.polynomial.hermite_e import hermeval
from scipy.special import erf

from src.config import PROBE_POINTS
from src.errors import ConfigError, DomainError
from src.expressions import (
    ONE,
    ZERO,
    X,
    Const,
    add,
    const,
    cumulative,
    diff,
    erf_,
    exp_,
    from_sympy,
    mul,
    p4_node,
    power,
    simplify,
)
from src.painleve import p4_integrate, p4_rhs

P = np.asarray(PROBE_POINTS)


def node_count(node):
    seen = set()
    stack = [node]
    while stack:
        item = stack.pop()
        if id(item) not in seen:
            seen.add(id(item))
            stack.extend(item.children())
    return len(seen)


def test_like_terms_cancel():
    assert add(X, mul(-1.0, X)) is ZERO
    assert mul(X, power(X, -1)) is ONE


def test_constants_fold():
    node = add(2.0, const(3.0), mul(4.0, ONE))
    assert isinstance(node, Const)
    assert node.value == 9.0


def test_exponentials_merge():
    node = mul(exp_(X), exp_(mul(-1.0, X)))
    assert node is ONE


def test_product_rule():
    f = mul(power(X, 3), exp_(X))
    expected = (3.0 * P ** 2 + P ** 3) * np.exp(P)
    assert np.allclose(diff(f).eval(P), expected, rtol=1e-14)


def test_quotient_derivative():
    f = mul(2.0, X, power(add(power(X, 2), 1.0), -1))
    expected = 2.0 * (1.0 - P ** 2) / (1.0 + P ** 2) ** 2
    assert np.allclose(diff(f).eval(P), expected, rtol=1e-13)


def test_erf_derivative_is_gaussian():
    f = erf_(mul(0.5, X))
    assert np.allclose(f.eval(P), erf(0.5 * P), rtol=1e-15)
    expected = np.exp(-0.25 * P ** 2) / math.sqrt(math.pi)
    assert np.allclose(diff(f).eval(P), expected, rtol=1e-14)


def test_cumulative_derivative_is_integrand():
    integrand = exp_(mul(-1.0, power(X, 2)))
    F = cumulative(integrand, 0.0)
    assert diff(F) is integrand
    assert F.eval(0.0) == 0.0
    assert F.eval(6.0) == pytest.approx(math.sqrt(math.pi) / 2.0, rel=1e-12)


def test_eighth_derivative_is_hermite():
    # x exp(-x^2/2) = -d/dx exp(-x^2/2), so its 8th derivative is He_9(x) exp(-x^2/2)
    f = mul(X, exp_(mul(-0.5, power(X, 2))))
    node = f.nth_derivative(8)
    expected = hermeval(P, [0.0] * 9 + [1.0]) * np.exp(-0.5 * P ** 2)
    assert np.allclose(node.eval(P), expected, rtol=1e-10, atol=1e-10)
    assert node_count(node) > 1


def test_simplify_preserves_values():
    f = add(mul(X, X), mul(2.0, X), 1.0)
    g = power(add(X, 1.0), 2)
    assert np.allclose(simplify(f).eval(P), g.eval(P))


def test_scalar_and_array_evaluation():
    f = add(power(X, 2), 1.0)
    assert f.eval(2.0) == 5.0
    assert f.eval(np.array([0.0, 1.0])).tolist() == [1.0, 2.0]
    assert const(3.0).eval(P).shape == P.shape


def test_zero_to_negative_power_rejected():
    with pytest.raises(DomainError):
        power(ZERO, -1)


def test_non_integer_power_rejected():
    with pytest.raises(DomainError):
        power(X, 0.5)


def test_from_sympy_matches_direct_build():
    parsed = from_sympy("x + 2*x/(x**2 + 1)")
    direct = add(X, mul(2.0, X, power(add(power(X, 2), 1.0), -1)))
    assert np.allclose(parsed.eval(P), direct.eval(P), rtol=1e-15)


def test_from_sympy_hyperbolic():
    parsed = from_sympy("tanh(x) + cosh(x)")
    assert np.allclose(parsed.eval(P), np.tanh(P) + np.cosh(P), rtol=1e-13)


@pytest.mark.parametrize("source", ["x + y", "sqrt(x)", "sin(x)", "x**(1/2)", "x +* 2"])
def test_from_sympy_rejects(source):
    with pytest.raises(ConfigError):
        from_sympy(source)


def _random_tree(rng, depth):
    if depth == 0:
        return X if rng.random() < 0.6 else const(rng.uniform(-1.0, 1.0))
    left = _random_tree(rng, depth - 1)
    right = _random_tree(rng, depth - 1)
    kind = rng.integers(5)
    if kind == 0:
        return add(left, right)
    if kind == 1:
        return mul(left, right)
    if kind == 2:
        return exp_(mul(0.3, left))
    if kind == 3:
        return erf_(left)
    return add(power(left, 2), mul(0.5, right))


@pytest.mark.parametrize("seed", range(12))
def test_derivative_matches_central_difference(seed):
    rng = np.random.default_rng(seed)
    f = _random_tree(rng, 3)
    x = np.linspace(-1.0, 1.0, 9)
    h = 1e-5
    numeric = (f.eval(x + h) - f.eval(x - h)) / (2.0 * h)
    exact = np.broadcast_to(diff(f).eval(x), x.shape)
    assert np.allclose(exact, numeric, rtol=1e-6, atol=1e-6)


def test_second_derivative_of_p4_node_is_the_equation():
    alpha, beta = 0.0, -2.0
    solution = p4_integrate(alpha, beta, 0.3, -0.6, -2.0, 3.0)
    f = p4_node(solution, X, 0)
    z = np.linspace(0.5, 2.5, 7)

    # numeric table follows f = -2z
    assert np.allclose(f.eval(z), -2.0 * z, atol=1e-8)
    assert np.allclose(diff(f).eval(z), -2.0, atol=1e-7)

    second = diff(diff(f))
    expected = p4_rhs(z, solution.evaluate(z, 0), solution.evaluate(z, 1), alpha, beta)
    assert np.allclose(second.eval(z), expected, rtol=1e-12, atol=1e-12)
    assert abs(second.eval(1.0)) < 1e-6
