"""
expressions.py

Expression trees for coefficient functions of one real variable.

Nodes are immutable and hash-consed: building the same expression twice
returns the same object, so like terms collect by identity. Every node
kind knows its own derivative, which makes the set closed under
differentiation. Values are computed vectorised over numpy arrays.
"""

import itertools
import logging
import math
import weakref
from collections import OrderedDict
from functools import cached_property

import numpy as np
import sympy
from scipy.special import erf as _erf

from src.config import NODE_CACHE_SIZE
from src.errors import ConfigError, DomainError
from src.grid import cumulative_quadrature

logger = logging.getLogger(__name__)

_INTERNED = weakref.WeakValueDictionary()
_SERIAL = itertools.count()
_TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)


def _as_expr(value):
    if isinstance(value, ScalarExpr):
        return value
    if isinstance(value, (int, float, np.integer, np.floating)):
        return const(value)
    raise TypeError(f"cannot use {type(value).__name__} as a scalar expression")


class ScalarExpr:
    """
    Base node. Subclasses implement `_setup`, `_compute` and `_diff`.
    """

    kind = "expr"

    @classmethod
    def _intern(cls, key, *args):
        full_key = (cls.__name__,) + tuple(key)
        node = _INTERNED.get(full_key)
        if node is None:
            node = object.__new__(cls)
            node._setup(*args)
            node.key = full_key
            node.serial = next(_SERIAL)
            _INTERNED[full_key] = node
        return node

    def _setup(self, *args):
        pass

    def children(self):
        return ()

    # evaluation

    def eval(self, x):
        """
        Evaluate on a scalar or an array of points.

        Parameters:
            x (float | np.ndarray): Evaluation points

        Returns:
            float | np.ndarray: Values with the shape of x
        """

        points = np.asarray(x, dtype=float)
        value = self._value(points, {})
        value = np.broadcast_to(np.asarray(value, dtype=float), points.shape)
        if points.ndim == 0:
            return float(value)
        return np.array(value)

    def _value(self, x, memo):
        key = id(self)
        if key not in memo:
            memo[key] = self._compute(x, memo)
        return memo[key]

    def _compute(self, x, memo):
        raise NotImplementedError

    # differentiation

    @cached_property
    def derivative(self):
        return self._diff()

    def _diff(self):
        raise NotImplementedError

    def nth_derivative(self, k):
        node = self
        for _ in range(k):
            node = node.derivative
        return node

    # arithmetic

    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return add(self, mul(-1.0, other))

    def __rsub__(self, other):
        return add(other, mul(-1.0, self))

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return mul(self, power(_as_expr(other), -1))

    def __rtruediv__(self, other):
        return mul(other, power(self, -1))

    def __neg__(self):
        return mul(-1.0, self)

    def __pow__(self, k):
        return power(self, k)

    def __repr__(self):
        return f"{type(self).__name__}#{self.serial}"


class Const(ScalarExpr):
    kind = "constant"

    def _setup(self, value):
        self.value = value

    def _compute(self, x, memo):
        return self.value

    def _diff(self):
        return ZERO

    def __repr__(self):
        return f"Const({self.value!r})"


class Variable(ScalarExpr):
    kind = "variable"

    def _compute(self, x, memo):
        return x

    def _diff(self):
        return ONE

    def __repr__(self):
        return "x"


class Sum(ScalarExpr):
    """constant + sum of coef * core."""

    kind = "sum"

    def _setup(self, constant, terms):
        self.constant = constant
        self.terms = terms

    def children(self):
        return tuple(core for _, core in self.terms)

    def _compute(self, x, memo):
        total = self.constant
        for coef, core in self.terms:
            total = total + coef * core._value(x, memo)
        return total

    def _diff(self):
        return add(*(mul(coef, core.derivative) for coef, core in self.terms))


class Product(ScalarExpr):
    """coef * prod of base**k with integer k (covers quotients and powers)."""

    kind = "product"

    def _setup(self, coef, factors):
        self.coef = coef
        self.factors = factors

    def children(self):
        return tuple(base for base, _ in self.factors)

    def _compute(self, x, memo):
        total = self.coef
        for base, k in self.factors:
            values = base._value(x, memo)
            if k < 0:
                zero = np.asarray(values) == 0.0
                if np.any(zero):
                    location = np.broadcast_to(x, zero.shape)[zero]
                    where = float(location.flat[0]) if location.size else None
                    raise DomainError(f"pole of a quotient at x = {where}", location=where)
                total = total / values ** (-k)
            else:
                total = total * values ** k
        return total

    def _diff(self):
        return add(*(
            mul(self, float(k), base.derivative, power(base, -1))
            for base, k in self.factors
        ))


class Exp(ScalarExpr):
    kind = "exp"

    def _setup(self, arg):
        self.arg = arg

    def children(self):
        return (self.arg,)

    def _compute(self, x, memo):
        return np.exp(self.arg._value(x, memo))

    def _diff(self):
        return mul(self, self.arg.derivative)


class Erf(ScalarExpr):
    kind = "erf"

    def _setup(self, arg):
        self.arg = arg

    def children(self):
        return (self.arg,)

    def _compute(self, x, memo):
        return _erf(self.arg._value(x, memo))

    def _diff(self):
        return mul(_TWO_OVER_SQRT_PI, exp_(mul(-1.0, power(self.arg, 2))), self.arg.derivative)


class CumulativeIntegral(ScalarExpr):
    """
    F(x) = integral of `integrand` from x0 to x, valued by quadrature.
    """

    kind = "cumulative"

    def _setup(self, integrand, x0):
        self.integrand = integrand
        self.x0 = x0
        self._cache = OrderedDict()

    def children(self):
        return (self.integrand,)

    def _compute(self, x, memo):
        points = np.asarray(x, dtype=float)
        cache_key = (points.shape, points.tobytes())
        if cache_key in self._cache:
            self._cache.move_to_end(cache_key)
            return self._cache[cache_key]
        values = cumulative_quadrature(self.integrand.eval, self.x0, points)
        values.setflags(write=False)
        self._cache[cache_key] = values
        if len(self._cache) > NODE_CACHE_SIZE:
            self._cache.popitem(last=False)
        return values

    def _diff(self):
        return self.integrand


class P4Function(ScalarExpr):
    """
    f(u) or f'(u) for a fourth Painleve transcendent carried as a table.

    The derivative of the order-1 node is rewritten through the ODE, so
    no second-derivative node ever appears.
    """

    kind = "p4"

    def _setup(self, solution, argument, order):
        self.label = f"P4[{solution.alpha:g},{solution.beta:g}]^({order})"
        self.solution = solution
        self.argument = argument
        self.order = order

    def __repr__(self):
        return f"{self.label}({self.argument!r})"

    def children(self):
        return (self.argument,)

    def _compute(self, x, memo):
        return self.solution.evaluate(self.argument._value(x, memo), self.order)

    def _diff(self):
        u = self.argument
        if self.order == 0:
            return mul(p4_node(self.solution, u, 1), u.derivative)
        return mul(p4_second_derivative(self.solution, u), u.derivative)


# constructors

def const(value):
    value = float(value) + 0.0
    if not math.isfinite(value):
        raise DomainError(f"non-finite constant {value}")
    return Const._intern((value,), value)


ZERO = const(0.0)
ONE = const(1.0)
X = Variable._intern(())


def _split(node):
    if isinstance(node, Const):
        return node.value, None
    if isinstance(node, Product) and node.coef != 1.0:
        return node.coef, _product(1.0, node.factors)
    return 1.0, node


def add(*args):
    """Sum with flattening, constant folding and like-term collection."""

    constant = 0.0
    collected = {}

    def accumulate(coef, core):
        entry = collected.get(id(core))
        if entry is None:
            collected[id(core)] = [core, coef]
        else:
            entry[1] += coef

    for arg in args:
        node = _as_expr(arg)
        coef, core = _split(node)
        if core is None:
            constant += coef
        elif isinstance(core, Sum):
            constant += coef * core.constant
            for inner_coef, inner_core in core.terms:
                accumulate(coef * inner_coef, inner_core)
        else:
            accumulate(coef, core)

    terms = sorted(
        ((coef, core) for core, coef in collected.values() if coef != 0.0),
        key=lambda item: item[1].serial,
    )
    if not terms:
        return const(constant)
    if len(terms) == 1 and constant == 0.0:
        coef, core = terms[0]
        return core if coef == 1.0 else mul(coef, core)
    constant = constant + 0.0
    key = (constant, tuple((coef, id(core)) for coef, core in terms))
    return Sum._intern(key, constant, tuple(terms))


def _product(coef, factors):
    if coef == 0.0:
        return ZERO
    if not factors:
        return const(coef)
    if len(factors) == 1 and factors[0][1] == 1 and coef == 1.0:
        return factors[0][0]
    key = (coef, tuple((id(base), k) for base, k in factors))
    return Product._intern(key, coef, tuple(factors))


def mul(*args):
    """Product with constant folding, power collection and Exp merging."""

    coef = 1.0
    powers = {}
    exponents = []

    def accumulate(base, k):
        if isinstance(base, Exp):
            exponents.append(mul(float(k), base.arg))
            return
        entry = powers.get(id(base))
        if entry is None:
            powers[id(base)] = [base, k]
        else:
            entry[1] += k

    for arg in args:
        node = _as_expr(arg)
        if isinstance(node, Const):
            coef *= node.value
        elif isinstance(node, Product):
            coef *= node.coef
            for base, k in node.factors:
                accumulate(base, k)
        else:
            accumulate(node, 1)

    if coef == 0.0:
        return ZERO

    factors = [(base, k) for base, k in powers.values() if k != 0]
    if exponents:
        total = add(*exponents)
        if isinstance(total, Const):
            coef *= math.exp(total.value)
        else:
            factors.append((Exp._intern((id(total),), total), 1))
    factors.sort(key=lambda item: item[0].serial)

    if len(factors) == 1 and factors[0][1] == 1 and isinstance(factors[0][0], Sum):
        inner = factors[0][0]
        return add(coef * inner.constant, *(mul(coef * c, core) for c, core in inner.terms))
    return _product(coef, factors)


def power(node, k):
    """Integer power of an expression."""

    node = _as_expr(node)
    if int(k) != k:
        raise DomainError(f"only integer powers are supported, got {k}")
    k = int(k)
    if k == 0:
        return ONE
    if k == 1:
        return node
    if isinstance(node, Const):
        if node.value == 0.0 and k < 0:
            raise DomainError("division by a zero constant", location=None)
        return const(node.value ** k)
    if isinstance(node, Exp):
        return exp_(mul(float(k), node.arg))
    if isinstance(node, Product):
        scaled = []
        for base, kk in node.factors:
            if isinstance(base, Exp):
                scaled.append(exp_(mul(float(kk * k), base.arg)))
            else:
                scaled.append(_product(1.0, ((base, kk * k),)))
        return mul(node.coef ** k, *scaled)
    return _product(1.0, ((node, k),))


def exp_(arg):
    arg = _as_expr(arg)
    if isinstance(arg, Const):
        return const(math.exp(arg.value))
    return mul(Exp._intern((id(arg),), arg))


def erf_(arg):
    arg = _as_expr(arg)
    if isinstance(arg, Const):
        return const(math.erf(arg.value))
    return Erf._intern((id(arg),), arg)


def cumulative(integrand, x0=0.0):
    """Antiderivative of `integrand` anchored at x0."""

    integrand = _as_expr(integrand)
    if integrand is ZERO:
        return ZERO
    x0 = float(x0)
    if isinstance(integrand, Const):
        return add(mul(integrand.value, X), -integrand.value * x0)
    return CumulativeIntegral._intern((id(integrand), x0), integrand, x0)


def p4_node(solution, argument, order=0):
    if order not in (0, 1):
        raise ValueError(f"P4 node order must be 0 or 1, got {order}")
    argument = _as_expr(argument)
    return P4Function._intern((id(solution), id(argument), order), solution, argument, order)


def p4_second_derivative(solution, u):
    """f'' expressed through f, f' and the argument u."""

    f = p4_node(solution, u, 0)
    fp = p4_node(solution, u, 1)
    return add(
        mul(0.5, power(fp, 2), power(f, -1)),
        mul(1.5, power(f, 3)),
        mul(4.0, u, power(f, 2)),
        mul(2.0, add(power(u, 2), -solution.alpha), f),
        mul(solution.beta, power(f, -1)),
    )


def diff(node):
    """Exact derivative tree."""
    return _as_expr(node).derivative


def simplify(node):
    """
    Rebuild a tree bottom-up through the smart constructors.

    Parameters:
        node (ScalarExpr): Expression to normalise

    Returns:
        ScalarExpr: Value-equivalent expression
    """

    memo = {}

    def rebuild(item):
        key = id(item)
        if key in memo:
            return memo[key]
        if isinstance(item, (Const, Variable)):
            result = item
        elif isinstance(item, Sum):
            result = add(item.constant, *(mul(c, rebuild(core)) for c, core in item.terms))
        elif isinstance(item, Product):
            result = mul(item.coef, *(power(rebuild(base), k) for base, k in item.factors))
        elif isinstance(item, Exp):
            result = exp_(rebuild(item.arg))
        elif isinstance(item, Erf):
            result = erf_(rebuild(item.arg))
        elif isinstance(item, CumulativeIntegral):
            result = cumulative(rebuild(item.integrand), item.x0)
        elif isinstance(item, P4Function):
            result = p4_node(item.solution, rebuild(item.argument), item.order)
        else:
            result = item
        memo[key] = result
        return result

    return rebuild(_as_expr(node))


# parsing

_SYMBOL_X = sympy.Symbol("x", real=True)


def _exp_pair(u):
    return exp_(u), exp_(mul(-1.0, u))


def from_sympy(source):
    """
    Convert a sympy expression (or a string) in the single symbol x.

    Supported: numbers, +, *, integer powers, exp, erf, sinh, cosh, tanh, sech.

    Raises:
        ConfigError: unknown symbols, non-integer powers or functions
    """

    if isinstance(source, str):
        try:
            source = sympy.sympify(source, locals={"x": _SYMBOL_X})
        except (sympy.SympifyError, SyntaxError, TypeError) as exc:
            raise ConfigError(f"cannot parse superpotential {source!r}: {exc}") from exc
    source = source.subs(sympy.Symbol("x"), _SYMBOL_X)

    def walk(item):
        if item.is_number:
            value = complex(item)
            if value.imag != 0.0:
                raise ConfigError(f"complex constant {item} in superpotential")
            return const(value.real)
        if item == _SYMBOL_X:
            return X
        if item.is_Symbol:
            raise ConfigError(f"unknown symbol {item} in superpotential")
        if item.is_Add:
            return add(*(walk(arg) for arg in item.args))
        if item.is_Mul:
            return mul(*(walk(arg) for arg in item.args))
        if item.is_Pow:
            base, exponent = item.args
            if not exponent.is_Integer:
                raise ConfigError(f"non-integer power {item} in superpotential")
            return power(walk(base), int(exponent))
        if isinstance(item, sympy.exp):
            return exp_(walk(item.args[0]))
        if isinstance(item, sympy.erf):
            return erf_(walk(item.args[0]))
        if isinstance(item, (sympy.sinh, sympy.cosh, sympy.tanh, sympy.sech)):
            up, down = _exp_pair(walk(item.args[0]))
            if isinstance(item, sympy.sinh):
                return mul(0.5, add(up, mul(-1.0, down)))
            if isinstance(item, sympy.cosh):
                return mul(0.5, add(up, down))
            if isinstance(item, sympy.tanh):
                return mul(add(up, mul(-1.0, down)), power(add(up, down), -1))
            return mul(2.0, power(add(up, down), -1))
        raise ConfigError(f"unsupported function {item.func.__name__} in superpotential")

    return walk(source)
