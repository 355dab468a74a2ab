"""
painleve.py

Numerical and rational solutions of the fourth Painleve equation

    f'' = f'^2 / (2f) + 3/2 f^3 + 4 z f^2 + 2 (z^2 - alpha) f + beta / f

carried as interpolation tables with a pole-free domain.
"""

import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.integrate import DOP853
from scipy.interpolate import CubicHermiteSpline

from src.config import (
    P4_ATOL,
    P4_MAX_ABS,
    P4_MIN_ABS,
    P4_MIN_STEP,
    P4_RATIONAL_SPAN,
    P4_RTOL,
    P4_TABLE_STEP,
)
from src.errors import ConfigError, ConvergenceError, DomainError
from src.expressions import const, mul, p4_node

logger = logging.getLogger(__name__)

# (alpha, beta) -> slope c of the solution f(z) = c z
RATIONAL_SOLUTIONS = {
    (0.0, -2.0): -2.0,
    (0.0, -2.0 / 9.0): -2.0 / 3.0,
}


def p4_rhs(z, f, fp, alpha, beta):
    """Right side of the equation for f''."""
    return fp ** 2 / (2.0 * f) + 1.5 * f ** 3 + 4.0 * z * f ** 2 + 2.0 * (z ** 2 - alpha) * f + beta / f


@dataclass(frozen=True, eq=False)
class P4Solution:
    """
    A solution table on a pole-free interval.

    Attributes:
        alpha, beta (float): Equation parameters
        z, f, fp (np.ndarray): Table of the solution and its derivative
        domain (tuple[float, float]): Interval where evaluation is allowed
        source (str): 'numeric' or 'rational'
        slope (float | None): c for rational solutions f = c z
        stop_reason (str | None): Why integration ended early, if it did
    """

    alpha: float
    beta: float
    z: np.ndarray
    f: np.ndarray
    fp: np.ndarray
    domain: tuple
    source: str = "numeric"
    slope: float = None
    stop_reason: str = None

    @property
    def hit_pole(self):
        return bool(self.stop_reason) and "pole" in self.stop_reason

    @cached_property
    def _splines(self):
        fpp = p4_rhs(self.z, self.f, self.fp, self.alpha, self.beta)
        return (
            CubicHermiteSpline(self.z, self.f, self.fp),
            CubicHermiteSpline(self.z, self.fp, fpp),
        )

    def covers(self, lo, hi):
        return self.domain[0] <= lo and hi <= self.domain[1]

    def evaluate(self, z, order=0):
        """
        f(z) (order 0) or f'(z) (order 1).

        Raises:
            DomainError: z outside the table domain
        """

        z = np.asarray(z, dtype=float)
        outside = (z < self.domain[0]) | (z > self.domain[1])
        if np.any(outside):
            where = float(z[outside].flat[0])
            raise DomainError(
                f"z = {where:.6g} is outside the Painleve table [{self.domain[0]:.6g}, {self.domain[1]:.6g}]",
                location=where,
            )
        if self.source == "rational":
            return self.slope * z if order == 0 else np.full(z.shape, self.slope)
        return self._splines[order](z)

    def function_expr(self, argument):
        """f(argument) as an expression; exact for rational solutions."""
        if self.source == "rational":
            return mul(self.slope, argument)
        return p4_node(self, argument, 0)

    def derivative_expr(self, argument):
        """df/dz evaluated at the argument."""
        if self.source == "rational":
            return const(self.slope)
        return p4_node(self, argument, 1)


def _validate(alpha, beta, *values):
    for value in (alpha, beta) + values:
        if not np.isfinite(value):
            raise ConfigError(f"Painleve parameters must be finite, got {value}")


def _integrate_leg(alpha, beta, z0, f0, f0p, z_end, rtol, atol, step, min_step=P4_MIN_STEP):
    def rhs(z, y):
        return [y[1], p4_rhs(z, y[0], y[1], alpha, beta)]

    direction = np.sign(z_end - z0)
    count = int(np.floor(abs(z_end - z0) / step))
    t_eval = z0 + direction * step * np.arange(count + 1)
    if t_eval[-1] != z_end:
        t_eval = np.append(t_eval, z_end)

    solver = DOP853(rhs, z0, [f0, f0p], z_end, rtol=rtol, atol=atol)
    z, f, fp = [z0], [f0], [f0p]
    k = 1
    reason = None
    while solver.status == "running":
        message = solver.step()
        if solver.status == "failed":
            reason = f"step collapse ({message})"
            break

        end = solver.t
        value = abs(solver.y[0])
        if value < P4_MIN_ABS:
            reason, end = "zero of f", solver.t_old
        elif value > P4_MAX_ABS:
            reason, end = "pole of f", solver.t_old
        elif solver.status == "running" and solver.step_size < min_step:
            reason = "pole of f (step collapse)"

        dense = solver.dense_output()
        while k < len(t_eval) and direction * (t_eval[k] - end) <= 0:
            y = dense(t_eval[k])
            z.append(t_eval[k])
            f.append(y[0])
            fp.append(y[1])
            k += 1
        if reason:
            break

    return np.asarray(z), np.asarray(f), np.asarray(fp), reason


def p4_integrate(alpha, beta, z0, f0, f0p, z_end, rtol=P4_RTOL, atol=P4_ATOL, step=P4_TABLE_STEP,
                 min_step=P4_MIN_STEP):
    """
    Integrate from (z0, f0, f0p) to z_end with an embedded 8(5,3) Runge-Kutta pair.

    Integration stops early when |f| leaves [P4_MIN_ABS, P4_MAX_ABS] or an
    accepted step falls below P4_MIN_STEP (a pole the error control cannot
    cross); the table then covers the pole-free part only.

    Parameters:
        alpha, beta (float): Equation parameters
        z0, f0, f0p (float): Initial data, f0 != 0
        z_end (float): Target end point (either side of z0)
        min_step (float): Smallest accepted step before a pole is declared

    Returns:
        P4Solution: Table with its domain

    Raises:
        DomainError: f0 = 0 or f leaves the admissible range immediately
    """

    _validate(alpha, beta, z0, f0, f0p, z_end)
    if abs(f0) < P4_MIN_ABS:
        raise DomainError("f0 must be nonzero: the equation divides by f", location=float(z0))
    if z_end == z0:
        raise ConfigError("integration interval is empty")

    z, f, fp, reason = _integrate_leg(alpha, beta, z0, f0, f0p, z_end, rtol, atol, step, min_step)
    if z.size < 2:
        raise DomainError(f"integration stopped immediately at z = {z0:g} ({reason})", location=float(z0))
    if reason:
        logger.info("Painleve integration from z0 = %g stopped at z = %.6g: %s", z0, z[-1], reason)

    order = np.argsort(z)
    z, f, fp = z[order], f[order], fp[order]
    return P4Solution(
        alpha=float(alpha),
        beta=float(beta),
        z=z,
        f=f,
        fp=fp,
        domain=(float(z[0]), float(z[-1])),
        stop_reason=reason,
    )


def p4_integrate_two_sided(alpha, beta, z0, f0, f0p, z_min, z_max, **kwargs):
    """
    Integrate backward to z_min and forward to z_max from interior data.

    Returns:
        P4Solution: Merged table; its domain is the pole-free part of [z_min, z_max]
    """

    if not z_min < z0 < z_max:
        raise ConfigError(f"z0 = {z0} must lie strictly inside ({z_min}, {z_max})")
    left = p4_integrate(alpha, beta, z0, f0, f0p, z_min, **kwargs)
    right = p4_integrate(alpha, beta, z0, f0, f0p, z_max, **kwargs)
    z = np.concatenate([left.z[:-1], right.z])
    f = np.concatenate([left.f[:-1], right.f])
    fp = np.concatenate([left.fp[:-1], right.fp])
    reasons = [r for r in (left.stop_reason, right.stop_reason) if r]
    return P4Solution(
        alpha=float(alpha),
        beta=float(beta),
        z=z,
        f=f,
        fp=fp,
        domain=(float(z[0]), float(z[-1])),
        stop_reason="; ".join(reasons) or None,
    )


def p4_rational(alpha, beta, span=P4_RATIONAL_SPAN, tolerance=1e-12):
    """
    Exact solution f = c z for the catalogued parameter pairs, else None.
    """

    for (a, b), slope in RATIONAL_SOLUTIONS.items():
        if abs(alpha - a) <= tolerance and abs(beta - b) <= tolerance:
            z = np.linspace(-span, span, 2001)
            return P4Solution(
                alpha=float(a),
                beta=float(b),
                z=z,
                f=slope * z,
                fp=np.full(z.shape, slope),
                domain=(-float(span), float(span)),
                source="rational",
                slope=slope,
            )
    return None


def p4_residual(solution, points=None):
    """
    Relative residual of the equation on the table domain.

    For numeric tables f'' is the derivative of the interpolant of f' and
    is compared with the right side at midpoints between table nodes.

    Returns:
        float: max |f'' - rhs| / max(1, |rhs|)
    """

    if points is None:
        if solution.source == "rational":
            points = np.linspace(solution.domain[0], solution.domain[1], 401)
            points = points[np.abs(points) > 1e-3]
        else:
            points = 0.5 * (solution.z[1:] + solution.z[:-1])
    points = np.asarray(points, dtype=float)
    f = solution.evaluate(points, 0)
    fp = solution.evaluate(points, 1)
    if solution.source == "rational":
        second = np.zeros_like(points)
    else:
        second = solution._splines[1].derivative()(points)
    rhs = p4_rhs(points, f, fp, solution.alpha, solution.beta)
    return float(np.max(np.abs(second - rhs) / np.maximum(1.0, np.abs(rhs))))


def p4_deviation(numeric, reference):
    """Max |f_numeric - f_reference| over the numeric table."""
    inside = (numeric.z >= reference.domain[0]) & (numeric.z <= reference.domain[1])
    if not np.any(inside):
        raise ConvergenceError("tables do not overlap")
    z = numeric.z[inside]
    return float(np.max(np.abs(numeric.f[inside] - reference.evaluate(z, 0))))
