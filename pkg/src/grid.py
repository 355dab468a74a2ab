"""
grid.py

Uniform 1-D grids, sampled functions and the quadrature rules
used by every numerical check.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.integrate import simpson

from src.config import (
    GRID_X_MIN,
    GRID_X_MAX,
    GRID_POINTS,
    MIN_GRID_POINTS,
    INTERIOR_FRACTION,
    PANEL_WIDTH,
    PANEL_NODES,
)
from src.errors import DiscretizationError, DomainError, GridMismatchError


_GAUSS_NODES, _GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(PANEL_NODES)


@dataclass(frozen=True)
class Grid:
    """
    Uniform lattice x_i = x_min + i * spacing, i = 0 .. n-1.
    """

    x_min: float
    x_max: float
    n: int

    @property
    def spacing(self):
        return (self.x_max - self.x_min) / (self.n - 1)

    @cached_property
    def samples(self):
        values = self.x_min + np.arange(self.n) * self.spacing
        values[-1] = self.x_max
        values.setflags(write=False)
        return values

    def interior(self, fraction=INTERIOR_FRACTION):
        """Slice covering the central `fraction` of the box."""
        margin = int(np.floor(0.5 * (1.0 - fraction) * (self.n - 1)))
        return slice(margin, self.n - margin)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """
    Samples of a function on a grid.
    """

    grid: Grid
    values: np.ndarray

    # numpy scalars defer to __rmul__
    __array_ufunc__ = None

    def __post_init__(self):
        values = np.array(self.values, copy=True)
        if values.shape != (self.grid.n,):
            raise DiscretizationError(
                f"expected {self.grid.n} samples, got shape {values.shape}"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def norm(self, region=None):
        return float(np.sqrt(max(inner_product(self, self, region=region).real, 0.0)))

    def normalized(self):
        size = self.norm()
        if size == 0.0:
            return self
        return GridFunction(self.grid, self.values / size)

    def __add__(self, other):
        _same_grid(self, other)
        return GridFunction(self.grid, self.values + other.values)

    def __sub__(self, other):
        _same_grid(self, other)
        return GridFunction(self.grid, self.values - other.values)

    def __mul__(self, scalar):
        return GridFunction(self.grid, self.values * scalar)

    __rmul__ = __mul__


def make_grid(x_min=GRID_X_MIN, x_max=GRID_X_MAX, n=GRID_POINTS):
    """
    Build a validated uniform grid.

    Parameters:
        x_min (float): Left end of the box
        x_max (float): Right end of the box
        n (int): Number of samples, endpoints included

    Returns:
        Grid: The lattice
    """

    if not (np.isfinite(x_min) and np.isfinite(x_max)):
        raise DiscretizationError(f"grid bounds must be finite, got ({x_min}, {x_max})")
    if int(n) != n or n < MIN_GRID_POINTS:
        raise DiscretizationError(f"grid needs at least {MIN_GRID_POINTS} points, got {n}")
    if not x_min < x_max:
        raise DiscretizationError(f"empty box ({x_min}, {x_max})")
    return Grid(float(x_min), float(x_max), int(n))


def sample(grid, expr):
    """Evaluate a ScalarExpr on every grid point."""
    return GridFunction(grid, expr.eval(grid.samples))


def _same_grid(f, g):
    if f.grid != g.grid:
        raise GridMismatchError(f"grid mismatch: {f.grid} vs {g.grid}")


def inner_product(f, g, region=None):
    """
    Composite Simpson approximation of the integral of conj(f) * g.

    Parameters:
        f, g (GridFunction): Functions on the same grid
        region (slice | None): Restrict the integral to a contiguous block

    Returns:
        complex | float: The integral
    """

    _same_grid(f, g)
    region = region or slice(None)
    integrand = np.conj(f.values[region]) * g.values[region]
    result = simpson(integrand, x=f.grid.samples[region])
    if np.iscomplexobj(result) and result.imag == 0.0:
        return float(result.real)
    return result


def cumulative_quadrature(func, x0, points, panel_width=PANEL_WIDTH):
    """
    Integral of `func` from x0 to each of `points`.

    Every gap between consecutive knots is split into panels no wider than
    `panel_width` and integrated with fixed-order Gauss-Legendre nodes.
    """

    points = np.asarray(points, dtype=float)
    flat = points.ravel()
    if flat.size == 0:
        return points.copy()
    if not np.all(np.isfinite(flat)):
        raise DomainError("non-finite integration limits")

    lo = min(x0, flat.min())
    hi = max(x0, flat.max())
    knots = np.union1d(flat, [x0])
    if hi > lo:
        fill = np.linspace(lo, hi, int(np.ceil((hi - lo) / panel_width)) + 1)
        knots = np.union1d(knots, fill)

    if knots.size > 1:
        half = 0.5 * np.diff(knots)
        middle = 0.5 * (knots[1:] + knots[:-1])
        nodes = middle[:, None] + half[:, None] * _GAUSS_NODES[None, :]
        values = np.broadcast_to(func(nodes.ravel()), (nodes.size,)).reshape(nodes.shape)
        if not np.all(np.isfinite(values)):
            bad = nodes[~np.isfinite(values)][0]
            raise DomainError(f"integrand is not finite near x = {bad:.6g}", location=float(bad))
        panels = (values @ _GAUSS_WEIGHTS) * half
        running = np.concatenate([[0.0], np.cumsum(panels)])
    else:
        running = np.zeros(1)

    anchor = running[np.searchsorted(knots, x0)]
    return (running[np.searchsorted(knots, flat)] - anchor).reshape(points.shape)


def cumulative_integral(f, x0, grid):
    """
    F(x_i) = integral of the expression f from x0 to x_i on every grid point.

    Parameters:
        f (ScalarExpr): Integrand
        x0 (float): Anchor point, F(x0) = 0
        grid (Grid): Where F is sampled

    Returns:
        GridFunction: Sampled antiderivative
    """

    samples = f.eval(grid.samples)
    if not np.all(np.isfinite(samples)):
        raise DomainError("integrand has non-finite samples on the grid")
    return GridFunction(grid, cumulative_quadrature(f.eval, x0, grid.samples))
