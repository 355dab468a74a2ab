"""
schrodinger.py

Discretized 1-D eigenproblems and assembly of separable 2-D spectra.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, eig_banded

from src.config import (
    DEGENERACY_RTOL,
    MAX_LEVELS,
    SYMMETRY_TOLERANCE,
    TAIL_TOLERANCE,
)
from src.errors import ConfigError, ConsistencyError, ConvergenceError, DomainError
from src.expressions import const
from src.grid import GridFunction
from src.operators import DiffOperator, to_matrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SpectrumResult:
    """
    Lowest eigenpairs of a discretized Hamiltonian.

    Attributes:
        energies (np.ndarray): Ascending eigenvalues
        states (tuple[GridFunction]): Unit-norm eigenfunctions
        residuals (np.ndarray): ||(H - E) psi|| / ||psi|| per state
        grid (Grid): Lattice the problem was solved on
        label (str): Name of the Hamiltonian
    """

    energies: np.ndarray
    states: tuple
    residuals: np.ndarray
    grid: object
    label: str = "H"

    def __len__(self):
        return len(self.energies)

    def zero_referenced(self):
        return self.energies - self.energies[0]


@dataclass(frozen=True)
class Multiplet:
    energy: float
    members: tuple

    @property
    def size(self):
        return len(self.members)


def hamiltonian(V, grid=None, label=None):
    """
    -1/2 d^2/dx^2 + V.

    Parameters:
        V (ScalarExpr): Potential
        grid (Grid | None): When given, V must be finite on every sample
        label (str | None): Name for logs

    Returns:
        DiffOperator: The Hamiltonian
    """

    if grid is not None:
        values = V.eval(grid.samples)
        if not np.all(np.isfinite(values)):
            bad = grid.samples[~np.isfinite(np.broadcast_to(values, (grid.n,)))][0]
            raise DomainError(f"potential is not finite at x = {bad:.6g}", location=float(bad))
    return DiffOperator(terms={2: const(-0.5), 0: V}, label=label)


def _banded_lower(matrix, bandwidth):
    n = matrix.shape[0]
    band = np.zeros((bandwidth + 1, n))
    for d in range(bandwidth + 1):
        below = matrix.diagonal(-d)
        above = matrix.diagonal(d)
        band[d, : n - d] = 0.5 * (below + above)
    return band


def _fix_sign(values):
    peak = np.max(np.abs(values))
    if peak == 0.0:
        return values
    first = np.argmax(np.abs(values) > 1e-3 * peak)
    return values if values[first] > 0 else -values


def eigensolve(H, grid, k, symmetry_tolerance=SYMMETRY_TOLERANCE, max_levels=MAX_LEVELS, label=None):
    """
    Lowest k eigenpairs of H on the grid with Dirichlet walls.

    Parameters:
        H (DiffOperator): Formally self-adjoint Hamiltonian
        grid (Grid): Lattice
        k (int): Number of levels
        symmetry_tolerance (float): Allowed relative asymmetry of the matrix

    Returns:
        SpectrumResult: Energies, normalized states and residuals
    """

    if not 1 <= k <= max_levels:
        raise ConfigError(f"number of levels must be in [1, {max_levels}], got {k}")
    if k > grid.n:
        raise ConfigError(f"cannot request {k} levels on {grid.n} points")

    matrix = to_matrix(H, grid)
    scale = max(1.0, float(abs(matrix).max()))
    asymmetry = float(abs(matrix - matrix.T).max()) if matrix.nnz else 0.0
    if asymmetry > symmetry_tolerance * scale:
        raise ConsistencyError(
            f"discretized Hamiltonian is not symmetric (relative defect {asymmetry / scale:.3e})"
        )

    offsets = matrix.tocoo()
    bandwidth = int(np.max(np.abs(offsets.row - offsets.col))) if matrix.nnz else 0
    try:
        energies, vectors = eig_banded(
            _banded_lower(matrix, bandwidth),
            lower=True,
            select="i",
            select_range=(0, k - 1),
        )
    except LinAlgError as exc:
        raise ConvergenceError(f"banded eigensolver failed: {exc}") from exc

    region = grid.interior()
    states = []
    residuals = []
    for j in range(k):
        psi = GridFunction(grid, _fix_sign(vectors[:, j])).normalized()
        states.append(psi)
        defect = GridFunction(grid, matrix @ psi.values - energies[j] * psi.values)
        residuals.append(defect.norm(region) / max(psi.norm(region), 1e-300))
        edge = max(abs(psi.values[0]), abs(psi.values[-1]), abs(psi.values[1]), abs(psi.values[-2]))
        if edge > TAIL_TOLERANCE * np.max(np.abs(psi.values)):
            logger.warning("state %d of %s does not decay inside the box", j, label or H.label or "H")

    return SpectrumResult(
        energies=np.asarray(energies, dtype=float),
        states=tuple(states),
        residuals=np.asarray(residuals),
        grid=grid,
        label=label or H.label or "H",
    )


def separable_2d(Sx, Sy, tol=DEGENERACY_RTOL):
    """
    Group the sums E_i^x + E_j^y into degeneracy classes.

    Only energies at which both axes are fully represented are kept.

    Parameters:
        Sx, Sy (SpectrumResult): 1-D spectra
        tol (float): Relative width of a class, scaled by max(1, |E|)

    Returns:
        list[Multiplet]: Classes in ascending energy
    """

    worst = float(max(np.max(Sx.residuals), np.max(Sy.residuals)))
    if 0.0 < tol < worst:
        raise ConsistencyError(
            f"degeneracy tolerance {tol:.1e} is below the eigenvalue accuracy {worst:.1e}"
        )

    cutoff = min(Sx.energies[-1] + Sy.energies[0], Sx.energies[0] + Sy.energies[-1])
    pairs = sorted(
        (Sx.energies[i] + Sy.energies[j], i, j)
        for i in range(len(Sx))
        for j in range(len(Sy))
    )

    multiplets = []
    current = []
    for energy, i, j in pairs:
        if current and abs(energy - current[0][0]) >= tol * max(1.0, abs(current[0][0])):
            multiplets.append(current)
            current = []
        current.append((energy, i, j))
    if current:
        multiplets.append(current)

    grouped = []
    for members in multiplets:
        energy = float(np.mean([m[0] for m in members]))
        if energy > cutoff + tol * max(1.0, abs(cutoff)):
            break
        grouped.append(Multiplet(energy, tuple((i, j) for _, i, j in members)))
    return grouped
