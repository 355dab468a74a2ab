"""
Shared fixtures. The repository root goes on sys.path so `src.<module>`
imports resolve the same way they do for main.py.
"""

import os
import sys

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

import pytest

from src.catalog import oscillator_superpotential
from src.grid import make_grid
from src.schrodinger import eigensolve
from src.susy import factorize


@pytest.fixture(scope="session")
def grid():
    return make_grid(-12.0, 12.0, 2048)


@pytest.fixture(scope="session")
def small_grid():
    return make_grid(-10.0, 10.0, 1024)


@pytest.fixture(scope="session")
def oscillator_pair(grid):
    return factorize(oscillator_superpotential(1.0), grid=grid)


@pytest.fixture(scope="session")
def oscillator_spectrum(oscillator_pair, grid):
    """H1 = A_dag A for W = x: levels 0, 1, 2, ..."""
    return eigensolve(oscillator_pair.H1, grid, 12, label="H1")


@pytest.fixture(autouse=True)
def _no_grid_override(monkeypatch):
    monkeypatch.delenv("SUSY_GRID_N", raising=False)
