"""
config.py

Central configuration file for the
supersymmetric partner toolkit.
"""

import math

# Units: hbar = 1 everywhere; supercharges carry the factor 1/sqrt(2)
HBAR = 1.0
SUPERCHARGE_SCALE = math.sqrt(0.5)

# Verification box
GRID_X_MIN = -12.0
GRID_X_MAX = 12.0
GRID_POINTS = 2048
MIN_GRID_POINTS = 16
GRID_POINTS_ENV = "SUSY_GRID_N"

# Finite differences
STENCIL_ACCURACY = 8
HIGH_ORDER_LIMIT = 8
HIGH_ORDER_MIN_POINTS = 1024
INTERIOR_FRACTION = 0.90

# Gauss-Legendre panels behind cumulative integrals
PANEL_WIDTH = 0.05
PANEL_NODES = 16
NODE_CACHE_SIZE = 16

# Eigen solver
MAX_LEVELS = 40
SYMMETRY_TOLERANCE = 1e-12
DEGENERACY_RTOL = 1e-6
ZERO_ENERGY_TOL = 1e-6
ZERO_MODE_KERNEL_TOL = 1e-5
TAIL_TOLERANCE = 1e-6

# Check tolerances
RICCATI_TOLERANCE = 1e-8
PARTNER_TOLERANCE = 1e-8
ISOSPECTRAL_TOLERANCE = 2e-5
OVERLAP_TOLERANCE = 1e-6
LADDER_PRECHECK_TOLERANCE = 1e-6
LADDER_TOLERANCE = 1e-5
LADDER_LEVELS = 6
INTEGRAL_TOLERANCE = 1e-5
BRACKET_TOLERANCE = 1e-6
COEFFICIENT_TOLERANCE = 1e-8
RESONANCE_RTOL = 1e-10
ANNIHILATED_TOLERANCE = 1e-8
INDEPENDENCE_TOLERANCE = 1e-8
CLOSED_FORM_TOLERANCE = 1e-7
P4_RESIDUAL_TOLERANCE = 1e-6
P4_DEVIATION_TOLERANCE = 1e-8
SPECTRUM_RESIDUAL_TOLERANCE = 1e-6

# Family members compared by the isospectral check: gamma times each factor
ISOSPECTRAL_GAMMA_FACTORS = (1.0, 2.0, 5.0)

# Points where coefficient identities are compared
PROBE_POINTS = (-3.9, -2.7, -1.3, -0.4, 0.3, 1.1, 2.2, 3.4)
DEFAULT_PROBE_STATES = 20

# Painleve IV integrator
P4_RTOL = 1e-10
P4_ATOL = 1e-12
P4_MIN_ABS = 1e-8
P4_MIN_STEP = 1e-12
P4_MAX_ABS = 1e8
P4_TABLE_STEP = 1e-3
P4_RATIONAL_SPAN = 30.0
P4_REFERENCE_END = 3.0

# Output
OUTPUT_DIR = "outputs"
CSV_FLOAT_FORMAT = "%.17g"
SPECTRUM_COLUMNS = ["level", "index_x", "index_y", "energy", "residual"]

# Logging
LOG_FORMAT = "%(message)s"
LOG_LEVEL = "INFO"

# Exit codes
EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INVALID_CONFIG = 2
EXIT_NUMERICAL_ABORT = 3

# Scenario catalog
SYSTEMS = ("mielnik2d", "erf_he", "erf_hf", "erf_hgamma_1d", "painleve_hss", "custom")
CHECKS = ("spectrum", "isospectral", "ladder", "integrals", "bracket", "riccati", "p4_residual")
DEFAULT_LEVELS = 12

SYSTEM_DEFAULTS = {
    "mielnik2d": {"gamma": 1.5, "omega": 1.0},
    "erf_he": {"gamma": 2.0, "a0": 1.0},
    "erf_hf": {"gamma": 2.0, "a0": 1.0},
    "erf_hgamma_1d": {"gamma": 2.0, "a0": 1.0},
    "painleve_hss": {"gamma": 1.5, "omega": 1.0, "alpha_p4": 0.0, "beta_p4": -2.0, "eps": 1},
    "custom": {"superpotential": "x", "gamma": None},
}

SYSTEM_CHECKS = {
    "mielnik2d": ["spectrum", "isospectral", "ladder", "integrals", "bracket", "riccati"],
    "erf_he": ["spectrum", "isospectral", "ladder", "integrals", "bracket", "riccati"],
    "erf_hf": ["spectrum", "isospectral", "ladder", "integrals", "bracket", "riccati"],
    "erf_hgamma_1d": ["spectrum", "isospectral", "ladder", "riccati"],
    "painleve_hss": ["spectrum", "isospectral", "ladder", "integrals", "bracket", "riccati", "p4_residual"],
    "custom": ["spectrum", "isospectral"],
}
