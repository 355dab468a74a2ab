"""
data_loader.py

This module loads scenario files (JSON), merges system defaults and
command-line overrides, and validates the result.
"""

import json
import logging
import os
from dataclasses import dataclass, field

from src.config import (
    CHECKS,
    DEFAULT_LEVELS,
    GRID_POINTS,
    GRID_POINTS_ENV,
    GRID_X_MAX,
    GRID_X_MIN,
    HBAR,
    MAX_LEVELS,
    OUTPUT_DIR,
    SUPERCHARGE_SCALE,
    SYSTEM_CHECKS,
    SYSTEM_DEFAULTS,
    SYSTEMS,
)
from src.errors import ConfigError
from src.grid import make_grid

logger = logging.getLogger(__name__)

CONVENTIONS = {
    "hbar": HBAR,
    "supercharge_scale": SUPERCHARGE_SCALE,
    "hamiltonian": "-1/2 d^2/dx^2 + V(x)",
}

# parameters each system cannot run without
REQUIRED = {
    "mielnik2d": ("omega", "gamma"),
    "erf_he": ("a0", "gamma"),
    "erf_hf": ("a0", "gamma"),
    "erf_hgamma_1d": ("a0", "gamma"),
    "painleve_hss": ("omega", "alpha_p4", "beta_p4", "gamma"),
    "custom": ("superpotential",),
}


@dataclass
class ScenarioConfig:
    """
    A validated run description.

    Attributes:
        system (str): One of SYSTEMS
        params (dict): System parameters (defaults merged)
        grid (dict): x_min, x_max, n
        levels (int): Levels per axis, at most MAX_LEVELS
        checks (list[str]): Subset of CHECKS
        output (str): Path prefix for the report files
    """

    system: str
    params: dict = field(default_factory=dict)
    grid: dict = field(default_factory=dict)
    levels: int = DEFAULT_LEVELS
    checks: list = field(default_factory=list)
    output: str = None

    def make_grid(self):
        return make_grid(self.grid["x_min"], self.grid["x_max"], self.grid["n"])

    def to_dict(self):
        return {
            "system": self.system,
            "params": dict(self.params),
            "grid": dict(self.grid),
            "levels": self.levels,
            "checks": list(self.checks),
            "output": self.output,
            "conventions": dict(CONVENTIONS),
        }


def _number(name, value):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{name} must be a number, got {value!r}")
    return float(value)


def validate_config(config):
    """
    Check a ScenarioConfig in place.

    Returns:
        ScenarioConfig: The same object

    Raises:
        ConfigError: Unknown system or check, missing or invalid parameters
    """

    if config.system not in SYSTEMS:
        raise ConfigError(f"unknown system {config.system!r}; expected one of {SYSTEMS}")

    for name in REQUIRED[config.system]:
        if config.params.get(name) is None:
            raise ConfigError(f"{config.system} needs parameter {name!r}")

    for name in ("omega", "a0"):
        if name in config.params and config.params[name] is not None:
            if _number(name, config.params[name]) <= 0:
                raise ConfigError(f"{name} must be positive, got {config.params[name]}")
    for name in ("gamma", "alpha_p4", "beta_p4"):
        if config.params.get(name) is not None:
            config.params[name] = _number(name, config.params[name])
    if "eps" in config.params and config.params["eps"] not in (-1, 1):
        raise ConfigError(f"eps must be +1 or -1, got {config.params['eps']}")
    if config.params.get("p4_initial") is not None:
        initial = config.params["p4_initial"]
        if len(initial) != 3:
            raise ConfigError("p4_initial must be [z0, f0, f0p]")
        config.params["p4_initial"] = [_number("p4_initial", v) for v in initial]

    if int(config.levels) != config.levels or not 1 <= config.levels <= MAX_LEVELS:
        raise ConfigError(f"levels must be an integer in [1, {MAX_LEVELS}], got {config.levels}")
    config.levels = int(config.levels)

    unknown = [c for c in config.checks if c not in CHECKS]
    if unknown:
        raise ConfigError(f"unknown checks {unknown}; expected a subset of {CHECKS}")

    for key in ("x_min", "x_max", "n"):
        if key not in config.grid:
            raise ConfigError(f"grid needs {key!r}")
    config.make_grid()
    return config


def build_config(system, params=None, grid=None, levels=None, checks=None, output=None, overrides=None):
    """
    Merge defaults, file values and overrides into a validated config.

    The environment variable SUSY_GRID_N, when set, replaces grid.n.

    Parameters:
        system (str): System name
        params, grid (dict | None): Values from a scenario file
        overrides (dict | None): Command-line parameter values; None entries are ignored

    Returns:
        ScenarioConfig: Validated config
    """

    if system not in SYSTEMS:
        raise ConfigError(f"unknown system {system!r}; expected one of {SYSTEMS}")

    merged = dict(SYSTEM_DEFAULTS[system])
    merged.update(params or {})
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})

    box = {"x_min": GRID_X_MIN, "x_max": GRID_X_MAX, "n": GRID_POINTS}
    box.update(grid or {})
    env_n = os.environ.get(GRID_POINTS_ENV)
    if env_n:
        try:
            box["n"] = int(env_n)
        except ValueError as exc:
            raise ConfigError(f"{GRID_POINTS_ENV} must be an integer, got {env_n!r}") from exc
        logger.info("grid size %d taken from %s", box["n"], GRID_POINTS_ENV)

    config = ScenarioConfig(
        system=system,
        params=merged,
        grid=box,
        levels=DEFAULT_LEVELS if levels is None else levels,
        checks=list(SYSTEM_CHECKS[system] if checks is None else checks),
        output=output or os.path.join(OUTPUT_DIR, system),
    )
    return validate_config(config)


def load_scenario(file_path, overrides=None, levels=None, output=None):
    """
    Load a scenario file.

    Parameters:
        file_path (str): Path to the JSON file
        overrides (dict | None): Parameter values that win over the file
        levels, output: Command-line values that win over the file

    Returns:
        ScenarioConfig: Validated config
    """

    try:
        with open(file_path, encoding="utf-8") as handle:
            raw = json.load(handle)
    except FileNotFoundError as exc:
        raise ConfigError(f"scenario file not found: {file_path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"scenario file is not valid JSON: {exc}") from exc

    if not isinstance(raw, dict) or "system" not in raw:
        raise ConfigError("scenario file must be an object with a 'system' entry")

    conventions = raw.get("conventions")
    if conventions is not None:
        if not isinstance(conventions, dict):
            raise ConfigError(f"'conventions' must be an object, got {type(conventions).__name__}")
        try:
            hbar = float(conventions.get("hbar", HBAR))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"hbar must be a number, got {conventions.get('hbar')!r}") from exc
        if hbar != HBAR:
            raise ConfigError(f"only hbar = {HBAR} is supported")

    return build_config(
        raw["system"],
        params=raw.get("params"),
        grid=raw.get("grid"),
        levels=raw.get("levels") if levels is None else levels,
        checks=raw.get("checks"),
        output=output or raw.get("output"),
        overrides=overrides,
    )
