"""
scenarios.py

Named systems: each builder turns a parameter dictionary and a grid into
the Hamiltonians, ladders and families the checks run on.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from src.catalog import (
    erf_closed_form_z,
    erf_family,
    erf_frequency,
    erf_ladders,
    erf_potentials,
    isospectral_family,
    mielnik_family,
    mielnik_ladder,
    oscillator_ladder,
    painleve_system,
)
from src.config import SYSTEMS
from src.errors import ConfigError
from src.expressions import from_sympy
from src.susy import factorize

logger = logging.getLogger(__name__)


DESCRIPTIONS = {
    "mielnik2d": "oscillator partner H2(x) + Mielnik-deformed oscillator H'(y); integrals of order 2, 3, 4 (Eq. 3.7)",
    "erf_he": "H_s1(x) + H_gamma(y) of the error-function family; ladders m (cubic) and r (quintic) (Eq. 4.15)",
    "erf_hf": "H_s2(x) + H_gamma(y); oscillator axis against the deformed error-function partner (Eq. 4.20)",
    "erf_hgamma_1d": "one-axis H_gamma = H_s1 - phi' of the error-function family (Eq. 4.14)",
    "painleve_hss": "H1(x) + H_susy(y) built on a fourth Painleve transcendent; quintic ladder v (Eq. 4.40)",
    "custom": "user superpotential W(x), optionally deformed with gamma (Eq. 2.2)",
}


@dataclass(frozen=True, eq=False)
class Scenario:
    """
    A built system.

    Attributes:
        name (str): System name
        axes (tuple): One or two Axis records (x first)
        families (tuple): (label, IsospectralFamily, rebuild) for the Riccati checks;
            rebuild(k) makes the member with gamma scaled by k
        m, n (int): Resonance powers of the integrals
        stated_orders (tuple | None): Orders the construction is expected to give
        extras (dict): Family-specific objects (closed forms, Painleve system)
    """

    name: str
    description: str
    params: dict
    axes: tuple
    families: tuple = ()
    m: int = 1
    n: int = 1
    stated_orders: tuple = None
    extras: dict = field(default_factory=dict)

    @property
    def two_dimensional(self):
        return len(self.axes) == 2


@dataclass(frozen=True, eq=False)
class Axis:
    """
    One 1-D Hamiltonian of a scenario.

    Attributes:
        H (DiffOperator): Hamiltonian
        grid (Grid): Box it is solved on
        ladder (LadderPair | None): Ladder used for the integrals
        expected (callable | None): k -> first k exact energies
    """

    label: str
    H: object
    grid: object
    ladder: object = None
    expected: object = None

    @property
    def potential(self):
        return self.H.coefficient(0)


def _oscillator_levels(omega, offset):
    return lambda k: omega * (np.arange(k) + offset)


def _with_zero_mode(levels):
    return lambda k: np.concatenate([[0.0], levels(k - 1)])


def build_mielnik2d(params, grid):
    omega, gamma = params["omega"], params["gamma"]
    family = mielnik_family(omega, gamma, grid)
    x_axis = Axis(
        label="H2",
        H=family.base.H2.named("H2"),
        grid=grid,
        ladder=oscillator_ladder(omega, family.base.H2),
        expected=_oscillator_levels(omega, 1.0),
    )
    y_axis = Axis(
        label="H_partner",
        H=family.partner,
        grid=grid,
        ladder=mielnik_ladder(family, omega),
        expected=_oscillator_levels(omega, 0.0),
    )
    return Scenario(
        name="mielnik2d",
        description=DESCRIPTIONS["mielnik2d"],
        params=params,
        axes=(x_axis, y_axis),
        families=(("mielnik", family, lambda k: mielnik_family(omega, gamma * k, grid)),),
        stated_orders=(2, 3, 4),
    )


def _erf_parts(params, grid):
    a0, gamma = params["a0"], params["gamma"]
    family = erf_family(a0, gamma, grid)
    oscillator, m, r = erf_ladders(family, a0)
    omega = erf_frequency(a0)
    upper = _oscillator_levels(omega, 3.0)
    extras = {
        "a0": a0,
        "transport": (family.base.A, oscillator, m),
        "closed_form_z": erf_closed_form_z(a0, gamma),
        "potentials": erf_potentials(a0),
    }
    families = (("erf", family, lambda k: erf_family(a0, gamma * k, grid)),)
    gamma_axis = Axis(label="H_gamma", H=family.partner, grid=grid, ladder=r, expected=_with_zero_mode(upper))
    return family, oscillator, m, gamma_axis, upper, extras, families


def build_erf_he(params, grid):
    family, _, m, gamma_axis, upper, extras, families = _erf_parts(params, grid)
    x_axis = Axis(label="H_s1", H=family.base.H1.named("H_s1"), grid=grid, ladder=m, expected=_with_zero_mode(upper))
    return Scenario(
        name="erf_he",
        description=DESCRIPTIONS["erf_he"],
        params=params,
        axes=(x_axis, gamma_axis),
        families=families,
        stated_orders=(2, 7, 8),
        extras=extras,
    )


def build_erf_hf(params, grid):
    _, oscillator, _, gamma_axis, upper, extras, families = _erf_parts(params, grid)
    x_axis = Axis(label="H_s2", H=oscillator.H, grid=grid, ladder=oscillator, expected=upper)
    return Scenario(
        name="erf_hf",
        description=DESCRIPTIONS["erf_hf"],
        params=params,
        axes=(x_axis, gamma_axis),
        families=families,
        stated_orders=(2, 5, 6),
        extras=extras,
    )


def build_erf_hgamma_1d(params, grid):
    _, _, _, gamma_axis, _, extras, families = _erf_parts(params, grid)
    return Scenario(
        name="erf_hgamma_1d",
        description=DESCRIPTIONS["erf_hgamma_1d"],
        params=params,
        axes=(gamma_axis,),
        families=families,
        extras=extras,
    )


def build_painleve_hss(params, grid):
    omega = params["omega"]
    alpha, beta = params["alpha_p4"], params["beta_p4"]
    initial = params.get("p4_initial")
    system = painleve_system(omega, alpha, beta, gamma=params["gamma"], grid=grid, initial=initial)
    box = system.grid

    oscillator_case = system.solution.source == "rational" and system.solution.slope == -2.0
    expected = _oscillator_levels(omega, 0.0) if oscillator_case else None
    x_axis = Axis(label="H1", H=system.pair.H1.named("H1"), grid=box, ladder=system.ladder1, expected=expected)
    y_axis = Axis(label="H_susy", H=system.family.partner, grid=box, ladder=system.ladder_susy, expected=expected)

    def rebuild(k):
        return isospectral_family(system.pair.W, params["gamma"] * k, grid=box)

    return Scenario(
        name="painleve_hss",
        description=DESCRIPTIONS["painleve_hss"],
        params=params,
        axes=(x_axis, y_axis),
        families=(("painleve", system.family, rebuild),),
        stated_orders=(2, 7, 8),
        extras={"painleve": system, "eps": params.get("eps", 1)},
    )


def build_custom(params, grid):
    W = from_sympy(params["superpotential"])
    gamma = params.get("gamma")
    if gamma is None:
        pair = factorize(W, grid=grid)
        axis = Axis(label="H1", H=pair.H1.named("H1"), grid=grid)
        return Scenario(
            name="custom",
            description=DESCRIPTIONS["custom"],
            params=params,
            axes=(axis,),
            extras={"pair": pair},
        )
    family = isospectral_family(W, gamma, grid=grid)
    axis = Axis(label="H_partner", H=family.partner, grid=grid)
    return Scenario(
        name="custom",
        description=DESCRIPTIONS["custom"],
        params=params,
        axes=(axis,),
        families=(("custom", family, lambda k: isospectral_family(W, gamma * k, grid=grid)),),
        extras={"pair": family.base},
    )


BUILDERS = {
    "mielnik2d": build_mielnik2d,
    "erf_he": build_erf_he,
    "erf_hf": build_erf_hf,
    "erf_hgamma_1d": build_erf_hgamma_1d,
    "painleve_hss": build_painleve_hss,
    "custom": build_custom,
}


def build_scenario(system, params, grid):
    """
    Build a named system.

    Parameters:
        system (str): One of SYSTEMS
        params (dict): Parameters, defaults already merged
        grid (Grid): Verification box

    Returns:
        Scenario: Hamiltonians, ladders and families
    """

    if system not in BUILDERS:
        raise ConfigError(f"unknown system {system!r}; expected one of {SYSTEMS}")
    logger.info("building %s with %s", system, params)
    return BUILDERS[system](params, grid)


def list_scenarios():
    """One line per system: name and what it is."""
    return "\n".join(f"{name}: {DESCRIPTIONS[name]}" for name in SYSTEMS)
