"""
checks.py

Numerical checks run against a built scenario. Each check returns one
CheckRecord; a failed check is a record with passed = False, never an
exception.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from src.catalog import (
    erf_sum_defect,
    factorization_defect,
    p4_compatibility,
    p4_g1,
    p4_intertwining_residual,
)
from src.config import (
    BRACKET_TOLERANCE,
    CLOSED_FORM_TOLERANCE,
    COEFFICIENT_TOLERANCE,
    DEFAULT_PROBE_STATES,
    INDEPENDENCE_TOLERANCE,
    INTEGRAL_TOLERANCE,
    ISOSPECTRAL_GAMMA_FACTORS,
    ISOSPECTRAL_TOLERANCE,
    LADDER_PRECHECK_TOLERANCE,
    LADDER_TOLERANCE,
    MAX_LEVELS,
    OVERLAP_TOLERANCE,
    P4_DEVIATION_TOLERANCE,
    P4_REFERENCE_END,
    P4_RESIDUAL_TOLERANCE,
    PROBE_POINTS,
    RICCATI_TOLERANCE,
    SPECTRUM_RESIDUAL_TOLERANCE,
)
from src.errors import ConfigError
from src.operators import measured_order
from src.painleve import p4_deviation, p4_integrate, p4_residual
from src.schrodinger import eigensolve, separable_2d
from src.superintegrability import (
    adjointness_defect,
    build_triple,
    independence_proxy,
    verify_commutation,
    verify_I2_bracket,
)
from src.susy import (
    adjoint_mismatch,
    is_zero_mode,
    ladder_residual,
    pairing_report,
    particular_residual,
    riccati_residual,
    transport_residual,
    z_equation_residual,
)

logger = logging.getLogger(__name__)

# start of the re-integration launched from rational initial data
P4_REFERENCE_START = 0.3


@dataclass
class CheckRecord:
    """
    Outcome of one check.

    Attributes:
        name (str): Check name
        passed (bool): Every sub-measurement within its tolerance
        measured (float): Headline measurement
        tolerance (float): Bound on the headline measurement
        details (dict): Sub-measurements and context
    """

    name: str
    passed: bool
    measured: float
    tolerance: float
    details: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "name": self.name,
            "pass": bool(self.passed),
            "measured": _plain(self.measured),
            "tolerance": _plain(self.tolerance),
            "details": _plain(self.details),
        }


def _plain(value):
    """numpy scalars and arrays to JSON-ready Python values."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, float)):
        return float(value)
    return value


def _within(items):
    """(value, tolerance) pairs -> all within bounds."""
    return all(value <= tolerance for value, tolerance in items)


class CheckContext:
    """
    Spectra and integrals shared between the checks of one run.
    """

    def __init__(self, scenario, levels, probes=DEFAULT_PROBE_STATES):
        if not 1 <= levels <= MAX_LEVELS:
            raise ConfigError(f"levels must be in [1, {MAX_LEVELS}], got {levels}")
        self.scenario = scenario
        self.levels = levels
        self.probes = probes

    @cached_property
    def spectra(self):
        return tuple(
            eigensolve(axis.H, axis.grid, self.levels, label=axis.label) for axis in self.scenario.axes
        )

    @cached_property
    def multiplets(self):
        if not self.scenario.two_dimensional:
            return None
        return separable_2d(*self.spectra)

    @cached_property
    def triple(self):
        x_axis, y_axis = self.scenario.axes
        if x_axis.ladder is None or y_axis.ladder is None:
            raise ConfigError(f"{self.scenario.name} has no ladder pair on both axes")
        return build_triple(x_axis.ladder, y_axis.ladder, self.scenario.m, self.scenario.n)

    @cached_property
    def ladder_level(self):
        """Worst 1-D ladder residual over the laddered axes."""
        worst = 0.0
        for axis, spectrum in zip(self.scenario.axes, self.spectra):
            if axis.ladder is None:
                continue
            report = ladder_residual(axis.ladder, spectrum)
            values = [r for _, r in report["raising"] + report["lowering"]]
            worst = max(worst, max(values, default=0.0))
        return worst


# individual checks

def check_spectrum(ctx):
    """Eigen residuals and, where known, agreement with the exact levels."""

    details = {}
    deviation = 0.0
    residual = 0.0
    for axis, spectrum in zip(ctx.scenario.axes, ctx.spectra):
        entry = {
            "energies": spectrum.energies,
            "zero_referenced": spectrum.zero_referenced(),
            "residual": float(np.max(spectrum.residuals)),
        }
        residual = max(residual, entry["residual"])
        if axis.expected is not None:
            expected = axis.expected(len(spectrum))
            entry["deviation"] = float(np.max(np.abs(spectrum.energies - expected)))
            deviation = max(deviation, entry["deviation"])
        details[axis.label] = entry
    details["max_residual"] = residual
    passed = _within([(deviation, ISOSPECTRAL_TOLERANCE), (residual, SPECTRUM_RESIDUAL_TOLERANCE)])
    return CheckRecord("spectrum", passed, deviation, ISOSPECTRAL_TOLERANCE, details)


def _partner_deviation(family, grid, levels, reference):
    """Partner energies against {0} + spec(H2), or spec(H2) when b has no zero mode."""
    spectrum = eigensolve(family.partner, grid, levels, label="H_partner")
    if is_zero_mode(spectrum.energies[0], spectrum.states[0], family.partner_pair.A):
        expected = np.concatenate([[0.0], reference[: levels - 1]])
    else:
        expected = reference[:levels]
    return float(np.max(np.abs(spectrum.energies - expected))), spectrum.energies


def check_isospectral(ctx):
    """
    Partner pairing of H1 and H2, and equal spectra along each family.
    """

    scenario = ctx.scenario
    grid = scenario.axes[0].grid
    levels = min(ctx.levels, MAX_LEVELS - 1)
    details = {}
    energy = 0.0
    overlap = 0.0

    entries = [(label, family.base, family, rebuild) for label, family, rebuild in scenario.families]
    if not entries and "pair" in scenario.extras:
        entries = [("base", scenario.extras["pair"], None, None)]

    for label, fp, family, rebuild in entries:
        report = pairing_report(fp, grid, levels)
        energy = max(energy, report.energy_defect)
        overlap = max(overlap, 1.0 - report.min_overlap)
        details[f"{label}.pairing"] = {
            "shift": report.shift,
            "energy_defect": report.energy_defect,
            "min_overlap": report.min_overlap,
            "max_leakage": report.max_leakage,
            "zero_mode_energy": report.zero_mode_energy,
            "zero_mode_kernel": report.zero_mode_kernel,
        }
        reference = report.energies2

        if family is not None:
            gamma = family.riccati.gamma
            members = {}
            for factor in ISOSPECTRAL_GAMMA_FACTORS:
                member = family if factor == 1.0 else rebuild(factor)
                deviation, energies = _partner_deviation(member, grid, levels, reference)
                energy = max(energy, deviation)
                members[f"{gamma * factor:g}"] = {"deviation": deviation, "energies": energies}
            details[f"{label}.family"] = members

    passed = _within([(energy, ISOSPECTRAL_TOLERANCE), (overlap, OVERLAP_TOLERANCE)])
    details["overlap_defect"] = overlap
    return CheckRecord("isospectral", passed, energy, ISOSPECTRAL_TOLERANCE, details)


def check_ladder(ctx):
    """Ladder relation on eigenstates and lowering = adjoint(raising)."""

    details = {}
    worst = 0.0
    mismatch = 0.0
    for axis, spectrum in zip(ctx.scenario.axes, ctx.spectra):
        if axis.ladder is None:
            continue
        report = ladder_residual(axis.ladder, spectrum)
        values = [r for _, r in report["raising"] + report["lowering"]]
        residual = max(values, default=0.0)
        defect = adjoint_mismatch(axis.ladder)
        worst = max(worst, residual)
        mismatch = max(mismatch, defect)
        details[axis.label] = {
            "ladder": axis.ladder.label,
            "lam": axis.ladder.lam,
            "raising": report["raising"],
            "lowering": report["lowering"],
            "adjoint_mismatch": defect,
            "order": measured_order(axis.ladder.raising),
            "nominal_order": axis.ladder.raising.nominal_order,
        }

    transport = None
    if "transport" in ctx.scenario.extras:
        A, oscillator, dressed = ctx.scenario.extras["transport"]
        transport = transport_residual(A, oscillator, dressed)
        details["transport"] = transport

    if not details:
        raise ConfigError(f"{ctx.scenario.name} has no ladder operators")

    checks = [(worst, LADDER_TOLERANCE), (mismatch, COEFFICIENT_TOLERANCE)]
    if transport is not None:
        checks.append((transport, LADDER_PRECHECK_TOLERANCE))
    return CheckRecord("ladder", _within(checks), worst, LADDER_TOLERANCE, details)


def check_integrals(ctx):
    """
    K, I1, I2 commute with H on the lowest product states.
    """

    if not ctx.scenario.two_dimensional:
        raise ConfigError(f"{ctx.scenario.name} is one-dimensional; integrals need two axes")
    triple = ctx.triple
    Sx, Sy = ctx.spectra
    report = verify_commutation(triple, Sx, Sy, probes=ctx.probes)
    adjointness = adjointness_defect(triple)
    singular = independence_proxy(triple, Sx, Sy, probes=ctx.probes)
    stated = ctx.scenario.stated_orders
    if stated is not None and tuple(triple.orders) != tuple(stated):
        logger.warning("measured integral orders %s differ from %s", triple.orders, stated)

    ladder_level = ctx.ladder_level
    details = {
        "residuals": report.residuals,
        "states": report.states,
        "orders": triple.orders,
        "nominal_orders": triple.nominal_orders,
        "stated_orders": stated,
        "adjointness": adjointness,
        "singular_values": singular,
        "captured_min": report.captured_min,
        "mapping": report.mapping,
        "ladder_level": ladder_level,
        "coupling_ratio": report.worst / ladder_level if ladder_level > 0 else None,
    }
    passed = _within([
        (report.worst, INTEGRAL_TOLERANCE),
        (max(adjointness.values()), COEFFICIENT_TOLERANCE),
    ]) and float(singular[-1]) > INDEPENDENCE_TOLERANCE
    return CheckRecord("integrals", passed, report.worst, INTEGRAL_TOLERANCE, details)


def check_bracket(ctx):
    """[K, I1] = 2 lam I2 on the probe states."""

    if not ctx.scenario.two_dimensional:
        raise ConfigError(f"{ctx.scenario.name} is one-dimensional; the bracket needs two axes")
    report = verify_I2_bracket(ctx.triple, *ctx.spectra, probes=ctx.probes)
    error = abs(report.constant - report.expected) / report.expected
    details = {"constant": report.constant, "expected": report.expected, "residual": report.residual}
    passed = _within([(error, BRACKET_TOLERANCE), (report.residual, BRACKET_TOLERANCE)])
    return CheckRecord("bracket", passed, error, BRACKET_TOLERANCE, details)


def check_riccati(ctx):
    """
    Riccati residuals of every family member, plus closed-form comparisons
    where the family has them.
    """

    scenario = ctx.scenario
    grid = scenario.axes[0].grid
    region = grid.interior()
    x = grid.samples[region]
    details = {}
    checks = []

    for label, family, _ in scenario.families:
        rs = family.riccati
        entry = {
            "particular": particular_residual(rs.U, rs.beta0, grid),
            "riccati": riccati_residual(rs, grid),
            "z_equation": z_equation_residual(rs.z, rs.beta0, grid),
            "gamma": rs.gamma,
        }
        checks.extend((entry[k], RICCATI_TOLERANCE) for k in ("particular", "riccati", "z_equation"))
        details[label] = entry

    if "closed_form_z" in scenario.extras:
        rs = scenario.families[0][1].riccati
        closed = scenario.extras["closed_form_z"]
        reference = closed.eval(x)
        relative = float(np.max(np.abs(rs.z.eval(x) - reference) / np.abs(reference)))
        closed_equation = z_equation_residual(closed, rs.beta0, grid)
        V_s1, V_s2 = scenario.extras["potentials"]
        factorization = factorization_defect(scenario.families[0][1].base, V_s1, V_s2)
        sum_defect = erf_sum_defect(scenario.extras["a0"])
        details["closed_form"] = {
            "relative_z": relative,
            "z_equation": closed_equation,
            "factorization": factorization,
            "sum_potential": sum_defect,
        }
        checks.extend([
            (relative, CLOSED_FORM_TOLERANCE),
            (closed_equation, CLOSED_FORM_TOLERANCE),
            (factorization, COEFFICIENT_TOLERANCE),
            (sum_defect, COEFFICIENT_TOLERANCE),
        ])

    if not checks:
        raise ConfigError(f"{scenario.name} has no Riccati family; give gamma")
    measured = max(entry["riccati"] for label, entry in details.items() if label != "closed_form")
    return CheckRecord("riccati", _within(checks), measured, RICCATI_TOLERANCE, details)


def check_p4_residual(ctx):
    """
    Painleve table residual, partner compatibility with g1, the
    intertwiner, and re-integration against rational solutions.
    """

    system = ctx.scenario.extras.get("painleve")
    if system is None:
        raise ConfigError(f"{ctx.scenario.name} has no Painleve transcendent")
    solution = system.solution
    residual = p4_residual(solution)
    compatibility = p4_compatibility(system.omega, system.alpha, solution, system.pair)
    intertwining = p4_intertwining_residual(system.pair, system.N, system.omega)
    details = {
        "source": solution.source,
        "domain": solution.domain,
        "stop_reason": solution.stop_reason,
        "compatibility": compatibility,
        "intertwining": intertwining,
    }
    checks = [
        (residual, P4_RESIDUAL_TOLERANCE),
        (max(compatibility.values()), COEFFICIENT_TOLERANCE),
        (intertwining, LADDER_PRECHECK_TOLERANCE),
    ]

    if solution.source == "rational":
        c = solution.slope
        numeric = p4_integrate(
            solution.alpha, solution.beta, P4_REFERENCE_START, c * P4_REFERENCE_START, c, P4_REFERENCE_END
        )
        deviation = p4_deviation(numeric, solution)
        details["reintegration"] = deviation
        checks.append((deviation, P4_DEVIATION_TOLERANCE))
        details["g1"] = _rational_g1_defect(system, ctx.scenario.extras.get("eps", 1))
        checks.append((details["g1"], COEFFICIENT_TOLERANCE))

    return CheckRecord("p4_residual", _within(checks), residual, P4_RESIDUAL_TOLERANCE, details)


def _rational_g1_defect(system, eps):
    """
    g1 against its closed form for f = c z:
    omega^2 x^2 (1 + c)^2 / 2 + eps omega c / 2 + omega (eps - alpha) / 3.
    """

    omega, c, alpha = system.omega, system.solution.slope, system.alpha
    x = np.asarray(PROBE_POINTS, dtype=float)
    closed = 0.5 * omega ** 2 * (1.0 + c) ** 2 * x ** 2 + 0.5 * eps * omega * c + omega * (eps - alpha) / 3.0
    return float(np.max(np.abs(p4_g1(omega, eps, alpha, system.solution).eval(x) - closed)))


CHECK_RUNNERS = {
    "spectrum": check_spectrum,
    "isospectral": check_isospectral,
    "ladder": check_ladder,
    "integrals": check_integrals,
    "bracket": check_bracket,
    "riccati": check_riccati,
    "p4_residual": check_p4_residual,
}


def run_checks(scenario, checks, levels, probes=DEFAULT_PROBE_STATES):
    """
    Run the named checks in order.

    Returns:
        tuple[CheckContext, list[CheckRecord]]: Shared context and one record per check
    """

    ctx = CheckContext(scenario, levels, probes)
    records = []
    for name in checks:
        if name not in CHECK_RUNNERS:
            raise ConfigError(f"unknown check {name!r}; expected one of {tuple(CHECK_RUNNERS)}")
        record = CHECK_RUNNERS[name](ctx)
        logger.info("%s %s: measured %.3e (tolerance %.1e)", "✅" if record.passed else "❌",
                    name, record.measured, record.tolerance)
        records.append(record)
    return ctx, records
