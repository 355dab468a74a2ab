import os

import numpy as np
import pytest

from src.checks import CheckContext, check_integrals, run_checks
from src.config import SYSTEMS
from src.data_loader import build_config, load_scenario
from src.errors import ConfigError
from src.scenarios import build_scenario, list_scenarios

SCENARIO_DIR = os.path.join(os.path.dirname(__file__), "..", "scenarios")


def _run(file_name, levels=10):
    config = load_scenario(os.path.join(SCENARIO_DIR, file_name), levels=levels)
    scenario = build_scenario(config.system, config.params, config.make_grid())
    return run_checks(scenario, config.checks, config.levels)


@pytest.mark.parametrize(
    "file_name",
    ["mielnik2d.json", "erf_he.json", "erf_hf.json", "erf_hgamma_1d.json", "painleve_hss.json", "custom_tanh.json"],
)
def test_bundled_scenarios_pass(file_name):
    _, records = _run(file_name)
    failed = {record.name: record.measured for record in records if not record.passed}
    assert not failed


def test_deformed_error_function_spectrum():
    ctx, records = _run("erf_hgamma_1d.json", levels=8)
    (spectrum,) = ctx.spectra
    expected = np.concatenate([[0.0], 0.5 * (np.arange(7) + 3.0)])
    assert np.allclose(spectrum.energies, expected, atol=2e-5)
    ladder = next(record for record in records if record.name == "ladder")
    assert ladder.details["H_gamma"]["nominal_order"] == 5


def test_mielnik_records():
    ctx, records = _run("mielnik2d.json")
    by_name = {record.name: record for record in records}
    assert list(by_name) == ["spectrum", "isospectral", "ladder", "integrals", "bracket", "riccati"]
    assert by_name["integrals"].details["orders"] == (2, 3, 4)
    assert by_name["bracket"].details["expected"] == pytest.approx(2.0)
    assert by_name["isospectral"].details["mielnik.pairing"]["shift"] == 1
    payload = by_name["integrals"].to_dict()
    assert payload["pass"] is True
    assert isinstance(payload["measured"], float)


def test_painleve_reintegration_recorded():
    _, records = _run("painleve_hss.json", levels=8)
    p4 = next(record for record in records if record.name == "p4_residual")
    assert p4.details["source"] == "rational"
    assert p4.details["reintegration"] < 1e-8


def test_integrals_need_two_axes():
    config = build_config("erf_hgamma_1d")
    scenario = build_scenario(config.system, config.params, config.make_grid())
    with pytest.raises(ConfigError):
        check_integrals(CheckContext(scenario, 4))


def test_unknown_check_rejected():
    config = build_config("custom", checks=[])
    scenario = build_scenario(config.system, config.params, config.make_grid())
    with pytest.raises(ConfigError):
        run_checks(scenario, ["spectrum", "telepathy"], 4)


def test_levels_bounds_in_context():
    config = build_config("custom", checks=[])
    scenario = build_scenario(config.system, config.params, config.make_grid())
    with pytest.raises(ConfigError):
        CheckContext(scenario, 0)


def test_unknown_system_rejected(grid):
    with pytest.raises(ConfigError):
        build_scenario("hydrogen", {}, grid)


def test_list_scenarios():
    listing = list_scenarios().splitlines()
    assert [line.split(":")[0] for line in listing] == list(SYSTEMS)
