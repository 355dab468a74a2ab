import json

import pytest

from src.config import DEFAULT_LEVELS, GRID_POINTS, SYSTEM_CHECKS
from src.data_loader import build_config, load_scenario
from src.errors import ConfigError, DiscretizationError


def _write(tmp_path, payload, name="scenario.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload) if not isinstance(payload, str) else payload, encoding="utf-8")
    return str(path)


def test_defaults_are_merged():
    config = build_config("mielnik2d")
    assert config.params == {"gamma": 1.5, "omega": 1.0}
    assert config.grid["n"] == GRID_POINTS
    assert config.levels == DEFAULT_LEVELS
    assert config.checks == SYSTEM_CHECKS["mielnik2d"]
    assert config.output.endswith("mielnik2d")


def test_overrides_win_over_file(tmp_path):
    path = _write(tmp_path, {"system": "erf_he", "params": {"gamma": 3.0}, "levels": 6})
    config = load_scenario(path, overrides={"gamma": 4.0, "a0": None}, levels=9)
    assert config.params["gamma"] == 4.0
    assert config.params["a0"] == 1.0
    assert config.levels == 9


def test_grid_size_from_environment(monkeypatch):
    monkeypatch.setenv("SUSY_GRID_N", "512")
    assert build_config("custom").grid["n"] == 512
    monkeypatch.setenv("SUSY_GRID_N", "many")
    with pytest.raises(ConfigError):
        build_config("custom")


@pytest.mark.parametrize(
    "kwargs",
    [
        {"levels": 0},
        {"levels": 41},
        {"levels": 2.5},
        {"checks": ["spectrum", "telepathy"]},
        {"params": {"omega": -1.0}},
        {"params": {"gamma": "large"}},
        {"params": {"eps": 3}},
    ],
)
def test_invalid_values(kwargs):
    with pytest.raises(ConfigError):
        build_config("painleve_hss", **kwargs)


def test_too_coarse_grid():
    with pytest.raises(DiscretizationError):
        build_config("custom", grid={"n": 8})


def test_unknown_system():
    with pytest.raises(ConfigError):
        build_config("hydrogen")


def test_custom_needs_superpotential():
    with pytest.raises(ConfigError):
        build_config("custom", params={"superpotential": None})


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_scenario(str(tmp_path / "absent.json"))


@pytest.mark.parametrize("payload", ["{not json", "[1, 2]", {"params": {}}])
def test_malformed_files(tmp_path, payload):
    with pytest.raises(ConfigError):
        load_scenario(_write(tmp_path, payload))


@pytest.mark.parametrize("conventions", [{"hbar": 2.0}, {"hbar": "one"}, [1.0], "hbar=1"])
def test_bad_conventions_rejected(tmp_path, conventions):
    path = _write(tmp_path, {"system": "mielnik2d", "conventions": conventions})
    with pytest.raises(ConfigError):
        load_scenario(path)


def test_config_round_trip(tmp_path):
    config = build_config("erf_hf", levels=7, output=str(tmp_path / "erf"))
    path = _write(tmp_path, config.to_dict(), name="resolved.json")
    again = load_scenario(path)
    assert again.to_dict() == config.to_dict()
