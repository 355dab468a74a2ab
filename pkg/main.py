"""
main.py

Entry point for the supersymmetric partner toolkit.

    python main.py run scenario.json
    python main.py list
    python main.py spectrum --system erf_hgamma_1d --levels 8 --gamma 2
"""

import argparse
import logging
import sys

from src.checks import CheckContext, run_checks
from src.config import (
    DEFAULT_LEVELS,
    EXIT_CHECK_FAILED,
    EXIT_INVALID_CONFIG,
    EXIT_NUMERICAL_ABORT,
    EXIT_OK,
    LOG_FORMAT,
    LOG_LEVEL,
    SYSTEMS,
)
from src.data_loader import build_config, load_scenario
from src.errors import ConfigError, DiscretizationError, SingularParameterError, SusyError
from src.report import spectrum_table, write_report, write_spectrum
from src.scenarios import build_scenario, list_scenarios

logger = logging.getLogger(__name__)

PARAMETER_FLAGS = {
    "gamma": "--gamma",
    "a0": "--a0",
    "omega": "--omega",
    "alpha_p4": "--alpha-p4",
    "beta_p4": "--beta-p4",
    "eps": "--eps",
}


def _add_parameter_flags(parser):
    for name, flag in PARAMETER_FLAGS.items():
        kind = int if name == "eps" else float
        parser.add_argument(flag, dest=name, type=kind, default=None, help=f"override {name}")
    parser.add_argument("--superpotential", default=None, help="W(x) for the custom system")
    parser.add_argument("--output", default=None, help="output path prefix")


def _overrides(args):
    names = list(PARAMETER_FLAGS) + ["superpotential"]
    return {name: getattr(args, name, None) for name in names}


def build_parser():
    parser = argparse.ArgumentParser(prog="susy", description="Supersymmetric partner Hamiltonians and their integrals.")
    parser.add_argument("--log-level", default=LOG_LEVEL, help="logging level (default: %(default)s)")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run every configured check and write the report")
    run.add_argument("config", help="scenario JSON file")
    run.add_argument("--levels", type=int, default=None)
    _add_parameter_flags(run)

    sub.add_parser("list", help="list the named systems")

    spectrum = sub.add_parser("spectrum", help="solve a named system and write its spectrum")
    spectrum.add_argument("--system", required=True, choices=SYSTEMS)
    spectrum.add_argument("--levels", type=int, default=DEFAULT_LEVELS)
    _add_parameter_flags(spectrum)
    return parser


def command_run(args):
    print("📦 Loading scenario...")
    config = load_scenario(args.config, overrides=_overrides(args), levels=args.levels, output=args.output)

    print(f"🔧 Building {config.system}...")
    scenario = build_scenario(config.system, config.params, config.make_grid())

    print("🧪 Running checks...")
    ctx, records = run_checks(scenario, config.checks, config.levels)

    print("💾 Saving results...")
    paths = write_report(ctx, records, config)

    failed = [record.name for record in records if not record.passed]
    for path in paths.values():
        print(f"Results saved to: {path}")
    if failed:
        print(f"❌ Failed checks: {', '.join(failed)}")
        return EXIT_CHECK_FAILED
    print("All checks passed!")
    return EXIT_OK


def command_list(args):
    print(list_scenarios())
    return EXIT_OK


def command_spectrum(args):
    config = build_config(args.system, levels=args.levels, checks=[], output=args.output, overrides=_overrides(args))

    print(f"🔧 Building {config.system}...")
    scenario = build_scenario(config.system, config.params, config.make_grid())

    print("🧮 Solving...")
    df = spectrum_table(CheckContext(scenario, config.levels))
    print(df.to_string(index=False))

    print("💾 Saving results...")
    path = write_spectrum(df, config.output)
    print(f"Results saved to: {path}")
    return EXIT_OK


COMMANDS = {
    "run": command_run,
    "list": command_list,
    "spectrum": command_spectrum,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(format=LOG_FORMAT, level=args.log_level.upper())

    try:
        return COMMANDS[args.command](args)
    except (ConfigError, SingularParameterError, DiscretizationError) as exc:
        logger.error("invalid configuration: %s", exc)
        return EXIT_INVALID_CONFIG
    except SusyError as exc:
        logger.error("numerical abort: %s", exc)
        return EXIT_NUMERICAL_ABORT


if __name__ == "__main__":
    sys.exit(main())
