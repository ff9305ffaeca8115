from __future__ import annotations

import argparse
import cProfile
import io
import logging
import pstats
import sys
from collections.abc import Callable, Sequence
from functools import wraps
from pathlib import Path

from .checks import format_report, run_checks
from .config import (
    AVERAGE,
    FRAMES,
    PRESETS,
    RunConfig,
    load_config_file,
    parse_overrides,
    preset,
)
from .dynamics import Method
from .errors import ClonerError, ConfigError
from .model import Coupling
from .observables import TableSeries, fixed_bias_series, simulate
from .series import Series

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_VERIFY = 2

NO_BIAS: Coupling = (0j, 0j)

FLAGS = {
    "atoms": "number of atoms, 1 or 2",
    "bias": "none | matched:<s> | lab:<g1>,<g2>",
    "alpha_re": "real part of alpha",
    "alpha_im": "imaginary part of alpha",
    "beta_re": "real part of beta",
    "beta_im": "imaginary part of beta",
    "tau_max": "last time point, in units of 1/g",
    "tau_points": "number of time points",
    "phase_grid": "phase-average grid points per atom",
    "bloch_grid": "Bloch quadrature orders, e.g. 16x16",
    "method": "|".join(method.value for method in Method),
    "bias_frame": "|".join(FRAMES),
    "out": "output CSV path, - for stdout",
}


def profile(path: str | Path):
    """Run the wrapped command under cProfile and dump the stats to ``path``."""

    def decorator(fn):
        @wraps(fn)
        def profiler(*args, **kwargs):
            profiler = cProfile.Profile()
            profiler.enable()
            fn_result = fn(*args, **kwargs)
            profiler.disable()
            stream = io.StringIO()
            stats = pstats.Stats(profiler, stream=stream)
            stats.sort_stats(pstats.SortKey.TIME)
            stats.print_stats(20)
            logger.info("Profile of %s:\n%s", fn.__name__, stream.getvalue())
            stats.dump_stats(filename=path)
            return fn_result

        return profiler

    return decorator


def _evolve(config: RunConfig, bias_primed: Coupling) -> TableSeries:
    return simulate(
        config.n_atoms, bias_primed, config.taus(), config.phase_grid, config.method
    )


def _average(config: RunConfig, biased: bool) -> TableSeries:
    bias, frame = config.bias.fixed_field(config.bias_frame) if biased else (NO_BIAS, "primed")
    return fixed_bias_series(
        config.n_atoms,
        bias,
        config.taus(),
        frame=frame,
        grid_m=config.phase_grid,
        bloch_grid=config.bloch_grid,
        method=config.method,
    )


def cmd_fidelity(config: RunConfig) -> Series:
    primed = config.bias.primed_for(config.input_qubit(), config.bias_frame)
    columns = {"tau": config.taus(), "fidelity": _evolve(config, primed).fidelity()}
    if not config.bias.is_none:
        columns["fidelity_nobias"] = _evolve(config, NO_BIAS).fidelity()
    return Series.from_columns(**columns)


def cmd_photons(config: RunConfig) -> Series:
    primed = config.bias.primed_for(config.input_qubit(), config.bias_frame)
    n_right, n_all = _evolve(config, primed).mean_photons()
    columns = {"tau": config.taus(), "n_right": n_right, "n_all": n_all}
    if not config.bias.is_none:
        n_right, n_all = _evolve(config, NO_BIAS).mean_photons()
        columns["n_right_nobias"] = n_right
        columns["n_all_nobias"] = n_all
    return Series.from_columns(**columns)


def cmd_avg_fidelity(config: RunConfig) -> Series:
    return Series.from_columns(
        tau=config.taus(),
        fidelity_avg=_average(config, biased=True).fidelity(),
        fidelity_avg_nobias=_average(config, biased=False).fidelity(),
    )


def cmd_avg_photons(config: RunConfig) -> Series:
    n_right, n_all = _average(config, biased=True).mean_photons()
    n_right_nobias, n_all_nobias = _average(config, biased=False).mean_photons()
    return Series.from_columns(
        tau=config.taus(),
        n_right_avg=n_right,
        n_all_avg=n_all,
        n_right_avg_nobias=n_right_nobias,
        n_all_avg_nobias=n_all_nobias,
    )


def cmd_verify() -> int:
    results = run_checks()
    sys.stdout.write(format_report(results))
    return EXIT_OK if all(result.passed for result in results) else EXIT_VERIFY


COMMANDS: dict[str, Callable[[RunConfig], Series]] = {
    "fidelity": cmd_fidelity,
    "photons": cmd_photons,
    "avg-fidelity": cmd_avg_fidelity,
    "avg-photons": cmd_avg_photons,
}


class ArgumentParser(argparse.ArgumentParser):
    # argparse exits with 2, which is reserved for verification failures
    def error(self, message: str):
        raise ConfigError(message)


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(
        prog="cavitycloner",
        description="Simulate the atom-cavity photon cloner and write CSV time series.",
    )
    parser.add_argument(
        "--list-presets", action="store_true", help="print the presets and exit"
    )
    parser.set_defaults(verbose=False, profile=None)

    ambient = ArgumentParser(add_help=False)
    ambient.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    ambient.add_argument("--profile", metavar="PATH", help="dump cProfile stats to PATH")

    settings = ArgumentParser(add_help=False)
    settings.add_argument("--config", metavar="FILE", help="key=value settings file")
    for name, help_text in FLAGS.items():
        settings.add_argument(f"--{name.replace('_', '-')}", dest=name, help=help_text)

    commands = parser.add_subparsers(dest="command", metavar="COMMAND")
    for name in COMMANDS:
        commands.add_parser(name, parents=[ambient, settings], help=f"{name} CSV time series")
    named = commands.add_parser(
        "preset", parents=[ambient, settings], help="run a named preset"
    )
    named.add_argument("name", choices=list(PRESETS))
    commands.add_parser("verify", parents=[ambient], help="run the invariant suite")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Defaults < preset < --config file < flags."""
    if args.command == "preset":
        base = preset(args.name)
    else:
        qubit = AVERAGE if args.command.startswith("avg-") else (1 + 0j, 0j)
        base = RunConfig(command=args.command, qubit=qubit)

    overrides = {}
    if args.config:
        overrides.update(load_config_file(args.config))
    flags = {name: getattr(args, name) for name in FLAGS if getattr(args, name) is not None}
    overrides.update(parse_overrides(flags))
    return base.merge(overrides).validate()


def run(args: argparse.Namespace) -> int:
    if args.command == "verify":
        return cmd_verify()
    config = resolve_config(args)
    logger.info(
        "Running %s: %d atom(s), bias %s, %d points to tau=%g",
        config.command,
        config.n_atoms,
        config.bias,
        config.tau_points,
        config.tau_max,
    )
    COMMANDS[config.command](config).save(config.output_path)
    return EXIT_OK


def list_presets() -> str:
    lines = []
    for name, config in PRESETS.items():
        lines.append(
            f"{name}  {config.command}  atoms={config.n_atoms}  bias={config.bias}  "
            f"tau=[0, {config.tau_max:g}]x{config.tau_points}"
        )
    return "\n".join(lines) + "\n"


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except ConfigError as error:
        sys.stderr.write(f"cavitycloner: error: {error}\n")
        return EXIT_CONFIG

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    if args.list_presets:
        sys.stdout.write(list_presets())
        return EXIT_OK
    if args.command is None:
        sys.stderr.write("cavitycloner: error: a command is required\n")
        return EXIT_CONFIG

    command = profile(args.profile)(run) if args.profile else run
    try:
        return command(args)
    except ClonerError as error:
        logger.debug("Command failed", exc_info=True)
        sys.stderr.write(f"cavitycloner: error: {error}\n")
        return EXIT_CONFIG
