"""
Command-line front end.

    ancilla-cz characterize --alpha pi/16,pi/8
    ancilla-cz simulate --strategy unguided --alpha pi/16 --trials 10000
    ancilla-cz compare --alpha 0.5pi/4,0.9pi/4
    ancilla-cz threshold
    ancilla-cz protocol --strategy flip-undo --alpha pi/16 --quantile 0.999
    ancilla-cz figures fig9-maxsteps --config experiments/fig9.env

A --config manifest holds KEY=VALUE lines (EXPERIMENT, ALPHA_GRID, EPSILON,
TRIALS, SEED, QUANTILE, OUT, STRATEGIES, WORKERS, MAX_STEPS, SESSIONS);
command-line flags override it.
"""

import argparse
import logging
import sys
from typing import Any, Dict, List, Optional

from decouple import Config as ManifestReader
from decouple import RepositoryEnv
from pydantic import ValidationError

from .config import Config
from .constants import EXIT_CONFIG_ERROR, EXIT_OK, EXIT_RUNTIME_FAILURE, EXPERIMENTS
from .experiments import run_experiment
from .models import ConfigError, ExperimentConfig, SimulationError
from .utils import parse_angle, parse_angle_list

logger = logging.getLogger(__name__)

SUBCOMMAND_EXPERIMENTS = {
    "characterize": "characterize",
    "simulate": "fig4-histogram",
    "compare": "fig6-expectation",
    "threshold": "threshold",
    "protocol": "protocol",
}

# manifest key -> (ExperimentConfig field, cast)
MANIFEST_KEYS = {
    "EXPERIMENT": ("experiment", str),
    "ALPHA_GRID": ("alpha_grid", parse_angle_list),
    "EPSILON": ("epsilon", parse_angle),
    "TRIALS": ("n_trials", int),
    "SEED": ("seed", int),
    "QUANTILE": ("quantile", float),
    "OUT": ("output_dir", str),
    "STRATEGIES": ("strategies", lambda text: [s.strip() for s in text.split(",") if s.strip()]),
    "WORKERS": ("workers", int),
    "MAX_STEPS": ("max_steps", int),
    "SESSIONS": ("sessions", int),
}


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="KEY=VALUE experiment manifest")
    parser.add_argument(
        "--alpha",
        action="append",
        help="coupling(s), e.g. pi/16 or 0.73*pi/4; repeat or comma-separate",
    )
    parser.add_argument("--epsilon", help="target region half-width (unguided)")
    parser.add_argument("--trials", type=int, help="Monte Carlo trials")
    parser.add_argument("--seed", type=int, help="master seed")
    parser.add_argument("--quantile", type=float, help="packet-size quantile q")
    parser.add_argument("--out", help="output directory")
    parser.add_argument(
        "--strategy", action="append", help="strategy label, e.g. one-step-2p1d"
    )
    parser.add_argument("--workers", type=int, help="worker processes")
    parser.add_argument("--max-steps", type=int, help="per-trial step cutoff")
    parser.add_argument("--sessions", type=int, help="protocol sessions to emulate")


def build_parser() -> argparse.ArgumentParser:
    """Parser with one subcommand per experiment family."""
    parser = argparse.ArgumentParser(
        prog="ancilla-cz", description="Ancilla-mediated CZ gate synthesis experiments"
    )
    parser.add_argument("--log-level", default=Config.LOG_LEVEL, help="logging level")
    commands = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("characterize", "X-basis step table over a coupling grid"),
        ("simulate", "hitting-time histogram of one strategy"),
        ("compare", "expected ancilla counts of several strategies"),
        ("threshold", "coupling above which port 0 becomes usable"),
        ("protocol", "emulate Alice/Bob sessions with a pre-planned tape"),
    ):
        _add_common_flags(commands.add_parser(name, help=help_text))
    figures = commands.add_parser("figures", help="run a registered experiment by name")
    figures.add_argument("name", choices=EXPERIMENTS)
    _add_common_flags(figures)
    return parser


def load_manifest(path: str) -> Dict[str, Any]:
    """
    Read an experiment manifest into ExperimentConfig fields.

    Raises:
        ConfigError: If the file is missing or a value does not parse.
    """
    try:
        reader = ManifestReader(RepositoryEnv(path))
    except OSError as e:
        raise ConfigError(f"cannot read manifest {path}: {e}") from e
    fields: Dict[str, Any] = {}
    for key, (field, cast) in MANIFEST_KEYS.items():
        raw = reader(key, default=None)
        if raw is None or raw == "":
            continue
        try:
            fields[field] = cast(raw)
        except (ValueError, SimulationError) as e:
            raise ConfigError(f"manifest key {key}: {e}", details={"value": raw}) from e
    return fields


def _flag_values(args: argparse.Namespace) -> Dict[str, Any]:
    fields: Dict[str, Any] = {}
    if args.alpha:
        grid: List[float] = []
        for item in args.alpha:
            grid.extend(parse_angle_list(item))
        fields["alpha_grid"] = grid
    if args.epsilon is not None:
        fields["epsilon"] = parse_angle(args.epsilon)
    if args.strategy:
        fields["strategies"] = [
            s.strip() for item in args.strategy for s in item.split(",") if s.strip()
        ]
    for flag, field in (
        ("trials", "n_trials"),
        ("seed", "seed"),
        ("quantile", "quantile"),
        ("out", "output_dir"),
        ("workers", "workers"),
        ("max_steps", "max_steps"),
        ("sessions", "sessions"),
    ):
        value = getattr(args, flag)
        if value is not None:
            fields[field] = value
    return fields


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    """Defaults, then manifest, then flags."""
    fields: Dict[str, Any] = {
        "n_trials": Config.DEFAULT_TRIALS,
        "seed": Config.DEFAULT_SEED,
        "output_dir": Config.OUTPUT_DIR,
        "workers": Config.WORKERS,
        "max_steps": Config.MAX_STEPS,
    }
    if args.config:
        fields.update(load_manifest(args.config))
    try:
        fields.update(_flag_values(args))
    except SimulationError as e:
        raise ConfigError(str(e)) from e
    if args.command == "figures":
        fields["experiment"] = args.name
    else:
        fields["experiment"] = SUBCOMMAND_EXPERIMENTS[args.command]
    try:
        return ExperimentConfig(**fields)
    except ValidationError as e:
        raise ConfigError(f"invalid experiment configuration: {e}") from e


def main(argv: Optional[List[str]] = None) -> int:
    """Parse, run and map failures to exit codes (2 configuration, 3 runtime)."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, str(args.log_level).upper(), logging.INFO))

    try:
        config = resolve_config(args)
    except ConfigError as e:
        logger.error("Configuration error: %s", e)
        return EXIT_CONFIG_ERROR

    try:
        summary = run_experiment(config)
    except (SimulationError, OSError) as e:
        logger.error("Experiment %s failed: %s", config.experiment, e)
        return EXIT_RUNTIME_FAILURE
    for path in summary.outputs:
        print(path)
    return EXIT_OK


def run() -> None:
    """Console-script entry point."""
    sys.exit(main())


if __name__ == "__main__":
    run()
