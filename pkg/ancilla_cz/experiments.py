"""
Registered experiments and their CSV/JSON outputs.

Each experiment takes an ExperimentConfig, writes one CSV dataset plus a
JSON summary into the output directory and returns the summary. Guided
strategies are evaluated from exact hitting laws; unguided walks are
sampled with the Monte Carlo runner.
"""

import csv
import logging
import math
import time
from pathlib import Path
from typing import Any, Callable, Dict, List, Sequence, Tuple

import numpy as np

from .analytics import (
    dkw_epsilon,
    exact_hitting_law,
    flip_undo_law,
    flip_undo_quantile,
    max_steps_bound,
    quantile_N,
    summarize,
)
from .config import Config
from .constants import (
    ANGLE_ATOL,
    CHARACTERIZE_COLUMNS,
    EXPECTATION_COLUMNS,
    EXPERIMENT_STRATEGIES,
    HISTOGRAM_COLUMNS,
    MAX_COUPLING,
    MAXSTEPS_COLUMNS,
    PI,
    PROTOCOL_COLUMNS,
    THRESHOLD_COLUMNS,
)
from .models import ExperimentConfig, ExperimentSummary, RunSpec, StrategyKind
from .montecarlo import run_trials
from .optimizer import solve_port1, threshold_alpha
from .protocol import plan_session, run_sessions, verify_transcript
from .stepmodel import characterize_step, xbasis_closed_form, xbasis_config
from .utils import wrap_angle

logger = logging.getLogger(__name__)

Rows = List[Sequence[Any]]
Runner = Callable[[ExperimentConfig], Tuple[Sequence[str], Rows, Dict[str, Any]]]


def default_alpha_grid(experiment: str) -> List[float]:
    """Coupling grid used when neither flags nor manifest give one."""
    if experiment == "fig8-port-modes":
        fractions = np.linspace(0.74, 0.98, 13)
    elif experiment in ("fig4-histogram", "protocol"):
        fractions = np.array([0.25])
    else:
        fractions = np.linspace(0.1, 0.98, 20)
    return [float(f * MAX_COUPLING) for f in fractions]


def strategy_statistics(
    kind: StrategyKind, alpha: float, config: ExperimentConfig
) -> Tuple[float, float, int]:
    """
    (mean, std, N at config.quantile) for one strategy and coupling.

    Flip-undo uses its closed forms, one-step strategies their exact law,
    unguided walks a Monte Carlo run.
    """
    if kind.name == "flip_undo":
        closed = xbasis_closed_form(alpha)
        phi0, p1 = closed.phi_port0, closed.p_port1
        if abs(wrap_angle(phi0 - PI)) <= ANGLE_ATOL:
            return 1.0, 0.0, 1
        law = flip_undo_law(p1)
        return law.mean(), law.std(), flip_undo_quantile(p1, config.quantile)
    if kind.name == "one_step":
        law = exact_hitting_law(kind, alpha, max_steps=config.max_steps)
        return law.mean(), law.std(), quantile_N(law, config.quantile).steps or -1
    spec = RunSpec(
        kind=kind,
        alpha=alpha,
        epsilon=config.epsilon,
        n_trials=config.n_trials,
        master_seed=config.seed,
        max_steps=config.max_steps,
    )
    dist = run_trials(spec, workers=config.workers)
    stats = summarize(dist, (config.quantile,))
    return stats.mean, stats.std, stats.quantiles[0][1] or -1


def _characterize(config: ExperimentConfig):
    rows: Rows = []
    for alpha in config.alpha_grid:
        outcome = characterize_step(alpha, xbasis_config())
        rows.append(
            (alpha, outcome.phi_port0, outcome.phi_port1, outcome.p_port0, outcome.p_port1, outcome.valid)
        )
    return CHARACTERIZE_COLUMNS, rows, {"points": len(rows)}


def _threshold(config: ExperimentConfig):
    alpha_star = threshold_alpha()
    ratio = alpha_star / MAX_COUPLING
    closed_form = math.atan(math.sqrt(math.tan(PI / 8)))
    stats = {"alpha_star": alpha_star, "ratio_to_max": ratio, "closed_form": closed_form}
    return THRESHOLD_COLUMNS, [(alpha_star, ratio)], stats


def _histogram(config: ExperimentConfig):
    kind = StrategyKind.from_label(config.strategies[0])
    spec = RunSpec(
        kind=kind,
        alpha=config.alpha_grid[0],
        epsilon=config.epsilon,
        n_trials=config.n_trials,
        master_seed=config.seed,
        max_steps=config.max_steps,
    )
    dist = run_trials(spec, workers=config.workers)
    stats = summarize(dist)
    rows = [(steps, dist.counts[steps]) for steps in sorted(dist.counts)]
    report = stats.model_dump()
    report["dkw_band_999"] = dkw_epsilon(dist.n_trials, 0.999)
    return HISTOGRAM_COLUMNS, rows, report


def _expectation(config: ExperimentConfig):
    rows: Rows = []
    for alpha in config.alpha_grid:
        for label in config.strategies:
            mean, std, quantile = strategy_statistics(StrategyKind.from_label(label), alpha, config)
            logger.info("%s alpha=%.6f mean=%.4f", label, alpha, mean)
            rows.append((alpha, label, mean, std, quantile))
    return EXPECTATION_COLUMNS, rows, {"rows": len(rows), "quantile": config.quantile}


def _maxsteps(config: ExperimentConfig):
    rows: Rows = []
    for alpha in config.alpha_grid:
        phi0 = xbasis_closed_form(alpha).phi_port0
        remaining = wrap_angle(PI - phi0)
        if remaining == 0.0:
            continue
        p2 = solve_port1(alpha, remaining).success_prob
        rows.append((alpha, p2, max_steps_bound(p2)))
    return MAXSTEPS_COLUMNS, rows, {"points": len(rows)}


def _protocol(config: ExperimentConfig):
    kind = StrategyKind.from_label(config.strategies[0])
    alpha = config.alpha_grid[0]
    tape = plan_session(kind, alpha, config.quantile, config.epsilon)
    transcripts = run_sessions(tape, config.sessions, config.seed)
    rows = [
        (t.session_index, t.stopped_at, t.failed, t.unused_ancillae, t.final_position)
        for t in transcripts
    ]
    failures = sum(t.failed for t in transcripts)
    verified = sum(verify_transcript(t, tape.region_epsilon or 0.0) for t in transcripts)
    stats = {
        "packet_size": tape.packet_size,
        "tape_entries": len(tape.entries),
        "sessions": len(transcripts),
        "failure_rate": failures / len(transcripts),
        "verified": verified,
        "mean_unused": float(np.mean([t.unused_ancillae for t in transcripts])),
        "messages_per_session": float(
            np.mean([t.messages_alice_to_bob + t.messages_bob_to_alice for t in transcripts])
        ),
    }
    return PROTOCOL_COLUMNS, rows, stats


EXPERIMENT_RUNNERS: Dict[str, Runner] = {
    "characterize": _characterize,
    "threshold": _threshold,
    "fig4-histogram": _histogram,
    "fig6-expectation": _expectation,
    "fig7-ancilla-count": _expectation,
    "fig8-port-modes": _expectation,
    "fig9-maxsteps": _maxsteps,
    "protocol": _protocol,
}


def with_defaults(config: ExperimentConfig) -> ExperimentConfig:
    """Fill in the experiment's default grid and strategies."""
    update: Dict[str, Any] = {}
    if not config.alpha_grid:
        update["alpha_grid"] = default_alpha_grid(config.experiment)
    if not config.strategies:
        update["strategies"] = list(EXPERIMENT_STRATEGIES.get(config.experiment, ()))
    return config.model_copy(update=update) if update else config


def write_csv(path: Path, columns: Sequence[str], rows: Rows) -> None:
    """Header row then one line per row; floats use their shortest repr."""
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow(
                [str(value).lower() if isinstance(value, bool) else value for value in row]
            )


def run_experiment(config: ExperimentConfig) -> ExperimentSummary:
    """
    Run a registered experiment and write `<experiment>.csv` and `<experiment>.json`.

    Args:
        config: Experiment name and parameters.

    Returns:
        The summary that was written.
    """
    config = with_defaults(config)
    runner = EXPERIMENT_RUNNERS[config.experiment]
    output_dir = Path(config.output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)

    started = time.perf_counter()
    logger.info("Running experiment %s", config.experiment)
    columns, rows, statistics = runner(config)
    csv_path = output_dir / f"{config.experiment}.csv"
    write_csv(csv_path, columns, rows)

    summary = ExperimentSummary(
        experiment=config.experiment,
        settings=config,
        statistics={**statistics, "seed": config.seed, "config": Config.as_dict()},
        outputs=[str(csv_path)],
        wall_clock_seconds=time.perf_counter() - started,
    )
    json_path = output_dir / f"{config.experiment}.json"
    json_path.write_text(summary.model_dump_json(indent=2), encoding="utf-8")
    logger.info("Wrote %s and %s", csv_path, json_path)
    return summary
