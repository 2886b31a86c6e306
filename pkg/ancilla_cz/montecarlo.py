"""
Monte Carlo sampling of hitting times.

Every trial draws from its own counter-based stream derived from the
master seed and the trial index, so results do not depend on how trials
are split into shards or how many worker processes run them.
"""

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from functools import reduce
from itertools import repeat
from typing import List, Optional, Tuple

import numpy as np

from .config import Config
from .models import (
    HittingDistribution,
    InvalidArgumentError,
    InvalidPlanError,
    RunSpec,
    StepPlan,
    WalkState,
)
from .strategies import advance, policy_for, target_rule_for

logger = logging.getLogger(__name__)


def derive_stream(master_seed: int, trial_index: int) -> np.random.Generator:
    """
    Independent Philox stream for one trial.

    The stream depends only on (master_seed, trial_index).
    """
    if master_seed < 0 or trial_index < 0:
        raise InvalidArgumentError("seed and trial index must be non-negative")
    sequence = np.random.SeedSequence(entropy=master_seed, spawn_key=(trial_index,))
    return np.random.Generator(np.random.Philox(sequence))


def sample_port(plan: StepPlan, stream: np.random.Generator) -> int:
    """Port that fires: the success port with probability plan.success_prob."""
    if stream.random() < plan.success_prob:
        return plan.success_port
    return plan.failure_port


def run_trial(spec: RunSpec, trial_index: int) -> Optional[int]:
    """
    One walk from the origin.

    Returns:
        Number of ancillae used, or None when max_steps ran out first.
    """
    policy = policy_for(spec.kind, spec.alpha)
    rule = target_rule_for(spec.kind, spec.epsilon)
    stream = derive_stream(spec.master_seed, trial_index)
    state = WalkState()
    while state.steps < spec.max_steps:
        plan = policy.next_plan(state)
        if not 0.0 <= plan.success_prob <= 1.0:
            raise InvalidPlanError("plan probability outside [0, 1]")
        state = advance(state, plan, sample_port(plan, stream), rule)
        if state.done:
            return state.steps
    return None


def _run_shard(spec: RunSpec, start: int, stop: int) -> HittingDistribution:
    samples: List[int] = []
    overflow = 0
    for trial_index in range(start, stop):
        steps = run_trial(spec, trial_index)
        if steps is None:
            overflow += 1
        else:
            samples.append(steps)
    return HittingDistribution.from_samples(samples, overflow=overflow)


def shard_bounds(n_trials: int, shards: int) -> List[Tuple[int, int]]:
    """Contiguous [start, stop) trial ranges covering 0..n_trials."""
    shards = max(1, min(shards, n_trials))
    edges = np.linspace(0, n_trials, shards + 1).round().astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def run_trials(
    spec: RunSpec, workers: Optional[int] = None, shards: Optional[int] = None
) -> HittingDistribution:
    """
    Run spec.n_trials walks and histogram their hitting times.

    Args:
        spec: Strategy, coupling, region, trial count and master seed.
        workers: Worker processes (Config.WORKERS by default).
        shards: Number of trial ranges (defaults to workers).

    Returns:
        HittingDistribution; walks exceeding max_steps count as overflow.
    """
    workers = Config.WORKERS if workers is None else workers
    if workers < 1:
        raise InvalidArgumentError("workers must be at least 1")
    bounds = shard_bounds(spec.n_trials, shards or workers)
    started = time.perf_counter()
    logger.info(
        "Running %d %s trials at alpha=%.6f over %d shard(s)",
        spec.n_trials,
        spec.kind.label,
        spec.alpha,
        len(bounds),
    )
    starts = [a for a, _ in bounds]
    stops = [b for _, b in bounds]
    if workers == 1:
        parts = [_run_shard(spec, a, b) for a, b in bounds]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_shard, repeat(spec), starts, stops))
    merged = reduce(HittingDistribution.merge, parts, HittingDistribution.empty())
    if merged.overflow:
        logger.warning(
            "%d of %d trials exceeded max_steps=%d",
            merged.overflow,
            spec.n_trials,
            spec.max_steps,
        )
    logger.info("Finished %d trials in %.2fs", spec.n_trials, time.perf_counter() - started)
    return merged
