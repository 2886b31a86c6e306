"""
Ancilla CZ MCP Tools
"""

import asyncio
import logging
import math
from typing import Any, Dict, Optional

from .analytics import flip_undo_cdf, flip_undo_mean, flip_undo_quantile, summarize
from .app import mcp
from .config import Config
from .constants import DEFAULT_QUANTILE, MAX_COUPLING, STRATEGY_LABELS
from .models import InstructionTape, RunSpec, SimulationError, StepOutcome, StrategyKind, SummaryStats
from .montecarlo import run_trials
from .optimizer import threshold_alpha
from .protocol import plan_session
from .stepmodel import characterize_step, xbasis_closed_form, xbasis_config
from .utils import parse_angle

logger = logging.getLogger(__name__)


@mcp.tool()
async def characterize_coupling(alpha: str = "pi/16") -> StepOutcome:
    """
    Characterize the X-basis ancilla pass at a coupling strength.

    Args:
        alpha: Coupling in (0, pi/4], e.g. "pi/16" or "0.73*pi/4"

    Returns:
        Port angles and probabilities of the pass
    """
    try:
        return characterize_step(parse_angle(alpha), xbasis_config())
    except SimulationError as e:
        logger.error("characterize_coupling failed: %s", e)
        raise RuntimeError(f"Characterization failed: {e}") from e


@mcp.tool()
async def coupling_threshold(tol: float = 1e-12) -> Dict[str, float]:
    """
    Coupling above which a failed first step can be completed through port 0.

    Args:
        tol: Bisection tolerance in radians

    Returns:
        alpha_star, its ratio to pi/4 and the closed-form value
    """
    try:
        alpha_star = threshold_alpha(tol)
    except SimulationError as e:
        logger.error("coupling_threshold failed: %s", e)
        raise RuntimeError(f"Threshold search failed: {e}") from e
    return {
        "alpha_star": alpha_star,
        "ratio_to_max": alpha_star / MAX_COUPLING,
        "closed_form": math.atan(math.sqrt(math.tan(math.pi / 8))),
    }


@mcp.tool()
async def simulate_strategy(
    strategy: str = "unguided",
    alpha: str = "pi/16",
    epsilon: str = "pi/100",
    trials: int = 1000,
    seed: Optional[int] = None,
) -> SummaryStats:
    """
    Monte Carlo hitting-time statistics of a strategy.

    Args:
        strategy: One of unguided, flip-undo, one-step-1p1d, one-step-1p2d,
                  one-step-2p1d, one-step-2p2d
        alpha: Coupling strength
        epsilon: Target region half-width (unguided only)
        trials: Number of walks (default: 1000, max: 100000)
        seed: Master seed (default from DEFAULT_SEED)

    Returns:
        Mean, standard deviation and quantiles of the ancilla count
    """
    try:
        spec = RunSpec(
            kind=StrategyKind.from_label(strategy),
            alpha=parse_angle(alpha),
            epsilon=parse_angle(epsilon),
            n_trials=max(1, min(trials, 100000)),
            master_seed=Config.DEFAULT_SEED if seed is None else seed,
            max_steps=Config.MAX_STEPS,
        )
        dist = await asyncio.to_thread(run_trials, spec, 1)
        return summarize(dist)
    except (SimulationError, ValueError) as e:
        logger.error("simulate_strategy failed: %s", e)
        raise RuntimeError(f"Simulation failed: {e}") from e


@mcp.tool()
async def flip_undo_packet(alpha: str = "pi/16", quantile: float = DEFAULT_QUANTILE) -> Dict[str, Any]:
    """
    Packet size and expected ancilla count of the flip-undo strategy.

    Args:
        alpha: Coupling strength
        quantile: Probability that the packet suffices

    Returns:
        Success probability p, expected count 1 + 1/p and packet size N
    """
    try:
        p = xbasis_closed_form(parse_angle(alpha)).p_port1
        packet = flip_undo_quantile(p, quantile)
        return {
            "p": p,
            "expected_ancillae": flip_undo_mean(p),
            "packet_size": packet,
            "coverage": flip_undo_cdf(p, packet),
        }
    except SimulationError as e:
        logger.error("flip_undo_packet failed: %s", e)
        raise RuntimeError(f"Packet sizing failed: {e}") from e


@mcp.tool()
async def plan_instruction_tape(
    strategy: str = "flip-undo", alpha: str = "pi/16", quantile: float = DEFAULT_QUANTILE
) -> InstructionTape:
    """
    Pre-plan the instruction tape Alice sends with a packet of ancillae.

    Args:
        strategy: Strategy label (one-step-2p2d has no finite tape)
        alpha: Coupling strength
        quantile: Probability that the packet suffices

    Returns:
        The instruction tape with its packet size
    """
    if strategy not in STRATEGY_LABELS:
        raise RuntimeError(f"Unknown strategy '{strategy}'; choose from {STRATEGY_LABELS}")
    try:
        return plan_session(StrategyKind.from_label(strategy), parse_angle(alpha), quantile)
    except SimulationError as e:
        logger.error("plan_instruction_tape failed: %s", e)
        raise RuntimeError(f"Tape planning failed: {e}") from e
