"""
Exact and closed-form statistics of hitting times.

Closed forms for the flip-undo loop, geometric envelopes for the one-step
strategy, quantile packet sizes and summaries of empirical histograms.
Exact laws come from propagating probability mass over the positions a
strategy can visit.
"""

import logging
import math
from typing import Callable, Dict, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import solve

from .config import Config
from .constants import DEFAULT_QUANTILES
from .models import (
    ExactHittingLaw,
    HittingDistribution,
    InvalidArgumentError,
    QuantileEstimate,
    StrategyKind,
    SummaryStats,
    WalkState,
)
from .strategies import policy_for, target_rule_for
from .utils import wrap_angle

logger = logging.getLogger(__name__)

# Positions closer than this are merged when propagating mass
_POSITION_QUANTUM = 1e-9

# Empirical quantiles need this many trials beyond the quantile to be certified
_CERTIFY_TAIL_TRIALS = 10

CdfSource = Union[HittingDistribution, ExactHittingLaw, Callable[[int], float]]


def _check_probability(p: float, name: str = "p") -> float:
    if not math.isfinite(p) or not 0.0 < p <= 1.0:
        raise InvalidArgumentError(f"{name}={p} outside (0, 1]", details={name: p})
    return p


def flip_undo_mean(p: float) -> float:
    """Expected ancilla count of the flip-undo loop, 1 + 1/p."""
    p = _check_probability(p)
    return 1.0 + 1.0 / p


def flip_undo_cdf(p: float, n: int) -> float:
    """
    P(T <= n) for the flip-undo loop at odd n = 2k + 1.

    After a failed first step, every two steps finish the walk with
    probability 2p(1 - p).
    """
    p = _check_probability(p)
    if n < 1 or n % 2 == 0:
        raise InvalidArgumentError(
            f"flip-undo walks finish at odd step counts, got n={n}", details={"n": n}
        )
    k = (n - 1) // 2
    return 1.0 - (1.0 - p) * (1.0 - 2.0 * p * (1.0 - p)) ** k


def flip_undo_quantile(p: float, q: float) -> int:
    """Smallest odd n with flip_undo_cdf(p, n) >= q."""
    p = _check_probability(p)
    _check_quantile(q)
    if 1.0 - p <= 1.0 - q:
        return 1
    cycle = 1.0 - 2.0 * p * (1.0 - p)
    k = max(math.ceil(math.log((1.0 - q) / (1.0 - p)) / math.log(cycle)), 0)
    # guard the float inversion against off-by-one
    while k > 0 and flip_undo_cdf(p, 2 * k - 1) >= q:
        k -= 1
    while flip_undo_cdf(p, 2 * k + 1) < q:
        k += 1
    return 2 * k + 1


def flip_undo_law(p: float, tail_tol: Optional[float] = None) -> ExactHittingLaw:
    """Flip-undo pmf truncated once less than `tail_tol` mass is left."""
    p = _check_probability(p)
    tail_tol = Config.EXACT_TAIL_TOL if tail_tol is None else tail_tol
    pmf = [p]
    survival = 1.0 - p
    cycle = 2.0 * p * (1.0 - p)
    while survival > tail_tol and cycle > 0.0:
        pmf.extend((0.0, survival * cycle))
        survival *= 1.0 - cycle
    return ExactHittingLaw(pmf=pmf, residual=max(survival, 0.0))


def flip_undo_chain_mean(p: float) -> float:
    """
    Expected steps from the origin, solved from the absorbing three-state chain.

    States are the origin, the failure angle and the failure angle minus pi;
    the fourth state (pi) absorbs.
    """
    p = _check_probability(p)
    q = 1.0 - p
    transitions = np.array(
        [
            [0.0, q, 0.0, p],
            [q, 0.0, p, 0.0],
            [0.0, p, 0.0, q],
            [0.0, 0.0, 0.0, 1.0],
        ]
    )
    target = 3
    system = np.eye(4) - transitions
    system[target, :] = 0.0
    system[target, target] = 1.0
    rhs = np.ones(4)
    rhs[target] = 0.0
    return float(solve(system, rhs)[0])


def geometric_bounds(p1: float, p2: float, n: int) -> Tuple[float, float]:
    """
    Envelope (1 - (1 - p2)^n, 1 - (1 - p1)^n) of a walk whose per-step
    success probability stays within [p2, p1].
    """
    _check_probability(p1, "p1")
    _check_probability(p2, "p2")
    if p2 > p1:
        raise InvalidArgumentError("need p2 <= p1", details={"p1": p1, "p2": p2})
    if n < 0:
        raise InvalidArgumentError("step count must be non-negative")
    return 1.0 - (1.0 - p2) ** n, 1.0 - (1.0 - p1) ** n


def max_steps_bound(p2: float) -> int:
    """Longest horizon floor(1/p2) over which an n-fold probability gain is possible."""
    p2 = _check_probability(p2, "p2")
    return int(math.floor(1.0 / p2 + 1e-12))


def dkw_epsilon(n_trials: int, confidence: float = 0.999) -> float:
    """Half-width of the Dvoretzky-Kiefer-Wolfowitz band for an empirical CDF."""
    if n_trials < 1 or not 0.0 < confidence < 1.0:
        raise InvalidArgumentError("need n_trials >= 1 and confidence in (0, 1)")
    return math.sqrt(math.log(2.0 / (1.0 - confidence)) / (2.0 * n_trials))


def _check_quantile(q: float) -> float:
    if not 0.0 < q < 1.0:
        raise InvalidArgumentError(f"quantile {q} outside (0, 1)", details={"q": q})
    return q


def quantile_N(source: CdfSource, q: float, max_steps: Optional[int] = None) -> QuantileEstimate:
    """
    Smallest N with P(T <= N) >= q.

    Args:
        source: Empirical histogram, exact law, or a CDF callable.
        q: Quantile in (0, 1).
        max_steps: Search limit for CDF callables.

    Returns:
        QuantileEstimate; `certified` is False when the histogram's tail
        beyond the quantile is too thin or the quantile was not reached.
    """
    _check_quantile(q)
    if isinstance(source, HittingDistribution):
        if source.n_trials == 0:
            raise InvalidArgumentError("empty hitting distribution")
        cumulative = 0
        for steps in sorted(source.counts):
            cumulative += source.counts[steps]
            if cumulative / source.n_trials >= q:
                certified = source.n_trials * (1.0 - q) >= _CERTIFY_TAIL_TRIALS
                if not certified:
                    logger.warning(
                        "Quantile %.6f from %d trials is not certified", q, source.n_trials
                    )
                return QuantileEstimate(q=q, steps=steps, certified=certified)
        logger.warning("Quantile %.6f not reached; %d trials overflowed", q, source.overflow)
        return QuantileEstimate(q=q, steps=None, certified=False)

    if isinstance(source, ExactHittingLaw):
        cumulative = 0.0
        for index, mass in enumerate(source.pmf):
            cumulative += mass
            if cumulative >= q:
                return QuantileEstimate(q=q, steps=index + 1, certified=True)
        return QuantileEstimate(q=q, steps=None, certified=False)

    limit = Config.MAX_STEPS if max_steps is None else max_steps
    for steps in range(1, limit + 1):
        if source(steps) >= q:
            return QuantileEstimate(q=q, steps=steps, certified=True)
    return QuantileEstimate(q=q, steps=None, certified=False)


def summarize(
    dist: HittingDistribution, quantiles: Sequence[float] = DEFAULT_QUANTILES
) -> SummaryStats:
    """
    Mean, population standard deviation and quantiles of a histogram.

    Overflowed trials are excluded from the moments and counted separately.
    """
    if dist.total < 1:
        raise InvalidArgumentError("summarize needs at least one finished trial")
    if dist.overflow:
        logger.warning("%d trials overflowed and are excluded from moments", dist.overflow)
    steps = np.array(sorted(dist.counts), dtype=float)
    weights = np.array([dist.counts[int(s)] for s in steps], dtype=float)
    mean = float(np.sum(steps * weights) / dist.total)
    variance = float(np.sum(weights * (steps - mean) ** 2) / dist.total)
    return SummaryStats(
        mean=mean,
        std=math.sqrt(max(variance, 0.0)),
        quantiles=[(q, quantile_N(dist, q).steps) for q in sorted(quantiles)],
        n_trials=dist.n_trials,
        overflow=dist.overflow,
    )


def exact_hitting_law(
    kind: StrategyKind,
    alpha: float,
    epsilon: float = 0.0,
    max_steps: Optional[int] = None,
    tail_tol: Optional[float] = None,
) -> ExactHittingLaw:
    """
    Hitting-time law of a strategy by propagating probability mass.

    Positions within 1e-9 of each other are merged. Propagation stops once
    the unabsorbed mass falls below `tail_tol` or after `max_steps` steps.
    """
    policy = policy_for(kind, alpha)
    rule = target_rule_for(kind, epsilon)
    tail_tol = Config.EXACT_TAIL_TOL if tail_tol is None else tail_tol
    max_steps = Config.MAX_STEPS if max_steps is None else max_steps

    frontier: Dict[int, Tuple[float, float]] = {0: (0.0, 1.0)}
    pmf = []
    residual = 1.0
    for step in range(max_steps):
        absorbed = 0.0
        following: Dict[int, Tuple[float, float]] = {}
        for position, mass in frontier.values():
            plan = policy.next_plan(WalkState(position=position, steps=step))
            for port, prob in (
                (plan.success_port, plan.success_prob),
                (plan.failure_port, plan.failure_prob),
            ):
                if prob <= 0.0:
                    continue
                landed = wrap_angle(position + plan.phase_for(port))
                if rule.reached(landed):
                    absorbed += mass * prob
                    continue
                key = round(landed / _POSITION_QUANTUM)
                _, held = following.get(key, (landed, 0.0))
                following[key] = (landed, held + mass * prob)
        pmf.append(absorbed)
        frontier = following
        residual = sum(mass for _, mass in frontier.values())
        if residual <= tail_tol:
            break
    else:
        logger.warning(
            "Exact law of %s at alpha=%.6f truncated with %.3e mass left",
            kind.label,
            alpha,
            residual,
        )
    return ExactHittingLaw(pmf=pmf, residual=max(residual, 0.0))
