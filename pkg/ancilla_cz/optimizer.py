"""
Step optimizer.

Finds the pass of the two-parameter family that applies a requested angle
on a chosen port with the highest probability. Searches run over the
preparation polar angle (or the measurement polar angle) in [0, pi/2];
a coarse vectorized scan brackets the roots and Brent's method refines them.
"""

import logging
import math
from functools import lru_cache
from typing import Callable, List, Literal, Optional, Tuple

import numpy as np
from scipy.optimize import bisect, brentq

from .config import Config
from .constants import ANGLE_ATOL, MAX_COUPLING, PI
from .models import (
    ControlMode,
    InvalidArgumentError,
    InvalidPlanError,
    NoSolutionError,
    StepPlan,
)
from .stepmodel import apply_flip, characterize_step, family_config, family_outcomes
from .utils import check_coupling, wrap_angle

logger = logging.getLogger(__name__)

Scan = Literal["prep", "meas"]

HALF_PI = PI / 2
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _members(scan: Scan, param, fixed):
    return (param, fixed) if scan == "prep" else (fixed, param)


@lru_cache(maxsize=512)
def _scan(alpha: float, fixed: float, port: int, scan: Scan) -> Tuple[np.ndarray, ...]:
    grid = np.linspace(0.0, HALF_PI, Config.SCAN_POINTS)
    prep, meas = _members(scan, grid, np.full_like(grid, fixed))
    phi0, phi1, p0, p1 = family_outcomes(alpha, prep, meas)
    magnitude = np.abs(phi1 if port == 1 else phi0)
    probability = p1 if port == 1 else p0
    for array in (grid, magnitude, probability):
        array.setflags(write=False)
    return grid, magnitude, probability


def _curve_point(
    alpha: float, param: float, fixed: float, port: int, scan: Scan
) -> Tuple[float, float]:
    prep, meas = _members(scan, param, fixed)
    phi0, phi1, p0, p1 = family_outcomes(alpha, prep, meas)
    if port == 1:
        return float(abs(phi1[0])), float(p1[0])
    return float(abs(phi0[0])), float(p0[0])


def _best_root(
    alpha: float, magnitude: float, fixed: float, port: int, scan: Scan
) -> Optional[Tuple[float, float]]:
    """Most probable parameter on the scanned curve applying `magnitude` on `port`."""
    grid, values, _ = _scan(alpha, fixed, port, scan)
    gap = values - magnitude

    def residual(param: float) -> float:
        return _curve_point(alpha, param, fixed, port, scan)[0] - magnitude

    touching = np.abs(gap) <= 1e-12
    roots: List[float] = [float(grid[k]) for k in np.flatnonzero(touching)]
    crossing = (gap[:-1] * gap[1:] < 0) & ~touching[:-1] & ~touching[1:]
    for k in np.flatnonzero(crossing):
        roots.append(
            float(brentq(residual, grid[k], grid[k + 1], xtol=Config.ROOT_XTOL))
        )
    if not roots:
        return None
    scored = [(param, _curve_point(alpha, param, fixed, port, scan)[1]) for param in roots]
    return max(scored, key=lambda item: item[1])


def golden_section_max(
    func: Callable[[float], float], lower: float, upper: float, tol: float = 1e-9
) -> float:
    """
    Golden-section search for the maximizer of a unimodal function.

    Args:
        func: Objective.
        lower: Left end of the bracket.
        upper: Right end of the bracket.
        tol: Bracket width at which to stop.

    Returns:
        Midpoint of the final bracket.
    """
    inner_left = upper - _GOLDEN * (upper - lower)
    inner_right = lower + _GOLDEN * (upper - lower)
    f_left, f_right = func(inner_left), func(inner_right)
    while abs(upper - lower) > tol:
        if f_left > f_right:
            upper, inner_right, f_right = inner_right, inner_left, f_left
            inner_left = upper - _GOLDEN * (upper - lower)
            f_left = func(inner_left)
        else:
            lower, inner_left, f_left = inner_left, inner_right, f_right
            inner_right = lower + _GOLDEN * (upper - lower)
            f_right = func(inner_right)
    return (lower + upper) / 2


def _check_target(target: float, upper_open: bool) -> float:
    if not math.isfinite(target):
        raise InvalidArgumentError("target angle must be finite")
    magnitude = abs(target)
    too_big = magnitude >= PI if upper_open else magnitude > PI + ANGLE_ATOL
    if magnitude == 0.0 or too_big:
        raise InvalidArgumentError(
            f"target angle {target} outside the allowed range",
            details={"target": target},
        )
    return min(magnitude, PI)


def _build_plan(
    alpha: float, prep: float, meas: float, port: int, target: float
) -> StepPlan:
    """Family member for (prep, meas), flipped if needed so `port` applies `target`."""
    config = family_config(alpha, prep, meas)
    outcome = characterize_step(alpha, config)
    if not outcome.valid:
        raise InvalidPlanError("family member failed validation", details={"prep": prep, "meas": meas})
    achieved = outcome.phase(port)
    if abs(wrap_angle(achieved - target)) > ANGLE_ATOL:
        config = apply_flip(config)
        outcome = characterize_step(alpha, config)
        achieved = outcome.phase(port)
    if not outcome.valid or abs(wrap_angle(achieved - target)) > ANGLE_ATOL:
        logger.error(
            "Plan for target %.12f on port %d reproduces %.12f", target, port, achieved
        )
        raise InvalidPlanError(
            "plan does not reproduce its target angle",
            details={"target": target, "achieved": achieved, "port": port},
        )
    return StepPlan(
        config=config,
        success_port=port,
        success_phase=wrap_angle(target),
        success_prob=outcome.probability(port),
        failure_phase=outcome.phase(1 - port),
    )


def solve_port1(alpha: float, target: float, dof: int = 1, scan: Scan = "prep") -> StepPlan:
    """
    Most probable pass applying `target` on port 1.

    Args:
        alpha: Coupling strength in (0, pi/4].
        target: Angle with 0 < |target| <= pi.
        dof: 1 keeps one of the polar angles at pi/2; 2 frees both.
        scan: Which polar angle varies when dof is 1.

    Returns:
        The chosen StepPlan.
    """
    alpha = check_coupling(alpha)
    magnitude = _check_target(target, upper_open=False)
    candidates: List[Tuple[float, float, float]] = []
    scans: Tuple[Scan, ...] = (scan,) if dof == 1 else ("prep", "meas")
    for direction in scans:
        found = _best_root(alpha, magnitude, HALF_PI, 1, direction)
        if found is not None:
            param, prob = found
            prep, meas = _members(direction, param, HALF_PI)
            candidates.append((prob, prep, meas))

    if dof == 2:

        def objective(meas: float) -> float:
            found = _best_root(alpha, magnitude, meas, 1, "prep")
            return -1.0 if found is None else found[1]

        meas = golden_section_max(objective, 0.0, HALF_PI)
        found = _best_root(alpha, magnitude, meas, 1, "prep")
        if found is not None:
            candidates.append((found[1], found[0], meas))

    if not candidates:
        raise NoSolutionError(
            "no pass applies the target on port 1",
            details={"alpha": alpha, "target": target},
        )
    prob, prep, meas = _most_probable(candidates)
    logger.debug("Port 1 plan alpha=%.6f target=%.6f p=%.6f", alpha, target, prob)
    return _build_plan(alpha, prep, meas, 1, target)


def max_port0_angle(alpha: float) -> float:
    """Largest port-0 angle magnitude any family member reaches (the X-basis one)."""
    alpha = check_coupling(alpha)
    return 4.0 * math.atan(math.tan(alpha) ** 2)


def solve_port0(alpha: float, target: float, dof: int = 1) -> Optional[StepPlan]:
    """
    Most probable pass applying `target` on port 0.

    Args:
        alpha: Coupling strength in (0, pi/4].
        target: Angle with 0 < |target| < pi.
        dof: 1 keeps the measurement polar angle at pi/2; 2 frees it.

    Returns:
        The StepPlan, or None when |target| exceeds pi/2 or the largest
        reachable port-0 angle.
    """
    alpha = check_coupling(alpha)
    magnitude = _check_target(target, upper_open=True)
    if magnitude > HALF_PI + 1e-12 or magnitude > max_port0_angle(alpha) + 1e-12:
        return None

    candidates: List[Tuple[float, float, float]] = []
    found = _best_root(alpha, magnitude, HALF_PI, 0, "prep")
    if found is not None:
        candidates.append((found[1], found[0], HALF_PI))

    if dof == 2:
        reach = _curve_point(alpha, HALF_PI, HALF_PI, 0, "meas")[0] - magnitude
        lower = 0.0
        if reach > 0:
            lower = float(
                brentq(
                    lambda meas: _curve_point(alpha, meas, HALF_PI, 0, "meas")[0] - magnitude,
                    0.0,
                    HALF_PI,
                    xtol=Config.ROOT_XTOL,
                )
            )

        def objective(meas: float) -> float:
            inner = _best_root(alpha, magnitude, meas, 0, "prep")
            return -1.0 if inner is None else inner[1]

        if lower < HALF_PI:
            meas = golden_section_max(objective, lower, HALF_PI)
            inner = _best_root(alpha, magnitude, meas, 0, "prep")
            if inner is not None:
                candidates.append((inner[1], inner[0], meas))

    if not candidates:
        return None
    prob, prep, meas = _most_probable(candidates)
    logger.debug("Port 0 plan alpha=%.6f target=%.6f p=%.6f", alpha, target, prob)
    return _build_plan(alpha, prep, meas, 0, target)


def _most_probable(candidates: List[Tuple[float, float, float]]) -> Tuple[float, float, float]:
    best = candidates[0]
    for candidate in candidates[1:]:
        if candidate[0] > best[0] + 1e-12:
            best = candidate
    return best


def best_step(alpha: float, remaining: float, mode: ControlMode) -> StepPlan:
    """
    Most probable single step that lands exactly on the target.

    Args:
        alpha: Coupling strength.
        remaining: Angle still to apply, 0 < |remaining| <= pi.
        mode: Ports usable and free polar angles.

    Returns:
        Port-1 plan, or the port-0 plan when two ports are allowed and
        port 0 is at least as likely.
    """
    if remaining == 0.0:
        raise InvalidArgumentError("nothing left to apply")
    port1 = solve_port1(alpha, remaining, mode.dof)
    if mode.ports == 1 or abs(remaining) >= PI - ANGLE_ATOL:
        return port1
    port0 = solve_port0(alpha, remaining, mode.dof)
    if port0 is not None and port0.success_prob >= port1.success_prob - 1e-12:
        return port0
    return port1


def threshold_alpha(tol: float = 1e-12) -> float:
    """
    Smallest coupling whose X-basis port-0 angle reaches pi/2 in magnitude.

    Above it, a failed first step leaves a remaining angle within pi/2, so
    port 0 can be targeted.
    """

    def gap(alpha: float) -> float:
        return abs(solve_port1(alpha, PI).failure_phase) - HALF_PI

    return float(bisect(gap, 0.05, MAX_COUPLING, xtol=tol))
