"""
Navigation strategies for the controlled-phase walk.

The register's accumulated angle starts at 0 and the walk ends at pi.
Each strategy turns the current WalkState into the next StepPlan:

- unguided: the X-basis pass every time, stopping inside a region around pi
- flip_undo: the X-basis pass, then flipped passes that undo a failure
- one_step: the most probable pass landing exactly on pi this step
"""

import logging
from functools import lru_cache
from typing import Dict

from .constants import ANGLE_ATOL, PI
from .models import (
    InvalidArgumentError,
    InvalidPlanError,
    StepPlan,
    StrategyKind,
    TargetRule,
    WalkState,
)
from .optimizer import best_step
from .stepmodel import apply_flip, characterize_step, xbasis_closed_form, xbasis_config
from .utils import check_coupling, wrap_angle

logger = logging.getLogger(__name__)

# Remaining angles are cached on this grid
_CACHE_QUANTUM = 1e-12


def remaining_to_target(state: WalkState) -> float:
    """Angle still to apply, wrap(pi - position)."""
    if state.done:
        raise InvalidArgumentError("walk already reached the target")
    return wrap_angle(PI - state.position)


def target_rule_for(kind: StrategyKind, epsilon: float = 0.0) -> TargetRule:
    """Guided strategies only stop exactly on pi; epsilon applies to unguided walks."""
    return TargetRule(epsilon=0.0 if kind.guided else epsilon)


def advance(
    state: WalkState,
    plan: StepPlan,
    port: int,
    rule: TargetRule,
    record: bool = False,
) -> WalkState:
    """
    Apply the angle of the port that fired.

    Args:
        state: Current state; must not be done.
        plan: The step that was performed.
        port: 0 or 1.
        rule: Stopping region.
        record: Append the port to the state's history.

    Returns:
        New WalkState with steps incremented.
    """
    if state.done:
        raise InvalidArgumentError("cannot advance a finished walk")
    if port not in (0, 1):
        raise InvalidArgumentError(f"port must be 0 or 1, got {port}")
    position = wrap_angle(state.position + plan.phase_for(port))
    return state.model_copy(
        update={
            "position": position,
            "steps": state.steps + 1,
            "done": rule.reached(position),
            "outcomes": state.outcomes + (port,) if record else state.outcomes,
        }
    )


def xbasis_plan(alpha: float) -> StepPlan:
    """X-basis pass: pi on port 1, a small negative angle on port 0."""
    config = xbasis_config()
    outcome = characterize_step(alpha, config)
    closed = xbasis_closed_form(alpha)
    phi0, p1 = closed.phi_port0, closed.p_port1
    if abs(wrap_angle(outcome.phase(0) - phi0)) > ANGLE_ATOL:
        raise InvalidPlanError("X-basis pass disagrees with its closed form")
    return StepPlan(
        config=config, success_port=1, success_phase=PI, success_prob=p1, failure_phase=phi0
    )


class StrategyPolicy:
    """Base policy: maps a walk state to the next plan."""

    def __init__(self, kind: StrategyKind, alpha: float):
        self.kind = kind
        self.alpha = check_coupling(alpha)

    def next_plan(self, state: WalkState) -> StepPlan:
        raise NotImplementedError


class UnguidedPolicy(StrategyPolicy):
    """Same X-basis pass at every step."""

    def __init__(self, kind: StrategyKind, alpha: float):
        super().__init__(kind, alpha)
        self.plan = xbasis_plan(self.alpha)

    def next_plan(self, state: WalkState) -> StepPlan:
        return self.plan


class FlipUndoPolicy(StrategyPolicy):
    """
    X-basis pass at the origin, flipped X-basis pass anywhere else.

    From the failure angle gamma the flipped pass either undoes it (back to
    0) or moves to gamma - pi, from where its port 0 completes to pi.
    """

    def __init__(self, kind: StrategyKind, alpha: float):
        super().__init__(kind, alpha)
        self.origin_plan = xbasis_plan(self.alpha)
        gamma = self.origin_plan.failure_phase
        flipped = apply_flip(self.origin_plan.config)
        outcome = characterize_step(self.alpha, flipped)
        if abs(wrap_angle(outcome.phase(0) + gamma)) > ANGLE_ATOL:
            raise InvalidPlanError("flipped pass does not undo the failure angle")
        self.undo_plan = StepPlan(
            config=flipped,
            success_port=1,
            success_phase=PI,
            success_prob=self.origin_plan.success_prob,
            failure_phase=-gamma,
        )
        self.gamma = gamma
        self.positions = (0.0, gamma, wrap_angle(gamma - PI))

    def next_plan(self, state: WalkState) -> StepPlan:
        if abs(state.position) <= ANGLE_ATOL:
            return self.origin_plan
        if any(abs(wrap_angle(state.position - node)) <= ANGLE_ATOL for node in self.positions):
            return self.undo_plan
        raise InvalidPlanError(
            "flip-undo walk left its three positions", details={"position": state.position}
        )


class OneStepPolicy(StrategyPolicy):
    """Most probable exact landing at every step; plans cached by remaining angle."""

    def __init__(self, kind: StrategyKind, alpha: float):
        super().__init__(kind, alpha)
        if kind.mode is None:
            raise InvalidArgumentError("one-step policy needs a control mode")
        self.mode = kind.mode
        self._cache: Dict[int, StepPlan] = {}

    def next_plan(self, state: WalkState) -> StepPlan:
        remaining = remaining_to_target(state)
        key = round(remaining / _CACHE_QUANTUM)
        plan = self._cache.get(key)
        if plan is None:
            plan = best_step(self.alpha, remaining, self.mode)
            self._cache[key] = plan
        return plan

    @property
    def cached_plans(self) -> int:
        return len(self._cache)


_POLICIES = {
    "unguided": UnguidedPolicy,
    "flip_undo": FlipUndoPolicy,
    "one_step": OneStepPolicy,
}


@lru_cache(maxsize=128)
def policy_for(kind: StrategyKind, alpha: float) -> StrategyPolicy:
    """Shared policy instance per (strategy, coupling)."""
    logger.debug("Building %s policy at alpha=%.6f", kind.label, alpha)
    return _POLICIES[kind.name](kind, alpha)


def strategy_next(kind: StrategyKind, alpha: float, state: WalkState) -> StepPlan:
    """Next plan for `state` under `kind`."""
    if state.done:
        raise InvalidArgumentError("walk already reached the target")
    return policy_for(kind, alpha).next_plan(state)
