"""
Distributed session emulator.

Alice pre-plans an instruction tape and a packet of ancillae large enough
that the walk finishes with probability at least q. Bob works through the
packet alone, following the tape's stop rules and branch tables, and
reports back once. Leftover ancillae are discarded and counted.
"""

import logging
import math
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from .analytics import exact_hitting_law, flip_undo_quantile, quantile_N
from .constants import ANGLE_ATOL, DEFAULT_EPSILON, PI
from .models import (
    HittingDistribution,
    InstructionTape,
    InvalidArgumentError,
    SessionTranscript,
    StepPlan,
    StrategyKind,
    TapeEntry,
    TargetRule,
    UnsupportedStrategyError,
    WalkState,
)
from .montecarlo import derive_stream, sample_port
from .strategies import advance, policy_for, target_rule_for
from .utils import check_coupling, wrap_angle

logger = logging.getLogger(__name__)

MAX_TAPE_ENTRIES = 100000


def _entry(plan: StepPlan, stop_on_port: Optional[int], branch: Optional[Dict[int, int]]) -> TapeEntry:
    phases = [0.0, 0.0]
    probs = [0.0, 0.0]
    phases[plan.success_port], phases[plan.failure_port] = plan.success_phase, plan.failure_phase
    probs[plan.success_port], probs[plan.failure_port] = plan.success_prob, plan.failure_prob
    return TapeEntry(
        config=plan.config,
        port_phases=(phases[0], phases[1]),
        port_probs=(probs[0], probs[1]),
        stop_on_port=stop_on_port,
        branch=branch,
    )


def _flip_undo_tape(kind: StrategyKind, alpha: float, q: float) -> InstructionTape:
    policy = policy_for(kind, alpha)
    origin, undo = policy.origin_plan, policy.undo_plan
    if abs(wrap_angle(origin.failure_phase - PI)) <= ANGLE_ATOL:
        # both ports of the first pass already land on pi
        entries = [_entry(origin, 1, None)]
        return InstructionTape(strategy=kind.label, alpha=alpha, entries=entries, packet_size=1)
    entries = [
        _entry(origin, 1, {0: 1}),
        _entry(undo, None, {0: 0, 1: 2}),
        _entry(undo, 0, {1: 1}),
    ]
    packet = flip_undo_quantile(origin.success_prob, q)
    return InstructionTape(strategy=kind.label, alpha=alpha, entries=entries, packet_size=packet)


def _unguided_tape(
    kind: StrategyKind, alpha: float, q: float, epsilon: float
) -> InstructionTape:
    plan = policy_for(kind, alpha).next_plan(WalkState())
    law = exact_hitting_law(kind, alpha, epsilon, max_steps=MAX_TAPE_ENTRIES, tail_tol=(1 - q) / 10)
    estimate = quantile_N(law, q)
    if estimate.steps is None:
        raise UnsupportedStrategyError(
            "unguided packet exceeds the tape limit", details={"alpha": alpha, "q": q}
        )
    return InstructionTape(
        strategy=kind.label,
        alpha=alpha,
        entries=[_entry(plan, None, {0: 0, 1: 0})],
        packet_size=estimate.steps,
        region_epsilon=epsilon,
    )


def _one_step_tape(kind: StrategyKind, alpha: float, q: float) -> InstructionTape:
    """Failure chain: entry k is the plan after k failures."""
    if kind.mode is not None and kind.mode.ports == 2 and kind.mode.dof == 2:
        raise UnsupportedStrategyError(
            "two-port two-dof plans cannot be fixed in advance on a finite tape",
            details={"strategy": kind.label},
        )
    policy = policy_for(kind, alpha)
    rule = target_rule_for(kind)
    state = WalkState()
    plans: List[StepPlan] = []
    reached = 0.0
    survival = 1.0
    while reached < q:
        if len(plans) >= MAX_TAPE_ENTRIES:
            raise UnsupportedStrategyError(
                "one-step tape exceeds the entry limit", details={"alpha": alpha, "q": q}
            )
        plan = policy.next_plan(state)
        plans.append(plan)
        reached += survival * plan.success_prob
        survival *= plan.failure_prob
        state = advance(state, plan, plan.failure_port, rule)
        if state.done:
            break
    entries = [
        _entry(plan, plan.success_port, {plan.failure_port: k + 1} if k + 1 < len(plans) else None)
        for k, plan in enumerate(plans)
    ]
    return InstructionTape(
        strategy=kind.label, alpha=alpha, entries=entries, packet_size=len(entries)
    )


def plan_session(
    kind: StrategyKind,
    alpha: float,
    q: float,
    epsilon: float = DEFAULT_EPSILON,
) -> InstructionTape:
    """
    Pre-plan Bob's instructions and the packet size for one gate.

    Args:
        kind: Strategy to encode.
        alpha: Coupling strength.
        q: Probability that the packet suffices.
        epsilon: Target region half-width for unguided tapes.

    Returns:
        InstructionTape with packet_size = smallest N with P(T <= N) >= q.

    Raises:
        UnsupportedStrategyError: If the strategy has no finite tape.
    """
    alpha = check_coupling(alpha)
    if not 0.0 < q < 1.0:
        raise InvalidArgumentError(f"quantile {q} outside (0, 1)")
    if kind.name == "flip_undo":
        tape = _flip_undo_tape(kind, alpha, q)
    elif kind.name == "unguided":
        tape = _unguided_tape(kind, alpha, q, epsilon)
    else:
        tape = _one_step_tape(kind, alpha, q)
    logger.info(
        "Planned %s tape at alpha=%.6f: %d entries, packet of %d",
        kind.label,
        alpha,
        len(tape.entries),
        tape.packet_size,
    )
    return tape


def _walk(
    tape: InstructionTape, ports: Iterable[int]
) -> Tuple[WalkState, bool]:
    """Follow the tape for a given port sequence; returns the state and whether a stop rule fired."""
    rule = TargetRule(epsilon=tape.region_epsilon or 0.0)
    state = WalkState()
    index = tape.start
    for port in ports:
        entry = tape.entries[index]
        state = advance(state, entry.as_plan(), port, rule, record=True)
        if state.done or entry.stop_on_port == port:
            return state, True
        following = (entry.branch or {}).get(port)
        if following is None:
            return state, False
        index = following
    return state, False


def execute_session(
    tape: InstructionTape,
    alpha: float,
    stream: np.random.Generator,
    session_index: int = 0,
    seed: Optional[int] = None,
) -> SessionTranscript:
    """
    Bob's side of one session.

    Ancillae are measured one after another until a stop rule fires or the
    packet runs out; no messages are exchanged before the final report.
    """
    if abs(alpha - tape.alpha) > 1e-12:
        raise InvalidArgumentError(
            "tape was planned for a different coupling",
            details={"alpha": alpha, "tape_alpha": tape.alpha},
        )
    rule = TargetRule(epsilon=tape.region_epsilon or 0.0)
    state = WalkState()
    index = tape.start
    stopped = False
    while state.steps < tape.packet_size:
        entry = tape.entries[index]
        plan = entry.as_plan()
        port = sample_port(plan, stream)
        state = advance(state, plan, port, rule, record=True)
        if state.done or entry.stop_on_port == port:
            stopped = True
            break
        following = (entry.branch or {}).get(port)
        if following is None:
            break
        index = following
    if not stopped:
        logger.debug("Session %d exhausted its packet of %d", session_index, tape.packet_size)
    return SessionTranscript(
        strategy=tape.strategy,
        alpha=tape.alpha,
        session_index=session_index,
        seed=seed,
        packet_size=tape.packet_size,
        outcomes=list(state.outcomes),
        stopped_at=state.steps,
        failed=not stopped,
        final_position=state.position,
    )


def run_sessions(
    tape: InstructionTape, n_sessions: int, master_seed: int
) -> List[SessionTranscript]:
    """Independent sessions; session i draws from derive_stream(master_seed, i)."""
    if n_sessions < 1:
        raise InvalidArgumentError("need at least one session")
    return [
        execute_session(tape, tape.alpha, derive_stream(master_seed, i), i, master_seed)
        for i in range(n_sessions)
    ]


def session_distribution(transcripts: Iterable[SessionTranscript]) -> HittingDistribution:
    """Hitting times of successful sessions; failed sessions count as overflow."""
    samples = []
    failed = 0
    for transcript in transcripts:
        if transcript.failed:
            failed += 1
        else:
            samples.append(transcript.stopped_at)
    return HittingDistribution.from_samples(samples, overflow=failed)


def verify_transcript(transcript: SessionTranscript, epsilon: float = 0.0) -> bool:
    """True iff the session stopped with the accumulated angle within the target region."""
    if transcript.failed:
        return False
    return abs(wrap_angle(transcript.final_position - PI)) <= max(epsilon, ANGLE_ATOL)


def replay_transcript(tape: InstructionTape, transcript: SessionTranscript) -> float:
    """Final position obtained by replaying the recorded ports through the tape."""
    state, _ = _walk(tape, transcript.outcomes)
    return state.position


def transcript_to_text(transcript: SessionTranscript) -> str:
    """Header lines '# key=value' followed by one port bit per line."""
    header = {
        "strategy": transcript.strategy,
        "alpha": repr(transcript.alpha),
        "seed": "" if transcript.seed is None else str(transcript.seed),
        "session": str(transcript.session_index),
        "packet_size": str(transcript.packet_size),
        "stopped_at": str(transcript.stopped_at),
        "failed": str(transcript.failed).lower(),
        "final_position": repr(transcript.final_position),
        "messages_alice_to_bob": str(transcript.messages_alice_to_bob),
        "messages_bob_to_alice": str(transcript.messages_bob_to_alice),
    }
    lines = [f"# {key}={value}" for key, value in header.items()]
    lines.extend(str(bit) for bit in transcript.outcomes)
    return "\n".join(lines) + "\n"


def transcript_from_text(text: str) -> SessionTranscript:
    """Inverse of transcript_to_text."""
    header: Dict[str, str] = {}
    outcomes: List[int] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            header[key.strip()] = value.strip()
        elif line in ("0", "1"):
            outcomes.append(int(line))
        else:
            raise InvalidArgumentError(f"bad transcript line '{line}'")
    try:
        return SessionTranscript(
            strategy=header["strategy"],
            alpha=float(header["alpha"]),
            seed=int(header["seed"]) if header.get("seed") else None,
            session_index=int(header.get("session", "0")),
            packet_size=int(header["packet_size"]),
            outcomes=outcomes,
            stopped_at=int(header["stopped_at"]),
            failed=header["failed"] == "true",
            final_position=float(header["final_position"]),
            messages_alice_to_bob=int(header.get("messages_alice_to_bob", "1")),
            messages_bob_to_alice=int(header.get("messages_bob_to_alice", "1")),
        )
    except KeyError as e:
        raise InvalidArgumentError(f"transcript header misses {e}") from e


def expected_failure_rate(tape: InstructionTape) -> float:
    """Probability that Bob exhausts the packet, computed by walking the tape's branches."""
    rule = TargetRule(epsilon=tape.region_epsilon or 0.0)
    frontier = {(tape.start, 0): (0.0, 1.0)}
    stranded = 0.0
    for _ in range(tape.packet_size):
        following: Dict[Tuple[int, int], Tuple[float, float]] = {}
        for (index, _), (position, mass) in frontier.items():
            entry = tape.entries[index]
            for port in (0, 1):
                prob = entry.port_probs[port]
                if prob <= 0.0:
                    continue
                landed = wrap_angle(position + entry.port_phases[port])
                if rule.reached(landed) or entry.stop_on_port == port:
                    continue
                target = (entry.branch or {}).get(port)
                if target is None:
                    stranded += mass * prob
                    continue
                key = (target, round(landed / 1e-9))
                _, held = following.get(key, (landed, 0.0))
                following[key] = (landed, held + mass * prob)
        frontier = following
    return stranded + float(math.fsum(mass for _, mass in frontier.values()))
