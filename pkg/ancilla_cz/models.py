"""
Pydantic data models for ancilla-mediated controlled-phase synthesis.
"""

import math
from collections import Counter
from typing import Any, Dict, Iterable, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .constants import ANGLE_ATOL, EXPERIMENTS, PI, STRATEGY_LABELS


class StepConfig(BaseModel):
    """One ancilla pass: preparation, mid rotation, optional flip, measurement axis."""

    model_config = ConfigDict(frozen=True)

    prep_polar: float = Field(..., ge=0.0, le=PI, description="Preparation polar angle")
    prep_azimuth: float = Field(0.0, description="Preparation azimuth")
    mid_axis: Tuple[float, float, float] = Field(
        (1.0, 0.0, 0.0), description="Unit axis of the mid rotation"
    )
    mid_angle: float = Field(PI / 2, description="Mid rotation angle")
    flip: bool = Field(False, description="Insert a bit flip after the mid rotation")
    meas_polar: float = Field(..., ge=0.0, le=PI, description="Measurement polar angle")
    meas_azimuth: float = Field(0.0, description="Measurement azimuth")

    @field_validator("prep_azimuth", "mid_angle", "meas_azimuth")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("angles must be finite")
        return value

    @field_validator("mid_axis")
    @classmethod
    def _unit_axis(cls, axis: Tuple[float, float, float]) -> Tuple[float, float, float]:
        norm = math.sqrt(sum(c * c for c in axis))
        if not math.isfinite(norm) or abs(norm - 1.0) > 1e-9:
            raise ValueError(f"mid_axis must be a unit vector, got norm {norm}")
        return axis

    @property
    def mid_rotation(self) -> Tuple[Tuple[float, float, float], float]:
        return self.mid_axis, self.mid_angle


class StepOutcome(BaseModel):
    """Characterization of a step: per-port controlled-phase angle and probability."""

    valid: bool = Field(..., description="Both outcomes are proportional to unitaries")
    phi_port0: Optional[float] = Field(None, description="Angle applied on port 0")
    phi_port1: Optional[float] = Field(None, description="Angle applied on port 1")
    p_port0: Optional[float] = Field(None, ge=0.0, le=1.0)
    p_port1: Optional[float] = Field(None, ge=0.0, le=1.0)
    port1_outcome: Optional[int] = Field(
        None, description="Raw measurement outcome (0 '+', 1 '-') labelled port 1"
    )

    def phase(self, port: int) -> float:
        value = self.phi_port1 if port == 1 else self.phi_port0
        if value is None:
            raise InvalidPlanError("outcome is not a valid controlled-phase step")
        return value

    def probability(self, port: int) -> float:
        value = self.p_port1 if port == 1 else self.p_port0
        if value is None:
            raise InvalidPlanError("outcome is not a valid controlled-phase step")
        return value


class StepPlan(BaseModel):
    """A chosen step together with what each port does to the walk."""

    model_config = ConfigDict(frozen=True)

    config: StepConfig
    success_port: Literal[0, 1]
    success_phase: float = Field(..., description="Angle applied when success_port fires")
    success_prob: float = Field(..., ge=0.0, le=1.0)
    failure_phase: float = Field(..., description="Angle applied on the other port")

    @property
    def failure_port(self) -> int:
        return 1 - self.success_port

    @property
    def failure_prob(self) -> float:
        return 1.0 - self.success_prob

    def phase_for(self, port: int) -> float:
        return self.success_phase if port == self.success_port else self.failure_phase


class ControlMode(BaseModel):
    """Which ports may be targeted and how many preparation/measurement angles are free."""

    model_config = ConfigDict(frozen=True)

    ports: Literal[1, 2] = 1
    dof: Literal[1, 2] = 1


class WalkState(BaseModel):
    """Accumulated controlled-phase angle of the register and the steps taken."""

    model_config = ConfigDict(frozen=True)

    position: float = Field(0.0, description="Accumulated angle in (-pi, pi]")
    steps: int = Field(0, ge=0)
    done: bool = False
    outcomes: Tuple[int, ...] = Field((), description="Recorded port history")


class TargetRule(BaseModel):
    """Stopping region |wrap(position - pi)| <= epsilon."""

    model_config = ConfigDict(frozen=True)

    epsilon: float = Field(0.0, ge=0.0, lt=PI)

    def reached(self, position: float) -> bool:
        from .utils import wrap_angle

        return abs(wrap_angle(position - PI)) <= max(self.epsilon, ANGLE_ATOL)


class StrategyKind(BaseModel):
    """A navigation strategy; one-step strategies carry a control mode."""

    model_config = ConfigDict(frozen=True)

    name: Literal["unguided", "one_step", "flip_undo"]
    mode: Optional[ControlMode] = None

    @model_validator(mode="after")
    def _mode_matches(self) -> "StrategyKind":
        if self.name == "one_step" and self.mode is None:
            raise ValueError("one_step strategies need a control mode")
        if self.name != "one_step" and self.mode is not None:
            raise ValueError(f"{self.name} takes no control mode")
        return self

    @classmethod
    def unguided(cls) -> "StrategyKind":
        return cls(name="unguided")

    @classmethod
    def flip_undo(cls) -> "StrategyKind":
        return cls(name="flip_undo")

    @classmethod
    def one_step(cls, ports: int = 1, dof: int = 1) -> "StrategyKind":
        return cls(name="one_step", mode=ControlMode(ports=ports, dof=dof))

    @property
    def label(self) -> str:
        if self.mode is not None:
            return f"one-step-{self.mode.ports}p{self.mode.dof}d"
        return self.name.replace("_", "-")

    @property
    def guided(self) -> bool:
        return self.name != "unguided"

    @classmethod
    def from_label(cls, label: str) -> "StrategyKind":
        """Parse labels such as 'unguided', 'flip-undo' or 'one-step-2p1d'."""
        text = label.strip().lower().replace("_", "-")
        if text not in STRATEGY_LABELS:
            raise InvalidArgumentError(
                f"unknown strategy '{label}'",
                details={"known": list(STRATEGY_LABELS)},
            )
        if text.startswith("one-step-"):
            return cls.one_step(ports=int(text[9]), dof=int(text[11]))
        return cls(name=text.replace("-", "_"))


class HittingDistribution(BaseModel):
    """Histogram of hitting times over a batch of trials."""

    counts: Dict[int, int] = Field(default_factory=dict, description="steps -> trials")
    total: int = Field(0, ge=0, description="Trials that reached the target")
    overflow: int = Field(0, ge=0, description="Trials cut off at max_steps")

    @model_validator(mode="after")
    def _consistent(self) -> "HittingDistribution":
        if sum(self.counts.values()) != self.total:
            raise ValueError("histogram counts must sum to total")
        if any(steps < 1 or count < 0 for steps, count in self.counts.items()):
            raise ValueError("hitting times are positive and counts non-negative")
        return self

    @classmethod
    def empty(cls) -> "HittingDistribution":
        return cls()

    @classmethod
    def from_samples(
        cls, samples: Iterable[int], overflow: int = 0
    ) -> "HittingDistribution":
        counts = Counter(int(s) for s in samples)
        return cls(counts=dict(counts), total=sum(counts.values()), overflow=overflow)

    @property
    def n_trials(self) -> int:
        return self.total + self.overflow

    def merge(self, other: "HittingDistribution") -> "HittingDistribution":
        counts = Counter(self.counts)
        counts.update(other.counts)
        return HittingDistribution(
            counts=dict(sorted(counts.items())),
            total=self.total + other.total,
            overflow=self.overflow + other.overflow,
        )

    def cdf(self, steps: int) -> float:
        """Fraction of all trials (overflow included) that hit within `steps`."""
        if self.n_trials == 0:
            return 0.0
        hit = sum(c for n, c in self.counts.items() if n <= steps)
        return hit / self.n_trials

    def mean(self) -> float:
        if self.total == 0:
            return math.nan
        return sum(n * c for n, c in self.counts.items()) / self.total

    def std(self) -> float:
        """Population standard deviation of the finished trials."""
        mean = self.mean()
        if math.isnan(mean):
            return math.nan
        second = sum(n * n * c for n, c in self.counts.items()) / self.total
        return math.sqrt(max(second - mean * mean, 0.0))


class ExactHittingLaw(BaseModel):
    """Hitting-time law obtained by propagating probability mass step by step."""

    pmf: List[float] = Field(..., description="pmf[k] = P(hit at step k + 1)")
    residual: float = Field(0.0, ge=0.0, description="Mass not absorbed when truncated")

    def cdf(self, steps: int) -> float:
        return float(sum(self.pmf[: max(steps, 0)]))

    def mean(self) -> float:
        return float(sum((k + 1) * p for k, p in enumerate(self.pmf)))

    def std(self) -> float:
        mean = self.mean()
        second = sum((k + 1) ** 2 * p for k, p in enumerate(self.pmf))
        return math.sqrt(max(second - mean * mean, 0.0))


class QuantileEstimate(BaseModel):
    """Smallest step count N with P(T <= N) >= q."""

    q: float = Field(..., gt=0.0, lt=1.0)
    steps: Optional[int] = Field(None, description="None when the quantile was not reached")
    certified: bool = Field(False, description="Enough mass or samples back the estimate")


class SummaryStats(BaseModel):
    """Mean, standard deviation and quantiles of a hitting distribution."""

    mean: float
    std: float
    quantiles: List[Tuple[float, Optional[int]]] = Field(
        default_factory=list, description="(q, smallest N with P(T <= N) >= q)"
    )
    n_trials: int = 0
    overflow: int = 0


class RunSpec(BaseModel):
    """Everything needed to reproduce a batch of walks."""

    model_config = ConfigDict(frozen=True)

    kind: StrategyKind
    alpha: float = Field(..., gt=0.0, le=PI / 4 + 1e-12)
    epsilon: float = Field(0.0, ge=0.0, lt=PI)
    n_trials: int = Field(..., ge=1)
    master_seed: int = Field(..., ge=0)
    max_steps: int = Field(1000000, ge=1)


class TapeEntry(BaseModel):
    """One instruction: the step to perform and what Bob does with each port."""

    model_config = ConfigDict(frozen=True)

    config: StepConfig
    port_phases: Tuple[float, float] = Field(..., description="Angle applied per port")
    port_probs: Tuple[float, float] = Field(..., description="Probability per port")
    stop_on_port: Optional[Literal[0, 1]] = None
    branch: Optional[Dict[int, int]] = Field(
        None, description="port -> next entry index"
    )

    def as_plan(self) -> StepPlan:
        success = self.stop_on_port if self.stop_on_port is not None else 1
        return StepPlan(
            config=self.config,
            success_port=success,
            success_phase=self.port_phases[success],
            success_prob=self.port_probs[success],
            failure_phase=self.port_phases[1 - success],
        )


class InstructionTape(BaseModel):
    """Pre-planned instructions Alice sends to Bob with a packet of ancillae."""

    strategy: str
    alpha: float
    entries: List[TapeEntry] = Field(..., min_length=1)
    packet_size: int = Field(..., ge=1)
    start: int = 0
    region_epsilon: Optional[float] = Field(
        None, description="Stop once the tracked angle is this close to pi"
    )

    @model_validator(mode="after")
    def _branches_in_range(self) -> "InstructionTape":
        size = len(self.entries)
        if not 0 <= self.start < size:
            raise ValueError("start entry out of range")
        for entry in self.entries:
            for target in (entry.branch or {}).values():
                if not 0 <= target < size:
                    raise ValueError(f"branch target {target} out of range")
        return self


class SessionTranscript(BaseModel):
    """What happened to one packet on Bob's side."""

    strategy: str
    alpha: float
    session_index: int = 0
    seed: Optional[int] = None
    packet_size: int
    outcomes: List[int] = Field(default_factory=list)
    stopped_at: int = Field(..., ge=0)
    failed: bool
    final_position: float
    messages_alice_to_bob: int = 1
    messages_bob_to_alice: int = 1

    @property
    def unused_ancillae(self) -> int:
        return self.packet_size - self.stopped_at


class ExperimentConfig(BaseModel):
    """A named experiment and its parameters, from CLI flags or a manifest."""

    experiment: str
    alpha_grid: List[float] = Field(default_factory=list)
    epsilon: float = Field(PI / 100, ge=0.0, lt=PI)
    n_trials: int = Field(10000, ge=1)
    seed: int = Field(20240611, ge=0)
    quantile: float = Field(0.999, gt=0.0, lt=1.0)
    output_dir: str = "results"
    strategies: List[str] = Field(default_factory=list)
    workers: int = Field(1, ge=1)
    max_steps: int = Field(1000000, ge=1)
    sessions: int = Field(1000, ge=1)

    @field_validator("experiment")
    @classmethod
    def _known_experiment(cls, name: str) -> str:
        if name not in EXPERIMENTS:
            raise ValueError(f"unknown experiment '{name}'; choose from {EXPERIMENTS}")
        return name

    @field_validator("alpha_grid")
    @classmethod
    def _couplings_in_range(cls, grid: List[float]) -> List[float]:
        for alpha in grid:
            if not 0.0 < alpha <= PI / 4 + 1e-12:
                raise ValueError(f"coupling {alpha} outside (0, pi/4]")
        return grid

    @field_validator("strategies")
    @classmethod
    def _known_strategies(cls, names: List[str]) -> List[str]:
        for name in names:
            StrategyKind.from_label(name)
        return names


class ExperimentSummary(BaseModel):
    """JSON sidecar written next to every experiment's CSV output."""

    experiment: str
    settings: ExperimentConfig
    statistics: Dict[str, Any] = Field(default_factory=dict)
    outputs: List[str] = Field(default_factory=list)
    wall_clock_seconds: float = 0.0


class SimulationError(Exception):
    """Base error with a short code, a message and optional details."""

    code = "simulation_error"

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        self.error = self.code
        self.message = message
        self.details = details
        super().__init__(f"{self.error}: {message}")

    def __str__(self):
        return f"{self.error}: {self.message}"


class InvalidArgumentError(SimulationError, ValueError):
    """An argument lies outside its documented domain."""

    code = "invalid_argument"


class NoSolutionError(SimulationError):
    """A required optimizer target cannot be reached."""

    code = "no_solution"


class InvalidPlanError(SimulationError):
    """A produced plan does not reproduce its advertised angles."""

    code = "invalid_plan"


class UnsupportedStrategyError(SimulationError):
    """The strategy cannot be pre-planned as an instruction tape."""

    code = "unsupported_strategy"


class ConfigError(SimulationError):
    """An experiment manifest or command line is inconsistent."""

    code = "config_error"
