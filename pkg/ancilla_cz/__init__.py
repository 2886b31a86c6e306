"""
Ancilla-mediated CZ gate synthesis

Simulates building a controlled-Z gate between two register qubits from
repeated passes of an ancilla qubit that couples to each of them with a
fixed, weak interaction exp(-i alpha Z Z). Each measured ancilla applies a
controlled-phase gate whose angle depends on the outcome, so the register
performs a walk on the circle of controlled-phase angles until it reaches pi.

Key Features:
- Kraus-level characterization of a single ancilla pass
- Optimizer for the most probable pass landing on a requested angle
- Unguided, flip-undo and one-step navigation strategies
- Exact hitting-time laws, closed forms and reproducible Monte Carlo
- Alice/Bob packet protocol emulation with instruction tapes
- CLI experiments writing CSV datasets, and an MCP tool server

Usage:
    from ancilla_cz import characterize_step, xbasis_config

    outcome = characterize_step(math.pi / 16, xbasis_config())
"""

from warnings import warn

from .config import Config
from .models import (
    ConfigError,
    ControlMode,
    ExperimentConfig,
    HittingDistribution,
    InstructionTape,
    InvalidArgumentError,
    InvalidPlanError,
    NoSolutionError,
    RunSpec,
    SessionTranscript,
    SimulationError,
    StepConfig,
    StepOutcome,
    StepPlan,
    StrategyKind,
    SummaryStats,
    TargetRule,
    UnsupportedStrategyError,
    WalkState,
)
from .stepmodel import apply_flip, characterize_step, family_config, xbasis_config
from .optimizer import best_step, solve_port0, solve_port1, threshold_alpha
from .strategies import advance, strategy_next
from .montecarlo import run_trials
from .protocol import execute_session, plan_session
from . import qcore, stepmodel, optimizer, strategies, analytics, montecarlo, protocol, utils

try:
    from ._version import __version__
except ModuleNotFoundError:  # pragma: no cover - fallback for missing build artefact
    warn("Version module not found, setting local __version__ to '0.0.0'")
    __version__ = "0.0.0"

__all__ = [
    "Config",
    "ConfigError",
    "ControlMode",
    "ExperimentConfig",
    "HittingDistribution",
    "InstructionTape",
    "InvalidArgumentError",
    "InvalidPlanError",
    "NoSolutionError",
    "RunSpec",
    "SessionTranscript",
    "SimulationError",
    "StepConfig",
    "StepOutcome",
    "StepPlan",
    "StrategyKind",
    "SummaryStats",
    "TargetRule",
    "UnsupportedStrategyError",
    "WalkState",
    "apply_flip",
    "characterize_step",
    "family_config",
    "xbasis_config",
    "best_step",
    "solve_port0",
    "solve_port1",
    "threshold_alpha",
    "advance",
    "strategy_next",
    "run_trials",
    "execute_session",
    "plan_session",
    "qcore",
    "stepmodel",
    "optimizer",
    "strategies",
    "analytics",
    "montecarlo",
    "protocol",
    "utils",
]
