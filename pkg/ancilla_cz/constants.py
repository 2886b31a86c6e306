"""
Constants shared across the ancilla_cz package.
"""

import math

PI = math.pi
TWO_PI = 2.0 * math.pi

# Strongest coupling; the interaction is then locally equivalent to CZ
MAX_COUPLING = math.pi / 4

# Landing tolerance for guided strategies and phase reproduction
ANGLE_ATOL = 1e-9

UNITARY_ATOL = 1e-12

# Target region half-width used for the unguided reference runs
DEFAULT_EPSILON = math.pi / 100

DEFAULT_QUANTILE = 0.999

DEFAULT_QUANTILES = (0.5, 0.9, 0.99, 0.999)

# Register basis ordering |00>, |01>, |10>, |11>; the first bit is the
# register qubit the ancilla meets first.
REGISTER_BASIS = ((0, 0), (0, 1), (1, 0), (1, 1))

STRATEGY_LABELS = (
    "unguided",
    "flip-undo",
    "one-step-1p1d",
    "one-step-1p2d",
    "one-step-2p1d",
    "one-step-2p2d",
)

EXPERIMENTS = (
    "characterize",
    "threshold",
    "fig4-histogram",
    "fig6-expectation",
    "fig7-ancilla-count",
    "fig8-port-modes",
    "fig9-maxsteps",
    "protocol",
)

# Default strategy sets per experiment
EXPERIMENT_STRATEGIES = {
    "fig4-histogram": ("unguided",),
    "fig6-expectation": ("unguided", "one-step-1p1d", "flip-undo"),
    "fig7-ancilla-count": ("unguided", "one-step-1p1d", "flip-undo"),
    "fig8-port-modes": ("one-step-1p1d", "one-step-2p1d", "one-step-2p2d"),
    "protocol": ("flip-undo",),
}

# CSV column layouts
CHARACTERIZE_COLUMNS = ("alpha", "phi0", "phi1", "p0", "p1", "valid")
HISTOGRAM_COLUMNS = ("hitting_time", "count")
EXPECTATION_COLUMNS = ("alpha", "strategy", "mean", "std", "n999")
THRESHOLD_COLUMNS = ("alpha_star", "ratio_to_max")
MAXSTEPS_COLUMNS = ("alpha", "p2", "max_steps")
PROTOCOL_COLUMNS = ("session", "stopped_at", "failed", "unused", "final_position")

# CLI exit codes
EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_RUNTIME_FAILURE = 3
