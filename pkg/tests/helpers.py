"""
Helpers shared by the test modules.
"""

import math

import numpy as np

from ancilla_cz.models import StepConfig


def random_step_config(rng: np.random.Generator) -> StepConfig:
    """A generic pass drawn uniformly over all its angles."""
    axis = rng.normal(size=3)
    axis = axis / np.linalg.norm(axis)
    return StepConfig(
        prep_polar=float(rng.uniform(0, math.pi)),
        prep_azimuth=float(rng.uniform(-math.pi, math.pi)),
        mid_axis=tuple(float(c) for c in axis),
        mid_angle=float(rng.uniform(0, 2 * math.pi)),
        flip=bool(rng.integers(2)),
        meas_polar=float(rng.uniform(0, math.pi)),
        meas_azimuth=float(rng.uniform(-math.pi, math.pi)),
    )
