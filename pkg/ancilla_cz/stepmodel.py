"""
Step model: which ancilla passes apply a controlled-phase gate, and which one.

A pass is valid when both measurement outcomes leave the register with a
controlled-phase gate up to local Z rotations. Valid passes are described
by two ports: port 1 applies the larger angle in magnitude, port 0 the
smaller one.
"""

import logging
import math
from typing import Tuple

import numpy as np
from scipy.spatial.transform import Rotation

from .constants import ANGLE_ATOL, PI, REGISTER_BASIS
from .models import StepConfig, StepOutcome
from .qcore import (
    bloch_vector,
    conditional_ancilla_states,
    controlled_phase_angle,
    proportional_unitary_check,
    step_kraus,
)
from .utils import check_coupling, wrap_angle, wrap_angles

logger = logging.getLogger(__name__)

_X_AXIS = np.array([1.0, 0.0, 0.0])
_Y_AXIS = np.array([0.0, 1.0, 0.0])

# Ports with less probability than this never fire; their angle is reported as 0
_ZERO_PROB = 1e-15


def characterize_step(alpha: float, config: StepConfig) -> StepOutcome:
    """
    Characterize one ancilla pass.

    Args:
        alpha: Coupling strength in (0, pi/4].
        config: The pass to characterize.

    Returns:
        StepOutcome with valid=False when either outcome is not proportional
        to a unitary; otherwise both port angles and probabilities.
    """
    k_plus, k_minus = step_kraus(alpha, config)
    plus_ok, p_plus = proportional_unitary_check(k_plus)
    minus_ok, p_minus = proportional_unitary_check(k_minus)
    if not (plus_ok and minus_ok) or p_plus is None or p_minus is None:
        logger.debug("Step is not a controlled-phase gate: %s", config)
        return StepOutcome(valid=False)

    phi_plus = controlled_phase_angle(k_plus) if p_plus > _ZERO_PROB else 0.0
    phi_minus = controlled_phase_angle(k_minus) if p_minus > _ZERO_PROB else 0.0
    if abs(phi_minus) >= abs(phi_plus) - ANGLE_ATOL:
        return StepOutcome(
            valid=True,
            phi_port0=phi_plus,
            phi_port1=phi_minus,
            p_port0=min(p_plus, 1.0),
            p_port1=min(p_minus, 1.0),
            port1_outcome=1,
        )
    return StepOutcome(
        valid=True,
        phi_port0=phi_minus,
        phi_port1=phi_plus,
        p_port0=min(p_minus, 1.0),
        p_port1=min(p_plus, 1.0),
        port1_outcome=0,
    )


def xbasis_config() -> StepConfig:
    """Ancilla in |+>, R_x(pi/2) between the interactions, X-basis measurement."""
    return StepConfig(
        prep_polar=PI / 2,
        prep_azimuth=0.0,
        mid_axis=(1.0, 0.0, 0.0),
        mid_angle=PI / 2,
        flip=False,
        meas_polar=PI / 2,
        meas_azimuth=0.0,
    )


def xbasis_closed_form(alpha: float) -> StepOutcome:
    """
    Analytic port data of the X-basis pass.

    Returns:
        StepOutcome with phi_port1 = pi, p_port1 = sin^2(2 alpha)/2 and
        phi_port0 = -4 atan(tan^2 alpha).
    """
    alpha = check_coupling(alpha)
    p1 = math.sin(2 * alpha) ** 2 / 2
    return StepOutcome(
        valid=True,
        phi_port0=wrap_angle(-4.0 * math.atan(math.tan(alpha) ** 2)),
        phi_port1=PI,
        p_port0=1.0 - p1,
        p_port1=p1,
        port1_outcome=1,
    )


def apply_flip(config: StepConfig) -> StepConfig:
    """
    Toggle the bit flip and mirror the measurement axis through the x-y plane.

    Both port angles change sign; port probabilities are unchanged.
    """
    return config.model_copy(
        update={
            "flip": not config.flip,
            "meas_polar": min(max(PI - config.meas_polar, 0.0), PI),
            "meas_azimuth": wrap_angle(-config.meas_azimuth) if config.meas_azimuth else 0.0,
        }
    )


def bloch_points(alpha: float, config: StepConfig) -> np.ndarray:
    """Bloch vectors of the four conditional ancilla states, shape (4, 3)."""
    states = conditional_ancilla_states(alpha, config)
    return np.array([bloch_vector(state) for state in states])


def measurement_axis(config: StepConfig) -> np.ndarray:
    """Unit Bloch vector of the '+' measurement outcome."""
    theta, phi = config.meas_polar, config.meas_azimuth
    return np.array(
        [math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)]
    )


def circle_condition(alpha: float, config: StepConfig, tol: float = 1e-9) -> bool:
    """True when the four Bloch points lie on one circle normal to the measurement axis."""
    projections = bloch_points(alpha, config) @ measurement_axis(config)
    return float(np.ptp(projections)) <= tol


def effective_angles(alpha: float, prep_polar: float, meas_polar: float) -> Tuple[float, float]:
    """
    Effective couplings (x, y) of the two-parameter family.

    sin 2x = sin(prep_polar) sin 2 alpha and sin 2y = sin(meas_polar) sin 2 alpha.
    """
    alpha = check_coupling(alpha)
    scale = math.sin(2 * alpha)
    x = 0.5 * math.asin(min(math.sin(prep_polar) * scale, 1.0))
    y = 0.5 * math.asin(min(math.sin(meas_polar) * scale, 1.0))
    return x, y


def _unit_rows(vectors: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(vectors, axis=-1, keepdims=True)
    safe = np.where(norms < 1e-12, 1.0, norms)
    return np.where(norms < 1e-12, _X_AXIS, vectors / safe)


def _family_rotations(
    alpha: float, prep_polars: np.ndarray, meas_polars: np.ndarray
) -> Rotation:
    """Mid rotations taking the prepared circle onto the measured one."""
    squeeze = math.cos(2 * alpha)
    zeros = np.zeros_like(prep_polars)
    source = _unit_rows(
        np.stack([np.sin(prep_polars) * squeeze, zeros, np.cos(prep_polars)], axis=-1)
    )
    target = _unit_rows(
        np.stack([np.sin(meas_polars) * squeeze, zeros, np.cos(meas_polars)], axis=-1)
    )
    target_side = np.stack([-target[:, 2], zeros, target[:, 0]], axis=-1)
    y_axis = np.broadcast_to(_Y_AXIS, source.shape)
    source_frame = np.stack([source, y_axis, np.cross(source, y_axis)], axis=-1)
    target_frame = np.stack(
        [target, target_side, np.cross(target, target_side)], axis=-1
    )
    matrices = target_frame @ np.transpose(source_frame, (0, 2, 1))
    return Rotation.from_matrix(matrices)


def family_config(
    alpha: float, prep_polar: float, meas_polar: float, flip: bool = False
) -> StepConfig:
    """
    Valid pass with preparation polar angle `prep_polar` and measurement polar angle
    `meas_polar`, both at azimuth 0.

    The mid rotation maps the circle traced by the prepared ancilla onto a
    circle normal to the measurement axis, so every member is valid.
    """
    alpha = check_coupling(alpha)
    rotation = _family_rotations(alpha, np.array([prep_polar]), np.array([meas_polar]))
    rotvec = rotation.as_rotvec()[0]
    angle = float(np.linalg.norm(rotvec))
    axis = tuple(float(c) for c in rotvec / angle) if angle > 1e-15 else (1.0, 0.0, 0.0)
    config = StepConfig(
        prep_polar=float(prep_polar),
        prep_azimuth=0.0,
        mid_axis=axis,
        mid_angle=angle,
        flip=False,
        meas_polar=float(meas_polar),
        meas_azimuth=0.0,
    )
    return apply_flip(config) if flip else config


def family_outcomes(
    alpha: float, prep_polars, meas_polars
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    Vectorized characterization of family members.

    Args:
        alpha: Coupling strength.
        prep_polars: Preparation polar angles (broadcast with meas_polars).
        meas_polars: Measurement polar angles.

    Returns:
        Arrays (phi_port0, phi_port1, p_port0, p_port1).
    """
    alpha = check_coupling(alpha)
    prep, meas = np.broadcast_arrays(
        np.atleast_1d(np.asarray(prep_polars, dtype=float)),
        np.atleast_1d(np.asarray(meas_polars, dtype=float)),
    )
    quats = _family_rotations(alpha, prep, meas).as_quat()
    qx, qy, qz, qw = (quats[:, k] for k in range(4))
    unitaries = np.empty((len(prep), 2, 2), dtype=complex)
    unitaries[:, 0, 0] = qw - 1j * qz
    unitaries[:, 0, 1] = -1j * qx - qy
    unitaries[:, 1, 0] = -1j * qx + qy
    unitaries[:, 1, 1] = qw + 1j * qz

    prepared = np.stack([np.cos(prep / 2), np.sin(prep / 2)], axis=-1).astype(complex)
    plus = np.stack([np.cos(meas / 2), np.sin(meas / 2)], axis=-1)
    minus = np.stack([-np.sin(meas / 2), np.cos(meas / 2)], axis=-1)
    k_plus = np.empty((len(prep), 4), dtype=complex)
    k_minus = np.empty((len(prep), 4), dtype=complex)
    for index, (first, second) in enumerate(REGISTER_BASIS):
        state = prepared * _phase_pair(alpha, first)
        state = np.einsum("nab,nb->na", unitaries, state)
        state = state * _phase_pair(alpha, second)
        k_plus[:, index] = np.sum(plus * state, axis=1)
        k_minus[:, index] = np.sum(minus * state, axis=1)

    phi_plus, p_plus = _phase_and_probability(k_plus)
    phi_minus, p_minus = _phase_and_probability(k_minus)
    minus_is_port1 = np.abs(phi_minus) >= np.abs(phi_plus) - ANGLE_ATOL
    return (
        np.where(minus_is_port1, phi_plus, phi_minus),
        np.where(minus_is_port1, phi_minus, phi_plus),
        np.where(minus_is_port1, p_plus, p_minus),
        np.where(minus_is_port1, p_minus, p_plus),
    )


def _phase_pair(alpha: float, bit: int) -> np.ndarray:
    sign = 1 - 2 * bit
    return np.exp(-1j * alpha * sign * np.array([1.0, -1.0]))


def _phase_and_probability(kraus: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    product = kraus[:, 0] * kraus[:, 3] * np.conj(kraus[:, 1]) * np.conj(kraus[:, 2])
    probability = np.minimum(np.mean(np.abs(kraus) ** 2, axis=1), 1.0)
    phase = np.where(probability > _ZERO_PROB, wrap_angles(np.angle(product)), 0.0)
    return phase, probability

