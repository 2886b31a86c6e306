"""
Single-ancilla quantum core.

Gates, ancilla states and the diagonal Kraus operators of one ancilla pass
over two register qubits. The register basis is ordered |00>, |01>, |10>,
|11> with the first bit the qubit the ancilla meets first. The interaction
exp(-i alpha Z_anc Z_reg) acts on the ancilla as diag(e^{-i alpha s},
e^{i alpha s}) with s = (-1)^bit.
"""

import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from .config import Config
from .constants import REGISTER_BASIS, UNITARY_ATOL
from .models import InvalidArgumentError, StepConfig
from .utils import check_coupling, wrap_angle

logger = logging.getLogger(__name__)

IDENTITY = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

for _matrix in (IDENTITY, PAULI_X, PAULI_Y, PAULI_Z):
    _matrix.setflags(write=False)


def _read_only(matrix: np.ndarray) -> np.ndarray:
    matrix.setflags(write=False)
    return matrix


def rotation_gate(axis: Sequence[float], angle: float) -> np.ndarray:
    """
    Single-qubit rotation exp(-i angle/2 axis.sigma).

    Args:
        axis: Unit 3-vector.
        angle: Rotation angle in radians.

    Returns:
        Read-only 2x2 unitary.
    """
    vector = np.asarray(axis, dtype=float)
    if vector.shape != (3,) or not np.all(np.isfinite(vector)) or not np.isfinite(angle):
        raise InvalidArgumentError("rotation needs a finite 3-vector axis and angle")
    norm = float(np.linalg.norm(vector))
    if abs(norm - 1.0) > 1e-9:
        raise InvalidArgumentError(
            "rotation axis must be a unit vector", details={"norm": norm}
        )
    vector = vector / norm
    generator = vector[0] * PAULI_X + vector[1] * PAULI_Y + vector[2] * PAULI_Z
    gate = np.cos(angle / 2) * IDENTITY - 1j * np.sin(angle / 2) * generator
    return _read_only(gate)


def interaction_gate(alpha: float) -> np.ndarray:
    """Two-qubit diag(e^{-i alpha}, e^{i alpha}, e^{i alpha}, e^{-i alpha}) = exp(-i alpha ZZ)."""
    alpha = check_coupling(alpha)
    phases = np.exp(-1j * alpha * np.array([1, -1, -1, 1]))
    return _read_only(np.diag(phases))


def ancilla_phase(alpha: float, bit: int) -> np.ndarray:
    """Interaction as seen by the ancilla when the register qubit holds `bit`."""
    sign = 1 - 2 * bit
    return _read_only(np.diag(np.exp(-1j * alpha * sign * np.array([1, -1]))))


def bloch_state(polar: float, azimuth: float) -> np.ndarray:
    """Ket cos(polar/2)|0> + e^{i azimuth} sin(polar/2)|1>."""
    return np.array(
        [np.cos(polar / 2), np.exp(1j * azimuth) * np.sin(polar / 2)], dtype=complex
    )


def orthogonal_state(polar: float, azimuth: float) -> np.ndarray:
    """Ket orthogonal to bloch_state(polar, azimuth)."""
    return np.array(
        [-np.exp(-1j * azimuth) * np.sin(polar / 2), np.cos(polar / 2)], dtype=complex
    )


def bloch_vector(state: np.ndarray) -> np.ndarray:
    """Bloch vector of a normalized single-qubit ket."""
    a, b = state
    cross = np.conj(a) * b
    return np.array([2 * cross.real, 2 * cross.imag, abs(a) ** 2 - abs(b) ** 2])


def mid_unitary(config: StepConfig) -> np.ndarray:
    """Mid rotation followed by the optional bit flip."""
    axis, angle = config.mid_rotation
    gate = rotation_gate(axis, angle)
    return PAULI_X @ gate if config.flip else gate


def conditional_ancilla_states(alpha: float, config: StepConfig) -> np.ndarray:
    """
    Ancilla state just before measurement for each register basis state.

    Returns:
        (4, 2) array; row k belongs to REGISTER_BASIS[k].
    """
    alpha = check_coupling(alpha)
    prepared = bloch_state(config.prep_polar, config.prep_azimuth)
    middle = mid_unitary(config)
    states = np.empty((4, 2), dtype=complex)
    for index, (first, second) in enumerate(REGISTER_BASIS):
        states[index] = (
            ancilla_phase(alpha, second) @ middle @ ancilla_phase(alpha, first) @ prepared
        )
    return states


def step_kraus(alpha: float, config: StepConfig) -> Tuple[np.ndarray, np.ndarray]:
    """
    Diagonal Kraus operators of one ancilla pass.

    Args:
        alpha: Coupling strength in (0, pi/4].
        config: Preparation, mid rotation and measurement of the ancilla.

    Returns:
        (K_plus, K_minus) as length-4 diagonals; K_plus belongs to the
        outcome projecting onto the measurement axis state.
    """
    states = conditional_ancilla_states(alpha, config)
    plus = bloch_state(config.meas_polar, config.meas_azimuth)
    minus = orthogonal_state(config.meas_polar, config.meas_azimuth)
    k_plus = states @ np.conj(plus)
    k_minus = states @ np.conj(minus)
    completeness = np.abs(k_plus) ** 2 + np.abs(k_minus) ** 2
    if not np.allclose(completeness, 1.0, atol=UNITARY_ATOL * 100):
        logger.error("Kraus completeness violated: %s", completeness)
        raise InvalidArgumentError("Kraus operators are not complete")
    return k_plus, k_minus


def proportional_unitary_check(
    diagonal: np.ndarray, tol: Optional[float] = None
) -> Tuple[bool, Optional[float]]:
    """
    Check that a diagonal operator is a scalar multiple of a unitary.

    Returns:
        (valid, probability) where probability is the common squared modulus,
        or None when the moduli differ by more than `tol`.
    """
    tol = Config.VALIDITY_TOL if tol is None else tol
    moduli = np.abs(np.asarray(diagonal))
    if float(np.ptp(moduli)) > tol:
        return False, None
    return True, float(np.mean(moduli**2))


def controlled_phase_angle(diagonal: np.ndarray) -> float:
    """
    Controlled-phase angle phi11 - phi10 - phi01 + phi00 of a diagonal operator.

    Raises:
        InvalidArgumentError: If the operator is not proportional to a
            unitary or vanishes.
    """
    entries = np.asarray(diagonal, dtype=complex)
    valid, probability = proportional_unitary_check(entries)
    if not valid or probability is None or probability < 1e-30:
        raise InvalidArgumentError("operator is not proportional to a unitary")
    product = entries[0] * entries[3] * np.conj(entries[1]) * np.conj(entries[2])
    return wrap_angle(float(np.angle(product)))


def adqc_single_backaction(beta: float, outcome: int) -> np.ndarray:
    """Back action Z^outcome . R_z(beta) of a single-qubit ancilla-driven rotation."""
    gate = rotation_gate((0.0, 0.0, 1.0), beta)
    if outcome not in (0, 1):
        raise InvalidArgumentError("outcome must be 0 or 1")
    return _read_only(PAULI_Z @ gate if outcome else np.array(gate))


def statevector_kraus(alpha: float, config: StepConfig) -> Tuple[np.ndarray, np.ndarray]:
    """
    Full 4x4 Kraus matrices from an explicit three-qubit statevector run.

    Qubit order is (ancilla, register 1, register 2). Used as an oracle for
    step_kraus; the off-diagonal entries vanish for every configuration.
    """
    alpha = check_coupling(alpha)
    signs = 1 - 2 * np.array(REGISTER_BASIS)
    ancilla_signs = np.array([1, -1])
    # (ancilla, register) phase tables of the two interactions
    first = np.exp(-1j * alpha * np.outer(ancilla_signs, signs[:, 0])).reshape(-1)
    second = np.exp(-1j * alpha * np.outer(ancilla_signs, signs[:, 1])).reshape(-1)
    middle = np.kron(mid_unitary(config), np.eye(4))
    unitary = np.diag(second) @ middle @ np.diag(first)

    prepared = bloch_state(config.prep_polar, config.prep_azimuth)
    embed = np.kron(prepared.reshape(2, 1), np.eye(4))
    plus = bloch_state(config.meas_polar, config.meas_azimuth)
    minus = orthogonal_state(config.meas_polar, config.meas_azimuth)
    project_plus = np.kron(np.conj(plus).reshape(1, 2), np.eye(4))
    project_minus = np.kron(np.conj(minus).reshape(1, 2), np.eye(4))
    return project_plus @ unitary @ embed, project_minus @ unitary @ embed
