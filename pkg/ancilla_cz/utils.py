"""
Utility functions for angles and coupling ranges.
"""

import math
import re
from typing import List

import numpy as np

from .constants import MAX_COUPLING, PI, TWO_PI
from .models import InvalidArgumentError

_NUMBER = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?"
_ANGLE_PATTERN = re.compile(
    rf"^(?P<sign>[+-])?(?P<coef>{_NUMBER})?\s*\*?\s*(?P<pi>pi|π)?"
    rf"\s*(?:/\s*(?P<den>{_NUMBER}))?$",
    re.IGNORECASE,
)


def wrap_angle(angle: float) -> float:
    """
    Reduce an angle to the interval (-pi, pi].

    Args:
        angle: Any finite angle in radians.

    Returns:
        The representative of `angle` modulo 2*pi in (-pi, pi]; -pi maps to pi.
    """
    reduced = math.remainder(angle, TWO_PI)
    if reduced <= -PI:
        reduced += TWO_PI
    return reduced


def wrap_angles(angles: np.ndarray) -> np.ndarray:
    """Vectorized wrap_angle."""
    reduced = np.remainder(np.asarray(angles, dtype=float) + PI, TWO_PI) - PI
    return np.where(reduced <= -PI, reduced + TWO_PI, reduced)


def parse_angle(text: str) -> float:
    """
    Parse an angle written as a float or a multiple of pi.

    Accepts forms such as "0.19635", "pi/16", "3*pi/16", "0.98pi/4", "-pi/2".

    Args:
        text: Angle expression.

    Returns:
        The angle in radians.

    Raises:
        InvalidArgumentError: If the expression cannot be parsed.
    """
    cleaned = text.strip().replace(" ", "")
    match = _ANGLE_PATTERN.match(cleaned)
    if not cleaned or match is None or not (match["coef"] or match["pi"]):
        raise InvalidArgumentError(f"cannot parse angle '{text}'")
    value = float(match["coef"]) if match["coef"] else 1.0
    if match["pi"]:
        value *= PI
    if match["den"]:
        denominator = float(match["den"])
        if denominator == 0.0:
            raise InvalidArgumentError(f"division by zero in angle '{text}'")
        value /= denominator
    return -value if match["sign"] == "-" else value


def parse_angle_list(text: str) -> List[float]:
    """Parse a comma separated list of angle expressions."""
    return [parse_angle(item) for item in text.split(",") if item.strip()]


def check_coupling(alpha: float) -> float:
    """Validate a coupling strength in (0, pi/4] and return it."""
    if not math.isfinite(alpha) or not 0.0 < alpha <= MAX_COUPLING + 1e-12:
        raise InvalidArgumentError(
            f"coupling alpha={alpha} outside (0, pi/4]", details={"alpha": alpha}
        )
    return min(alpha, MAX_COUPLING)
