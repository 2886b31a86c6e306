"""
Tests for step characterization, the X-basis pass and the valid family.
"""

import math

import numpy as np
import pytest

from ancilla_cz.models import StepConfig
from ancilla_cz.stepmodel import (
    apply_flip,
    bloch_points,
    characterize_step,
    circle_condition,
    effective_angles,
    family_config,
    family_outcomes,
    xbasis_closed_form,
    xbasis_config,
)
from ancilla_cz.utils import wrap_angle

from .helpers import random_step_config


def _same_angle(a, b, tol=1e-9):
    return abs(wrap_angle(a - b)) <= tol


def _ports(outcome):
    return [(outcome.phi_port0, outcome.p_port0), (outcome.phi_port1, outcome.p_port1)]


def _random_family_member(rng):
    alpha = float(rng.uniform(0.02, 0.78))
    prep, meas = rng.uniform(0, math.pi, size=2)
    return alpha, float(prep), float(meas)


class TestXBasis:
    """Test the fixed X-basis pass."""

    def test_values_at_pi_over_16(self):
        outcome = characterize_step(math.pi / 16, xbasis_config())
        assert outcome.valid
        assert outcome.phi_port0 == pytest.approx(-0.158182, abs=1e-6)
        assert _same_angle(outcome.phi_port1, math.pi, 1e-12)
        assert outcome.p_port1 == pytest.approx(0.0732233, abs=1e-7)
        assert outcome.p_port0 + outcome.p_port1 == pytest.approx(1.0, abs=1e-12)

    def test_matches_closed_form(self):
        for alpha in np.linspace(0.005, math.pi / 4, 100):
            outcome = characterize_step(float(alpha), xbasis_config())
            closed = xbasis_closed_form(float(alpha))
            assert _same_angle(outcome.phi_port0, closed.phi_port0, 1e-10)
            assert _same_angle(outcome.phi_port1, closed.phi_port1, 1e-10)
            assert outcome.p_port1 == pytest.approx(closed.p_port1, abs=1e-10)
            assert outcome.p_port0 == pytest.approx(closed.p_port0, abs=1e-10)

    def test_full_coupling_splits_evenly(self):
        outcome = characterize_step(math.pi / 4, xbasis_config())
        assert outcome.p_port1 == pytest.approx(0.5, abs=1e-12)
        assert abs(outcome.phi_port0) == pytest.approx(math.pi, abs=1e-9)

    def test_points_share_a_circle(self):
        points = bloch_points(math.pi / 16, xbasis_config())
        assert np.allclose(np.linalg.norm(points, axis=1), 1.0)
        assert np.allclose(points[:, 0], points[0, 0], atol=1e-12)
        assert circle_condition(math.pi / 16, xbasis_config())


class TestValidity:
    """Test the proportional-unitary condition."""

    def test_generic_passes_are_invalid(self, rng):
        for _ in range(200):
            alpha = float(rng.uniform(0.05, 0.78))
            config = random_step_config(rng)
            outcome = characterize_step(alpha, config)
            assert outcome.valid == circle_condition(alpha, config)

    def test_family_members_are_valid(self, rng):
        for _ in range(500):
            alpha, prep, meas = _random_family_member(rng)
            config = family_config(alpha, prep, meas)
            outcome = characterize_step(alpha, config)
            assert outcome.valid
            assert circle_condition(alpha, config)
            assert outcome.p_port1 <= 0.5 + 1e-12

    def test_invalid_outcome_has_no_ports(self):
        config = StepConfig(
            prep_polar=math.pi / 2, mid_axis=(0.0, 0.0, 1.0), mid_angle=0.3, meas_polar=0.7
        )
        outcome = characterize_step(math.pi / 8, config)
        assert not outcome.valid
        assert outcome.phi_port0 is None
        assert outcome.p_port1 is None


class TestFlip:
    """Test the flip transformation."""

    def test_flip_negates_both_ports(self, rng):
        for _ in range(1000):
            alpha, prep, meas = _random_family_member(rng)
            config = family_config(alpha, prep, meas)
            before = _ports(characterize_step(alpha, config))
            after = _ports(characterize_step(alpha, apply_flip(config)))
            negated = [(-phase, prob) for phase, prob in before]
            matches = [
                all(
                    _same_angle(a[0], b[0]) and a[1] == pytest.approx(b[1], abs=1e-12)
                    for a, b in zip(order, after)
                )
                for order in (negated, negated[::-1])
            ]
            assert any(matches)

    def test_flip_twice_restores(self):
        config = family_config(0.3, 1.0, 1.2)
        twice = apply_flip(apply_flip(config))
        assert twice.flip == config.flip
        assert twice.meas_polar == pytest.approx(config.meas_polar)

    def test_flipped_xbasis_undoes_failure(self):
        alpha = math.pi / 16
        plain = characterize_step(alpha, xbasis_config())
        flipped = characterize_step(alpha, apply_flip(xbasis_config()))
        assert flipped.phi_port0 == pytest.approx(-plain.phi_port0, abs=1e-12)
        assert flipped.p_port1 == pytest.approx(plain.p_port1, abs=1e-12)


class TestFamily:
    """Test the two-parameter family of valid passes."""

    def test_xbasis_member(self):
        alpha = math.pi / 16
        member = characterize_step(alpha, family_config(alpha, math.pi / 2, math.pi / 2))
        plain = characterize_step(alpha, xbasis_config())
        assert _same_angle(member.phi_port0, plain.phi_port0)
        assert _same_angle(member.phi_port1, plain.phi_port1)
        assert member.p_port1 == pytest.approx(plain.p_port1, abs=1e-12)

    def test_effective_angles(self):
        assert effective_angles(0.3, math.pi / 2, math.pi / 2) == pytest.approx((0.3, 0.3))
        x, y = effective_angles(0.3, 0.0, math.pi / 2)
        assert x == pytest.approx(0.0)
        assert y == pytest.approx(0.3)

    def test_closed_forms(self, rng):
        """Port magnitudes 4 atan(tan x tan y) and 4 atan(tan x / tan y)."""
        for _ in range(200):
            alpha = float(rng.uniform(0.05, 0.75))
            prep, meas = (float(v) for v in rng.uniform(0.05, math.pi / 2, size=2))
            x, y = effective_angles(alpha, prep, meas)
            expected = sorted(
                [
                    (4 * math.atan(math.tan(x) * math.tan(y)), (1 + math.cos(2 * x) * math.cos(2 * y)) / 2),
                    (
                        abs(wrap_angle(4 * math.atan(math.tan(x) / math.tan(y)))),
                        (1 - math.cos(2 * x) * math.cos(2 * y)) / 2,
                    ),
                ],
                key=lambda item: item[1],
            )
            outcome = characterize_step(alpha, family_config(alpha, prep, meas))
            observed = sorted(
                [(abs(phase), prob) for phase, prob in _ports(outcome)], key=lambda item: item[1]
            )
            for (want_phase, want_prob), (got_phase, got_prob) in zip(expected, observed):
                assert got_prob == pytest.approx(want_prob, abs=1e-9)
                assert got_phase == pytest.approx(want_phase, abs=1e-8)

    def test_vectorized_agrees(self, rng):
        alpha = 0.5
        preps = rng.uniform(0, math.pi, 200)
        meases = rng.uniform(0, math.pi, 200)
        phi0, phi1, p0, p1 = family_outcomes(alpha, preps, meases)
        for k in range(200):
            outcome = characterize_step(alpha, family_config(alpha, preps[k], meases[k]))
            assert _same_angle(phi0[k], outcome.phi_port0)
            assert _same_angle(phi1[k], outcome.phi_port1)
            assert p0[k] == pytest.approx(outcome.p_port0, abs=1e-12)
            assert p1[k] == pytest.approx(outcome.p_port1, abs=1e-12)
