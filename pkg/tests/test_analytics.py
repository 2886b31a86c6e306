"""
Tests for closed forms, exact laws and summaries of hitting times.
"""

import math

import numpy as np
import pytest

from ancilla_cz.analytics import (
    dkw_epsilon,
    exact_hitting_law,
    flip_undo_cdf,
    flip_undo_chain_mean,
    flip_undo_law,
    flip_undo_mean,
    flip_undo_quantile,
    geometric_bounds,
    max_steps_bound,
    quantile_N,
    summarize,
)
from ancilla_cz.models import (
    ExactHittingLaw,
    HittingDistribution,
    InvalidArgumentError,
    StrategyKind,
)
from ancilla_cz.optimizer import solve_port1
from ancilla_cz.stepmodel import xbasis_closed_form
from ancilla_cz.utils import wrap_angle

P_SIXTEENTH = math.sin(math.pi / 8) ** 2 / 2


class TestFlipUndo:
    """Test the flip-undo closed forms."""

    def test_mean(self):
        assert flip_undo_mean(1.0) == 2.0
        assert flip_undo_mean(0.5) == 3.0
        assert flip_undo_mean(P_SIXTEENTH) == pytest.approx(14.657, abs=1e-3)

    def test_mean_rejects_zero(self):
        with pytest.raises(InvalidArgumentError):
            flip_undo_mean(0.0)

    def test_cdf(self):
        assert flip_undo_cdf(0.5, 1) == 0.5
        assert flip_undo_cdf(0.5, 3) == 0.75
        values = [flip_undo_cdf(P_SIXTEENTH, n) for n in range(1, 200, 2)]
        assert all(b >= a for a, b in zip(values, values[1:]))

    @pytest.mark.parametrize("n", [0, 2, 10])
    def test_cdf_rejects_even(self, n):
        with pytest.raises(InvalidArgumentError):
            flip_undo_cdf(0.5, n)

    def test_quantile_at_pi_over_16(self):
        packet = flip_undo_quantile(P_SIXTEENTH, 0.999)
        assert packet == 95
        assert flip_undo_cdf(P_SIXTEENTH, packet) >= 0.999
        assert flip_undo_cdf(P_SIXTEENTH, packet - 2) < 0.999

    def test_quantile_when_first_step_suffices(self):
        assert flip_undo_quantile(0.9995, 0.999) == 1

    def test_chain_agrees(self):
        for p in (0.05, P_SIXTEENTH, 0.3, 0.5):
            assert flip_undo_chain_mean(p) == pytest.approx(flip_undo_mean(p), rel=1e-10)

    def test_law(self):
        law = flip_undo_law(P_SIXTEENTH)
        assert law.mean() == pytest.approx(flip_undo_mean(P_SIXTEENTH), abs=1e-6)
        assert law.cdf(95) == pytest.approx(flip_undo_cdf(P_SIXTEENTH, 95), abs=1e-12)
        assert law.residual <= 1e-12


class TestBounds:
    """Test geometric envelopes and horizons."""

    def test_geometric_bounds(self):
        assert geometric_bounds(0.2, 0.1, 0) == (0.0, 0.0)
        lower, upper = geometric_bounds(0.2, 0.1, 10)
        assert lower == pytest.approx(1 - 0.9**10)
        assert upper == pytest.approx(1 - 0.8**10)

    def test_geometric_bounds_order(self):
        with pytest.raises(InvalidArgumentError):
            geometric_bounds(0.1, 0.2, 3)

    def test_max_steps_bound(self):
        assert max_steps_bound(0.25) == 4
        assert max_steps_bound(0.5) == 2
        assert max_steps_bound(0.3) == 3

    def test_dkw(self):
        assert dkw_epsilon(10000, 0.999) == pytest.approx(0.0194947, abs=1e-6)
        with pytest.raises(InvalidArgumentError):
            dkw_epsilon(0)


class TestQuantiles:
    """Test quantile estimation."""

    def test_empirical_uncertified(self):
        dist = HittingDistribution.from_samples([1] * 999 + [5])
        estimate = quantile_N(dist, 0.999)
        assert estimate.steps == 1
        assert not estimate.certified

    def test_empirical_certified(self):
        dist = HittingDistribution.from_samples(list(range(1, 20001)))
        estimate = quantile_N(dist, 0.5)
        assert estimate.steps == 10000
        assert estimate.certified

    def test_empirical_not_reached(self):
        dist = HittingDistribution.from_samples([1, 2], overflow=8)
        assert quantile_N(dist, 0.5).steps is None

    def test_exact_law(self):
        law = ExactHittingLaw(pmf=[0.5, 0.25, 0.25])
        assert quantile_N(law, 0.75).steps == 2
        assert quantile_N(law, 0.999).steps == 3

    def test_callable(self):
        assert quantile_N(lambda n: 1 - 0.5**n, 0.99).steps == 7

    def test_rejects_quantile(self):
        with pytest.raises(InvalidArgumentError):
            quantile_N(ExactHittingLaw(pmf=[1.0]), 1.0)


class TestSummaries:
    """Test histogram summaries."""

    def test_point_mass(self):
        stats = summarize(HittingDistribution.from_samples([3] * 10))
        assert stats.mean == 3.0
        assert stats.std == 0.0
        assert all(steps == 3 for _, steps in stats.quantiles)

    def test_overflow_excluded_from_moments(self):
        stats = summarize(HittingDistribution.from_samples([1, 3], overflow=2), (0.5,))
        assert stats.mean == 2.0
        assert stats.std == 1.0
        assert stats.n_trials == 4
        assert stats.overflow == 2
        assert stats.quantiles == [(0.5, 3)]

    def test_empty(self):
        with pytest.raises(InvalidArgumentError):
            summarize(HittingDistribution.empty())


class TestExactLaws:
    """Test mass propagation over visited positions."""

    def test_flip_undo_matches_closed_form(self):
        law = exact_hitting_law(StrategyKind.flip_undo(), math.pi / 16)
        assert law.mean() == pytest.approx(flip_undo_mean(P_SIXTEENTH), abs=1e-6)
        assert law.pmf[1] == 0.0

    def test_unguided_full_coupling(self):
        law = exact_hitting_law(StrategyKind.unguided(), math.pi / 4)
        assert law.pmf == pytest.approx([1.0])

    def test_max_steps_truncates(self):
        law = exact_hitting_law(StrategyKind.flip_undo(), math.pi / 16, max_steps=3)
        assert len(law.pmf) == 3
        assert law.residual == pytest.approx(1 - flip_undo_cdf(P_SIXTEENTH, 3), abs=1e-12)

    @pytest.mark.parametrize("alpha", [math.pi / 16, math.pi / 8])
    def test_one_step_within_geometric_envelope(self, alpha):
        law = exact_hitting_law(StrategyKind.one_step(), alpha, tail_tol=1e-9)
        closed = xbasis_closed_form(alpha)
        phi0, p1 = closed.phi_port0, closed.p_port1
        p2 = solve_port1(alpha, wrap_angle(math.pi - phi0)).success_prob
        for n in range(1, min(len(law.pmf), 200) + 1):
            lower, upper = geometric_bounds(p1, p2, n)
            assert lower - 1e-9 <= law.cdf(n) <= upper + 1e-9

    def test_one_step_beats_flip_undo_at_small_coupling(self):
        alpha = math.pi / 16
        law = exact_hitting_law(StrategyKind.one_step(), alpha, tail_tol=1e-9)
        assert law.mean() <= flip_undo_mean(P_SIXTEENTH)


@pytest.mark.slow
def test_guided_ordering_over_couplings():
    """Guided strategies beat unguided walks; one-step beats flip-undo by at most one ancilla."""
    for fraction in np.linspace(0.1, 0.98, 20):
        alpha = float(fraction * math.pi / 4)
        p1 = xbasis_closed_form(alpha).p_port1
        one_step = exact_hitting_law(StrategyKind.one_step(), alpha, tail_tol=1e-9).mean()
        flip_undo = flip_undo_mean(p1)
        assert one_step <= flip_undo + 1e-6
        assert flip_undo - one_step <= 1.0 + 1e-6
        # truncated means are lower bounds
        unguided = exact_hitting_law(
            StrategyKind.unguided(), alpha, epsilon=math.pi / 100, tail_tol=1e-4
        ).mean()
        assert flip_undo <= unguided


@pytest.mark.slow
def test_high_coupling_limits():
    alpha = 0.98 * math.pi / 4
    one_port = exact_hitting_law(StrategyKind.one_step(1, 1), alpha, tail_tol=1e-9).mean()
    assert 1.85 <= one_port <= 2.15
    two_port = exact_hitting_law(StrategyKind.one_step(2, 2), alpha, tail_tol=1e-6).mean()
    assert 1.40 <= two_port <= 1.60


@pytest.mark.slow
def test_unguided_mean_at_pi_over_16():
    law = exact_hitting_law(
        StrategyKind.unguided(), math.pi / 16, epsilon=math.pi / 100, tail_tol=1e-6
    )
    assert 71.1 <= law.mean() <= 77.1


@pytest.mark.slow
def test_unguided_mean_scales_with_target_width():
    """Halving the target region roughly doubles the unguided hitting time."""
    means = [
        exact_hitting_law(
            StrategyKind.unguided(), math.pi / 16, epsilon=epsilon, tail_tol=1e-8
        ).mean()
        for epsilon in (math.pi / 100, math.pi / 50)
    ]
    assert 1.7 <= means[0] / means[1] <= 2.3
