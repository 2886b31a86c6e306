"""
Tests for reproducible Monte Carlo sampling.
"""

import math

import numpy as np
import pytest

from ancilla_cz.analytics import dkw_epsilon, flip_undo_law, summarize
from ancilla_cz.models import InvalidArgumentError, RunSpec, StrategyKind, WalkState
from ancilla_cz.montecarlo import derive_stream, run_trial, run_trials, sample_port, shard_bounds
from ancilla_cz.qcore import controlled_phase_angle, statevector_kraus
from ancilla_cz.strategies import advance, strategy_next, target_rule_for, xbasis_plan
from ancilla_cz.utils import wrap_angle

P_SIXTEENTH = math.sin(math.pi / 8) ** 2 / 2


def _spec(label, alpha=math.pi / 16, n_trials=200, seed=11, **kwargs):
    return RunSpec(
        kind=StrategyKind.from_label(label),
        alpha=alpha,
        n_trials=n_trials,
        master_seed=seed,
        **kwargs,
    )


class TestStreams:
    """Test per-trial random streams."""

    def test_deterministic(self):
        first = derive_stream(5, 3).random(8)
        again = derive_stream(5, 3).random(8)
        assert np.array_equal(first, again)

    def test_independent_of_index_and_seed(self):
        base = derive_stream(5, 3).random(8)
        assert not np.array_equal(base, derive_stream(5, 4).random(8))
        assert not np.array_equal(base, derive_stream(6, 3).random(8))

    def test_rejects_negative(self):
        with pytest.raises(InvalidArgumentError):
            derive_stream(-1, 0)

    def test_sample_port_extremes(self):
        plan = xbasis_plan(math.pi / 16)
        certain = plan.model_copy(update={"success_prob": 1.0})
        never = plan.model_copy(update={"success_prob": 0.0})
        stream = derive_stream(1, 0)
        assert all(sample_port(certain, stream) == 1 for _ in range(20))
        assert all(sample_port(never, stream) == 0 for _ in range(20))


class TestRunTrials:
    """Test batches of walks."""

    def test_full_coupling_takes_one_step(self):
        spec = _spec("unguided", alpha=math.pi / 4)
        assert run_trial(spec, 0) == 1
        assert run_trials(spec).counts == {1: 200}

    def test_shards_do_not_change_results(self):
        spec = _spec("flip-undo", n_trials=500)
        single = run_trials(spec, workers=1, shards=1)
        many = run_trials(spec, workers=1, shards=7)
        assert single == many

    def test_workers_do_not_change_results(self):
        spec = _spec("flip-undo", n_trials=200)
        assert run_trials(spec, workers=1) == run_trials(spec, workers=2)

    def test_rejects_zero_workers(self):
        with pytest.raises(InvalidArgumentError):
            run_trials(_spec("flip-undo"), workers=0)

    def test_overflow_is_counted(self):
        dist = run_trials(_spec("unguided", epsilon=math.pi / 100, max_steps=1))
        assert set(dist.counts) <= {1}
        assert dist.n_trials == 200
        assert dist.overflow == 200 - dist.counts.get(1, 0)
        assert dist.overflow > 0

    def test_one_step_small_coupling_completes(self):
        dist = run_trials(_spec("one-step-1p1d", alpha=0.1 * math.pi / 4, n_trials=50))
        assert dist.n_trials == 50
        assert dist.overflow == 0

    def test_shard_bounds(self):
        assert shard_bounds(10, 3) == [(0, 3), (3, 7), (7, 10)]
        assert shard_bounds(2, 5) == [(0, 1), (1, 2)]


class TestAgainstExact:
    """Compare samples with exact laws."""

    def test_flip_undo_mean(self):
        n_trials = 5000
        dist = run_trials(_spec("flip-undo", n_trials=n_trials, seed=3))
        law = flip_undo_law(P_SIXTEENTH)
        stats = summarize(dist)
        assert abs(stats.mean - law.mean()) <= 4 * law.std() / math.sqrt(n_trials)
        assert all(steps % 2 == 1 for steps in dist.counts)

    def test_flip_undo_cdf_within_dkw_band(self):
        n_trials = 5000
        dist = run_trials(_spec("flip-undo", n_trials=n_trials, seed=4))
        law = flip_undo_law(P_SIXTEENTH)
        band = dkw_epsilon(n_trials, 0.999)
        for n in range(1, 200):
            assert abs(dist.cdf(n) - law.cdf(n)) <= band

    def test_walk_probabilities_match_statevector(self):
        """Every plan's advertised port matches the explicit three-qubit simulation."""
        alpha = math.pi / 8
        kind = StrategyKind.one_step()
        rule = target_rule_for(kind)
        for trial in range(20):
            stream = derive_stream(9, trial)
            state = WalkState()
            while not state.done and state.steps < 10:
                plan = strategy_next(kind, alpha, state)
                observed = []
                for full in statevector_kraus(alpha, plan.config):
                    diagonal = np.diag(full)
                    probability = float(np.mean(np.abs(diagonal) ** 2))
                    phase = controlled_phase_angle(diagonal) if probability > 1e-15 else 0.0
                    observed.append((phase, probability))
                assert any(
                    abs(wrap_angle(phase - plan.success_phase)) <= 1e-9
                    and abs(probability - plan.success_prob) <= 1e-10
                    for phase, probability in observed
                )
                assert sorted(p for _, p in observed) == pytest.approx(
                    sorted([plan.success_prob, plan.failure_prob]), abs=1e-10
                )
                state = advance(state, plan, sample_port(plan, stream), rule)


@pytest.mark.slow
def test_unguided_reference_statistics():
    """10^4 unguided walks at pi/16 with a pi/100 target region."""
    dist = run_trials(_spec("unguided", n_trials=10000, seed=20240611, epsilon=math.pi / 100))
    stats = summarize(dist)
    assert dist.overflow == 0
    assert 71.1 <= stats.mean <= 77.1
    assert 69.5 <= stats.std <= 79.5


@pytest.mark.slow
@pytest.mark.parametrize("alpha", [math.pi / 16, math.pi / 8, 3 * math.pi / 16])
def test_flip_undo_mean_over_couplings(alpha):
    """10^5 flip-undo walks land within three standard errors of 1 + 1/p."""
    n_trials = 100000
    p = math.sin(2 * alpha) ** 2 / 2
    dist = run_trials(_spec("flip-undo", alpha=alpha, n_trials=n_trials, seed=3))
    law = flip_undo_law(p)
    assert law.mean() == pytest.approx(1 + 1 / p)
    assert abs(summarize(dist).mean - law.mean()) <= 3 * law.std() / math.sqrt(n_trials)
    assert dist.overflow == 0
