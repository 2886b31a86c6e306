"""
Basic tests for configuration, models and errors.
"""

import math

import pytest
from pydantic import ValidationError

from ancilla_cz.config import Config
from ancilla_cz.models import (
    ExperimentConfig,
    HittingDistribution,
    InvalidArgumentError,
    NoSolutionError,
    SimulationError,
    StepConfig,
    StrategyKind,
    TargetRule,
)


class TestConfig:
    """Test configuration management."""

    def test_default_values(self):
        """Test default configuration values."""
        assert Config.SERVER_NAME == "Ancilla CZ Synthesis"
        assert Config.SERVER_VERSION == "1.0.0"
        assert Config.SCAN_POINTS == 1024
        assert Config.VALIDITY_TOL == 1e-9

    def test_defaults_validate(self):
        """Shipped defaults raise no problems."""
        assert Config.validate() == []

    def test_as_dict_echoes_settings(self):
        settings = Config.as_dict()
        assert settings["DEFAULT_SEED"] == Config.DEFAULT_SEED
        assert settings["ROOT_XTOL"] == Config.ROOT_XTOL


class TestModels:
    """Test data models."""

    def test_step_config_rejects_non_unit_axis(self):
        with pytest.raises(ValidationError):
            StepConfig(prep_polar=1.0, mid_axis=(1.0, 1.0, 0.0), meas_polar=1.0)

    def test_step_config_rejects_polar_out_of_range(self):
        with pytest.raises(ValidationError):
            StepConfig(prep_polar=4.0, meas_polar=1.0)

    def test_step_config_is_hashable(self):
        config = StepConfig(prep_polar=math.pi / 2, meas_polar=math.pi / 2)
        assert hash(config) == hash(config.model_copy())

    def test_strategy_labels(self):
        """Labels parse back to the same strategy."""
        for label in ("unguided", "flip-undo", "one-step-1p1d", "one-step-2p2d"):
            assert StrategyKind.from_label(label).label == label
        kind = StrategyKind.from_label("one-step-2p1d")
        assert kind.mode.ports == 2
        assert kind.mode.dof == 1

    def test_unknown_strategy(self):
        with pytest.raises(InvalidArgumentError):
            StrategyKind.from_label("random")

    def test_one_step_needs_mode(self):
        with pytest.raises(ValidationError):
            StrategyKind(name="one_step")

    def test_hitting_distribution_counts_must_sum(self):
        with pytest.raises(ValidationError):
            HittingDistribution(counts={1: 3}, total=4)

    def test_merge_is_commutative(self):
        a = HittingDistribution.from_samples([1, 1, 3])
        b = HittingDistribution.from_samples([2, 3], overflow=1)
        assert a.merge(b) == b.merge(a)
        assert a.merge(b).n_trials == 6

    def test_histogram_moments(self):
        dist = HittingDistribution.from_samples([1, 3], overflow=5)
        assert dist.mean() == 2.0
        assert dist.std() == 1.0
        assert dist.cdf(1) == pytest.approx(1 / 7)
        assert math.isnan(HittingDistribution.empty().std())

    def test_target_rule(self):
        rule = TargetRule(epsilon=0.1)
        assert rule.reached(math.pi - 0.05)
        assert rule.reached(-math.pi + 0.05)
        assert not rule.reached(math.pi - 0.2)
        assert TargetRule().reached(-math.pi)

    def test_experiment_config_rejects_unknown(self):
        with pytest.raises(ValidationError):
            ExperimentConfig(experiment="fig99")

    def test_experiment_config_rejects_bad_coupling(self):
        with pytest.raises(ValidationError):
            ExperimentConfig(experiment="characterize", alpha_grid=[1.0])


def test_error_string_format():
    """Errors render as 'code: message'."""
    error = NoSolutionError("unreachable", details={"target": 3.0})
    assert str(error) == "no_solution: unreachable"
    assert error.details == {"target": 3.0}
    assert isinstance(error, SimulationError)


def test_invalid_argument_is_value_error():
    assert issubclass(InvalidArgumentError, ValueError)
