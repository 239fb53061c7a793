"""Unit tests for domain exceptions."""

import pytest

from mtdc_hinf.domain.exceptions import (
    ConfigError,
    DimensionError,
    InfeasibleError,
    ModelValidationError,
    MtdcHinfException,
    NormUndefinedError,
    NoStabilizingControllerError,
    NumericalError,
    ParameterError,
    StabilityError,
    TopologyError,
    WiringError,
)


class TestHierarchy:
    """Test cases for the two exception families."""

    @pytest.mark.parametrize(
        "error_class",
        [DimensionError, ParameterError, WiringError, TopologyError, ConfigError],
    )
    def test_validation_family(self, error_class):
        """Test that input errors belong to the validation family."""
        assert issubclass(error_class, ModelValidationError)
        assert issubclass(error_class, MtdcHinfException)
        assert not issubclass(error_class, NumericalError)

    @pytest.mark.parametrize(
        "error_class",
        [StabilityError, NormUndefinedError, InfeasibleError, NoStabilizingControllerError],
    )
    def test_numerical_family(self, error_class):
        """Test that numerical failures belong to the numerical family."""
        assert issubclass(error_class, NumericalError)
        assert not issubclass(error_class, ModelValidationError)


class TestMessages:
    """Test cases for exception attributes and messages."""

    def test_parameter_error(self):
        """Test that ParameterError names the field and the reason."""
        error = ParameterError("gamma", "must be positive")

        assert error.field == "gamma"
        assert error.reason == "must be positive"
        assert str(error) == "Invalid parameter 'gamma': must be positive"

    def test_wiring_error_lists_signals(self):
        """Test that WiringError lists every unresolved signal."""
        error = WiringError(["g1.df", "g2.vdc"], reason="missing")

        assert error.unresolved == ["g1.df", "g2.vdc"]
        assert "g1.df, g2.vdc" in str(error)
        assert "Reason: missing" in str(error)

    def test_wiring_error_without_reason(self):
        """Test that WiringError can be raised without a reason."""
        with pytest.raises(WiringError, match="Unresolved signals: x"):
            raise WiringError(["x"])

    def test_topology_error(self):
        """Test that TopologyError lists the unreachable buses."""
        error = TopologyError([3, 4])

        assert error.buses == [3, 4]
        assert "3, 4" in str(error)

    def test_config_error_carries_path(self):
        """Test that ConfigError includes the path in its message."""
        error = ConfigError("/tmp/scenario.json", "file not found")

        assert error.path == "/tmp/scenario.json"
        assert "/tmp/scenario.json" in str(error)

    def test_stability_error(self):
        """Test that StabilityError reports the subject and the largest real part."""
        error = StabilityError("closed loop", 0.25)

        assert error.subject == "closed loop"
        assert error.max_real_part == 0.25
        assert "closed loop is not stable" in str(error)

    def test_no_stabilizing_controller_error(self):
        """Test that the gamma-iteration failure names the grid and the last bracket."""
        error = NoStabilizingControllerError(2, (1.0, 2.0))

        assert error.grid == 2
        assert error.bracket == (1.0, 2.0)
        assert "grid 2" in str(error)

    def test_no_stabilizing_controller_error_centralized(self):
        """Test that a centralized failure is labelled as such."""
        assert "centralized plant" in str(NoStabilizingControllerError(None, (1.0, 2.0)))

    def test_infeasible_error(self):
        """Test that InfeasibleError keeps the failed check."""
        error = InfeasibleError("imaginary axis")

        assert error.reason == "imaginary axis"
        assert "imaginary axis" in str(error)
