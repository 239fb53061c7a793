"""Unit tests for closed-loop simulation."""

import numpy as np
import pytest

from mtdc_hinf.application.baselines import make_pi_baseline
from mtdc_hinf.application.disturbances import step_profile
from mtdc_hinf.application.simulation import compute_metrics, disturbance_channel, simulate_closed_loop
from mtdc_hinf.domain.enums import ControlCase
from mtdc_hinf.domain.exceptions import WiringError
from mtdc_hinf.domain.scenario import PiGains


@pytest.fixture
def short_step():
    return step_profile((0.1, 0.0, 0.0, 0.0), onset=0.0, duration=1.0, sample_period=0.01)


class TestDisturbanceChannel:
    """Test cases for disturbance_channel."""

    @pytest.mark.parametrize(("channel", "expected"), [("dpl1", "g1.dpl"), ("dpl3", "g3.dpl"), ("dvw", "owf.dvw")])
    def test_mapping(self, channel, expected):
        """Test that profile channels map onto plant inputs."""
        assert disturbance_channel(channel) == expected

    def test_unknown(self):
        """Test that an unknown channel raises WiringError."""
        with pytest.raises(WiringError, match="wind"):
            disturbance_channel("wind")


class TestComputeMetrics:
    """Test cases for compute_metrics."""

    def test_peak_and_rms(self):
        """Test peak and rms per grid and for the DC voltage."""
        df = np.array([[3.0, 0.0], [-4.0, 1.0]])
        dvdc = np.array([1.0, -1.0])

        metrics = compute_metrics(df, dvdc)

        assert metrics.df_max == (4.0, 1.0)
        assert metrics.df_rms[0] == pytest.approx(np.sqrt(12.5))
        assert metrics.df_rms[1] == pytest.approx(np.sqrt(0.5))
        assert metrics.vdc_max == 1.0
        assert metrics.vdc_rms == pytest.approx(1.0)
        assert metrics.df_max_sum == pytest.approx(5.0)


class TestSimulateClosedLoop:
    """Test cases for simulate_closed_loop."""

    def test_droop_only_shapes(self, nominal_plant, short_step):
        """Test the sampled series of a droop-only run."""
        result = simulate_closed_loop(nominal_plant, [], short_step, sample_period=0.01)

        assert result.case == ControlCase.DROOP_ONLY
        assert result.time.shape == (100,)
        assert result.frequency.shape == (100, 3)
        assert result.vdc.shape == (100,)
        assert result.generated_power.shape == (100, 3)
        assert result.references == {}

    def test_metrics_match_series(self, nominal_plant, short_step):
        """Test that the summary metrics are computed from the returned series."""
        result = simulate_closed_loop(nominal_plant, [], short_step, sample_period=0.01)

        df = result.frequency - 60.0
        np.testing.assert_allclose(result.metrics.df_max, np.max(np.abs(df), axis=0), rtol=1e-9, atol=1e-12)
        assert result.metrics.vdc_max == pytest.approx(float(np.max(np.abs(result.vdc - 1.0))), abs=1e-12)

    def test_zero_disturbance(self, nominal_plant):
        """Test that a zero profile leaves every deviation at zero."""
        quiet = step_profile((0.0, 0.0, 0.0, 0.0), onset=0.0, duration=0.5, sample_period=0.01)

        result = simulate_closed_loop(nominal_plant, [], quiet, sample_period=0.01)

        np.testing.assert_allclose(result.frequency, 60.0)
        assert result.metrics.df_max_sum == 0.0

    def test_duration_override(self, nominal_plant, short_step):
        """Test that an explicit duration sets the number of samples."""
        result = simulate_closed_loop(nominal_plant, [], short_step, sample_period=0.01, duration=0.3)

        assert result.time.shape == (30,)

    def test_reference_trajectories(self, nominal_plant, short_step):
        """Test that every driven reference is recorded."""
        controllers = [make_pi_baseline(nominal_plant, k, PiGains()) for k in nominal_plant.grids]

        result = simulate_closed_loop(
            nominal_plant, controllers, short_step, sample_period=0.01, case=ControlCase.CASE2
        )

        assert set(result.references) == {"g1.pg_ref", "g2.pg_ref", "g3.pg_ref"}
        assert result.references["g1.pg_ref"].shape == (100,)
