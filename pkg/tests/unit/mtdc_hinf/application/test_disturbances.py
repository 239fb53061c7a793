"""Unit tests for the disturbance profile generators."""

import numpy as np
import pytest

from mtdc_hinf.application.disturbances import (
    from_samples,
    gen_regd_like,
    load_step,
    square_wave,
    step_profile,
    validation_step,
)
from mtdc_hinf.domain.enums import DisturbanceKind
from mtdc_hinf.domain.exceptions import ParameterError


class TestStepProfiles:
    """Test cases for step profiles."""

    def test_step_onset(self):
        """Test that samples before the onset are zero and later ones equal the amplitudes."""
        profile = step_profile((0.1, 0.2, 0.0, -0.3), onset=1.0, duration=2.0, sample_period=0.5)

        np.testing.assert_allclose(profile.values[:2], 0.0)
        np.testing.assert_allclose(profile.values[2:], [[0.1, 0.2, 0.0, -0.3]] * 2)
        assert profile.kind == DisturbanceKind.STEP
        assert profile.onset == 1.0

    def test_amplitude_count(self):
        """Test that one amplitude per channel is required."""
        with pytest.raises(ParameterError, match="amplitudes"):
            step_profile((0.1, 0.1), onset=0.0, duration=1.0)

    def test_non_positive_duration(self):
        """Test that the duration must be positive."""
        with pytest.raises(ParameterError, match="duration"):
            step_profile((0.1, 0.1, 0.1, 0.0), onset=0.0, duration=0.0)

    def test_load_step(self):
        """Test the default step on every grid without wind deviation."""
        profile = load_step()

        assert profile.values.shape == (6000, 4)
        assert profile.amplitudes == (0.1, 0.1, 0.1, 0.0)
        assert profile.onset == 10.0

    def test_validation_step(self):
        """Test the unequal steps in grids 1 and 2."""
        profile = validation_step()

        assert profile.amplitudes == (0.1, 0.15, 0.0, 0.0)
        assert profile.onset == 45.0
        assert profile.duration == 90.0


class TestSquareWave:
    """Test cases for square_wave."""

    def test_alternates(self):
        """Test that the sign flips every half period on the load channels only."""
        profile = square_wave(amplitude=0.2, half_period=1.0, duration=4.0, sample_period=0.5)

        np.testing.assert_allclose(profile.values[:, 0], [0.2, 0.2, -0.2, -0.2, 0.2, 0.2, -0.2, -0.2])
        np.testing.assert_allclose(profile.values[:, 1], profile.values[:, 0])
        np.testing.assert_allclose(profile.values[:, 3], 0.0)

    def test_half_period_positive(self):
        """Test that the half period must be positive."""
        with pytest.raises(ParameterError, match="half_period"):
            square_wave(half_period=0.0)


class TestRegulationLike:
    """Test cases for gen_regd_like."""

    def test_seed_determinism(self):
        """Test that one seed always gives the same series and another seed differs."""
        first = gen_regd_like(4, duration=20.0)

        np.testing.assert_array_equal(first.values, gen_regd_like(4, duration=20.0).values)
        assert not np.allclose(first.values, gen_regd_like(5, duration=20.0).values)

    def test_scaling(self):
        """Test zero mean and the per-channel peak magnitudes."""
        profile = gen_regd_like(0, duration=200.0, amplitude=0.1, wind_amplitude=0.5)

        assert profile.sample_period == pytest.approx(0.1)
        assert profile.values.shape == (2000, 4)
        np.testing.assert_allclose(np.max(np.abs(profile.values), axis=0), [0.1, 0.1, 0.1, 0.5])
        np.testing.assert_allclose(profile.values.mean(axis=0), 0.0, atol=1e-12)
        assert profile.kind == DisturbanceKind.SAMPLED

    def test_negative_amplitude(self):
        """Test that the amplitude must be non-negative."""
        with pytest.raises(ParameterError, match="amplitude"):
            gen_regd_like(0, amplitude=-0.1)


class TestFromSamples:
    """Test cases for from_samples."""

    def test_uniform_series(self):
        """Test that a uniform series becomes a measured profile."""
        time = np.arange(5) * 0.2
        values = np.arange(20, dtype=float).reshape(5, 4)

        profile = from_samples(time, values)

        assert profile.sample_period == pytest.approx(0.2)
        assert profile.duration == pytest.approx(1.0)
        assert not profile.synthetic
        np.testing.assert_allclose(profile.values, values)

    def test_non_uniform_time(self):
        """Test that irregular sampling is rejected."""
        with pytest.raises(ParameterError, match="uniformly"):
            from_samples(np.array([0.0, 0.1, 0.3]), np.zeros((3, 4)))

    def test_shifted_start(self):
        """Test that the series must start at zero."""
        with pytest.raises(ParameterError, match="uniformly"):
            from_samples(np.array([1.0, 1.1, 1.2]), np.zeros((3, 4)))

    def test_wrong_shape(self):
        """Test that one column per channel is required."""
        with pytest.raises(ParameterError, match="shape"):
            from_samples(np.array([0.0, 0.1, 0.2]), np.zeros((3, 3)))
