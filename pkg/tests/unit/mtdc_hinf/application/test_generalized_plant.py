"""Unit tests for generalized plant construction."""

import numpy as np
import pytest

from mtdc_hinf.application.generalized_plant import (
    make_centralized_plant,
    make_generalized_plant,
    realize_weight,
    regularize,
    weight_bank,
)
from mtdc_hinf.domain.exceptions import ParameterError, WiringError
from mtdc_hinf.domain.models import StateSpaceModel
from mtdc_hinf.domain.scenario import WeightingFunction, WeightSet


def _as_system(weight: WeightingFunction) -> StateSpaceModel:
    a, b, c, d = realize_weight(weight)
    return StateSpaceModel(a=a, b=b, c=c, d=d)


class TestRealizeWeight:
    """Test cases for weighting-function realizations."""

    def test_unity(self):
        """Test that a unity weight is a static gain."""
        system = _as_system(WeightingFunction(gain=3.0))

        assert system.n_states == 0
        assert system.evaluate(5j)[0, 0] == pytest.approx(3.0)

    def test_low_pass(self):
        """Test the DC gain and the -3 dB point of the low-pass weight."""
        system = _as_system(WeightingFunction.low_pass(cutoff=100.0, gain=2.0))

        assert system.evaluate(0.0)[0, 0] == pytest.approx(2.0)
        assert abs(system.evaluate(100j)[0, 0]) == pytest.approx(2.0 / np.sqrt(2.0))

    def test_band_pass(self):
        """Test that the band-pass weight reaches its gain at the center and blocks DC."""
        system = _as_system(WeightingFunction.band_pass(bandwidth=50.0, center=2.0, gain=1.5))

        assert system.evaluate(2j)[0, 0] == pytest.approx(1.5)
        assert abs(system.evaluate(0.0)[0, 0]) == pytest.approx(0.0, abs=1e-12)

    def test_bank(self):
        """Test that a bank repeats the weight per channel."""
        a, b, c, d = weight_bank(WeightingFunction.low_pass(cutoff=10.0), 3)

        assert a.shape == (3, 3)
        assert b.shape == (3, 3)
        np.testing.assert_allclose(d, 0.0)


class TestMakeGeneralizedPlant:
    """Test cases for make_generalized_plant."""

    def test_channels(self, nominal_plant):
        """Test the channel partition of grid 1's generalized plant."""
        gp = make_generalized_plant(nominal_plant, 1, WeightSet())

        assert gp.grid == 1
        assert gp.control_names == nominal_plant.references[1]
        assert gp.disturbance_names == nominal_plant.drk_names(1)
        assert gp.measurement_names == nominal_plant.measurement_names(1) + ("g1.df:int", "g1.vdc:int")
        assert gp.integrated == ("g1.df", "g1.vdc")
        assert gp.performance_names[:4] == ("z:g1.df", "z:g1.df:int", "z:g1.vdc", "z:g1.vdc:int")
        assert gp.n_states == nominal_plant.system.n_states + 2

    def test_integral_measurement(self, nominal_plant):
        """Test that the integral channels read the integrator states."""
        gp = make_generalized_plant(nominal_plant, 2, WeightSet())
        row = gp.measurement_names.index("g2.df:int")
        column = gp.state_names.index("int:g2.df")

        assert gp.c2[row, column] == 1.0
        assert np.count_nonzero(gp.c2[row]) == 1

    def test_weighted_states(self, nominal_plant):
        """Test that low-pass weights add one state per weighted channel."""
        weights = WeightSet.uniform(WeightingFunction.low_pass(cutoff=1e3))
        gp = make_generalized_plant(nominal_plant, 3, weights)

        nd, nz, nu = len(gp.disturbance_names), 4, len(gp.control_names)
        assert gp.n_states == nominal_plant.system.n_states + 2 + nd + nz + nu

    def test_missing_grid(self, nominal_plant):
        """Test that an unknown grid raises WiringError."""
        with pytest.raises(WiringError, match="g7"):
            make_generalized_plant(nominal_plant, 7, WeightSet())

    def test_centralized(self, nominal_plant):
        """Test that the centralized plant covers every grid."""
        gp = make_centralized_plant(nominal_plant, WeightSet())

        assert gp.grid is None
        assert gp.control_names == nominal_plant.all_references
        assert len(gp.integrated) == 6
        assert gp.disturbance_names == nominal_plant.disturbances


class TestRegularize:
    """Test cases for regularize."""

    def test_noise_channels(self, nominal_plant):
        """Test that a zero D21 gets one noise input per measurement."""
        gp = make_generalized_plant(nominal_plant, 1, WeightSet())

        regular = regularize(gp, 1e-6)

        ny = len(gp.measurement_names)
        assert regular.disturbance_names[-ny:] == tuple("noise:" + name for name in gp.measurement_names)
        np.testing.assert_allclose(regular.d21[:, -ny:], 1e-3 * np.eye(ny))
        assert np.linalg.matrix_rank(regular.d21) == ny
        assert regular.performance_names == gp.performance_names

    def test_penalty_channels(self, nominal_plant):
        """Test that a strictly proper control weight gets penalty outputs."""
        weights = WeightSet(control=WeightingFunction.low_pass(cutoff=1e3))
        gp = make_generalized_plant(nominal_plant, 1, weights)

        regular = regularize(gp, 1e-4)

        nu = len(gp.control_names)
        assert regular.performance_names[-nu:] == tuple("penalty:" + name for name in gp.control_names)
        np.testing.assert_allclose(regular.d12[-nu:], 1e-2 * np.eye(nu))
        np.testing.assert_allclose(regular.c1.T @ regular.d12, 0.0, atol=1e-12)

    def test_regular_plant_unchanged(self, scalar_plant):
        """Test that an already regular plant keeps its channels."""
        regular = regularize(scalar_plant, 1e-6)

        assert regular.disturbance_names == scalar_plant.disturbance_names
        assert regular.performance_names == scalar_plant.performance_names

    def test_non_positive_epsilon(self, scalar_plant):
        """Test that epsilon must be positive."""
        with pytest.raises(ParameterError, match="regularization"):
            regularize(scalar_plant, 0.0)
