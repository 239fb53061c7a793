"""Unit tests for DGKF feasibility and gamma-iteration on a scalar plant.

For x' = x + d1 + u, z = [x; u], y = x + d2 the state-feedback Riccati solution is
X(gamma) = (1 + sqrt(2 - gamma^-2)) / (1 - gamma^-2) for gamma > 1, Y equals X by
symmetry, and the coupling condition X < gamma first holds at gamma = 1 + sqrt(3).
"""

import numpy as np
import pytest

from mtdc_hinf.application.hinf_synthesis import (
    GAMMA_STEP,
    central_controller,
    check_feasibility,
    closed_loop_system,
    gamma_iterate,
    synthesize_core,
)
from mtdc_hinf.application.numerics import eigenvalues, hinf_norm
from mtdc_hinf.domain.exceptions import InfeasibleError, NoStabilizingControllerError, ParameterError
from mtdc_hinf.domain.models import GeneralizedPlant

GAMMA_OPT = 1.0 + np.sqrt(3.0)


def _riccati(gamma: float) -> float:
    inverse_square = gamma**-2
    return (1.0 + np.sqrt(2.0 - inverse_square)) / (1.0 - inverse_square)


class TestCheckFeasibility:
    """Test cases for check_feasibility."""

    def test_feasible_level(self, scalar_plant):
        """Test the closed-form Riccati solutions at a feasible level."""
        result = check_feasibility(scalar_plant, 4.0)

        assert result.feasible
        assert result.x[0, 0] == pytest.approx(_riccati(4.0), rel=1e-8)
        assert result.y[0, 0] == pytest.approx(_riccati(4.0), rel=1e-8)
        assert result.rho == pytest.approx(_riccati(4.0) ** 2, rel=1e-8)
        assert result.residual_x < 1e-10
        assert result.reason is None

    def test_coupling_failure(self, scalar_plant):
        """Test a level where both Riccati equations solve but coupling fails."""
        result = check_feasibility(scalar_plant, 2.0)

        assert result.x_ok
        assert result.y_ok
        assert not result.coupling_ok
        assert not result.feasible
        assert "spectral radius" in result.reason

    def test_riccati_failure(self, scalar_plant):
        """Test that a level below one fails the X condition."""
        result = check_feasibility(scalar_plant, 0.5)

        assert not result.x_ok
        assert not result.feasible
        assert result.reason.startswith("X")

    def test_non_positive_gamma(self, scalar_plant):
        """Test that gamma must be positive."""
        with pytest.raises(ParameterError, match="gamma"):
            check_feasibility(scalar_plant, 0.0)

    def test_singular_d12(self, scalar_plant):
        """Test that a plant with a rank-deficient D12 is rejected."""
        singular = GeneralizedPlant.model_validate({**scalar_plant.model_dump(), "d12": np.zeros((2, 1))})

        with pytest.raises(ParameterError, match="rank deficient"):
            check_feasibility(singular, 4.0)

    def test_nonzero_d11(self, scalar_plant):
        """Test that a nonzero D11 is rejected."""
        direct = GeneralizedPlant.model_validate({**scalar_plant.model_dump(), "d11": [[0.5, 0.0], [0.0, 0.0]]})

        with pytest.raises(ParameterError, match="d11"):
            check_feasibility(direct, 4.0)


class TestCentralController:
    """Test cases for the central controller and the closed loop."""

    def test_closed_loop_meets_level(self, scalar_plant):
        """Test that the central controller stabilizes and achieves a norm below gamma."""
        result = check_feasibility(scalar_plant, 4.0)

        controller = central_controller(scalar_plant, result)
        loop = closed_loop_system(scalar_plant, controller)

        assert controller.n_states == 1
        assert controller.input_names == ("y",)
        assert controller.output_names == ("u",)
        np.testing.assert_allclose(controller.d, 0.0)
        assert eigenvalues(loop.a).is_stable()
        assert hinf_norm(loop)[0] < 4.0

    def test_infeasible_level(self, scalar_plant):
        """Test that no controller is realized at an infeasible level."""
        with pytest.raises(InfeasibleError):
            central_controller(scalar_plant, check_feasibility(scalar_plant, 2.0))


class TestGammaIteration:
    """Test cases for synthesize_core and gamma_iterate."""

    def test_converges_to_optimum(self, scalar_plant):
        """Test that bisection brackets the optimal level within tolerance."""
        _, report = synthesize_core(scalar_plant, tolerance=1e-3)

        assert report.gamma_opt == pytest.approx(GAMMA_OPT, rel=2e-3)
        assert report.gamma_opt >= GAMMA_OPT * (1.0 - 1e-9)
        assert check_feasibility(scalar_plant, report.gamma_opt).feasible
        assert not check_feasibility(scalar_plant, report.gamma_opt * (1.0 - 2e-3)).feasible

    def test_bracket_from_one(self, scalar_plant):
        """Test that the search starts at one and doubles until feasible."""
        _, report = synthesize_core(scalar_plant)

        tested = [trial.gamma for trial in report.trials]
        assert tested[:3] == [1.0, 2.0, 4.0]
        assert [trial.feasible for trial in report.trials[:3]] == [False, False, True]

    def test_accepted_sequence_non_increasing(self, scalar_plant):
        """Test that accepted levels never increase."""
        _, report = synthesize_core(scalar_plant)

        assert report.gamma_sequence[0] == 4.0
        assert list(report.gamma_sequence) == sorted(report.gamma_sequence, reverse=True)
        assert report.gamma_sequence[-1] == report.gamma_opt

    def test_backoff(self, scalar_plant):
        """Test that the controller is realized above the optimum and meets its level."""
        core, report = synthesize_core(scalar_plant, backoff=0.05)

        assert report.gamma_final == pytest.approx(1.05 * report.gamma_opt)
        assert report.closed_loop_stable
        assert report.norm_below_gamma
        assert report.controller_order == core.n_states == 1

    def test_known_bracket(self, scalar_plant):
        """Test that a supplied bracket skips the doubling search."""
        _, report = synthesize_core(scalar_plant, gamma_hi=3.0, gamma_lo=2.5)

        assert report.trials[0].gamma == 3.0
        assert report.gamma_opt == pytest.approx(GAMMA_OPT, rel=2e-3)

    @pytest.mark.parametrize("tolerance", [0.0, 1.0])
    def test_tolerance_range(self, scalar_plant, tolerance):
        """Test that the tolerance must lie in (0, 1)."""
        with pytest.raises(ParameterError, match="tolerance"):
            synthesize_core(scalar_plant, tolerance=tolerance)

    def test_negative_backoff(self, scalar_plant):
        """Test that the backoff must be non-negative."""
        with pytest.raises(ParameterError, match="backoff"):
            synthesize_core(scalar_plant, backoff=-0.1)

    def test_unstabilizable(self, scalar_plant):
        """Test that a plant the control cannot reach raises NoStabilizingControllerError."""
        blind = GeneralizedPlant.model_validate({**scalar_plant.model_dump(), "b2": [[0.0]]})

        with pytest.raises(NoStabilizingControllerError) as error:
            synthesize_core(blind)

        assert error.value.grid == 1

    def test_gamma_iterate_wraps_controller(self, scalar_plant):
        """Test that gamma_iterate returns a grid controller at the final level."""
        controller, report = gamma_iterate(scalar_plant, backoff=0.05)

        assert controller.grid == 1
        assert controller.gamma == report.gamma_final
        assert controller.input_names == scalar_plant.measurement_names
        assert controller.output_names == scalar_plant.control_names

    def test_gamma_iterate_needs_grid(self, scalar_plant):
        """Test that decentralized synthesis rejects a centralized plant."""
        central = scalar_plant.model_copy(update={"grid": None})

        with pytest.raises(ParameterError, match="grid"):
            gamma_iterate(central)


def _parity_plant() -> GeneralizedPlant:
    """(s - 1) / ((s - 2)(s + 3)) from u to y: every stabilizing controller is itself unstable."""
    return GeneralizedPlant(
        a=[[0.0, 1.0], [6.0, -1.0]],
        b1=[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
        b2=[[0.0], [1.0]],
        c1=[[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]],
        c2=[[-1.0, 1.0]],
        d11=np.zeros((3, 3)),
        d12=[[0.0], [0.0], [1.0]],
        d21=[[0.0, 0.0, 1.0]],
        d22=[[0.0]],
        state_names=("x1", "x2"),
        disturbance_names=("d1", "d2", "n"),
        control_names=("u",),
        performance_names=("z1", "z2", "zu"),
        measurement_names=("y",),
        grid=1,
    )


class TestControllerRealization:
    """Test cases for the level at which the controller is realized."""

    def test_controller_is_hurwitz(self, scalar_plant):
        """Test that the realized controller state matrix is Hurwitz and recorded as such."""
        core, report = synthesize_core(scalar_plant, backoff=0.05)

        assert report.controller_stable
        assert eigenvalues(core.a).is_stable()

    def test_rejected_level_raises_gamma(self, scalar_plant):
        """Test that a level refused by the caller's check moves the realization one step up."""
        calls = []

        def accept_second(core):
            calls.append(core)
            return None if len(calls) > 1 else "refused"

        _, report = synthesize_core(scalar_plant, backoff=0.05, accept=accept_second)

        assert len(calls) == 2
        assert report.gamma_final == pytest.approx(1.05 * GAMMA_STEP * report.gamma_opt)
        assert report.gamma_sequence[-1] == report.gamma_opt

    def test_no_accepted_level(self, scalar_plant):
        """Test that a check refusing every level raises NoStabilizingControllerError."""
        with pytest.raises(NoStabilizingControllerError):
            synthesize_core(scalar_plant, accept=lambda core: "refused")

    def test_unstable_controller_rejected(self):
        """Test that a plant only unstable controllers stabilize yields no controller."""
        with pytest.raises(NoStabilizingControllerError) as error:
            synthesize_core(_parity_plant(), backoff=0.05)

        assert error.value.grid == 1

    def test_unstable_controller_allowed(self):
        """Test that the Hurwitz requirement can be lifted, giving a stabilizing but unstable controller."""
        core, report = synthesize_core(_parity_plant(), backoff=0.05, stable_controller=False)

        assert report.closed_loop_stable
        assert not report.controller_stable
        assert not eigenvalues(core.a).is_stable()
