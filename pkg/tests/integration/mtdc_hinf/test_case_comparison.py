"""Integration tests comparing the control cases on the nominal plant."""

import pandas as pd
import pytest

from mtdc_hinf.application.analysis import closed_loop_spectrum, delay_margin, is_unstable, stability_fraction
from mtdc_hinf.application.disturbances import gen_regd_like, load_step
from mtdc_hinf.application.experiments import WIND_AMPLITUDE, communication_failure_study, compare_cases
from mtdc_hinf.application.strategies import strategy_for
from mtdc_hinf.domain.enums import ControlCase
from mtdc_hinf.domain.scenario import Scenario

pytestmark = [pytest.mark.integration, pytest.mark.slow]

CASE1, CASE2, CASE3 = (str(case) for case in (ControlCase.CASE1, ControlCase.CASE2, ControlCase.CASE3))


def _assert_ordered(table: pd.DataFrame, column: str) -> None:
    values = table.set_index("case")[column]
    assert values[CASE1] < values[CASE3] < values[CASE2], values.to_dict()


@pytest.fixture(scope="module")
def step_table() -> pd.DataFrame:
    return compare_cases(Scenario(disturbance=load_step()))


class TestStepResponse:
    """Test the cases against the same 0.1 pu load step in every grid."""

    def test_all_stable(self, step_table):
        """Test that every case settles."""
        assert step_table["stable"].all()

    def test_frequency_ordering(self, step_table):
        """Test that the summed peak frequency deviation orders Case 1 < Case 3 < Case 2."""
        _assert_ordered(step_table, "df_max_sum")

    def test_dc_voltage_smallest_for_case1(self, step_table):
        """Test that Case 1 has the smallest peak DC voltage deviation."""
        assert step_table.set_index("case")["vdc_max"].idxmin() == CASE1


class TestContinuousResponse:
    """Test the cases under random load and wind variation."""

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_rms_ordering(self, seed):
        """Test that the rms frequency and DC voltage deviations order Case 1 < Case 3 < Case 2."""
        scenario = Scenario(disturbance=gen_regd_like(seed, 200.0, 0.1, WIND_AMPLITUDE))

        table = compare_cases(scenario)

        _assert_ordered(table, "df_rms_sum")
        _assert_ordered(table, "vdc_rms")


class TestStability:
    """Test closed-loop stability of the designed controllers."""

    @pytest.mark.parametrize("case", [ControlCase.CASE1, ControlCase.CASE2, ControlCase.CASE3])
    def test_undelayed_loop_stable(self, nominal_plant, nominal_scenario, case):
        """Test that every case stabilizes the nominal plant without delay."""
        controllers = strategy_for(case).design(nominal_plant, nominal_scenario)

        assert not is_unstable(closed_loop_spectrum(nominal_plant, controllers.controllers))

    def test_case1_controllers_stable(self, case1_controllers):
        """Test that every Case 1 controller is itself stable."""
        assert all(report.controller_stable for report in case1_controllers.reports)
        assert all(report.closed_loop_stable for report in case1_controllers.reports)

    def test_case1_delay_margin(self, nominal_plant, case1_controllers):
        """Test that Case 1 tolerates communication delays beyond 10 ms."""
        margin = delay_margin(nominal_plant, case1_controllers.controllers)

        assert margin is None or margin > 0.01

    def test_communication_failure(self, nominal_scenario, case1_controllers):
        """Test that Case 1 stays stable under every loss of communication."""
        table = communication_failure_study(nominal_scenario, case1_controllers)

        assert table["stable"].all()
        assert set(table["condition"]) >= {"full", "none"}

    def test_parameter_uncertainty(self, nominal_plant, case1_controllers):
        """Test that at least 95% of the loops perturbed by 30% stay stable."""
        fraction = stability_fraction(nominal_plant, case1_controllers.controllers, 0.3, tuple(range(100)))

        assert fraction >= 0.95
