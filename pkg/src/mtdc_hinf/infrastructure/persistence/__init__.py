"""
Persistence module.

JSON scenario loading and CSV result tables.
"""

from .config_loader import LoadedScenario, ScenarioConfig, default_scenario, load_scenario
from .csv_io import read_disturbance_csv, write_controller, write_model, write_table, write_timeseries

__all__ = [
    # Scenarios
    "ScenarioConfig",
    "LoadedScenario",
    "load_scenario",
    "default_scenario",
    # Tables
    "write_table",
    "write_timeseries",
    "write_controller",
    "write_model",
    "read_disturbance_csv",
]
