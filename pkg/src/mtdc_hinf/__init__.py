"""
mtdc-hinf: Decentralized H-infinity frequency regulation for hybrid MTDC-linked AC grids.

Public API exports for the mtdc-hinf package.
"""

# Application exports
from mtdc_hinf.application import (
    build_plant,
    compare_cases,
    gamma_iterate,
    make_generalized_plant,
    reduce_controllers,
    simulate,
    strategy_for,
)

# Domain exports
from mtdc_hinf.domain import (
    ControlCase,
    ModelValidationError,
    MtdcHinfException,
    NumericalError,
    Scenario,
    SystemParams,
)

__version__ = "0.1.0"

__all__ = [
    # Pipeline
    "build_plant",
    "make_generalized_plant",
    "gamma_iterate",
    "reduce_controllers",
    "strategy_for",
    "simulate",
    "compare_cases",
    # Models
    "ControlCase",
    "Scenario",
    "SystemParams",
    # Exceptions
    "MtdcHinfException",
    "ModelValidationError",
    "NumericalError",
]
