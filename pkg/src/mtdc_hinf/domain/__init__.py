"""
Domain layer - Core models of the MTDC-linked grid control problem.

This layer holds parameters, immutable system representations, scenario descriptions
and exceptions. It has no dependencies on other layers.
"""

from .enums import ControlCase, ConverterKind, DisturbanceKind, SweepAxis, WeightingKind
from .exceptions import (
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
from .interfaces import ICaseStrategy
from .models import (
    INTEGRAL_SUFFIX,
    BalancedRealization,
    CompositePlant,
    ControllerReduction,
    ControllerSet,
    DelayModel,
    EigenLocus,
    FeasibilityResult,
    GammaTrial,
    GeneralizedPlant,
    GridModel,
    HinfController,
    ReductionResult,
    SimulationMetrics,
    SimulationResult,
    Spectrum,
    StateSpaceModel,
    SynthesisReport,
)
from .parameters import (
    AcNetworkParams,
    ConverterParams,
    DcLine,
    DcNetworkParams,
    GridParams,
    OwfParams,
    PerUnitBase,
    PllParams,
    SgParams,
    SystemParams,
)
from .scenario import (
    DISTURBANCE_CHANNELS,
    CommunicationMask,
    DisturbanceProfile,
    PiGains,
    Scenario,
    SynthesisSettings,
    UncertaintySpec,
    WeightingFunction,
    WeightSet,
)

__all__ = [
    # Enums
    "ControlCase",
    "ConverterKind",
    "DisturbanceKind",
    "SweepAxis",
    "WeightingKind",
    # Exceptions
    "MtdcHinfException",
    "ModelValidationError",
    "NumericalError",
    "ConfigError",
    "DimensionError",
    "ParameterError",
    "TopologyError",
    "WiringError",
    "InfeasibleError",
    "NormUndefinedError",
    "NoStabilizingControllerError",
    "StabilityError",
    # Interfaces
    "ICaseStrategy",
    # Models
    "INTEGRAL_SUFFIX",
    "BalancedRealization",
    "CompositePlant",
    "ControllerReduction",
    "ControllerSet",
    "DelayModel",
    "EigenLocus",
    "FeasibilityResult",
    "GammaTrial",
    "GeneralizedPlant",
    "GridModel",
    "HinfController",
    "ReductionResult",
    "SimulationMetrics",
    "SimulationResult",
    "Spectrum",
    "StateSpaceModel",
    "SynthesisReport",
    # Parameters
    "AcNetworkParams",
    "ConverterParams",
    "DcLine",
    "DcNetworkParams",
    "GridParams",
    "OwfParams",
    "PerUnitBase",
    "PllParams",
    "SgParams",
    "SystemParams",
    # Scenario
    "DISTURBANCE_CHANNELS",
    "CommunicationMask",
    "DisturbanceProfile",
    "PiGains",
    "Scenario",
    "SynthesisSettings",
    "UncertaintySpec",
    "WeightingFunction",
    "WeightSet",
]
