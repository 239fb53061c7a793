"""JSON scenario files.

A scenario file is a JSON object with ``"schema": 1`` and optional sections. Every
section defaults to the nominal scenario; the ``system`` section overrides individual
parameters of the default system, component by component.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from mtdc_hinf.application.disturbances import gen_regd_like, load_step, square_wave, step_profile, validation_step
from mtdc_hinf.domain.enums import ControlCase, SweepAxis, WeightingKind
from mtdc_hinf.domain.exceptions import ConfigError
from mtdc_hinf.domain.models import DelayModel
from mtdc_hinf.domain.parameters import SystemParams
from mtdc_hinf.domain.scenario import (
    CommunicationMask,
    DisturbanceProfile,
    PiGains,
    Scenario,
    SynthesisSettings,
    UncertaintySpec,
    WeightingFunction,
    WeightSet,
)
from mtdc_hinf.infrastructure.persistence.csv_io import read_disturbance_csv

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class WeightingConfig(_Section):
    kind: WeightingKind = WeightingKind.UNITY
    gain: float = Field(default=1.0, gt=0.0)
    cutoff: Optional[float] = Field(default=None, gt=0.0)
    bandwidth: Optional[float] = Field(default=None, gt=0.0)
    center: Optional[float] = Field(default=None, gt=0.0)

    def build(self) -> WeightingFunction:
        if self.kind == WeightingKind.LOW_PASS:
            return WeightingFunction.low_pass(cutoff=self.cutoff or 1e3, gain=self.gain)
        if self.kind == WeightingKind.BAND_PASS:
            bandwidth = self.bandwidth or 1e3
            return WeightingFunction.band_pass(bandwidth=bandwidth, center=self.center or 1.0, gain=self.gain)
        return WeightingFunction(gain=self.gain)


class WeightsConfig(_Section):
    performance: WeightingConfig = Field(default_factory=WeightingConfig)
    control: WeightingConfig = Field(default_factory=WeightingConfig)
    disturbance: WeightingConfig = Field(default_factory=WeightingConfig)

    def build(self) -> WeightSet:
        return WeightSet(
            performance=self.performance.build(),
            control=self.control.build(),
            disturbance=self.disturbance.build(),
        )


class UncertaintyConfig(_Section):
    level: float = Field(default=0.0, ge=0.0, le=1.0)
    seed: int = Field(default=0, ge=0)
    groups: Optional[List[str]] = None

    def build(self, seed: Optional[int]) -> UncertaintySpec:
        values: Dict[str, Any] = {"level": self.level, "seed": self.seed if seed is None else seed}
        if self.groups is not None:
            values["groups"] = frozenset(self.groups)
        return UncertaintySpec(**values)


class LinkDelayConfig(_Section):
    receiver: int = Field(..., ge=1)
    sender: int = Field(..., ge=1)
    delay: float = Field(..., ge=0.0)


class DelayConfig(_Section):
    delay: float = Field(default=0.0, ge=0.0)
    link_delays: List[LinkDelayConfig] = Field(default_factory=list)
    delay_all_measurements: bool = False

    def build(self) -> DelayModel:
        return DelayModel(
            delay=self.delay,
            link_delays={(link.receiver, link.sender): link.delay for link in self.link_delays},
            delay_all_measurements=self.delay_all_measurements,
        )


class DisturbanceConfig(_Section):
    """Which profile generator to run and its arguments.

    ``step`` uses ``amplitudes`` (dPL1, dPL2, dPL3, dVw) or one ``amplitude`` on every load,
    ``validation`` is the droop-only two-load step, ``square`` alternates load steps, ``regd``
    is the seeded regulation-like series and ``csv`` reads ``t,dPL1,dPL2,dPL3,dVw`` samples.
    """

    kind: Literal["step", "validation", "square", "regd", "csv"] = "step"
    amplitude: float = 0.1
    amplitudes: Optional[Tuple[float, float, float, float]] = None
    onset: float = Field(default=10.0, ge=0.0)
    duration: Optional[float] = Field(default=None, gt=0.0)
    sample_period: float = Field(default=0.01, gt=0.0)
    half_period: float = Field(default=40.0, gt=0.0)
    wind_amplitude: Optional[float] = None
    seed: int = Field(default=0, ge=0)
    path: Optional[str] = None

    def build(self, base: Path, seed: Optional[int]) -> DisturbanceProfile:
        if self.kind == "validation":
            return validation_step(self.duration or 90.0)
        if self.kind == "square":
            return square_wave(self.amplitude, self.half_period, self.duration or 200.0, self.sample_period)
        if self.kind == "regd":
            chosen = self.seed if seed is None else seed
            return gen_regd_like(chosen, self.duration or 200.0, self.amplitude, self.wind_amplitude)
        if self.kind == "csv":
            if not self.path:
                raise ConfigError(str(base), "disturbance kind 'csv' needs a 'path'")
            path = Path(self.path)
            return read_disturbance_csv(path if path.is_absolute() else base.parent / path)
        if self.amplitudes is None:
            return load_step(self.amplitude, self.onset, self.duration or 60.0)
        return step_profile(self.amplitudes, self.onset, self.duration or 60.0, self.sample_period)


class SynthesisConfig(_Section):
    tolerance: float = Field(default=1e-3, gt=0.0, lt=1.0)
    backoff: float = Field(default=0.05, ge=0.0)
    regularization: float = Field(default=1e-6, gt=0.0)
    gamma_hi: Optional[float] = Field(default=None, gt=0.0)
    gamma_lo: Optional[float] = Field(default=None, gt=0.0)
    delay_target: float = Field(default=0.02, ge=0.0)


class PiGainsConfig(_Section):
    kp: float = Field(default=0.5, gt=0.0)
    ki: float = Field(default=2.0, gt=0.0)


class AnalysisConfig(_Section):
    axis: SweepAxis = SweepAxis.FILTER_INDUCTANCE
    values: List[float] = Field(default_factory=lambda: [1.0, 5.0, 10.0, 20.0, 40.0, 60.0, 80.0, 100.0])
    t_hi: float = Field(default=0.6, gt=0.0)
    levels: List[float] = Field(default_factory=lambda: [0.1, 0.2, 0.3, 0.4, 0.5])
    seeds: int = Field(default=200, ge=1, description="Number of seeded perturbations per level.")


class WeightingStudyConfig(_Section):
    kind: WeightingKind = WeightingKind.LOW_PASS
    values: List[float] = Field(default_factory=lambda: [1e2, 1e3, 1e4, 1e5])


class ScenarioConfig(_Section):
    """Top level of a scenario file."""

    schema_version: Literal[1] = Field(default=SCHEMA_VERSION, alias="schema")
    system: Dict[str, Any] = Field(default_factory=dict)
    case: ControlCase = ControlCase.CASE1
    weights: WeightsConfig = Field(default_factory=WeightsConfig)
    uncertainty: UncertaintyConfig = Field(default_factory=UncertaintyConfig)
    delay: DelayConfig = Field(default_factory=DelayConfig)
    comm_mask: List[Tuple[int, int]] = Field(default_factory=list)
    disturbance: DisturbanceConfig = Field(default_factory=DisturbanceConfig)
    sample_period: float = Field(default=1e-3, gt=0.0)
    duration: Optional[float] = Field(default=None, gt=0.0)
    reduction_threshold: Optional[float] = Field(default=0.999, gt=0.0, le=1.0)
    synthesis: SynthesisConfig = Field(default_factory=SynthesisConfig)
    pi_gains: PiGainsConfig = Field(default_factory=PiGainsConfig)
    analysis: AnalysisConfig = Field(default_factory=AnalysisConfig)
    weighting_study: WeightingStudyConfig = Field(default_factory=WeightingStudyConfig)


class LoadedScenario(BaseModel):
    """A scenario together with the study settings of its file."""

    model_config = ConfigDict(frozen=True)

    scenario: Scenario
    analysis: AnalysisConfig
    weighting_study: WeightingStudyConfig
    duration: Optional[float] = None
    seed: Optional[int] = None


def _merge(default: Any, override: Any, path: str, unknown: List[str]) -> Any:
    """Overlay ``override`` on the JSON-mode dump of a default model, collecting unknown keys."""
    if isinstance(default, dict) and isinstance(override, dict):
        merged = dict(default)
        for key, value in override.items():
            if key not in default:
                unknown.append(f"{path}.{key}")
                continue
            merged[key] = _merge(default[key], value, f"{path}.{key}", unknown)
        return merged
    if isinstance(default, list) and isinstance(override, list):
        return [
            (
                _merge(default[index], value, f"{path}[{index}]", unknown)
                if index < len(default) and isinstance(value, dict)
                else value
            )
            for index, value in enumerate(override)
        ]
    return override


def system_from_overrides(overrides: Dict[str, Any]) -> SystemParams:
    """Default system with ``overrides`` applied.

    Raises:
        ValueError: If an override names a parameter the system does not have.
        ValidationError: If an overridden value is invalid.
    """
    unknown: List[str] = []
    merged = _merge(SystemParams().model_dump(mode="json"), overrides, "system", unknown)
    if unknown:
        raise ValueError(f"unknown system parameters: {', '.join(unknown)}")
    return SystemParams.model_validate(merged)


def build_scenario(config: ScenarioConfig, source: Path, seed: Optional[int] = None) -> LoadedScenario:
    """Turn a parsed scenario file into domain objects; ``seed`` overrides every stochastic seed."""
    mask = CommunicationMask(failed=frozenset((int(receiver), int(sender)) for receiver, sender in config.comm_mask))
    scenario = Scenario(
        system=system_from_overrides(config.system),
        case=config.case,
        weights=config.weights.build(),
        uncertainty=config.uncertainty.build(seed),
        delay=config.delay.build(),
        comm_mask=mask,
        disturbance=config.disturbance.build(source, seed),
        sample_period=config.sample_period,
        reduction_threshold=config.reduction_threshold,
        synthesis=SynthesisSettings(**config.synthesis.model_dump()),
        pi_gains=PiGains(**config.pi_gains.model_dump()),
    )
    return LoadedScenario(
        scenario=scenario,
        analysis=config.analysis,
        weighting_study=config.weighting_study,
        duration=config.duration,
        seed=seed,
    )


def load_scenario(path: Union[str, Path], seed: Optional[int] = None) -> LoadedScenario:
    """Read and validate a scenario file.

    Raises:
        ConfigError: If the file is missing, is not JSON, has another schema version
            or fails validation; the message names the path and the offending keys.
    """
    source = Path(path)
    if not source.is_file():
        raise ConfigError(str(source), "file not found")
    try:
        data = json.loads(source.read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as error:
        raise ConfigError(str(source), f"not valid JSON ({error})") from error
    if not isinstance(data, dict):
        raise ConfigError(str(source), "top level must be an object")
    if data.get("schema") != SCHEMA_VERSION:
        raise ConfigError(str(source), f"unsupported schema {data.get('schema')!r}, expected {SCHEMA_VERSION}")

    try:
        config = ScenarioConfig.model_validate(data)
        loaded = build_scenario(config, source, seed)
    except (ValidationError, ValueError) as error:
        raise ConfigError(str(source), str(error)) from error
    logger.info("Loaded scenario %s (case %s)", source, loaded.scenario.case)
    return loaded


def default_scenario(seed: Optional[int] = None) -> LoadedScenario:
    """The nominal scenario, as produced by ``{"schema": 1}``."""
    return build_scenario(ScenarioConfig(), Path("."), seed)
