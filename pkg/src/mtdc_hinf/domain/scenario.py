"""Declarative experiment description: weights, uncertainty, disturbances and settings."""

from typing import FrozenSet, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from typing_extensions import Self

from mtdc_hinf.domain.enums import ControlCase, DisturbanceKind, WeightingKind
from mtdc_hinf.domain.models import DelayModel, Matrix
from mtdc_hinf.domain.parameters import SystemParams

UNCERTAINTY_GROUPS = frozenset({"a_e", "b_rek", "b_drk", "c_tk"})
DISTURBANCE_CHANNELS = ("dpl1", "dpl2", "dpl3", "dvw")


class WeightingFunction(BaseModel):
    """Scalar frequency weight applied channel-wise.

    unity: W(s) = gain. low_pass: W(s) = gain * wc / (s + wc).
    band_pass: W(s) = gain * B s / (s^2 + B s + w0^2).
    """

    model_config = ConfigDict(frozen=True)

    kind: WeightingKind = Field(default=WeightingKind.UNITY, description="Filter shape.")
    gain: float = Field(default=1.0, gt=0.0, description="Static or pass-band gain.")
    cutoff: Optional[float] = Field(default=None, gt=0.0, description="Low-pass cutoff in rad/s.")
    center: Optional[float] = Field(default=None, gt=0.0, description="Band-pass center in rad/s.")
    bandwidth: Optional[float] = Field(default=None, gt=0.0, description="Band-pass bandwidth in rad/s.")

    @model_validator(mode="after")
    def _check_kind(self) -> Self:
        if self.kind == WeightingKind.LOW_PASS and self.cutoff is None:
            raise ValueError("low-pass weights need a cutoff")
        if self.kind == WeightingKind.BAND_PASS and (self.center is None or self.bandwidth is None):
            raise ValueError("band-pass weights need a center and a bandwidth")
        return self

    @classmethod
    def unity(cls) -> "WeightingFunction":
        return cls()

    @classmethod
    def low_pass(cls, cutoff: float, gain: float = 1.0) -> "WeightingFunction":
        return cls(kind=WeightingKind.LOW_PASS, cutoff=cutoff, gain=gain)

    @classmethod
    def band_pass(cls, bandwidth: float, center: float = 1.0, gain: float = 1.0) -> "WeightingFunction":
        return cls(kind=WeightingKind.BAND_PASS, bandwidth=bandwidth, center=center, gain=gain)


class WeightSet(BaseModel):
    """Weights on the performance outputs Z_e, the references r and the disturbances d."""

    model_config = ConfigDict(frozen=True)

    performance: WeightingFunction = Field(default_factory=WeightingFunction.unity, description="W_e.")
    control: WeightingFunction = Field(default_factory=WeightingFunction.unity, description="W_u.")
    disturbance: WeightingFunction = Field(default_factory=WeightingFunction.unity, description="W_d.")

    @classmethod
    def uniform(cls, weight: WeightingFunction) -> "WeightSet":
        return cls(performance=weight, control=weight, disturbance=weight)


class UncertaintySpec(BaseModel):
    """Multiplicative parametric uncertainty of level delta."""

    model_config = ConfigDict(frozen=True)

    level: float = Field(default=0.0, ge=0.0, le=1.0, description="Fraction delta.")
    seed: int = Field(default=0, ge=0, description="Random seed.")
    groups: FrozenSet[str] = Field(
        default=UNCERTAINTY_GROUPS, description="Plant matrices taken from the perturbed plant."
    )

    @model_validator(mode="after")
    def _check_groups(self) -> Self:
        unknown = sorted(self.groups - UNCERTAINTY_GROUPS)
        if unknown:
            raise ValueError(f"unknown uncertainty groups: {unknown}")
        return self


class CommunicationMask(BaseModel):
    """Failed directed links (receiving grid, sending grid)."""

    model_config = ConfigDict(frozen=True)

    failed: FrozenSet[Tuple[int, int]] = Field(default_factory=frozenset, description="Failed directed links.")

    def is_failed(self, receiver: int, sender: int) -> bool:
        return (receiver, sender) in self.failed

    @classmethod
    def between(cls, first: int, second: int) -> "CommunicationMask":
        """Both directions of the link between two grids fail."""
        return cls(failed=frozenset({(first, second), (second, first)}))

    @classmethod
    def isolated(cls, grids: Tuple[int, ...]) -> "CommunicationMask":
        """No grid receives anything from any other."""
        return cls(failed=frozenset((k, j) for k in grids for j in grids if k != j))


class DisturbanceProfile(BaseModel):
    """Piecewise-constant disturbance series for w = [dPL1, dPL2, dPL3, dVw].

    ``values[l]`` holds from ``l * sample_period`` until the next sample.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: DisturbanceKind = Field(..., description="How the profile was produced.")
    sample_period: float = Field(..., gt=0.0, description="Spacing of the stored samples in s.")
    duration: float = Field(..., gt=0.0, description="Profile length in s.")
    values: Matrix = Field(..., description="Samples, one row per instant and one column per channel.")
    channels: Tuple[str, ...] = Field(default=DISTURBANCE_CHANNELS, description="Channel names.")
    onset: Optional[float] = Field(default=None, ge=0.0, description="Step onset in s.")
    amplitudes: Optional[Tuple[float, ...]] = Field(default=None, description="Step amplitudes per channel.")
    synthetic: bool = Field(default=True, description="Generated rather than measured.")

    @model_validator(mode="after")
    def _check_series(self) -> Self:
        expected = int(np.ceil(self.duration / self.sample_period - 1e-9))
        if self.values.shape != (expected, len(self.channels)):
            raise ValueError(f"values must have shape ({expected}, {len(self.channels)}), got {self.values.shape}")
        if self.kind == DisturbanceKind.STEP and (self.onset is None or self.amplitudes is None):
            raise ValueError("step profiles carry an onset and amplitudes")
        return self

    def sample(self, time: np.ndarray) -> np.ndarray:
        """Zero-order-hold the profile onto arbitrary instants (held at the last sample past the end)."""
        index = np.floor(np.asarray(time) / self.sample_period + 1e-9).astype(int)
        index = np.clip(index, 0, self.values.shape[0] - 1)
        return self.values[index, :]

    def scaled(self, factor: float) -> "DisturbanceProfile":
        amplitudes = None if self.amplitudes is None else tuple(factor * value for value in self.amplitudes)
        return DisturbanceProfile.model_validate(
            {**self.model_dump(), "values": self.values * factor, "amplitudes": amplitudes}
        )


class SynthesisSettings(BaseModel):
    model_config = ConfigDict(frozen=True)

    tolerance: float = Field(default=1e-3, gt=0.0, lt=1.0, description="Relative bisection tolerance.")
    backoff: float = Field(default=0.05, ge=0.0, description="Relative margin above the smallest feasible gamma.")
    regularization: float = Field(default=1e-6, gt=0.0, description="Epsilon for singular D12 or D21.")
    gamma_hi: Optional[float] = Field(default=None, gt=0.0, description="Known feasible level.")
    gamma_lo: Optional[float] = Field(default=None, gt=0.0, description="Known infeasible level.")
    delay_target: float = Field(
        default=0.02, ge=0.0, description="Delay each decentralized controller must tolerate alone; 0 skips it."
    )


class PiGains(BaseModel):
    """Gains of the frequency PI baseline, in pu of power per pu of frequency."""

    model_config = ConfigDict(frozen=True)

    kp: float = Field(default=0.5, gt=0.0, description="Proportional gain.")
    ki: float = Field(default=2.0, gt=0.0, description="Integral gain.")


class Scenario(BaseModel):
    """One experiment on the MTDC-linked system."""

    model_config = ConfigDict(frozen=True)

    system: SystemParams = Field(default_factory=SystemParams, description="Plant parameters.")
    case: ControlCase = Field(default=ControlCase.CASE1, description="Control strategy.")
    weights: WeightSet = Field(default_factory=WeightSet, description="Synthesis weights.")
    uncertainty: UncertaintySpec = Field(default_factory=UncertaintySpec, description="Plant perturbation.")
    delay: DelayModel = Field(default_factory=DelayModel, description="Communication delay.")
    comm_mask: CommunicationMask = Field(default_factory=CommunicationMask, description="Failed links.")
    disturbance: DisturbanceProfile = Field(..., description="Disturbance profile.")
    sample_period: float = Field(default=1e-3, gt=0.0, description="Simulation step in s.")
    reduction_threshold: Optional[float] = Field(
        default=0.999, gt=0.0, le=1.0, description="Energy threshold for controller reduction, None keeps full order."
    )
    synthesis: SynthesisSettings = Field(default_factory=SynthesisSettings, description="Gamma-iteration settings.")
    pi_gains: PiGains = Field(default_factory=PiGains, description="Case 2 gains.")

    @model_validator(mode="after")
    def _check_sampling(self) -> Self:
        if not self.delay.is_zero and self.sample_period > 1e-3:
            raise ValueError("delay scenarios need a sample period of at most 1 ms")
        return self
