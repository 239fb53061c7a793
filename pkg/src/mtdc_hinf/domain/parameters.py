"""Physical and control parameters of the MTDC-linked grids.

Defaults reproduce the nominal three-grid system with one offshore wind farm. Every
parameter class lists in ``PERTURBABLE`` the physical quantities that parametric uncertainty
studies scale, each by its own random factor; controller gains are design choices and stay fixed.
"""

import math
from typing import ClassVar, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator
from typing_extensions import Self

from mtdc_hinf.domain.enums import ConverterKind
from mtdc_hinf.domain.exceptions import ParameterError


class PerUnitBase(BaseModel):
    """Per-unit bases shared by every component."""

    model_config = ConfigDict(frozen=True)

    frequency_hz: float = Field(default=60.0, gt=0.0, description="Nominal frequency.")
    power_mva: float = Field(default=1000.0, gt=0.0, description="Power base.")
    ac_voltage_kv: float = Field(default=380.0, gt=0.0, description="AC transmission voltage base.")
    dc_voltage_kv: float = Field(default=640.0, gt=0.0, description="DC voltage base, pole to pole.")

    @property
    def omega_base(self) -> float:
        return 2.0 * math.pi * self.frequency_hz

    @property
    def ac_impedance(self) -> float:
        return self.ac_voltage_kv**2 / self.power_mva

    @property
    def dc_impedance(self) -> float:
        return self.dc_voltage_kv**2 / self.power_mva

    def inductance_mh_to_pu(self, inductance_mh: float) -> float:
        """Convert an AC-side inductance in mH to a per-unit reactance."""
        return inductance_mh * 1e-3 * self.omega_base / self.ac_impedance


class SgParams(BaseModel):
    """Aggregate synchronous generator with governor, reheat turbine and exciter."""

    model_config = ConfigDict(frozen=True)

    PERTURBABLE: ClassVar[Tuple[str, ...]] = (
        "inertia",
        "stator_resistance",
        "stator_inductance",
        "x_d",
        "x_q",
        "x_d_transient",
        "x_q_transient",
        "t_do_transient",
        "t_qo_transient",
        "t_do_subtransient",
        "t_qo_subtransient",
        "governor_time",
        "servo_time",
        "steam_chest_time",
        "reheat_time",
        "exciter_time",
    )

    rated_voltage_kv: float = Field(default=26.3, gt=0.0, description="Rated phase-to-phase voltage.")
    inertia: float = Field(default=3.5, gt=0.0, description="Inertia constant H in s.")
    stator_resistance: float = Field(default=0.0015, ge=0.0, description="R_s in pu.")
    stator_inductance: float = Field(default=0.15, gt=0.0, description="Leakage L_s in pu.")
    x_d: float = Field(default=1.8, gt=0.0, description="d-axis synchronous reactance.")
    x_q: float = Field(default=1.7, gt=0.0, description="q-axis synchronous reactance.")
    x_d_transient: float = Field(default=0.3, gt=0.0, description="d-axis transient reactance.")
    x_q_transient: float = Field(default=0.55, gt=0.0, description="q-axis transient reactance.")
    t_do_transient: float = Field(default=2.0, gt=0.0, description="T'_do in s.")
    t_qo_transient: float = Field(default=0.75, gt=0.0, description="T'_qo in s.")
    t_do_subtransient: float = Field(default=0.30, gt=0.0, description="T''_do in s.")
    t_qo_subtransient: float = Field(default=0.055, gt=0.0, description="T''_qo in s.")
    droop: float = Field(default=0.05, gt=0.0, description="Governor droop R in pu.")
    governor_time: float = Field(default=0.01, gt=0.0, description="T_g in s.")
    servo_time: float = Field(default=0.1, gt=0.0, description="Servo-motor time constant in s.")
    steam_chest_time: float = Field(default=0.3, gt=0.0, description="Steam chest time constant in s.")
    reheat_time: float = Field(default=7.0, gt=0.0, description="T_rh in s.")
    hp_fraction: float = Field(default=0.3, gt=0.0, lt=1.0, description="F_hp in pu.")
    exciter_gain: float = Field(default=200.0, gt=0.0, description="K_c in pu.")
    exciter_time: float = Field(default=0.02, gt=0.0, description="Exciter time constant in s.")
    damping: float = Field(default=5.0, ge=0.0, description="Damper-winding equivalent damping in pu.")
    load_angle: float = Field(default=0.5, gt=0.0, lt=math.pi / 2, description="Operating load angle in rad.")

    @model_validator(mode="after")
    def _check_reactances(self) -> Self:
        if not self.x_d > self.x_d_transient > self.stator_inductance:
            raise ValueError("reactances must satisfy x_d > x_d_transient > stator_inductance")
        if not self.x_q > self.x_q_transient > self.stator_inductance:
            raise ValueError("reactances must satisfy x_q > x_q_transient > stator_inductance")
        return self


class AcNetworkParams(BaseModel):
    """Aggregate AC transmission network between the generator and the converter PCC."""

    model_config = ConfigDict(frozen=True)

    PERTURBABLE: ClassVar[Tuple[str, ...]] = ("transformer_inductance", "load_damping")

    transformer_inductance: float = Field(default=0.01, gt=0.0, description="L_g in pu.")
    load_damping: float = Field(default=1.0, gt=0.0, description="Frequency sensitivity of the load in pu.")
    voltage_sensitivity: float = Field(default=0.5, gt=0.0, description="PCC voltage per unit of E'_q.")
    reactive_support: float = Field(default=0.1, ge=0.0, description="PCC voltage per unit of reactive current.")


class PllParams(BaseModel):
    """Phase-locked loop: PI on the phase error followed by a measurement lag."""

    model_config = ConfigDict(frozen=True)

    PERTURBABLE: ClassVar[Tuple[str, ...]] = ()

    kp: float = Field(default=1.061, gt=0.0, description="Proportional gain.")
    ki: float = Field(default=216.5, gt=0.0, description="Integral gain.")
    time_constant: float = Field(default=1e-3, gt=0.0, description="Measurement lag in s.")


_LCC_FIELDS = (
    "smoothing_inductance",
    "filter_capacitance",
    "firing_time_constant",
    "commutation_resistance",
    "reactive_ratio",
    "voltage_filter_time",
)


class ConverterParams(BaseModel):
    """MTDC converter terminal.

    Kind-specific fields are present exactly for their kind: GSVSC carries a DC capacitor
    and a droop gain, LCC carries the smoothing reactor and filter data, WFVSC carries a
    DC capacitor only. ``shunt_capacitance_uf`` is the lumped line shunt set by the
    system builder. The operating currents only enter the GSVSC model.
    """

    model_config = ConfigDict(frozen=True)

    PERTURBABLE: ClassVar[Tuple[str, ...]] = (
        "resistance",
        "inductance",
        "capacitance_uf",
        "smoothing_inductance",
        "filter_capacitance",
    )

    kind: ConverterKind = Field(..., description="Converter family.")
    resistance: float = Field(default=0.003, gt=0.0, description="Phase resistance R_f in pu.")
    inductance: float = Field(default=0.05, gt=0.0, description="Phase inductance L_f in pu.")
    kp: float = Field(default=0.5, ge=0.0, description="Outer-loop proportional gain.")
    ki: float = Field(default=2.0, ge=0.0, description="Outer-loop integral gain.")
    current_kp: float = Field(default=0.1326, ge=0.0, description="Inner current-loop proportional gain.")
    current_ki: float = Field(default=3.0, ge=0.0, description="Inner current-loop integral gain.")
    capacitance_uf: Optional[float] = Field(default=None, gt=0.0, description="DC capacitor in uF.")
    droop: Optional[float] = Field(default=None, gt=0.0, description="P-Vdc droop R_droop in pu.")
    smoothing_inductance: Optional[float] = Field(default=None, gt=0.0, description="LCC L_sm in pu.")
    filter_capacitance: Optional[float] = Field(default=None, gt=0.0, description="LCC C_f in pu.")
    firing_time_constant: Optional[float] = Field(default=None, gt=0.0, description="LCC firing lag in s.")
    commutation_resistance: Optional[float] = Field(default=None, gt=0.0, description="LCC commutation R in pu.")
    reactive_ratio: Optional[float] = Field(default=None, ge=0.0, description="LCC reactive per active current.")
    voltage_filter_time: Optional[float] = Field(default=None, gt=0.0, description="LCC voltage filter in s.")
    shunt_capacitance_uf: float = Field(default=0.0, ge=0.0, description="Lumped line shunt at the DC bus in uF.")
    operating_power: float = Field(default=0.0, description="GSVSC operating active current P0 in pu.")
    operating_reactive_current: float = Field(default=0.0, description="GSVSC operating reactive current Q0 in pu.")

    @model_validator(mode="after")
    def _check_kind_fields(self) -> Self:
        required = {
            ConverterKind.GSVSC: ("capacitance_uf", "droop"),
            ConverterKind.LCC: _LCC_FIELDS,
            ConverterKind.WFVSC: ("capacitance_uf",),
        }[self.kind]
        optional_fields = ("capacitance_uf", "droop") + _LCC_FIELDS
        missing = [name for name in required if getattr(self, name) is None]
        extra = [name for name in optional_fields if name not in required and getattr(self, name) is not None]
        if missing:
            raise ValueError(f"{self.kind} converter requires: {', '.join(missing)}")
        if extra:
            raise ValueError(f"{self.kind} converter does not accept: {', '.join(extra)}")
        return self

    @classmethod
    def gsvsc(cls, **overrides: float) -> "ConverterParams":
        values = {
            "kind": ConverterKind.GSVSC,
            "capacitance_uf": 200.0,
            "droop": 2.0,
            "kp": 0.5,
            "ki": 2.0,
            "operating_power": 0.4,
            "operating_reactive_current": 0.1,
        }
        return cls.model_validate({**values, **overrides})

    @classmethod
    def lcc(cls, **overrides: float) -> "ConverterParams":
        values = {
            "kind": ConverterKind.LCC,
            "kp": 0.7,
            "ki": 5.0,
            "current_kp": 0.02,
            "current_ki": 1.13,
            "smoothing_inductance": 0.02,
            "filter_capacitance": 0.1,
            "firing_time_constant": 0.002,
            "commutation_resistance": 0.1,
            "reactive_ratio": 0.5,
            "voltage_filter_time": 0.01,
        }
        return cls.model_validate({**values, **overrides})

    @classmethod
    def wfvsc(cls, **overrides: float) -> "ConverterParams":
        values = {"kind": ConverterKind.WFVSC, "capacitance_uf": 200.0, "kp": 0.5, "ki": 3.0}
        return cls.model_validate({**values, **overrides})


class OwfParams(BaseModel):
    """Aggregate PMSG offshore wind farm behind the wind-farm-side converter."""

    model_config = ConfigDict(frozen=True)

    PERTURBABLE: ClassVar[Tuple[str, ...]] = (
        "stator_resistance",
        "stator_inductance",
        "flux",
        "inertia",
    )

    pole_pairs: int = Field(default=48, gt=0, description="Pole pairs p.")
    stator_resistance: float = Field(default=0.027, gt=0.0, description="R_s in pu.")
    stator_inductance: float = Field(default=0.5131, gt=0.0, description="L_s in pu.")
    flux: float = Field(default=1.1884, gt=0.0, description="Permanent-magnet flux in pu.")
    inertia: float = Field(default=0.685, gt=0.0, description="Drivetrain inertia H in s.")
    current_kp: float = Field(default=1.361, ge=0.0, description="Machine current-loop proportional gain.")
    current_ki: float = Field(default=27.0, ge=0.0, description="Machine current-loop integral gain.")
    wind_gain: float = Field(default=0.25, gt=0.0, description="Aerodynamic torque per m/s of wind deviation.")
    aero_damping: float = Field(default=0.2, ge=0.0, description="Aerodynamic torque per unit speed deviation.")
    rated_wind_speed: float = Field(default=12.0, gt=0.0, description="Wind speed at the operating point in m/s.")
    operating_power: float = Field(default=0.5, ge=0.0, description="Operating electrical power in pu.")
    angle_leak: float = Field(default=50.0, gt=0.0, description="Bandwidth of the rotor-angle tracking in rad/s.")


class DcLine(BaseModel):
    model_config = ConfigDict(frozen=True)

    from_bus: int = Field(..., ge=1, description="Sending bus.")
    to_bus: int = Field(..., ge=1, description="Receiving bus.")
    length_km: float = Field(..., gt=0.0, description="Line length in km.")

    @model_validator(mode="after")
    def _check_distinct(self) -> Self:
        if self.from_bus == self.to_bus:
            raise ValueError(f"line connects bus {self.from_bus} to itself")
        return self

    @property
    def name(self) -> str:
        return f"i_dc{self.from_bus}{self.to_bus}"


def _default_lines() -> Tuple[DcLine, ...]:
    return (
        DcLine(from_bus=1, to_bus=2, length_km=200.0),
        DcLine(from_bus=1, to_bus=3, length_km=150.0),
        DcLine(from_bus=2, to_bus=3, length_km=150.0),
        DcLine(from_bus=3, to_bus=4, length_km=100.0),
    )


class DcNetworkParams(BaseModel):
    """Pi-section DC cable network."""

    model_config = ConfigDict(frozen=True)

    PERTURBABLE: ClassVar[Tuple[str, ...]] = (
        "resistance_per_km",
        "inductance_mh_per_km",
        "capacitance_uf_per_km",
    )

    rated_voltage_kv: float = Field(default=320.0, gt=0.0, description="Pole voltage (+/-) in kV.")
    resistance_per_km: float = Field(default=0.0139, gt=0.0, description="R_dc in ohm/km.")
    inductance_mh_per_km: float = Field(default=0.159, gt=0.0, description="L_dc in mH/km.")
    capacitance_uf_per_km: float = Field(default=0.231, gt=0.0, description="C_dc in uF/km.")
    buses: Tuple[int, ...] = Field(default=(1, 2, 3, 4), description="DC bus numbers.")
    lines: Tuple[DcLine, ...] = Field(default_factory=_default_lines, description="Lines as ordered bus pairs.")

    @model_validator(mode="after")
    def _check_lines(self) -> Self:
        unknown = sorted({bus for line in self.lines for bus in (line.from_bus, line.to_bus)} - set(self.buses))
        if unknown:
            raise ValueError(f"lines reference unknown buses: {unknown}")
        if len(set(self.buses)) != len(self.buses):
            raise ValueError("bus numbers must be unique")
        return self


class GridParams(BaseModel):
    """One AC grid: generator, network, PLL and its MTDC converter."""

    model_config = ConfigDict(frozen=True)

    grid: int = Field(..., ge=1, description="Grid index k.")
    sg: SgParams = Field(default_factory=SgParams, description="Aggregate generator.")
    network: AcNetworkParams = Field(default_factory=AcNetworkParams, description="AC network.")
    pll: PllParams = Field(default_factory=PllParams, description="PLL at the PCC.")
    converter: ConverterParams = Field(default_factory=ConverterParams.gsvsc, description="MTDC converter.")
    dc_bus: int = Field(..., ge=1, description="DC bus the converter connects to.")

    @model_validator(mode="after")
    def _check_converter(self) -> Self:
        if self.converter.kind == ConverterKind.WFVSC:
            raise ValueError("an AC grid converter must be a GSVSC or an LCC")
        return self


def _default_grids() -> Tuple[GridParams, ...]:
    return (
        GridParams(grid=1, dc_bus=1),
        GridParams(grid=2, dc_bus=2),
        GridParams(grid=3, dc_bus=3, converter=ConverterParams.lcc()),
    )


class SystemParams(BaseModel):
    """Complete parameter set of the MTDC-linked system.

    Attributes:
        lcc_dispatchable: When False, LCC power references are held constant and
            controllers cannot drive them.
    """

    model_config = ConfigDict(frozen=True)

    base: PerUnitBase = Field(default_factory=PerUnitBase, description="Per-unit bases.")
    grids: Tuple[GridParams, ...] = Field(default_factory=_default_grids, description="AC grids.")
    owf: OwfParams = Field(default_factory=OwfParams, description="Offshore wind farm.")
    owf_converter: ConverterParams = Field(default_factory=ConverterParams.wfvsc, description="Wind-farm converter.")
    owf_bus: int = Field(default=4, ge=1, description="DC bus of the wind-farm converter.")
    dc: DcNetworkParams = Field(default_factory=DcNetworkParams, description="DC network.")
    lcc_dispatchable: bool = Field(default=True, description="Controllers may drive LCC power references.")

    @model_validator(mode="after")
    def _check_system(self) -> Self:
        ids = [grid.grid for grid in self.grids]
        if len(set(ids)) != len(ids):
            raise ValueError("grid indices must be unique")
        if self.owf_converter.kind != ConverterKind.WFVSC:
            raise ValueError("the wind-farm converter must be a WFVSC")
        return self

    def with_filter_inductance(self, inductance: float) -> "SystemParams":
        """Copy with the phase inductance L_f (pu) of every AC grid converter replaced."""
        if inductance <= 0.0:
            raise ParameterError("inductance", f"must be positive, got {inductance}")
        grids = tuple(
            grid.model_copy(update={"converter": grid.converter.model_copy(update={"inductance": inductance})})
            for grid in self.grids
        )
        return self.model_copy(update={"grids": grids})
