"""Linearized component models of the hybrid MTDC-linked system.

Each builder returns a ``StateSpaceModel`` whose channels carry a component prefix
(``sg.``, ``net.``, ``vsc.``, ``lcc.``, ``owf.``, ``dc.``). Time is in seconds and
every other quantity in per unit, so rate equations of electrical states carry the
base angular frequency explicitly. Power and current deviations coincide because
every voltage magnitude sits at 1 pu at the operating point, except at the grid-side
VSC, whose AC power also carries its operating currents.
"""

import logging
import math
from typing import Dict, Mapping, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from mtdc_hinf.domain.enums import ConverterKind
from mtdc_hinf.domain.exceptions import ParameterError, TopologyError
from mtdc_hinf.domain.models import StateSpaceModel
from mtdc_hinf.domain.parameters import (
    AcNetworkParams,
    ConverterParams,
    DcNetworkParams,
    OwfParams,
    PerUnitBase,
    PllParams,
    SgParams,
)

logger = logging.getLogger(__name__)

SG_STATES = (
    "e_q_t",
    "e_d_t",
    "psi_1d",
    "psi_2q",
    "delta",
    "omega",
    "x_gov1",
    "x_gov2",
    "x_tur1",
    "x_tur2",
    "v_fd",
)
VSC_STATES = ("i_d", "i_q", "v_dc", "n_d", "n_q", "m_d", "m_q")
LCC_STATES = ("i_d", "i_q", "v_cd", "v_cq", "i_dco", "v_dc", "m", "theta", "n")
OWF_STATES = ("omega_e", "theta_e", "i_md", "i_mq", "v_dc", "m", "n_d", "n_q")


class _Realization:
    """Accumulates linear rate and output equations written against channel names."""

    def __init__(self, prefix: str, states: Sequence[str], inputs: Sequence[str], outputs: Sequence[str]) -> None:
        overlap = set(states) & set(inputs)
        if overlap:
            raise ValueError(f"state and input names overlap: {sorted(overlap)}")
        self.prefix = prefix
        self.states = {name: index for index, name in enumerate(states)}
        self.inputs = {name: index for index, name in enumerate(inputs)}
        self.outputs = {name: index for index, name in enumerate(outputs)}
        self.a = np.zeros((len(states), len(states)))
        self.b = np.zeros((len(states), len(inputs)))
        self.c = np.zeros((len(outputs), len(states)))
        self.d = np.zeros((len(outputs), len(inputs)))

    def rate(self, state: str, terms: Mapping[str, float], scale: float = 1.0) -> None:
        """d(state)/dt += scale * sum(coefficient * signal)."""
        row = self.states[state]
        for name, coefficient in terms.items():
            if name in self.states:
                self.a[row, self.states[name]] += scale * coefficient
            else:
                self.b[row, self.inputs[name]] += scale * coefficient

    def output(self, output: str, terms: Mapping[str, float]) -> None:
        row = self.outputs[output]
        for name, coefficient in terms.items():
            if name in self.states:
                self.c[row, self.states[name]] += coefficient
            else:
                self.d[row, self.inputs[name]] += coefficient

    def build(self) -> StateSpaceModel:
        return StateSpaceModel(
            a=self.a,
            b=self.b,
            c=self.c,
            d=self.d,
            state_names=tuple(self.prefix + name for name in self.states),
            input_names=tuple(self.prefix + name for name in self.inputs),
            output_names=tuple(self.prefix + name for name in self.outputs),
        )


def _scaled(terms: Mapping[str, float], factor: float) -> Dict[str, float]:
    return {name: factor * value for name, value in terms.items()}


def _merge(*groups: Mapping[str, float]) -> Dict[str, float]:
    merged: Dict[str, float] = {}
    for group in groups:
        for name, value in group.items():
            merged[name] = merged.get(name, 0.0) + value
    return merged


def synchronizing_coefficient(p: SgParams, tie_reactance: float) -> float:
    """Electrical power per radian of rotor angle against the aggregate bus."""
    impedance = math.hypot(p.stator_resistance, p.x_d_transient + tie_reactance)
    return math.cos(p.load_angle) / impedance


def build_sg(p: SgParams, base: PerUnitBase = PerUnitBase(), tie_reactance: float = 0.01) -> StateSpaceModel:
    """Aggregate synchronous generator with governor, reheat turbine and exciter.

    Inputs ``pg_ref`` and ``et_ref`` are the generation and terminal-voltage references;
    ``e_bus`` is the bus angle, ``v_t`` the terminal voltage and ``f_pll`` the frequency
    of the measurement frame the rotor angle is referred to.
    """
    if tie_reactance <= 0.0:
        raise ParameterError("tie_reactance", f"must be positive, got {tie_reactance}")
    k_s = synchronizing_coefficient(p, tie_reactance)
    xd, xq, xdp, xqp, xl = p.x_d, p.x_q, p.x_d_transient, p.x_q_transient, p.stator_inductance
    model = _Realization(
        "sg.",
        SG_STATES,
        ("pg_ref", "et_ref", "e_bus", "v_t", "f_pll"),
        ("delta", "omega", "pe", "pm", "e_q_t"),
    )
    electrical_power = {"delta": k_s, "e_bus": -k_s}
    d_current = {"e_q_t": 1.0 / xdp, "v_t": -1.0 / xdp}
    mechanical_power = {"x_tur1": p.hp_fraction, "x_tur2": 1.0 - p.hp_fraction}

    model.rate("e_q_t", {"e_q_t": -xd / xdp, "v_t": (xd - xdp) / xdp, "v_fd": 1.0}, 1.0 / p.t_do_transient)
    model.rate("e_d_t", _merge({"e_d_t": -1.0}, _scaled(electrical_power, xq - xqp)), 1.0 / p.t_qo_transient)
    model.rate(
        "psi_1d",
        _merge({"psi_1d": -1.0, "e_q_t": 1.0}, _scaled(d_current, -(xdp - xl))),
        1.0 / p.t_do_subtransient,
    )
    model.rate(
        "psi_2q",
        _merge({"psi_2q": -1.0, "e_d_t": -1.0}, _scaled(electrical_power, -(xqp - xl))),
        1.0 / p.t_qo_subtransient,
    )

    # Swing equation in the PLL frame
    model.rate("delta", {"omega": 1.0, "f_pll": -1.0}, base.omega_base)
    model.rate(
        "omega",
        _merge(mechanical_power, _scaled(electrical_power, -1.0), {"omega": -p.damping, "f_pll": p.damping}),
        1.0 / (2.0 * p.inertia),
    )

    model.rate("x_gov1", {"x_gov1": -1.0, "pg_ref": 1.0, "omega": -1.0 / p.droop}, 1.0 / p.governor_time)
    model.rate("x_gov2", {"x_gov1": 1.0, "x_gov2": -1.0}, 1.0 / p.servo_time)
    model.rate("x_tur1", {"x_gov2": 1.0, "x_tur1": -1.0}, 1.0 / p.steam_chest_time)
    model.rate("x_tur2", {"x_tur1": 1.0, "x_tur2": -1.0}, 1.0 / p.reheat_time)
    model.rate("v_fd", {"v_fd": -1.0, "et_ref": p.exciter_gain, "v_t": -p.exciter_gain}, 1.0 / p.exciter_time)

    model.output("delta", {"delta": 1.0})
    model.output("omega", {"omega": 1.0})
    model.output("pe", electrical_power)
    model.output("pm", mechanical_power)
    model.output("e_q_t", {"e_q_t": 1.0})
    return model.build()


def build_ac_network(
    network: AcNetworkParams,
    pll: PllParams,
    sync_coefficient: float,
    base: PerUnitBase = PerUnitBase(),
) -> StateSpaceModel:
    """Aggregate AC network seen from the PCC, with the PLL that measures its frequency.

    The bus angle ``e_bus`` follows from the power balance between the generator, the
    load ``dpl`` (with frequency damping) and the converter current ``i_cd``. The PLL
    drives its frequency ``df`` until the bus angle in its frame settles to zero.
    """
    if sync_coefficient <= 0.0:
        raise ParameterError("sync_coefficient", f"must be positive, got {sync_coefficient}")
    model = _Realization(
        "net.",
        ("x_pll", "df"),
        ("delta", "e_q_t", "i_cd", "i_cq", "dpl"),
        ("e_bus", "df", "df_hz", "vmag"),
    )
    bus_angle = {
        "delta": 1.0,
        "dpl": -1.0 / sync_coefficient,
        "i_cd": -1.0 / sync_coefficient,
        "df": -network.load_damping / sync_coefficient,
    }
    model.rate("x_pll", bus_angle)
    model.rate("df", _merge({"df": -1.0, "x_pll": pll.ki}, _scaled(bus_angle, pll.kp)), 1.0 / pll.time_constant)
    model.output("e_bus", bus_angle)
    model.output("df", {"df": 1.0})
    model.output("df_hz", {"df": base.frequency_hz})
    model.output("vmag", {"e_q_t": network.voltage_sensitivity, "i_cq": network.reactive_support})
    return model.build()


def _dc_capacitance(p: ConverterParams, base: PerUnitBase, include_converter: bool = True) -> float:
    """DC bus capacitance as a time constant in seconds (C times the DC impedance base)."""
    microfarads = p.shunt_capacitance_uf + ((p.capacitance_uf or 0.0) if include_converter else 0.0)
    if microfarads <= 0.0:
        raise ParameterError("shunt_capacitance_uf", f"{p.kind} DC bus needs a positive capacitance")
    return microfarads * 1e-6 * base.dc_impedance


def _require_kind(p: ConverterParams, kind: ConverterKind) -> None:
    if p.kind != kind:
        raise ParameterError("kind", f"expected {kind} parameters, got {p.kind}")


def build_vsc(p: ConverterParams, base: PerUnitBase = PerUnitBase()) -> StateSpaceModel:
    """Grid-side VSC with dq current loops, P-Vdc droop power loop and V_mag loop.

    The AC power deviation is i_d + P0 vmag + Q0 e_bus around the operating currents
    P0 and Q0, with ``e_bus`` the bus angle in the PLL frame. The DC current injected
    into the bus is that power less P0 v_dc, so AC-side voltage and angle swings move
    the DC voltage.

    Raises:
        ParameterError: If ``p`` is not a GSVSC parameter set.
    """
    _require_kind(p, ConverterKind.GSVSC)
    assert p.droop is not None
    capacitance = _dc_capacitance(p, base)
    model = _Realization(
        "vsc.",
        VSC_STATES,
        ("p_ref", "vdc_ref", "vmag_ref", "vmag", "e_bus", "i_net"),
        ("p", "i_cd", "i_cq", "v_dc"),
    )
    ac_power = {"i_d": 1.0, "vmag": p.operating_power, "e_bus": p.operating_reactive_current}
    power_error = _merge({"p_ref": 1.0, "v_dc": -1.0 / p.droop, "vdc_ref": 1.0 / p.droop}, _scaled(ac_power, -1.0))
    voltage_error = {"vmag_ref": 1.0, "vmag": -1.0}
    references = {
        "d": _merge(_scaled(power_error, p.kp), {"m_d": p.ki}),
        "q": _merge(_scaled(voltage_error, p.kp), {"m_q": p.ki}),
    }
    model.rate("m_d", power_error)
    model.rate("m_q", voltage_error)
    for axis, reference in references.items():
        current = f"i_{axis}"
        tracking = _merge(reference, {current: -1.0})
        model.rate(f"n_{axis}", tracking)
        model.rate(
            current,
            _merge({current: -p.resistance}, _scaled(tracking, p.current_kp), {f"n_{axis}": p.current_ki}),
            base.omega_base / p.inductance,
        )
    model.rate("v_dc", _merge(ac_power, {"v_dc": -p.operating_power, "i_net": -1.0}), 1.0 / capacitance)

    model.output("p", ac_power)
    model.output("i_cd", {"i_d": 1.0})
    model.output("i_cq", {"i_q": 1.0})
    model.output("v_dc", {"v_dc": 1.0})
    return model.build()


def build_lcc(p: ConverterParams, base: PerUnitBase = PerUnitBase()) -> StateSpaceModel:
    """Line-commutated converter with DC current and power loops.

    The firing lag ``theta`` acts as the rectified voltage behind the smoothing reactor.
    The DC bus capacitance is the lumped line shunt alone.

    Raises:
        ParameterError: If ``p`` is not an LCC parameter set or the bus has no capacitance.
    """
    _require_kind(p, ConverterKind.LCC)
    assert p.smoothing_inductance is not None and p.filter_capacitance is not None
    assert p.firing_time_constant is not None and p.commutation_resistance is not None
    assert p.reactive_ratio is not None and p.voltage_filter_time is not None
    capacitance = _dc_capacitance(p, base, include_converter=False)
    model = _Realization(
        "lcc.",
        LCC_STATES,
        ("p_ref", "vmag", "ec_q", "i_net"),
        ("p", "i_cd", "i_cq", "v_dc"),
    )
    power_error = {"p_ref": 1.0, "i_dco": -1.0}
    current_reference = _merge(_scaled(power_error, p.kp), {"m": p.ki})
    current_error = _merge(current_reference, {"i_dco": -1.0})
    lag = p.inductance / (base.omega_base * p.commutation_resistance)

    model.rate("m", power_error)
    model.rate("n", current_error)
    model.rate(
        "theta",
        _merge({"theta": -1.0}, _scaled(current_error, p.current_kp), {"n": p.current_ki}),
        1.0 / p.firing_time_constant,
    )
    model.rate(
        "i_dco",
        {"theta": 1.0, "i_dco": -p.commutation_resistance},
        base.omega_base / p.smoothing_inductance,
    )
    model.rate("v_dc", {"i_dco": 1.0, "i_net": -1.0}, 1.0 / capacitance)
    model.rate("i_d", {"i_dco": 1.0, "i_d": -1.0}, 1.0 / lag)
    model.rate("i_q", {"i_dco": p.reactive_ratio, "i_q": -1.0}, 1.0 / lag)
    model.rate("v_cd", {"vmag": 1.0, "v_cd": -1.0}, 1.0 / p.voltage_filter_time)
    model.rate("v_cq", {"ec_q": 1.0, "v_cq": -1.0}, 1.0 / p.voltage_filter_time)

    model.output("p", {"i_d": 1.0})
    model.output("i_cd", {"i_d": 1.0})
    model.output("i_cq", {"v_cd": p.filter_capacitance, "i_q": -1.0})
    model.output("v_dc", {"v_dc": 1.0})
    return model.build()


def build_wfvsc(p: ConverterParams, owf: OwfParams, base: PerUnitBase = PerUnitBase()) -> StateSpaceModel:
    """PMSG offshore wind farm behind its wind-farm-side VSC.

    The speed loop tracks the optimal speed for the wind deviation ``dvw`` (m/s) by
    adjusting the q-axis machine current; the d-axis current is regulated to zero.

    Raises:
        ParameterError: If ``p`` is not a WFVSC parameter set.
    """
    _require_kind(p, ConverterKind.WFVSC)
    capacitance = _dc_capacitance(p, base)
    model = _Realization("owf.", OWF_STATES, ("dvw", "i_net"), ("v_dc", "p_w"))
    speed_error = {"omega_e": 1.0, "dvw": -1.0 / owf.rated_wind_speed}
    references = {
        "d": {},
        "q": _merge(_scaled(speed_error, p.kp), {"m": p.ki}),
    }
    electrical_power = {"i_mq": owf.flux, "omega_e": owf.operating_power}

    model.rate(
        "omega_e",
        {"dvw": owf.wind_gain, "omega_e": -owf.aero_damping, "i_mq": -owf.flux},
        1.0 / (2.0 * owf.inertia),
    )
    model.rate("theta_e", {"omega_e": base.omega_base, "theta_e": -owf.angle_leak})
    model.rate("m", speed_error)
    for axis, reference in references.items():
        current = f"i_m{axis}"
        tracking = _merge(reference, {current: -1.0})
        model.rate(f"n_{axis}", tracking)
        model.rate(
            current,
            _merge({current: -owf.stator_resistance}, _scaled(tracking, owf.current_kp), {f"n_{axis}": owf.current_ki}),
            base.omega_base / owf.stator_inductance,
        )
    model.rate("v_dc", _merge(electrical_power, {"i_net": -1.0}), 1.0 / capacitance)

    model.output("v_dc", {"v_dc": 1.0})
    model.output("p_w", electrical_power)
    return model.build()


def check_connected(p: DcNetworkParams) -> None:
    """Raise ``TopologyError`` unless the lines connect every bus.

    Raises:
        TopologyError: Listing the buses unreachable from the first bus.
    """
    position = {bus: index for index, bus in enumerate(p.buses)}
    rows = [position[line.from_bus] for line in p.lines]
    columns = [position[line.to_bus] for line in p.lines]
    adjacency = coo_matrix((np.ones(len(rows)), (rows, columns)), shape=(len(p.buses), len(p.buses)))
    count, labels = connected_components(adjacency, directed=False)
    if count > 1:
        raise TopologyError([bus for bus, label in zip(p.buses, labels) if label != labels[0]])


def build_dc_network(p: DcNetworkParams, base: PerUnitBase = PerUnitBase()) -> StateSpaceModel:
    """Pi-section cable network with line-current states.

    Inputs ``v{bus}`` are bus voltage deviations, outputs ``i_net{bus}`` the net current
    leaving each bus into the lines. Line shunts are excluded; see ``lumped_shunts``.

    Raises:
        TopologyError: If the line graph is disconnected.
    """
    check_connected(p)
    model = _Realization(
        "dc.",
        [line.name for line in p.lines],
        tuple(f"v{bus}" for bus in p.buses),
        tuple(f"i_net{bus}" for bus in p.buses),
    )
    impedance = base.dc_impedance
    for line in p.lines:
        resistance = p.resistance_per_km * line.length_km / impedance
        inductance = p.inductance_mh_per_km * 1e-3 * line.length_km / impedance
        model.rate(
            line.name,
            {line.name: -resistance, f"v{line.from_bus}": 1.0, f"v{line.to_bus}": -1.0},
            1.0 / inductance,
        )
        model.output(f"i_net{line.from_bus}", {line.name: 1.0})
        model.output(f"i_net{line.to_bus}", {line.name: -1.0})
    logger.debug("DC network with %d buses and %d lines", len(p.buses), len(p.lines))
    return model.build()


def lumped_shunts(p: DcNetworkParams) -> Dict[int, float]:
    """Half of every line's shunt capacitance placed on each of its buses, in uF."""
    shunts = {bus: 0.0 for bus in p.buses}
    for line in p.lines:
        half = 0.5 * p.capacitance_uf_per_km * line.length_km
        shunts[line.from_bus] += half
        shunts[line.to_bus] += half
    return shunts
