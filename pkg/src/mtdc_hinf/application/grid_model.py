"""Assembly of grid models and of the composite MTDC plant."""

import logging
from typing import Any, Dict, List, Mapping, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ValidationError

from mtdc_hinf.application.components import (
    build_ac_network,
    build_dc_network,
    build_lcc,
    build_sg,
    build_vsc,
    build_wfvsc,
    lumped_shunts,
    synchronizing_coefficient,
)
from mtdc_hinf.application.statespace import append, interconnect, rename
from mtdc_hinf.domain.enums import ConverterKind
from mtdc_hinf.domain.exceptions import ParameterError, WiringError
from mtdc_hinf.domain.models import CompositePlant, GridModel, StateSpaceModel
from mtdc_hinf.domain.parameters import ConverterParams, GridParams, SystemParams
from mtdc_hinf.domain.scenario import UNCERTAINTY_GROUPS, UncertaintySpec

logger = logging.getLogger(__name__)

MEASUREMENTS = ("pg", "omega", "df", "vmag", "vdc", "p")
MINIMUM_FACTOR = 0.05
MAX_REDRAWS = 100


def _converter_prefix(converter: StateSpaceModel) -> str:
    return "lcc." if any(name.startswith("lcc.") for name in converter.input_names) else "vsc."


def assemble_grid(k: int, sg: StateSpaceModel, ac: StateSpaceModel, converter: StateSpaceModel) -> GridModel:
    """Close the couplings between the generator, the AC network and the converter of grid k.

    The terminal-voltage and V_mag references are held at zero. The grid exposes its
    references, the load disturbance, the DC port current and the six outputs Y_k under
    ``g{k}.`` names.

    Raises:
        WiringError: If a component lacks a port the coupling needs.
    """
    conv = _converter_prefix(converter)
    kind = ConverterKind.LCC if conv == "lcc." else ConverterKind.GSVSC
    connections: Dict[str, str] = {
        "sg.e_bus": "net.e_bus",
        "sg.v_t": "net.vmag",
        "sg.f_pll": "net.df",
        "net.delta": "sg.delta",
        "net.e_q_t": "sg.e_q_t",
        "net.i_cd": conv + "i_cd",
        "net.i_cq": conv + "i_cq",
        conv + "vmag": "net.vmag",
    }
    grounded = ["sg.et_ref"]
    references = {"sg.pg_ref": "pg_ref", conv + "p_ref": "p_ref"}
    if kind == ConverterKind.LCC:
        connections["lcc.ec_q"] = "net.e_bus"
    else:
        connections["vsc.e_bus"] = "net.e_bus"
        grounded.append("vsc.vmag_ref")
        references["vsc.vdc_ref"] = "vdc_ref"
    ports = {"net.dpl": "dpl", conv + "i_net": "i_net"}
    outputs = {
        "sg.pm": "pg",
        "sg.omega": "omega",
        "net.df_hz": "df",
        "net.vmag": "vmag",
        conv + "v_dc": "vdc",
        conv + "p": "p",
    }

    blocks = [sg, ac, converter]
    closed = interconnect(blocks, connections, list(references) + list(ports), list(outputs), grounded)
    tag = f"g{k}."
    system = rename(
        closed,
        inputs={name: tag + short for name, short in {**references, **ports}.items()},
        outputs={name: tag + short for name, short in outputs.items()},
        states={name: tag + name for name in closed.state_names},
    )
    return GridModel(
        grid=k,
        converter_kind=kind,
        system=system,
        a_block=append(blocks).a,
        references=tuple(tag + short for short in references.values()),
        disturbance=tag + "dpl",
        port_input=tag + "i_net",
        port_output=tag + "vdc",
        measurements=tuple(tag + short for short in MEASUREMENTS),
    )


def assemble_composite(
    grids: Sequence[GridModel],
    owf: StateSpaceModel,
    dc_network: StateSpaceModel,
    params: SystemParams,
) -> CompositePlant:
    """Couple the grids and the wind farm through the DC network.

    Raises:
        WiringError: If converter buses do not map one-to-one onto DC-network buses.
    """
    bus_of = {grid.grid: grid.dc_bus for grid in params.grids}
    ports = [bus_of.get(model.grid, 0) for model in grids] + [params.owf_bus]
    if sorted(ports) != sorted(params.dc.buses):
        raise WiringError(
            [f"dc.v{bus}" for bus in params.dc.buses],
            reason=f"converter buses {ports} do not map one-to-one onto DC buses {list(params.dc.buses)}",
        )

    connections: Dict[str, str] = {}
    for model in grids:
        bus = bus_of[model.grid]
        connections[model.port_input] = f"dc.i_net{bus}"
        connections[f"dc.v{bus}"] = model.port_output
    connections["owf.i_net"] = f"dc.i_net{params.owf_bus}"
    connections[f"dc.v{params.owf_bus}"] = "owf.v_dc"

    references: Dict[int, Tuple[str, ...]] = {}
    grounded: List[str] = []
    for model in grids:
        kept = model.references
        if model.converter_kind == ConverterKind.LCC and not params.lcc_dispatchable:
            kept = tuple(name for name in model.references if not name.endswith(".p_ref"))
            grounded.extend(name for name in model.references if name not in kept)
        references[model.grid] = kept
    disturbances = tuple(model.disturbance for model in grids) + ("owf.dvw",)
    all_references = [name for model in grids for name in references[model.grid]]
    outputs = [name for model in grids for name in model.measurements] + ["owf.v_dc", "owf.p_w"]

    system = interconnect(
        [model.system for model in grids] + [owf, dc_network],
        connections,
        all_references + list(disturbances),
        outputs,
        grounded,
    )
    logger.info("Composite plant with %d states across %d grids", system.n_states, len(grids))
    return CompositePlant(
        system=system,
        references=references,
        measurements={model.grid: model.measurements for model in grids},
        remote={model.grid: (f"g{model.grid}.df", f"g{model.grid}.vdc") for model in grids},
        disturbances=disturbances,
        params=params,
    )


def _with_shunt(converter: ConverterParams, shunt: float) -> ConverterParams:
    return converter.model_copy(update={"shunt_capacitance_uf": shunt})


def build_grid(grid: GridParams, params: SystemParams, shunt: float) -> GridModel:
    base = params.base
    tie = grid.network.transformer_inductance
    sg = build_sg(grid.sg, base, tie_reactance=tie)
    ac = build_ac_network(grid.network, grid.pll, synchronizing_coefficient(grid.sg, tie), base)
    converter = _with_shunt(grid.converter, shunt)
    if converter.kind == ConverterKind.LCC:
        conv = build_lcc(converter, base)
    else:
        conv = build_vsc(converter, base)
    return assemble_grid(grid.grid, sg, ac, conv)


def build_plant(params: SystemParams) -> CompositePlant:
    """Build every component from its parameters and assemble the composite plant.

    Raises:
        WiringError: If a converter sits on a bus the DC network does not have.
        TopologyError: If the DC network is disconnected.
    """
    shunts = lumped_shunts(params.dc)
    missing = [f"dc.v{grid.dc_bus}" for grid in params.grids if grid.dc_bus not in shunts]
    if params.owf_bus not in shunts:
        missing.append(f"dc.v{params.owf_bus}")
    if missing:
        raise WiringError(missing, reason="converter bus missing from the DC network")

    grids = [build_grid(grid, params, shunts[grid.dc_bus]) for grid in params.grids]
    owf = build_wfvsc(_with_shunt(params.owf_converter, shunts[params.owf_bus]), params.owf, params.base)
    dc_network = build_dc_network(params.dc, params.base)
    return assemble_composite(grids, owf, dc_network, params)


def _scale_model(model: BaseModel, rng: np.random.Generator, level: float) -> BaseModel:
    """Scale each perturbable field of a parameter model by its own factor drawn from ``rng``.

    Factors are redrawn together while the scaled values break the model's own
    constraints, such as the ordering of generator reactances.

    Raises:
        ParameterError: If no draw within MAX_REDRAWS satisfies the constraints.
    """
    fields = [name for name in getattr(model, "PERTURBABLE", ()) if getattr(model, name) is not None]
    if not fields:
        return model
    for _ in range(MAX_REDRAWS):
        factors = np.maximum(1.0 + rng.uniform(-level, level, size=len(fields)), MINIMUM_FACTOR)
        updates: Dict[str, Any] = {name: getattr(model, name) * factor for name, factor in zip(fields, factors)}
        try:
            return type(model).model_validate({**model.model_dump(), **updates})
        except ValidationError as error:
            logger.debug("Redrawing %s factors: %s", type(model).__name__, error.errors()[0]["msg"])
    raise ParameterError("level", f"no draw of {type(model).__name__} at level {level} satisfies its constraints")


def perturb_params(params: SystemParams, spec: UncertaintySpec) -> SystemParams:
    """Multiply every perturbable parameter by max(1 + eps, 0.05), eps ~ U[-level, level].

    Factors are drawn in a fixed order (grids in order, then the wind farm, its
    converter and the DC network), so one seed always yields the same parameters.
    """
    rng = np.random.default_rng(spec.seed)
    level = spec.level
    grids = []
    for grid in params.grids:
        parts = ("sg", "network", "pll", "converter")
        updates = {name: _scale_model(getattr(grid, name), rng, level) for name in parts}
        grids.append(grid.model_copy(update=updates))
    return params.model_copy(
        update={
            "grids": tuple(grids),
            "owf": _scale_model(params.owf, rng, level),
            "owf_converter": _scale_model(params.owf_converter, rng, level),
            "dc": _scale_model(params.dc, rng, level),
        }
    )


def _mix(
    nominal: StateSpaceModel,
    perturbed: StateSpaceModel,
    plant: CompositePlant,
    groups: Mapping[str, bool],
) -> StateSpaceModel:
    a = perturbed.a if groups["a_e"] else nominal.a
    b = np.array(nominal.b)
    reference_columns = [nominal.input_index(name) for name in plant.all_references]
    disturbance_columns = [nominal.input_index(name) for name in plant.disturbances]
    if groups["b_rek"]:
        b[:, reference_columns] = perturbed.b[:, reference_columns]
    if groups["b_drk"]:
        b[:, disturbance_columns] = perturbed.b[:, disturbance_columns]
    c, d = (perturbed.c, perturbed.d) if groups["c_tk"] else (nominal.c, nominal.d)
    return StateSpaceModel(
        a=a,
        b=b,
        c=c,
        d=d,
        state_names=nominal.state_names,
        input_names=nominal.input_names,
        output_names=nominal.output_names,
    )


def perturb(plant: CompositePlant, spec: UncertaintySpec) -> CompositePlant:
    """Plant rebuilt from randomly perturbed physical parameters.

    Only the matrix groups named in ``spec.groups`` are taken from the perturbed plant;
    the others keep their nominal values. A zero level returns ``plant`` itself.
    """
    if spec.level == 0.0:
        return plant
    params = perturb_params(plant.params, spec)
    perturbed = build_plant(params)
    logger.debug("Perturbed plant at level %.3f with seed %d", spec.level, spec.seed)
    if spec.groups == UNCERTAINTY_GROUPS:
        return perturbed
    groups = {name: name in spec.groups for name in UNCERTAINTY_GROUPS}
    system = _mix(plant.system, perturbed.system, plant, groups)
    return plant.model_copy(update={"system": system, "params": params})
