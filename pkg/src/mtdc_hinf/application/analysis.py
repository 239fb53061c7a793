"""Closed-loop assembly with communication delays and failures, eigenvalue sweeps and margins."""

import logging
import re
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from mtdc_hinf.application.grid_model import build_plant, perturb
from mtdc_hinf.application.numerics import eigenvalues
from mtdc_hinf.application.statespace import Connection, integrator_bank, interconnect
from mtdc_hinf.domain.enums import SweepAxis
from mtdc_hinf.domain.exceptions import ParameterError, StabilityError, WiringError
from mtdc_hinf.domain.models import (
    INTEGRAL_SUFFIX,
    CompositePlant,
    DelayModel,
    EigenLocus,
    HinfController,
    Spectrum,
    StateSpaceModel,
)
from mtdc_hinf.domain.scenario import CommunicationMask, UncertaintySpec

logger = logging.getLogger(__name__)

INSTABILITY_THRESHOLD = -1e-9
DELAY_TOLERANCE = 1e-3
COARSE_DELAY_POINTS = 24
REFINE_POINTS = 8

_GRID_CHANNEL = re.compile(r"^g(\d+)\.")


def pade_block(delay: float) -> StateSpaceModel:
    """Second-order all-pass approximation of exp(-T s).

    P(s) = (T^2 s^2 - 6 T s + 12) / (T^2 s^2 + 6 T s + 12), realized with D = 1.

    Raises:
        ParameterError: If ``delay`` is not positive.
    """
    if delay <= 0.0:
        raise ParameterError("delay", f"must be positive, got {delay}")
    w = np.sqrt(12.0) / delay
    root = np.sqrt(12.0 / delay)
    return StateSpaceModel(
        a=np.array([[0.0, w], [-w, -6.0 / delay]]),
        b=np.array([[0.0], [root]]),
        c=np.array([[0.0, -root]]),
        d=np.array([[1.0]]),
        state_names=("pade:0", "pade:1"),
        input_names=("in",),
        output_names=("out",),
    )


def controller_prefix(grid: int) -> str:
    return f"ctrl{grid}:"


def controller_system(controller: HinfController) -> StateSpaceModel:
    """Controller core as a named system, channels prefixed by ``ctrl{k}:``."""
    core = StateSpaceModel(
        a=controller.a,
        b=controller.b,
        c=controller.c,
        d=controller.d,
        state_names=tuple(f"k:{index}" for index in range(controller.order)),
        input_names=controller.input_names,
        output_names=controller.output_names,
    )
    return core.with_prefix(controller_prefix(controller.grid))


def source_grid(channel: str) -> Optional[int]:
    """Grid a ``g{j}.`` channel belongs to."""
    match = _GRID_CHANNEL.match(channel)
    return int(match.group(1)) if match else None


def close_loop(
    plant: CompositePlant,
    controllers: Sequence[HinfController],
    delay: Optional[DelayModel] = None,
    comm_mask: Optional[CommunicationMask] = None,
) -> StateSpaceModel:
    """Close the plant with its secondary controllers.

    Inputs of the result are the plant disturbances; outputs are every plant output
    followed by each controller output ``ctrl{k}:<reference>``. A measurement sent over a
    failed link is replaced by zero; a delayed one passes through a Pade block first.
    References no controller drives are held at zero.

    Raises:
        WiringError: If a controller channel does not resolve against the plant.
    """
    delay = delay or DelayModel()
    comm_mask = comm_mask or CommunicationMask()
    system = plant.system
    blocks: List[StateSpaceModel] = [system]
    connections: Dict[str, Connection] = {}
    grounded: List[str] = []
    outputs = list(system.output_names)

    drives: Dict[str, Dict[str, float]] = {}
    for controller in controllers:
        k = controller.grid
        prefix = controller_prefix(k)
        blocks.append(controller_system(controller))
        if controller.integrated:
            bank = integrator_bank([f"{prefix}in:{name}" for name in controller.integrated], INTEGRAL_SUFFIX)
            blocks.append(bank)

        for name in controller.measurement_channels:
            if name not in system.output_names:
                raise WiringError([name], reason=f"controller of grid {k} measures a channel the plant lacks")
            j = source_grid(name)
            targets = [prefix + name]
            if name in controller.integrated:
                targets.append(f"{prefix}in:{name}")
                connections[f"{prefix}{name}{INTEGRAL_SUFFIX}"] = f"{prefix}in:{name}{INTEGRAL_SUFFIX}"
            if j is not None and j != k and comm_mask.is_failed(k, j):
                grounded.extend(targets)
                continue
            lag = 0.0 if j is None else delay.delay_for(k, j)
            source = name
            if lag > 0.0:
                pade = pade_block(lag)
                tag = f"{prefix}delay:{name}"
                blocks.append(
                    StateSpaceModel(
                        a=pade.a,
                        b=pade.b,
                        c=pade.c,
                        d=pade.d,
                        state_names=tuple(f"{tag}:{index}" for index in range(2)),
                        input_names=(tag,),
                        output_names=(tag + ":out",),
                    )
                )
                connections[tag] = name
                source = tag + ":out"
            for target in targets:
                connections[target] = source

        for reference in controller.output_names:
            if reference not in system.input_names:
                raise WiringError([reference], reason=f"controller of grid {k} drives a reference the plant lacks")
            drives.setdefault(reference, {})[prefix + reference] = 1.0
            outputs.append(prefix + reference)

    for reference in plant.all_references:
        if reference in drives:
            connections[reference] = drives[reference]
        else:
            grounded.append(reference)
    grounded.extend(name for name in system.input_names if name not in plant.all_references + plant.disturbances)
    return interconnect(blocks, connections, list(plant.disturbances), outputs, grounded)


def closed_loop_spectrum(
    plant: CompositePlant,
    controllers: Sequence[HinfController],
    delay: Optional[DelayModel] = None,
    comm_mask: Optional[CommunicationMask] = None,
) -> Spectrum:
    return eigenvalues(close_loop(plant, controllers, delay, comm_mask).a)


def is_unstable(spectrum: Spectrum) -> bool:
    return not spectrum.is_stable(INSTABILITY_THRESHOLD)


def sweep_eigen(
    plant: CompositePlant,
    controllers: Sequence[HinfController],
    axis: SweepAxis,
    values: Sequence[float],
    comm_mask: Optional[CommunicationMask] = None,
    seed: int = 0,
    threads: int = 1,
) -> EigenLocus:
    """Closed-loop spectra along one parameter.

    ``filter_inductance`` values are converter phase inductances in mH, ``uncertainty``
    values are perturbation levels drawn with ``seed``, ``delay`` values are seconds.
    Instability is recorded, never raised.
    """
    values = tuple(float(value) for value in values)
    if any(later < earlier for earlier, later in zip(values, values[1:])):
        raise ParameterError("values", "sweep grid must be ascending")

    def point(value: float) -> Spectrum:
        if axis == SweepAxis.FILTER_INDUCTANCE:
            params = plant.params.with_filter_inductance(plant.params.base.inductance_mh_to_pu(value))
            return closed_loop_spectrum(build_plant(params), controllers, comm_mask=comm_mask)
        if axis == SweepAxis.UNCERTAINTY:
            perturbed = perturb(plant, UncertaintySpec(level=value, seed=seed))
            return closed_loop_spectrum(perturbed, controllers, comm_mask=comm_mask)
        lag = DelayModel(delay=value)
        return closed_loop_spectrum(plant, controllers, lag, comm_mask)

    with ThreadPoolExecutor(max_workers=max(threads, 1)) as executor:
        spectra = list(executor.map(point, values))
    first = next((value for value, spectrum in zip(values, spectra) if is_unstable(spectrum)), None)
    if first is not None:
        logger.info("Sweep over %s crosses into instability at %.6g", axis, first)
    return EigenLocus(axis=axis, values=values, spectra=tuple(spectra), first_unstable=first)


def _first_unstable(unstable: Callable[[float], bool], start: float, stop: float) -> Optional[Tuple[float, float]]:
    """(last stable, first unstable) among REFINE_POINTS equal steps from ``start`` to ``stop``."""
    previous = start
    for lag in np.linspace(start, stop, REFINE_POINTS + 1)[1:]:
        if unstable(float(lag)):
            return previous, float(lag)
        previous = float(lag)
    return None


def delay_margin(
    plant: CompositePlant,
    controllers: Sequence[HinfController],
    t_hi: float = 0.6,
    tolerance: float = DELAY_TOLERANCE,
    comm_mask: Optional[CommunicationMask] = None,
) -> Optional[float]:
    """Smallest communication delay that destabilizes the closed loop, within ``tolerance``.

    A coarse scan of [0, t_hi] tracks the largest real part. Around every local maximum
    of it and inside the first unstable step the scan is repeated REFINE_POINTS times
    finer, so unstable windows narrower than a coarse step are found when they raise
    the largest real part at the neighbouring coarse points. Bisection then closes on
    the first crossing. Returns None when the loop stays stable up to ``t_hi``.

    Raises:
        StabilityError: If the loop is unstable without delay.
    """
    if t_hi <= 0.0:
        raise ParameterError("t_hi", f"must be positive, got {t_hi}")
    undelayed = closed_loop_spectrum(plant, controllers, comm_mask=comm_mask)
    if is_unstable(undelayed):
        raise StabilityError("closed loop without delay", undelayed.max_real)

    def peak(lag: float) -> float:
        return closed_loop_spectrum(plant, controllers, DelayModel(delay=lag), comm_mask).max_real

    def unstable(lag: float) -> bool:
        return peak(lag) >= INSTABILITY_THRESHOLD

    grid = np.linspace(0.0, t_hi, COARSE_DELAY_POINTS + 1)
    peaks = [undelayed.max_real]
    bracket = None
    for index in range(1, grid.size):
        lag = float(grid[index])
        value = peak(lag)
        if value >= INSTABILITY_THRESHOLD:
            bracket = _first_unstable(unstable, float(grid[index - 1]), lag)
            break
        peaks.append(value)
        if index >= 2 and peaks[-3] < peaks[-2] > peaks[-1]:
            bracket = _first_unstable(unstable, float(grid[index - 2]), lag)
            if bracket is not None:
                logger.info("Unstable delay window found between %.4f s and %.4f s", grid[index - 2], lag)
                break
    if bracket is None:
        logger.info("No delay crossing up to %.3f s", t_hi)
        return None
    lo, hi = bracket
    while hi - lo > tolerance:
        middle = 0.5 * (lo + hi)
        if unstable(middle):
            hi = middle
        else:
            lo = middle
    logger.info("Delay margin %.4f s", hi)
    return hi


def gain_sensitivity(controller: HinfController) -> pd.DataFrame:
    """Euclidean norms of the B and D columns of each controller input."""
    rows = []
    for index, name in enumerate(controller.input_names):
        channel = name[: -len(INTEGRAL_SUFFIX)] if name.endswith(INTEGRAL_SUFFIX) else name
        j = source_grid(channel)
        rows.append(
            {
                "channel": name,
                "grid": j,
                "locality": "local" if j == controller.grid else "remote",
                "integral": name.endswith(INTEGRAL_SUFFIX),
                "b_norm": float(np.linalg.norm(controller.b[:, index])) if controller.order else 0.0,
                "d_norm": float(np.linalg.norm(controller.d[:, index])),
            }
        )
    return pd.DataFrame(rows, columns=["channel", "grid", "locality", "integral", "b_norm", "d_norm"])


def stability_fraction(
    plant: CompositePlant,
    controllers: Sequence[HinfController],
    level: float,
    seeds: Sequence[int],
    threads: int = 1,
) -> float:
    """Share of seeded parameter perturbations at ``level`` whose closed loop is stable."""
    if not seeds:
        raise ParameterError("seeds", "at least one seed is required")

    def stable(seed: int) -> bool:
        perturbed = perturb(plant, UncertaintySpec(level=level, seed=seed))
        return not is_unstable(closed_loop_spectrum(perturbed, controllers))

    with ThreadPoolExecutor(max_workers=max(threads, 1)) as executor:
        outcomes = list(executor.map(stable, seeds))
    return sum(outcomes) / len(outcomes)
