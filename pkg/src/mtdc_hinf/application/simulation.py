"""Exact zero-order-hold simulation of the closed loop and its deviation metrics."""

import logging
from typing import Dict, Optional, Sequence

import numpy as np
from scipy.signal import dlsim

from mtdc_hinf.application.analysis import close_loop, controller_prefix, is_unstable
from mtdc_hinf.application.numerics import eigenvalues, zoh_discretize
from mtdc_hinf.domain.enums import ControlCase
from mtdc_hinf.domain.exceptions import WiringError
from mtdc_hinf.domain.models import CompositePlant, DelayModel, HinfController, SimulationMetrics, SimulationResult
from mtdc_hinf.domain.scenario import CommunicationMask, DisturbanceProfile

logger = logging.getLogger(__name__)

NOMINAL_FREQUENCY_HZ = 60.0
NOMINAL_VDC = 1.0
DIVERGENCE_LIMIT = 1e12


def disturbance_channel(channel: str) -> str:
    """Plant input fed by a profile channel: ``dpl{k}`` to ``g{k}.dpl``, ``dvw`` to ``owf.dvw``."""
    if channel == "dvw":
        return "owf.dvw"
    if channel.startswith("dpl"):
        return f"g{channel[3:]}.dpl"
    raise WiringError([channel], reason="unknown disturbance channel")


def compute_metrics(df: np.ndarray, dvdc: np.ndarray) -> SimulationMetrics:
    """Peak and rms deviations, rms as sqrt(sum_l x(l)^2 / L)."""
    df = np.atleast_2d(np.asarray(df, dtype=float))
    dvdc = np.asarray(dvdc, dtype=float)
    return SimulationMetrics(
        df_max=tuple(float(value) for value in np.max(np.abs(df), axis=0)),
        df_rms=tuple(float(value) for value in np.sqrt(np.mean(df**2, axis=0))),
        vdc_max=float(np.max(np.abs(dvdc))),
        vdc_rms=float(np.sqrt(np.mean(dvdc**2))),
    )


def simulate_closed_loop(
    plant: CompositePlant,
    controllers: Sequence[HinfController],
    profile: DisturbanceProfile,
    sample_period: float = 1e-3,
    duration: Optional[float] = None,
    delay: Optional[DelayModel] = None,
    comm_mask: Optional[CommunicationMask] = None,
    case: ControlCase = ControlCase.DROOP_ONLY,
) -> SimulationResult:
    """Simulate the closed loop driven by a disturbance profile held over each sample period.

    An unstable loop is simulated anyway; the result is flagged and diverging samples are
    clipped to a large finite value.

    Raises:
        WiringError: If a profile or controller channel does not resolve against the plant.
    """
    loop = close_loop(plant, controllers, delay, comm_mask)
    duration = profile.duration if duration is None else duration
    length = int(np.ceil(duration / sample_period - 1e-9))
    time = np.arange(length) * sample_period

    samples = profile.sample(time)
    inputs = np.zeros((length, loop.n_inputs))
    for column, channel in enumerate(profile.channels):
        inputs[:, loop.input_index(disturbance_channel(channel))] = samples[:, column]

    a_d, b_d = zoh_discretize(loop, sample_period)
    with np.errstate(over="ignore", invalid="ignore"):
        _, outputs, _ = dlsim((a_d, b_d, loop.c, loop.d, sample_period), inputs)
    outputs = np.clip(np.nan_to_num(np.asarray(outputs), nan=DIVERGENCE_LIMIT), -DIVERGENCE_LIMIT, DIVERGENCE_LIMIT)

    def column(name: str) -> np.ndarray:
        return outputs[:, loop.output_index(name)]

    grids = plant.grids
    df = np.column_stack([column(f"g{k}.df") for k in grids])
    buses = [f"g{k}.vdc" for k in grids] + ["owf.v_dc"]
    dvdc = np.mean(np.column_stack([column(name) for name in buses]), axis=1)
    references: Dict[str, np.ndarray] = {}
    for controller in controllers:
        for reference in controller.output_names:
            references[reference] = column(controller_prefix(controller.grid) + reference)

    stable = not is_unstable(eigenvalues(loop.a))
    if not stable:
        logger.warning("Simulating an unstable closed loop for %s", case)
    return SimulationResult(
        case=case,
        time=time,
        frequency=NOMINAL_FREQUENCY_HZ + df,
        vdc=NOMINAL_VDC + dvdc,
        generated_power=np.column_stack([column(f"g{k}.pg") for k in grids]),
        converter_power=np.column_stack([column(f"g{k}.p") for k in grids]),
        references=references,
        metrics=compute_metrics(df, dvdc),
        stable=stable,
    )
