"""Baseline secondary controllers: frequency PI (Case 2) and truncated centralized H-infinity (Case 3)."""

import logging
from typing import List, Optional, Tuple

import numpy as np

from mtdc_hinf.application.analysis import closed_loop_spectrum, is_unstable
from mtdc_hinf.application.generalized_plant import make_centralized_plant, regularize
from mtdc_hinf.application.hinf_synthesis import synthesize_core
from mtdc_hinf.domain.enums import ControlCase
from mtdc_hinf.domain.exceptions import WiringError
from mtdc_hinf.domain.models import INTEGRAL_SUFFIX, CompositePlant, HinfController, StateSpaceModel, SynthesisReport
from mtdc_hinf.domain.scenario import PiGains, SynthesisSettings, WeightSet

logger = logging.getLogger(__name__)

NOMINAL_FREQUENCY_HZ = 60.0


def make_pi_baseline(plant: CompositePlant, k: int, gains: PiGains) -> HinfController:
    """Static PI on the frequency deviation of grid k driving only its generator reference.

    The measured deviation is in Hz; the gains act on pu frequency, so both are divided
    by the nominal frequency. A falling frequency raises the reference.

    Raises:
        WiringError: If grid k has no generator reference.
    """
    if k not in plant.references:
        raise WiringError([f"g{k}"], reason="grid not present in the plant")
    reference = f"g{k}.pg_ref"
    if reference not in plant.references[k]:
        raise WiringError([reference], reason="grid has no generator reference")
    df = f"g{k}.df"
    return HinfController(
        grid=k,
        case=ControlCase.CASE2,
        a=np.zeros((0, 0)),
        b=np.zeros((0, 2)),
        c=np.zeros((1, 0)),
        d=np.array([[-gains.kp, -gains.ki]]) / NOMINAL_FREQUENCY_HZ,
        input_names=(df, df + INTEGRAL_SUFFIX),
        output_names=(reference,),
        integrated=(df,),
    )


def retained_measurements(plant: CompositePlant, k: int) -> Tuple[str, ...]:
    """Measurements kept by the decentralized slice of grid k: Y_Tk plus its own integrals."""
    return plant.measurement_names(k) + tuple(name + INTEGRAL_SUFFIX for name in plant.remote[k])


def _slices(plant: CompositePlant, core: StateSpaceModel, gamma: Optional[float] = None) -> List[HinfController]:
    controllers = []
    for k in plant.grids:
        local = core.select(inputs=retained_measurements(plant, k), outputs=plant.references[k])
        controllers.append(
            HinfController(
                grid=k,
                case=ControlCase.CASE3,
                a=local.a,
                b=local.b,
                c=local.c,
                d=local.d,
                input_names=local.input_names,
                output_names=local.output_names,
                integrated=plant.remote[k],
                gamma=gamma,
            )
        )
    return controllers


def make_truncated_central(
    plant: CompositePlant,
    weights: WeightSet,
    settings: Optional[SynthesisSettings] = None,
) -> Tuple[List[HinfController], SynthesisReport]:
    """One centralized synthesis, decentralized by dropping the off-diagonal couplings.

    Each grid keeps the full centralized state, the rows of its own references, and the
    columns of its local outputs, the remote frequency and DC voltage deviations and the
    integrals of its own pair. Every other input/output coupling is zeroed. A level whose
    slices do not stabilize ``plant`` together is passed over for the next one up.

    Raises:
        NoStabilizingControllerError: If the centralized synthesis fails.
    """
    settings = settings or SynthesisSettings()
    gp = regularize(make_centralized_plant(plant, weights), settings.regularization)

    def stabilizes(core: StateSpaceModel) -> Optional[str]:
        spectrum = closed_loop_spectrum(plant, _slices(plant, core))
        if is_unstable(spectrum):
            return f"truncated controllers leave the plant unstable (max real part {spectrum.max_real:.3e})"
        return None

    core, report = synthesize_core(
        gp,
        gamma_hi=settings.gamma_hi,
        gamma_lo=settings.gamma_lo,
        tolerance=settings.tolerance,
        backoff=settings.backoff,
        accept=stabilizes,
    )
    controllers = _slices(plant, core, report.gamma_final)
    logger.info("Centralized controller of order %d truncated to %d grids", core.n_states, len(controllers))
    return controllers, report
