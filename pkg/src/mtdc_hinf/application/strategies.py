"""Secondary frequency-regulation strategies compared in the case studies."""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, Optional, Type

import numpy as np

from mtdc_hinf.application.analysis import closed_loop_spectrum, is_unstable
from mtdc_hinf.application.baselines import make_pi_baseline, make_truncated_central
from mtdc_hinf.application.generalized_plant import make_generalized_plant, regularize
from mtdc_hinf.application.hinf_synthesis import Acceptance, gamma_iterate
from mtdc_hinf.application.model_reduction import reduce_controllers
from mtdc_hinf.domain.enums import ControlCase
from mtdc_hinf.domain.interfaces import ICaseStrategy
from mtdc_hinf.domain.models import (
    CompositePlant,
    ControllerSet,
    DelayModel,
    GeneralizedPlant,
    HinfController,
    StateSpaceModel,
)
from mtdc_hinf.domain.scenario import Scenario

logger = logging.getLogger(__name__)

DELAY_CHECK_POINTS = 4


def delay_check(
    plant: CompositePlant,
    gp: GeneralizedPlant,
    target: float,
    points: int = DELAY_CHECK_POINTS,
) -> Acceptance:
    """Reject a grid controller that alone leaves ``plant`` unstable at some delay up to ``target``."""

    def check(core: StateSpaceModel) -> Optional[str]:
        controller = HinfController(
            grid=gp.grid,
            case=ControlCase.CASE1,
            a=core.a,
            b=core.b,
            c=core.c,
            d=core.d,
            input_names=core.input_names,
            output_names=core.output_names,
            integrated=gp.integrated,
        )
        for lag in np.linspace(0.0, target, points + 1)[1:]:
            spectrum = closed_loop_spectrum(plant, [controller], DelayModel(delay=float(lag)))
            if is_unstable(spectrum):
                return f"unstable at a {lag:.4g} s delay (max real part {spectrum.max_real:.3e})"
        return None

    return check


class _ReducingStrategy(ICaseStrategy):
    """Strategy whose synthesized controllers are reduced at the scenario's energy threshold."""

    def __init__(self, threads: int = 1, reduce: bool = True) -> None:
        self._threads = max(threads, 1)
        self._reduce = reduce

    def _finish(self, plant: CompositePlant, controllers: ControllerSet, scenario: Scenario) -> ControllerSet:
        if not self._reduce or scenario.reduction_threshold is None:
            return controllers
        reduced, _ = reduce_controllers(plant, controllers, scenario.reduction_threshold, self._threads)
        return reduced


class DroopOnly(ICaseStrategy):
    """No secondary control; the local droop loops act alone."""

    @property
    def case(self) -> ControlCase:
        return ControlCase.DROOP_ONLY

    def design(self, plant: CompositePlant, scenario: Scenario) -> ControllerSet:
        return ControllerSet(case=self.case)


class PiBaseline(ICaseStrategy):
    """Per-grid frequency PI on the generator reference, without device coordination."""

    @property
    def case(self) -> ControlCase:
        return ControlCase.CASE2

    def design(self, plant: CompositePlant, scenario: Scenario) -> ControllerSet:
        controllers = tuple(make_pi_baseline(plant, k, scenario.pi_gains) for k in plant.grids)
        return ControllerSet(case=self.case, controllers=controllers)


class DecentralizedHinf(_ReducingStrategy):
    """One H-infinity synthesis per grid on its own generalized plant.

    The syntheses are independent and run on a thread pool.
    """

    @property
    def case(self) -> ControlCase:
        return ControlCase.CASE1

    def design(self, plant: CompositePlant, scenario: Scenario) -> ControllerSet:
        settings = scenario.synthesis

        def synthesize(k: int):
            gp = regularize(make_generalized_plant(plant, k, scenario.weights), settings.regularization)
            accept = delay_check(plant, gp, settings.delay_target) if settings.delay_target > 0.0 else None
            return gamma_iterate(
                gp,
                gamma_hi=settings.gamma_hi,
                gamma_lo=settings.gamma_lo,
                tolerance=settings.tolerance,
                backoff=settings.backoff,
                case=self.case,
                accept=accept,
            )

        with ThreadPoolExecutor(max_workers=self._threads) as executor:
            results = list(executor.map(synthesize, plant.grids))
        controllers = ControllerSet(
            case=self.case,
            controllers=tuple(controller for controller, _ in results),
            reports=tuple(report for _, report in results),
        )
        if settings.delay_target > 0.0:
            spectrum = closed_loop_spectrum(plant, controllers.controllers, DelayModel(delay=settings.delay_target))
            if is_unstable(spectrum):
                logger.warning(
                    "Decentralized controllers together are unstable at a %.4g s delay (max real part %.3e)",
                    settings.delay_target,
                    spectrum.max_real,
                )
        return self._finish(plant, controllers, scenario)


class TruncatedCentral(_ReducingStrategy):
    """Centralized H-infinity synthesis with the off-diagonal couplings removed."""

    @property
    def case(self) -> ControlCase:
        return ControlCase.CASE3

    def design(self, plant: CompositePlant, scenario: Scenario) -> ControllerSet:
        controllers, report = make_truncated_central(plant, scenario.weights, scenario.synthesis)
        designed = ControllerSet(case=self.case, controllers=tuple(controllers), reports=(report,))
        return self._finish(plant, designed, scenario)


_STRATEGIES: Dict[ControlCase, Type[ICaseStrategy]] = {
    ControlCase.DROOP_ONLY: DroopOnly,
    ControlCase.CASE1: DecentralizedHinf,
    ControlCase.CASE2: PiBaseline,
    ControlCase.CASE3: TruncatedCentral,
}


def strategy_for(case: ControlCase, threads: int = 1, reduce: bool = True) -> ICaseStrategy:
    """Strategy object designing the controllers of ``case``."""
    strategy = _STRATEGIES[case]
    if issubclass(strategy, _ReducingStrategy):
        return strategy(threads=threads, reduce=reduce)
    return strategy()
