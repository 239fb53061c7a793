"""Shared fixtures: the nominal plant and controllers synthesized on it."""

from typing import Callable

import numpy as np
import pytest

from mtdc_hinf.application.disturbances import load_step
from mtdc_hinf.application.grid_model import build_plant
from mtdc_hinf.application.strategies import DecentralizedHinf
from mtdc_hinf.domain.models import CompositePlant, ControllerSet, GeneralizedPlant, StateSpaceModel
from mtdc_hinf.domain.parameters import SystemParams
from mtdc_hinf.domain.scenario import Scenario


@pytest.fixture(scope="session")
def nominal_plant() -> CompositePlant:
    return build_plant(SystemParams())


@pytest.fixture(scope="session")
def nominal_scenario() -> Scenario:
    return Scenario(disturbance=load_step(duration=20.0))


@pytest.fixture(scope="session")
def case1_controllers(nominal_plant: CompositePlant, nominal_scenario: Scenario) -> ControllerSet:
    """Full-order decentralized controllers for every grid of the nominal plant."""
    return DecentralizedHinf(reduce=False).design(nominal_plant, nominal_scenario)


@pytest.fixture
def scalar_plant() -> GeneralizedPlant:
    """Unstable first-order plant x' = x + d1 + u, z = [x; u], y = x + d2."""
    return GeneralizedPlant(
        a=[[1.0]],
        b1=[[1.0, 0.0]],
        b2=[[1.0]],
        c1=[[1.0], [0.0]],
        c2=[[1.0]],
        d11=np.zeros((2, 2)),
        d12=[[0.0], [1.0]],
        d21=[[0.0, 1.0]],
        d22=[[0.0]],
        state_names=("x",),
        disturbance_names=("d1", "d2"),
        control_names=("u",),
        performance_names=("z1", "z2"),
        measurement_names=("y",),
        grid=1,
    )


@pytest.fixture
def first_order() -> StateSpaceModel:
    """G(s) = 2 / (s + 4)."""
    return StateSpaceModel(a=[[-4.0]], b=[[2.0]], c=[[1.0]], d=[[0.0]])


def _random_stable(seed: int, states: int, inputs: int = 2, outputs: int = 2) -> StateSpaceModel:
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((states, states))
    shift = max(float(np.max(np.linalg.eigvals(a).real)), 0.0) + 0.5
    return StateSpaceModel(
        a=a - shift * np.eye(states),
        b=rng.standard_normal((states, inputs)),
        c=rng.standard_normal((outputs, states)),
        d=rng.standard_normal((outputs, inputs)),
    )


@pytest.fixture
def random_stable() -> Callable[..., StateSpaceModel]:
    """Factory for seeded random stable systems with max real part -0.5."""
    return _random_stable
