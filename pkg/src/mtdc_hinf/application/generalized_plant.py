"""Generalized plants for decentralized and centralized H-infinity synthesis."""

import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from mtdc_hinf.domain.enums import WeightingKind
from mtdc_hinf.domain.exceptions import ParameterError, WiringError
from mtdc_hinf.domain.models import INTEGRAL_SUFFIX, CompositePlant, GeneralizedPlant
from mtdc_hinf.domain.scenario import WeightingFunction, WeightSet

logger = logging.getLogger(__name__)

INTEGRATOR_PREFIX = "int:"
NOISE_PREFIX = "noise:"
PENALTY_PREFIX = "penalty:"
PERFORMANCE_PREFIX = "z:"

Realization = Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]


def realize_weight(weight: WeightingFunction) -> Realization:
    """Minimal SISO realization (a, b, c, d) of a weighting function."""
    if weight.kind == WeightingKind.UNITY:
        return np.zeros((0, 0)), np.zeros((0, 1)), np.zeros((1, 0)), np.array([[weight.gain]])
    if weight.kind == WeightingKind.LOW_PASS:
        assert weight.cutoff is not None
        root = np.sqrt(weight.cutoff)
        return np.array([[-weight.cutoff]]), np.array([[root]]), np.array([[weight.gain * root]]), np.zeros((1, 1))
    assert weight.center is not None and weight.bandwidth is not None
    root = np.sqrt(weight.bandwidth)
    a = np.array([[0.0, weight.center], [-weight.center, -weight.bandwidth]])
    return a, np.array([[0.0], [root]]), np.array([[0.0, weight.gain * root]]), np.zeros((1, 1))


def weight_bank(weight: WeightingFunction, size: int) -> Realization:
    """The weight applied independently to ``size`` channels."""
    a, b, c, d = realize_weight(weight)
    identity = np.eye(size)
    return np.kron(identity, a), np.kron(identity, b), np.kron(identity, c), np.kron(identity, d)


def _weight_states(prefix: str, channels: Sequence[str], order: int) -> Tuple[str, ...]:
    return tuple(f"{prefix}{channel}:{index}" for channel in channels for index in range(order))


def _performance_channels(grid: int) -> List[str]:
    df, vdc = f"g{grid}.df", f"g{grid}.vdc"
    return [df, df + INTEGRAL_SUFFIX, vdc, vdc + INTEGRAL_SUFFIX]


def _assemble(
    plant: CompositePlant,
    controls: Sequence[str],
    disturbances: Sequence[str],
    measurements: Sequence[str],
    integrated: Sequence[str],
    performance: Sequence[str],
    weights: WeightSet,
    grid: Optional[int],
) -> GeneralizedPlant:
    system = plant.system
    n = system.n_states
    n_int = len(integrated)

    # Plant augmented with integrators of the integrated outputs
    rows = [system.output_index(name) for name in integrated]
    a_p = np.block([[system.a, np.zeros((n, n_int))], [system.c[rows, :], np.zeros((n_int, n_int))]])
    n_p = n + n_int

    def columns(names: Sequence[str]) -> np.ndarray:
        b = system.b[:, [system.input_index(name) for name in names]]
        return np.vstack([b, np.zeros((n_int, len(names)))])

    def outputs(names: Sequence[str]) -> np.ndarray:
        c = np.zeros((len(names), n_p))
        for row, name in enumerate(names):
            if name.endswith(INTEGRAL_SUFFIX):
                c[row, n + list(integrated).index(name[: -len(INTEGRAL_SUFFIX)])] = 1.0
            else:
                c[row, :n] = system.c[system.output_index(name), :]
        return c

    b_pd, b_pu = columns(disturbances), columns(controls)
    c_e, c_y = outputs(performance), outputs(measurements)

    a_wd, b_wd, c_wd, d_wd = weight_bank(weights.disturbance, len(disturbances))
    a_we, b_we, c_we, d_we = weight_bank(weights.performance, len(performance))
    a_wu, b_wu, c_wu, d_wu = weight_bank(weights.control, len(controls))
    n_wd, n_we, n_wu = a_wd.shape[0], a_we.shape[0], a_wu.shape[0]
    n_total = n_p + n_wd + n_we + n_wu
    nz_e, nu, nd, ny = len(performance), len(controls), len(disturbances), len(measurements)

    a1 = np.zeros((n_total, n_total))
    p, wd, we = slice(0, n_p), slice(n_p, n_p + n_wd), slice(n_p + n_wd, n_p + n_wd + n_we)
    wu = slice(n_p + n_wd + n_we, n_total)
    a1[p, p] = a_p
    a1[p, wd] = b_pd @ c_wd
    a1[wd, wd] = a_wd
    a1[we, p] = b_we @ c_e
    a1[we, we] = a_we
    a1[wu, wu] = a_wu

    b1 = np.zeros((n_total, nd))
    b1[p, :] = b_pd @ d_wd
    b1[wd, :] = b_wd
    b2 = np.zeros((n_total, nu))
    b2[p, :] = b_pu
    b2[wu, :] = b_wu

    c1 = np.zeros((nz_e + nu, n_total))
    c1[:nz_e, p] = d_we @ c_e
    c1[:nz_e, we] = c_we
    c1[nz_e:, wu] = c_wu
    d12 = np.vstack([np.zeros((nz_e, nu)), d_wu])
    c2 = np.zeros((ny, n_total))
    c2[:, p] = c_y

    if not np.allclose(c1.T @ d12, 0.0, atol=1e-12):
        raise ParameterError("weights", "performance and control penalties must not overlap")

    state_names = (
        system.state_names
        + tuple(INTEGRATOR_PREFIX + name for name in integrated)
        + _weight_states("wd:", disturbances, n_wd // max(nd, 1))
        + _weight_states("we:", performance, n_we // max(nz_e, 1))
        + _weight_states("wu:", controls, n_wu // max(nu, 1))
    )
    gp = GeneralizedPlant(
        a=a1,
        b1=b1,
        b2=b2,
        c1=c1,
        c2=c2,
        d11=np.zeros((nz_e + nu, nd)),
        d12=d12,
        d21=np.zeros((ny, nd)),
        d22=np.zeros((ny, nu)),
        state_names=state_names,
        disturbance_names=tuple(disturbances),
        control_names=tuple(controls),
        performance_names=tuple(PERFORMANCE_PREFIX + name for name in list(performance) + list(controls)),
        measurement_names=tuple(measurements),
        integrated=tuple(integrated),
        grid=grid,
    )
    logger.debug(
        "Generalized plant for %s: %d states, %d disturbances, %d controls, %d measurements",
        "centralized synthesis" if grid is None else f"grid {grid}",
        gp.n_states,
        nd,
        nu,
        ny,
    )
    return gp


def make_generalized_plant(plant: CompositePlant, k: int, weights: WeightSet) -> GeneralizedPlant:
    """Generalized plant seen by the decentralized controller of grid k.

    Disturbances are the load and wind deviations followed by the other grids'
    references; the controller drives r_k and measures Y_Tk together with the integrals
    of its local frequency and DC voltage deviations.

    Raises:
        WiringError: If grid k or one of its channels is missing from the plant.
    """
    if k not in plant.references:
        raise WiringError([f"g{k}"], reason="grid not present in the plant")
    integrated = [f"g{k}.df", f"g{k}.vdc"]
    measurements = list(plant.measurement_names(k)) + [name + INTEGRAL_SUFFIX for name in integrated]
    return _assemble(
        plant,
        controls=plant.references[k],
        disturbances=plant.drk_names(k),
        measurements=measurements,
        integrated=integrated,
        performance=_performance_channels(k),
        weights=weights,
        grid=k,
    )


def make_centralized_plant(plant: CompositePlant, weights: WeightSet) -> GeneralizedPlant:
    """One generalized plant over every grid's references and measurements."""
    integrated = [name for k in plant.grids for name in (f"g{k}.df", f"g{k}.vdc")]
    measurements = [name for k in plant.grids for name in plant.measurements[k]]
    measurements += [name + INTEGRAL_SUFFIX for name in integrated]
    return _assemble(
        plant,
        controls=plant.all_references,
        disturbances=plant.disturbances,
        measurements=measurements,
        integrated=integrated,
        performance=[name for k in plant.grids for name in _performance_channels(k)],
        weights=weights,
        grid=None,
    )


def _is_singular(m: np.ndarray) -> bool:
    return m.size > 0 and np.linalg.matrix_rank(m) < m.shape[0]


def regularize(gp: GeneralizedPlant, epsilon: float) -> GeneralizedPlant:
    """Make D12 full column rank and D21 full row rank by appending small channels.

    Measurement noise inputs ``noise:<y>`` enter every measurement with gain sqrt(eps);
    penalty outputs ``penalty:<u>`` weigh every control with gain sqrt(eps). Appended
    channels are orthogonal to the existing ones, so the standard DGKF orthogonality
    assumptions keep holding.
    """
    if epsilon <= 0.0:
        raise ParameterError("regularization", f"must be positive, got {epsilon}")
    root = np.sqrt(epsilon)
    updates = {
        "b1": gp.b1,
        "c1": gp.c1,
        "d11": gp.d11,
        "d12": gp.d12,
        "d21": gp.d21,
        "disturbance_names": gp.disturbance_names,
        "performance_names": gp.performance_names,
    }
    ny, nu = len(gp.measurement_names), len(gp.control_names)
    if _is_singular(gp.d21 @ gp.d21.T):
        updates["b1"] = np.hstack([updates["b1"], np.zeros((gp.n_states, ny))])
        updates["d11"] = np.hstack([updates["d11"], np.zeros((updates["d11"].shape[0], ny))])
        updates["d21"] = np.hstack([updates["d21"], root * np.eye(ny)])
        noise = tuple(NOISE_PREFIX + name for name in gp.measurement_names)
        updates["disturbance_names"] = gp.disturbance_names + noise
    if _is_singular(gp.d12.T @ gp.d12):
        updates["c1"] = np.vstack([updates["c1"], np.zeros((nu, gp.n_states))])
        updates["d11"] = np.vstack([updates["d11"], np.zeros((nu, updates["d11"].shape[1]))])
        updates["d12"] = np.vstack([updates["d12"], root * np.eye(nu)])
        penalty = tuple(PENALTY_PREFIX + name for name in gp.control_names)
        updates["performance_names"] = gp.performance_names + penalty
    return GeneralizedPlant.model_validate({**gp.model_dump(), **updates})
