"""Square-root balanced truncation of stable controllers."""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import eigh, matrix_balance, svd

from mtdc_hinf.application.analysis import closed_loop_spectrum, is_unstable
from mtdc_hinf.application.numerics import eigenvalues, hinf_norm, lyapunov_residual, solve_lyapunov
from mtdc_hinf.domain.exceptions import NumericalError, ParameterError, StabilityError
from mtdc_hinf.domain.models import (
    BalancedRealization,
    CompositePlant,
    ControllerReduction,
    ControllerSet,
    HinfController,
    ReductionResult,
    StateSpaceModel,
)

logger = logging.getLogger(__name__)

HSV_CUTOFF = 1e-14
GRAMIAN_CUTOFF = 1e-13
GRAMIAN_RESIDUAL_TOLERANCE = 1e-6
DEFAULT_ENERGY_THRESHOLD = 0.999
BOUND_SLACK = 1e-8


def _factor(gramian: np.ndarray) -> np.ndarray:
    """Factor L with gramian = L L', dropping directions below GRAMIAN_CUTOFF of the largest."""
    values, vectors = eigh(0.5 * (gramian + gramian.T))
    if values.size == 0 or values[-1] <= 0.0:
        return np.zeros((gramian.shape[0], 0))
    keep = values > GRAMIAN_CUTOFF * values[-1]
    return vectors[:, keep] * np.sqrt(values[keep])


def _scaled(system: StateSpaceModel) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(D^-1 A D, D^-1 B, C D) with D the diagonal balancing of A."""
    a, (scale, _) = matrix_balance(system.a, permute=False, separate=True)
    return a, system.b / scale[:, None], system.c * scale


def _gramian(a: np.ndarray, q: np.ndarray, name: str) -> np.ndarray:
    p = solve_lyapunov(a, q)
    residual = lyapunov_residual(a, q, p)
    if residual > GRAMIAN_RESIDUAL_TOLERANCE:
        raise NumericalError(f"{name} gramian residual {residual:.3e} exceeds {GRAMIAN_RESIDUAL_TOLERANCE:.0e}")
    return p


def balance(system: StateSpaceModel) -> BalancedRealization:
    """Balanced realization of a stable system.

    A is first scaled diagonally. Gramians P and Q are factored as Lc Lc' and Lo Lo'
    on their numerically nonzero eigendirections, which removes uncontrollable and
    unobservable modes; the SVD U S V' = Lo' Lc gives the Hankel singular values S and
    the transforms T = Lc V S^-1/2, T^-1 = S^-1/2 U' Lo'. States with
    sigma <= 1e-14 sigma_1 are dropped from the realization and reported as zeros.

    Raises:
        StabilityError: If the system is not stable.
        NumericalError: If a gramian does not satisfy its Lyapunov equation.
    """
    n = system.n_states
    if n == 0:
        return BalancedRealization(system=system, hsv=np.zeros(0))
    spectrum = eigenvalues(system.a)
    if not spectrum.is_stable(threshold=0.0):
        raise StabilityError("system to balance", spectrum.max_real)

    a, b, c = _scaled(system)
    lc = _factor(_gramian(a, b @ b.T, "controllability"))
    lo = _factor(_gramian(a.T, c.T @ c, "observability"))
    hsv = np.zeros(n)
    keep = 0
    if lc.shape[1] and lo.shape[1]:
        u, values, vh = svd(lo.T @ lc, full_matrices=False)
        hsv[: values.size] = values
        keep = int(np.sum(values > HSV_CUTOFF * values[0])) if values[0] > 0.0 else 0
    if keep < n:
        logger.debug("Balanced realization keeps %d of %d states", keep, n)
    if keep == 0:
        a_bal, b_bal, c_bal = np.zeros((0, 0)), np.zeros((0, system.n_inputs)), np.zeros((system.n_outputs, 0))
    else:
        scale = 1.0 / np.sqrt(hsv[:keep])
        t = lc @ vh[:keep, :].T * scale
        t_inv = (u[:, :keep] * scale).T @ lo.T
        a_bal, b_bal, c_bal = t_inv @ a @ t, t_inv @ b, c @ t
    balanced = StateSpaceModel(
        a=a_bal,
        b=b_bal,
        c=c_bal,
        d=system.d,
        state_names=tuple(f"bal:{index}" for index in range(keep)),
        input_names=system.input_names,
        output_names=system.output_names,
    )
    return BalancedRealization(system=balanced, hsv=hsv)


def error_system(full: StateSpaceModel, reduced: StateSpaceModel) -> StateSpaceModel:
    """G - G_r as one state-space system."""
    n, r = full.n_states, reduced.n_states
    a = np.zeros((n + r, n + r))
    a[:n, :n] = full.a
    a[n:, n:] = reduced.a
    return StateSpaceModel(
        a=a,
        b=np.vstack([full.b, reduced.b]),
        c=np.hstack([full.c, -reduced.c]),
        d=full.d - reduced.d,
        input_names=full.input_names,
        output_names=full.output_names,
    )


def truncate(
    balanced: BalancedRealization,
    order: int,
    reference: Optional[StateSpaceModel] = None,
) -> ReductionResult:
    """Keep the first ``order`` balanced states.

    The a-priori bound is 2 * sum of the discarded Hankel singular values. When the
    original system is passed as ``reference`` the error norm is measured too.

    Raises:
        ParameterError: If ``order`` lies outside [1, n].
    """
    n = balanced.order
    if not 1 <= order <= n:
        raise ParameterError("order", f"must lie in [1, {n}], got {order}")
    kept = min(order, balanced.system.n_states)
    system = balanced.system
    reduced = StateSpaceModel(
        a=system.a[:kept, :kept],
        b=system.b[:kept, :],
        c=system.c[:, :kept],
        d=system.d,
        state_names=system.state_names[:kept],
        input_names=system.input_names,
        output_names=system.output_names,
    )
    bound = 2.0 * float(np.sum(balanced.hsv[order:]))
    error_norm = None
    if reference is not None:
        error_norm, _ = hinf_norm(error_system(reference, reduced))
    return ReductionResult(system=reduced, order=order, bound=bound, error_norm=error_norm)


def select_order(balanced: BalancedRealization, energy_threshold: float) -> int:
    """Smallest r whose cumulative Hankel energy reaches the threshold.

    Raises:
        ParameterError: If the threshold lies outside (0, 1] or there is nothing to reduce.
    """
    if not 0.0 < energy_threshold <= 1.0:
        raise ParameterError("energy_threshold", f"must lie in (0, 1], got {energy_threshold}")
    n = balanced.order
    if n == 0:
        raise ParameterError("order", "a static system has no order to select")
    if energy_threshold >= 1.0:
        return n
    return min(int(np.searchsorted(balanced.energy, energy_threshold)) + 1, n)


def _core(controller: HinfController) -> StateSpaceModel:
    return StateSpaceModel(
        a=controller.a,
        b=controller.b,
        c=controller.c,
        d=controller.d,
        input_names=controller.input_names,
        output_names=controller.output_names,
    )


def _plan(controller: HinfController, threshold: float) -> Optional[Tuple[BalancedRealization, int]]:
    if controller.order == 0:
        return None
    if not controller.is_stable:
        logger.warning("Controller of grid %d is unstable and is kept at full order", controller.grid)
        return None
    balanced = balance(_core(controller))
    return balanced, select_order(balanced, threshold)


def reduce_controller(controller: HinfController, order: int, balanced: BalancedRealization) -> ControllerReduction:
    """Truncate one controller to at least ``order`` states within the error bound.

    While the measured error exceeds 2 * sum of the discarded singular values, one more
    state is kept.

    Raises:
        ParameterError: If ``order`` lies outside [1, n].
        NumericalError: If even the full balanced realization misses the bound.
    """
    if not 1 <= order <= balanced.order:
        raise ParameterError("order", f"must lie in [1, {balanced.order}], got {order}")
    reference = _core(controller)
    for kept in range(order, balanced.order + 1):
        result = truncate(balanced, kept, reference=reference)
        assert result.error_norm is not None
        if result.error_norm <= result.bound * (1.0 + BOUND_SLACK) + BOUND_SLACK:
            if kept > order:
                logger.info("Grid %d controller kept at %d states to meet its error bound", controller.grid, kept)
            return ControllerReduction(
                grid=controller.grid, full_order=controller.order, balanced=balanced, result=result
            )
        logger.debug(
            "Truncation of the grid %d controller to %d states misses its bound (%.3e > %.3e)",
            controller.grid,
            kept,
            result.error_norm,
            result.bound,
        )
    raise NumericalError(
        f"Truncation error {result.error_norm:.3e} of the grid {controller.grid} controller "
        f"exceeds its bound {result.bound:.3e}"
    )


def _apply(controller: HinfController, reduction: ControllerReduction) -> HinfController:
    if reduction.result is None:
        return controller
    system = reduction.result.system
    return controller.with_core(system.a, system.b, system.c, system.d)


def reduce_controllers(
    plant: CompositePlant,
    controllers: ControllerSet,
    energy_threshold: float = DEFAULT_ENERGY_THRESHOLD,
    threads: int = 1,
) -> Tuple[ControllerSet, List[ControllerReduction]]:
    """Reduce every controller of a set and keep the closed loop stable.

    Orders start at the energy-threshold selection; while the closed loop with the plant
    is unstable, every reduced controller gains one state until all are at full order.
    """
    with ThreadPoolExecutor(max_workers=max(threads, 1)) as executor:
        plans = list(executor.map(lambda controller: _plan(controller, energy_threshold), controllers.controllers))
    orders: Dict[int, int] = {
        controller.grid: plan[1] for controller, plan in zip(controllers.controllers, plans) if plan is not None
    }

    while True:
        reductions = []
        for controller, plan in zip(controllers.controllers, plans):
            if plan is None:
                reductions.append(ControllerReduction(grid=controller.grid, full_order=controller.order))
            else:
                item = reduce_controller(controller, orders[controller.grid], plan[0])
                assert item.result is not None
                orders[controller.grid] = item.result.order
                reductions.append(item)
        reduced = [_apply(controller, item) for controller, item in zip(controllers.controllers, reductions)]
        if not is_unstable(closed_loop_spectrum(plant, reduced)):
            break
        growable = [
            controller.grid
            for controller, plan in zip(controllers.controllers, plans)
            if plan is not None and orders[controller.grid] < plan[0].order
        ]
        if not growable:
            logger.warning("Closed loop stays unstable at full controller order")
            break
        for grid in growable:
            orders[grid] += 1
        logger.info("Reduced closed loop unstable, raising orders to %s", orders)

    for item in reductions:
        logger.info("Controller of grid %d reduced from %d to %d states", item.grid, item.full_order, item.order)
    return controllers.model_copy(update={"controllers": tuple(reduced)}), reductions


def hsv_table(balanced: BalancedRealization) -> List[Tuple[int, float, float]]:
    """Rows (index, hsv, cumulative energy) starting at index 1."""
    pairs = zip(balanced.hsv, balanced.energy)
    return [(index + 1, float(value), float(energy)) for index, (value, energy) in enumerate(pairs)]


def random_stable_system(rng: np.random.Generator, states: int, inputs: int = 1, outputs: int = 1) -> StateSpaceModel:
    """Random stable system with poles shifted left of -0.1."""
    a = rng.standard_normal((states, states))
    shift = max(float(np.max(np.linalg.eigvals(a).real)), 0.0) + 0.1 + rng.uniform(0.0, 1.0)
    return StateSpaceModel(
        a=a - shift * np.eye(states),
        b=rng.standard_normal((states, inputs)),
        c=rng.standard_normal((outputs, states)),
        d=rng.standard_normal((outputs, inputs)),
    )


def verify_bound(systems: Sequence[StateSpaceModel], order: int = 1) -> List[Tuple[float, float]]:
    """(error norm, bound) of a truncation to ``order`` for each system."""
    pairs = []
    for system in systems:
        result = truncate(balance(system), min(order, system.n_states), reference=system)
        pairs.append((float(result.error_norm or 0.0), result.bound))
    return pairs
