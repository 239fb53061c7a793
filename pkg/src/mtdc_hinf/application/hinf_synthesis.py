"""H-infinity synthesis by gamma-iteration on the two-Riccati (DGKF) conditions."""

import logging
from typing import Callable, List, Optional, Tuple

import numpy as np

from mtdc_hinf.application.numerics import (
    eigenvalues,
    hinf_norm,
    min_eigenvalue,
    riccati_residual,
    solve_are,
    spectral_radius,
)
from mtdc_hinf.domain.enums import ControlCase
from mtdc_hinf.domain.exceptions import InfeasibleError, NoStabilizingControllerError, ParameterError
from mtdc_hinf.domain.models import (
    FeasibilityResult,
    GammaTrial,
    GeneralizedPlant,
    HinfController,
    StateSpaceModel,
    SynthesisReport,
)

logger = logging.getLogger(__name__)

PSD_TOLERANCE = 1e-8
MAX_BRACKET_STEPS = 60
GAMMA_STEP = 1.2
MAX_GAMMA_STEPS = 40

Acceptance = Callable[[StateSpaceModel], Optional[str]]


def _weights(gp: GeneralizedPlant) -> Tuple[np.ndarray, np.ndarray]:
    r = gp.d12.T @ gp.d12
    s = gp.d21 @ gp.d21.T
    for name, matrix in (("d12", r), ("d21", s)):
        if matrix.size and np.linalg.matrix_rank(matrix) < matrix.shape[0]:
            raise ParameterError(name, "feedthrough is rank deficient, regularize the plant first")
    if not np.allclose(gp.c1.T @ gp.d12, 0.0, atol=1e-10) or not np.allclose(gp.b1 @ gp.d21.T, 0.0, atol=1e-10):
        raise ParameterError("d12", "performance and noise channels must be orthogonal to the plant channels")
    if np.any(gp.d11) or np.any(gp.d22):
        raise ParameterError("d11", "direct disturbance and control feedthrough to outputs must be zero")
    return r, s


def _is_psd(x: np.ndarray) -> bool:
    smallest = min_eigenvalue(x)
    return smallest is None or smallest >= -PSD_TOLERANCE * max(1.0, float(np.linalg.norm(x, 2)))


def check_feasibility(gp: GeneralizedPlant, gamma: float) -> FeasibilityResult:
    """Test the two Riccati conditions and the coupling condition at one level.

    Numerical breakdown of a Riccati solve is reported as infeasibility at this level.

    Raises:
        ParameterError: If ``gamma`` is not positive or the plant is not regular.
    """
    if gamma <= 0.0:
        raise ParameterError("gamma", f"must be positive, got {gamma}")
    r, s = _weights(gp)
    inverse_square = gamma**-2
    x_quadratic = inverse_square * gp.b1 @ gp.b1.T - gp.b2 @ np.linalg.solve(r, gp.b2.T)
    x_constant = gp.c1.T @ gp.c1
    y_quadratic = inverse_square * gp.c1.T @ gp.c1 - gp.c2.T @ np.linalg.solve(s, gp.c2)
    y_constant = gp.b1 @ gp.b1.T

    x: Optional[np.ndarray] = None
    y: Optional[np.ndarray] = None
    reasons: List[str] = []
    try:
        x = solve_are(gp.a, x_quadratic, x_constant)
        if not _is_psd(x):
            reasons.append("X is not positive semidefinite")
    except InfeasibleError as error:
        reasons.append(f"X: {error.reason}")
    x_ok = x is not None and not reasons
    try:
        y = solve_are(gp.a.T, y_quadratic, y_constant)
        if not _is_psd(y):
            reasons.append("Y is not positive semidefinite")
    except InfeasibleError as error:
        reasons.append(f"Y: {error.reason}")
    y_ok = y is not None and not any(reason.startswith("Y") for reason in reasons)

    rho: Optional[float] = None
    coupling_ok = False
    if x is not None and y is not None:
        rho = spectral_radius(x @ y)
        coupling_ok = rho < gamma**2
        if not coupling_ok:
            reasons.append(f"spectral radius {rho:.4g} not below gamma^2 {gamma**2:.4g}")

    return FeasibilityResult(
        gamma=gamma,
        feasible=x_ok and y_ok and coupling_ok,
        x_ok=x_ok,
        y_ok=y_ok,
        coupling_ok=coupling_ok,
        x=x,
        y=y,
        rho=rho,
        residual_x=None if x is None else riccati_residual(gp.a, x_quadratic, x_constant, x),
        residual_y=None if y is None else riccati_residual(gp.a.T, y_quadratic, y_constant, y),
        reason=reasons[0] if reasons else None,
    )


def central_controller(gp: GeneralizedPlant, result: FeasibilityResult) -> StateSpaceModel:
    """Central H-infinity controller from feasible Riccati solutions.

    F = -R^-1 B2' X, L = -Y C2' S^-1, Z = (I - Y X / gamma^2)^-1 and
    A_K = A + B1 B1' X / gamma^2 + B2 F + Z L C2, B_K = -Z L, C_K = F, D_K = 0.
    """
    if not result.feasible or result.x is None or result.y is None:
        raise InfeasibleError(result.reason or "controller requested at an infeasible level")
    r, s = _weights(gp)
    x, y, gamma = result.x, result.y, result.gamma
    f = -np.linalg.solve(r, gp.b2.T @ x)
    l = -y @ gp.c2.T @ np.linalg.inv(s)
    z = np.linalg.inv(np.eye(gp.n_states) - gamma**-2 * y @ x)
    a_k = gp.a + gamma**-2 * gp.b1 @ gp.b1.T @ x + gp.b2 @ f + z @ l @ gp.c2
    return StateSpaceModel(
        a=a_k,
        b=-z @ l,
        c=f,
        d=np.zeros((gp.b2.shape[1], gp.c2.shape[0])),
        state_names=tuple(f"k:{index}" for index in range(gp.n_states)),
        input_names=gp.measurement_names,
        output_names=gp.control_names,
    )


def closed_loop_system(gp: GeneralizedPlant, controller: StateSpaceModel) -> StateSpaceModel:
    """Lower fractional transformation of the generalized plant with a controller, from d to z.

    Raises:
        ParameterError: If the controller has a feedthrough while D22 is nonzero.
    """
    a_k, b_k, c_k, d_k = controller.a, controller.b, controller.c, controller.d
    if np.any(gp.d22) and np.any(d_k):
        raise ParameterError("d22", "plants with control feedthrough need a strictly proper controller")
    a = np.block([[gp.a + gp.b2 @ d_k @ gp.c2, gp.b2 @ c_k], [b_k @ gp.c2, a_k]])
    b = np.vstack([gp.b1 + gp.b2 @ d_k @ gp.d21, b_k @ gp.d21])
    c = np.hstack([gp.c1 + gp.d12 @ d_k @ gp.c2, gp.d12 @ c_k])
    d = gp.d11 + gp.d12 @ d_k @ gp.d21
    return StateSpaceModel(
        a=a,
        b=b,
        c=c,
        d=d,
        state_names=gp.state_names + controller.state_names,
        input_names=gp.disturbance_names,
        output_names=gp.performance_names,
    )


class _Search:
    """Bookkeeping of one gamma-iteration."""

    def __init__(self, gp: GeneralizedPlant) -> None:
        self.gp = gp
        self.trials: List[GammaTrial] = []
        self.accepted: List[float] = []
        self.results: dict = {}

    def test(self, gamma: float) -> bool:
        result = check_feasibility(self.gp, gamma)
        self.trials.append(GammaTrial(gamma=gamma, feasible=result.feasible, reason=result.reason))
        self.results[gamma] = result
        if result.feasible:
            self.accepted.append(gamma)
            logger.debug("gamma %.6g feasible (rho %.4g)", gamma, result.rho)
        else:
            logger.debug("gamma %.6g infeasible: %s", gamma, result.reason)
        return result.feasible


def _bracket(search: _Search, gamma_hi: Optional[float], gamma_lo: Optional[float]) -> Tuple[Optional[float], float]:
    hi = gamma_hi if gamma_hi is not None else 1.0
    if not search.test(hi):
        lo = hi
        for _ in range(MAX_BRACKET_STEPS):
            hi *= 2.0
            if search.test(hi):
                return lo, hi
            lo = hi
        raise NoStabilizingControllerError(search.gp.grid, (lo, hi))
    if gamma_lo is not None and gamma_lo < hi:
        return gamma_lo, hi
    lo = hi / 2.0
    for _ in range(MAX_BRACKET_STEPS):
        if not search.test(lo):
            return lo, hi
        hi, lo = lo, lo / 2.0
    # Feasible at every level tried.
    return None, hi


def _rejection(
    gp: GeneralizedPlant,
    core: StateSpaceModel,
    stable_controller: bool,
    accept: Optional[Acceptance],
) -> Optional[str]:
    loop = eigenvalues(closed_loop_system(gp, core).a)
    if not loop.is_stable(threshold=0.0):
        return f"closed loop unstable (max real part {loop.max_real:.3e})"
    if stable_controller and core.n_states:
        controller = eigenvalues(core.a)
        if not controller.is_stable(threshold=0.0):
            return f"controller unstable (max real part {controller.max_real:.3e})"
    if accept is not None:
        return accept(core)
    return None


def _realize(
    search: _Search,
    start: float,
    stable_controller: bool,
    accept: Optional[Acceptance],
) -> Tuple[float, FeasibilityResult, StateSpaceModel]:
    """Walk up from ``start`` by GAMMA_STEP until a realized controller passes every check."""
    gp = search.gp
    gamma = start
    for _ in range(MAX_GAMMA_STEPS):
        result = search.results.get(gamma) or check_feasibility(gp, gamma)
        if result.feasible:
            core = central_controller(gp, result)
            reason = _rejection(gp, core, stable_controller, accept)
            if reason is None:
                return gamma, result, core
            logger.debug("gamma %.6g rejected: %s", gamma, reason)
        else:
            logger.debug("gamma %.6g infeasible on realization: %s", gamma, result.reason)
        gamma *= GAMMA_STEP
    raise NoStabilizingControllerError(gp.grid, (start, gamma / GAMMA_STEP))


def synthesize_core(
    gp: GeneralizedPlant,
    gamma_hi: Optional[float] = None,
    gamma_lo: Optional[float] = None,
    tolerance: float = 1e-3,
    backoff: float = 0.0,
    stable_controller: bool = True,
    accept: Optional[Acceptance] = None,
) -> Tuple[StateSpaceModel, SynthesisReport]:
    """Bisect on gamma and realize the central controller above the optimum.

    The controller is first realized at gamma_opt * (1 + backoff). While the closed loop
    with ``gp`` is unstable, the controller itself is unstable (when ``stable_controller``)
    or ``accept`` returns a reason, the level is raised by GAMMA_STEP.

    Args:
        gp: Regular generalized plant.
        gamma_hi: A level expected to be feasible; found by doubling from 1 if omitted.
        gamma_lo: A level expected to be infeasible; found by halving if omitted.
        tolerance: Relative bracket width at which bisection stops.
        backoff: Relative margin of the first realized level above gamma_opt.
        stable_controller: Require a Hurwitz controller state matrix.
        accept: Extra check on a realized controller; returns None to accept it or the
            reason for rejecting it.

    Returns:
        The controller core from measurements to controls and the synthesis record.

    Raises:
        NoStabilizingControllerError: If no feasible level is found, or no level on the
            ladder yields a controller passing the checks.
    """
    if not 0.0 < tolerance < 1.0:
        raise ParameterError("tolerance", f"must lie in (0, 1), got {tolerance}")
    if backoff < 0.0:
        raise ParameterError("backoff", f"must be non-negative, got {backoff}")
    search = _Search(gp)
    lo, hi = _bracket(search, gamma_hi, gamma_lo)
    while lo is not None and (hi - lo) / hi >= tolerance:
        middle = 0.5 * (lo + hi)
        if search.test(middle):
            hi = middle
        else:
            lo = middle

    target = "centralized plant" if gp.grid is None else f"grid {gp.grid}"
    logger.info("gamma-iteration for %s converged to %.6g after %d trials", target, hi, len(search.trials))
    gamma_final, result, core = _realize(search, hi * (1.0 + backoff), stable_controller, accept)
    if gamma_final > hi * (1.0 + backoff) * (1.0 + 1e-12):
        logger.info(
            "Controller for %s realized at gamma %.6g (%.3gx the optimum)", target, gamma_final, gamma_final / hi
        )

    loop = closed_loop_system(gp, core)
    norm, _ = hinf_norm(loop)
    if norm >= gamma_final:
        logger.warning("Closed-loop norm %.6g is not below gamma %.6g", norm, gamma_final)

    report = SynthesisReport(
        grid=gp.grid,
        gamma_sequence=tuple(search.accepted),
        trials=tuple(search.trials),
        gamma_opt=hi,
        gamma_final=gamma_final,
        x_ok=result.x_ok,
        y_ok=result.y_ok,
        coupling_ok=result.coupling_ok,
        spectral_radius=float(result.rho or 0.0),
        residual_x=float(result.residual_x or 0.0),
        residual_y=float(result.residual_y or 0.0),
        closed_loop_norm=norm,
        closed_loop_stable=True,
        controller_stable=bool(core.n_states == 0 or eigenvalues(core.a).is_stable(threshold=0.0)),
        controller_order=core.n_states,
    )
    return core, report


def gamma_iterate(
    gp: GeneralizedPlant,
    gamma_hi: Optional[float] = None,
    gamma_lo: Optional[float] = None,
    tolerance: float = 1e-3,
    backoff: float = 0.0,
    case: ControlCase = ControlCase.CASE1,
    accept: Optional[Acceptance] = None,
) -> Tuple[HinfController, SynthesisReport]:
    """Decentralized controller for the grid of ``gp``; see ``synthesize_core``.

    Raises:
        ParameterError: If ``gp`` has no grid index.
    """
    if gp.grid is None:
        raise ParameterError("grid", "decentralized synthesis needs a grid-specific plant")
    core, report = synthesize_core(gp, gamma_hi, gamma_lo, tolerance, backoff, accept=accept)
    controller = HinfController(
        grid=gp.grid,
        case=case,
        a=core.a,
        b=core.b,
        c=core.c,
        d=core.d,
        input_names=core.input_names,
        output_names=core.output_names,
        integrated=gp.integrated,
        gamma=report.gamma_final,
    )
    return controller, report
