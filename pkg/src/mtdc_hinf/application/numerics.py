"""Dense linear-algebra kernels for continuous-time LTI systems.

Every function is a pure function of its inputs.
"""

import logging
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import LinAlgError, eigvals, expm, matrix_balance, schur, solve_continuous_lyapunov, svdvals

from mtdc_hinf.domain.exceptions import DimensionError, InfeasibleError, NormUndefinedError, StabilityError
from mtdc_hinf.domain.models import Spectrum, StateSpaceModel

logger = logging.getLogger(__name__)

IMAGINARY_AXIS_TOLERANCE = 1e-9
STABILIZING_MARGIN = -1e-10
ARE_RESIDUAL_TOLERANCE = 1e-6
LYAPUNOV_RESIDUAL_TOLERANCE = 1e-8
REFINEMENT_STEPS = 3


def _as_square(name: str, operation: str, matrix: np.ndarray) -> np.ndarray:
    array = np.asarray(matrix, dtype=float)
    if array.ndim != 2 or array.shape[0] != array.shape[1]:
        raise DimensionError(operation, f"{name} must be square, got shape {array.shape}")
    if not np.all(np.isfinite(array)):
        raise DimensionError(operation, f"{name} has non-finite entries")
    return array


def eigenvalues(a: np.ndarray) -> Spectrum:
    """All eigenvalues of a square matrix.

    Raises:
        DimensionError: If ``a`` is not square.
    """
    a = _as_square("A", "eigenvalues", a)
    if a.size == 0:
        return Spectrum(eigenvalues=np.zeros(0, dtype=complex))
    return Spectrum(eigenvalues=eigvals(a))


def max_real_part(a: np.ndarray) -> float:
    return eigenvalues(a).max_real


def is_hurwitz(a: np.ndarray, margin: float = 0.0) -> bool:
    """True when every eigenvalue of ``a`` has real part below ``margin``."""
    return max_real_part(a) < margin


def solve_lyapunov(a: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Solve A P + P A^T + Q = 0 for the symmetric P.

    Raises:
        DimensionError: If the operands are not compatible square matrices.
        StabilityError: If ``a`` is not Hurwitz.
    """
    a = _as_square("A", "solve_lyapunov", a)
    q = _as_square("Q", "solve_lyapunov", q)
    if a.shape != q.shape:
        raise DimensionError("solve_lyapunov", f"A is {a.shape} but Q is {q.shape}")
    if a.size == 0:
        return np.zeros((0, 0))
    worst = max_real_part(a)
    if worst >= 0.0:
        raise StabilityError("Lyapunov state matrix", worst)
    q = 0.5 * (q + q.T)
    size = max(1.0, float(np.linalg.norm(q)))
    p = solve_continuous_lyapunov(a, -q)
    p = 0.5 * (p + p.T)
    for _ in range(REFINEMENT_STEPS):
        residual = a @ p + p @ a.T + q
        if float(np.linalg.norm(residual)) <= LYAPUNOV_RESIDUAL_TOLERANCE * size:
            break
        correction = solve_continuous_lyapunov(a, -residual)
        p = p + 0.5 * (correction + correction.T)
    return p


def lyapunov_residual(a: np.ndarray, q: np.ndarray, p: np.ndarray) -> float:
    """Frobenius norm of A P + P A^T + Q relative to max(1, |Q|)."""
    residual = a @ p + p @ a.T + q
    return float(np.linalg.norm(residual)) / max(1.0, float(np.linalg.norm(q)))


def _symplectic_scaling(h: np.ndarray, n: int) -> np.ndarray:
    """Diagonal scaling diag(D, D^-1) that balances a Hamiltonian without breaking its structure."""
    magnitude = np.abs(h)
    np.fill_diagonal(magnitude, 0.0)
    _, (scale, _) = matrix_balance(magnitude, separate=True, permute=False)
    if np.allclose(scale, np.ones_like(scale)):
        return np.ones(2 * n)
    exponents = np.log2(scale)
    half = np.round((exponents[n:] - exponents[:n]) / 2.0)
    return 2.0 ** np.r_[half, -half]


def solve_are(
    a: np.ndarray,
    r_term: np.ndarray,
    q_term: np.ndarray,
    balanced: bool = True,
    tolerance: float = ARE_RESIDUAL_TOLERANCE,
) -> np.ndarray:
    """Stabilizing solution of A^T X + X A + X R X + Q = 0.

    The solution spans the stable invariant subspace of the Hamiltonian
    [[A, R], [-Q, -A^T]], obtained from an ordered real Schur decomposition.

    Args:
        a: State matrix.
        r_term: Symmetric quadratic term R.
        q_term: Symmetric constant term Q.
        balanced: Apply symplectic diagonal scaling before the decomposition.
        tolerance: Bound on the Frobenius residual relative to max(1, |Q|). Up to three
            Newton corrections are applied before the bound is enforced.

    Returns:
        Symmetric X with A + R X Hurwitz.

    Raises:
        DimensionError: On incompatible shapes.
        InfeasibleError: If no stabilizing solution exists or it cannot be computed reliably.
    """
    a = _as_square("A", "solve_are", a)
    r_term = _as_square("R", "solve_are", r_term)
    q_term = _as_square("Q", "solve_are", q_term)
    if not a.shape == r_term.shape == q_term.shape:
        raise DimensionError("solve_are", f"A {a.shape}, R {r_term.shape}, Q {q_term.shape}")
    n = a.shape[0]
    if n == 0:
        return np.zeros((0, 0))
    r_term = 0.5 * (r_term + r_term.T)
    q_term = 0.5 * (q_term + q_term.T)

    hamiltonian = np.block([[a, r_term], [-q_term, -a.T]])
    scale = _symplectic_scaling(hamiltonian, n) if balanced else np.ones(2 * n)
    hamiltonian = hamiltonian * (scale[:, None] / scale[None, :])

    try:
        triangular, basis, stable_count = schur(hamiltonian, output="real", sort="lhp")
    except (LinAlgError, ValueError) as error:
        raise InfeasibleError(f"Schur decomposition failed: {error}") from error

    # Absolute tolerance on the real part, independent of |H|.
    spectrum = eigvals(triangular)
    if np.any(np.abs(spectrum.real) < IMAGINARY_AXIS_TOLERANCE):
        raise InfeasibleError("Hamiltonian has eigenvalues on the imaginary axis")
    if stable_count != n:
        raise InfeasibleError(f"stable subspace has dimension {stable_count}, expected {n}")

    u11 = basis[:n, :n]
    u21 = basis[n:, :n]
    if 1.0 / np.linalg.cond(u11) < np.finfo(float).eps:
        raise InfeasibleError("stable subspace is not the graph of a matrix")

    symmetry = u11.T @ u21
    asymmetry = np.linalg.norm(symmetry - symmetry.T, 1)
    if asymmetry > max(np.spacing(1000.0), 0.1 * np.linalg.norm(symmetry, 1)):
        raise InfeasibleError("Hamiltonian eigenvalues too close to the imaginary axis")

    x = np.linalg.solve(u11.T, u21.T).T
    x = x * (scale[:n, None] * scale[None, :n])
    x = 0.5 * (x + x.T)

    closed = max_real_part(a + r_term @ x)
    if closed >= STABILIZING_MARGIN:
        raise InfeasibleError(f"solution is not stabilizing (max real part {closed:.3e})")

    x = _newton_refine(a, r_term, q_term, x, tolerance)
    relative = riccati_residual(a, r_term, q_term, x)
    if relative > tolerance:
        raise InfeasibleError(f"residual {relative:.3e} exceeds {tolerance:.1e}")
    closed = max_real_part(a + r_term @ x)
    if closed >= STABILIZING_MARGIN:
        raise InfeasibleError(f"refined solution is not stabilizing (max real part {closed:.3e})")
    return x


def _newton_refine(
    a: np.ndarray, r_term: np.ndarray, q_term: np.ndarray, x: np.ndarray, tolerance: float
) -> np.ndarray:
    """Newton corrections (A + R X)' E + E (A + R X) = -residual, kept while the residual shrinks."""
    relative = riccati_residual(a, r_term, q_term, x)
    for step in range(REFINEMENT_STEPS):
        if relative <= tolerance:
            break
        residual = a.T @ x + x @ a + x @ r_term @ x + q_term
        try:
            correction = solve_continuous_lyapunov((a + r_term @ x).T, -residual)
        except (LinAlgError, ValueError):
            break
        candidate = x + 0.5 * (correction + correction.T)
        refined = riccati_residual(a, r_term, q_term, candidate)
        if not refined < relative:
            break
        logger.debug("Riccati Newton step %d: residual %.3e -> %.3e", step + 1, relative, refined)
        x, relative = candidate, refined
    return x


def riccati_residual(a: np.ndarray, r_term: np.ndarray, q_term: np.ndarray, x: np.ndarray) -> float:
    """Frobenius norm of A^T X + X A + X R X + Q relative to max(1, |Q|)."""
    residual = a.T @ x + x @ a + x @ r_term @ x + q_term
    return float(np.linalg.norm(residual)) / max(1.0, float(np.linalg.norm(q_term)))


def svd_singular_values(m: np.ndarray) -> np.ndarray:
    """Singular values, non-increasing."""
    m = np.asarray(m)
    if m.size == 0:
        return np.zeros(0)
    return svdvals(m)


def _sigma_max(system: StateSpaceModel, omega: float) -> float:
    return float(svd_singular_values(system.evaluate(1j * omega))[0])


def _norm_hamiltonian(system: StateSpaceModel, gamma: float) -> np.ndarray:
    a, b, c, d = system.a, system.b, system.c, system.d
    r = d.T @ d - gamma**2 * np.eye(d.shape[1])
    s = d @ d.T - gamma**2 * np.eye(d.shape[0])
    r_inv = np.linalg.inv(r)
    s_inv = np.linalg.inv(s)
    top_left = a - b @ r_inv @ d.T @ c
    return np.block(
        [
            [top_left, -gamma * b @ r_inv @ b.T],
            [gamma * c.T @ s_inv @ c, -top_left.T],
        ]
    )


def hinf_norm(system: StateSpaceModel, tolerance: float = 1e-5, max_iterations: int = 50) -> Tuple[float, float]:
    """H-infinity norm of a stable system and a frequency where it is attained.

    Level-set iteration on the imaginary-axis eigenvalues of the norm Hamiltonian,
    warm-started from a frequency grid built around the system poles.

    Returns:
        (norm, peak frequency in rad/s). The peak frequency is ``inf`` when the
        feedthrough dominates.

    Raises:
        NormUndefinedError: If the system is not stable.
    """
    d_norm = float(svd_singular_values(system.d)[0]) if system.d.size else 0.0
    if system.n_states == 0 or not np.any(system.b) or not np.any(system.c):
        return d_norm, 0.0

    poles = eigvals(system.a)
    worst = float(np.max(poles.real))
    if worst >= 0.0:
        raise NormUndefinedError(worst)

    magnitudes = np.abs(poles)
    low = max(float(np.min(magnitudes)), 1e-6)
    high = max(float(np.max(magnitudes)), low)
    candidates = np.unique(
        np.concatenate(
            [
                [0.0],
                np.abs(poles.imag),
                magnitudes,
                np.logspace(np.log10(low) - 2.0, np.log10(high) + 2.0, 60),
            ]
        )
    )
    values = np.array([_sigma_max(system, omega) for omega in candidates])
    best = int(np.argmax(values))
    gamma_lb, peak = float(values[best]), float(candidates[best])
    if d_norm >= gamma_lb:
        gamma_lb, peak = d_norm, float("inf")
    if gamma_lb == 0.0:
        return 0.0, 0.0

    for iteration in range(max_iterations):
        gamma = (1.0 + 2.0 * tolerance) * gamma_lb
        hamiltonian = _norm_hamiltonian(system, gamma)
        spectrum = eigvals(hamiltonian)
        axis_tolerance = 1e-8 * max(1.0, float(np.linalg.norm(hamiltonian, 1)))
        crossings = np.unique(np.abs(spectrum[np.abs(spectrum.real) <= axis_tolerance].imag))
        if crossings.size == 0:
            logger.debug("hinf_norm converged after %d iterations", iteration)
            break
        bounds = np.concatenate([[0.0], crossings])
        midpoints = 0.5 * (bounds[:-1] + bounds[1:])
        midpoints = np.concatenate([midpoints, crossings])
        trial = np.array([_sigma_max(system, omega) for omega in midpoints])
        index = int(np.argmax(trial))
        if trial[index] <= gamma_lb:
            break
        gamma_lb, peak = float(trial[index]), float(midpoints[index])
    return gamma_lb, peak


def zoh_discretize(system: StateSpaceModel, h: float) -> Tuple[np.ndarray, np.ndarray]:
    """Exact discretization for piecewise-constant inputs.

    Returns:
        (A_d, B_d) with A_d = exp(A h) and B_d = int_0^h exp(A t) dt B.

    Raises:
        DimensionError: If ``h`` is not positive.
    """
    if h <= 0.0:
        raise DimensionError("zoh_discretize", f"time step must be positive, got {h}")
    n, m = system.n_states, system.n_inputs
    augmented = np.zeros((n + m, n + m))
    augmented[:n, :n] = system.a * h
    augmented[:n, n:] = system.b * h
    exponential = expm(augmented)
    return exponential[:n, :n], exponential[:n, n:]


def dc_gain(system: StateSpaceModel) -> np.ndarray:
    """Static gain D - C A^-1 B.

    Raises:
        StabilityError: If A is singular.
    """
    if system.n_states == 0:
        return np.array(system.d)
    try:
        return system.d - system.c @ np.linalg.solve(system.a, system.b)
    except np.linalg.LinAlgError as error:
        raise StabilityError("system with singular state matrix", 0.0) from error


def spectral_radius(m: np.ndarray) -> float:
    if m.size == 0:
        return 0.0
    return float(np.max(np.abs(eigvals(m))))


def min_eigenvalue(symmetric: np.ndarray) -> Optional[float]:
    if symmetric.size == 0:
        return None
    return float(np.min(np.linalg.eigvalsh(0.5 * (symmetric + symmetric.T))))
