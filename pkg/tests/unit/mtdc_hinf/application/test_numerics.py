"""Unit tests for the linear-algebra kernels."""

import numpy as np
import pytest
from scipy.linalg import solve_continuous_are

from mtdc_hinf.application.numerics import (
    dc_gain,
    eigenvalues,
    hinf_norm,
    is_hurwitz,
    lyapunov_residual,
    riccati_residual,
    solve_are,
    solve_lyapunov,
    spectral_radius,
    zoh_discretize,
)
from mtdc_hinf.domain.exceptions import DimensionError, InfeasibleError, NormUndefinedError, StabilityError
from mtdc_hinf.domain.models import StateSpaceModel


def _resonant(zeta: float) -> StateSpaceModel:
    """1 / (s^2 + 2 zeta s + 1)."""
    return StateSpaceModel(a=[[0.0, 1.0], [-1.0, -2.0 * zeta]], b=[[0.0], [1.0]], c=[[1.0, 0.0]], d=[[0.0]])


class TestEigenvalues:
    """Test cases for eigenvalues and stability tests."""

    def test_diagonal(self):
        """Test the spectrum of a triangular matrix."""
        spectrum = eigenvalues(np.array([[-1.0, 5.0], [0.0, -3.0]]))

        np.testing.assert_allclose(np.sort(spectrum.eigenvalues.real), [-3.0, -1.0])
        assert spectrum.is_stable()

    def test_non_square(self):
        """Test that a non-square matrix raises DimensionError."""
        with pytest.raises(DimensionError, match="must be square"):
            eigenvalues(np.zeros((2, 3)))

    def test_empty(self):
        """Test that an empty matrix has an empty, stable spectrum."""
        assert len(eigenvalues(np.zeros((0, 0)))) == 0

    def test_is_hurwitz(self):
        """Test the Hurwitz check with a margin."""
        assert is_hurwitz(np.array([[-1.0]]))
        assert not is_hurwitz(np.array([[-1.0]]), margin=-2.0)

    def test_spectral_radius(self):
        """Test the spectral radius of a rotation-like matrix."""
        assert spectral_radius(np.array([[0.0, -2.0], [2.0, 0.0]])) == pytest.approx(2.0)
        assert spectral_radius(np.zeros((0, 0))) == 0.0


class TestSolveLyapunov:
    """Test cases for solve_lyapunov."""

    def test_residual(self, random_stable):
        """Test that the solution satisfies A P + P A^T + Q = 0 and is symmetric."""
        system = random_stable(3, states=5)
        q = system.b @ system.b.T

        p = solve_lyapunov(system.a, q)

        np.testing.assert_allclose(system.a @ p + p @ system.a.T + q, 0.0, atol=1e-9)
        np.testing.assert_allclose(p, p.T)

    def test_scalar(self):
        """Test the scalar solution -q / (2a)."""
        assert solve_lyapunov(np.array([[-2.0]]), np.array([[4.0]]))[0, 0] == pytest.approx(1.0)

    def test_stiff_residual(self):
        """Test the residual bound 1e-8 max(1, |Q|) with time scales eight decades apart."""
        a = np.array([[-1.0, 1e3], [0.0, -1e8]])
        q = np.array([[1.0, 0.5], [0.5, 4.0]])

        p = solve_lyapunov(a, q)

        assert lyapunov_residual(a, q, p) <= 1e-8

    def test_unstable(self):
        """Test that a non-Hurwitz A raises StabilityError."""
        with pytest.raises(StabilityError):
            solve_lyapunov(np.array([[0.5]]), np.array([[1.0]]))

    def test_shape_mismatch(self):
        """Test that incompatible operands raise DimensionError."""
        with pytest.raises(DimensionError):
            solve_lyapunov(np.array([[-1.0]]), np.eye(2))


class TestSolveAre:
    """Test cases for solve_are."""

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_matches_lqr_riccati(self, seed):
        """Test agreement with the control Riccati equation on random stabilizable data."""
        rng = np.random.default_rng(seed)
        a = rng.standard_normal((4, 4))
        b = rng.standard_normal((4, 2))
        c = rng.standard_normal((1, 4))
        q = c.T @ c + np.eye(4)

        x = solve_are(a, -b @ b.T, q)
        expected = solve_continuous_are(a, b, q, np.eye(2))

        np.testing.assert_allclose(x, expected, rtol=1e-6, atol=1e-8)
        assert is_hurwitz(a - b @ b.T @ x)
        assert riccati_residual(a, -b @ b.T, q, x) < 1e-8

    def test_scalar_closed_form(self):
        """Test x^2 - 2x - 1 = 0 with a = 1, r = -1, q = 1, stabilizing root 1 + sqrt(2)."""
        x = solve_are(np.array([[1.0]]), np.array([[-1.0]]), np.array([[1.0]]))

        assert x[0, 0] == pytest.approx(1.0 + np.sqrt(2.0))

    def test_imaginary_axis(self):
        """Test that imaginary-axis Hamiltonian eigenvalues raise InfeasibleError."""
        with pytest.raises(InfeasibleError, match="imaginary axis") as error:
            solve_are(np.array([[0.0]]), np.array([[1.0]]), np.array([[1.0]]))

        assert "imaginary axis" in error.value.reason

    def test_stiff_hamiltonian_accepted(self):
        """Test that a stable slow mode next to a very fast one is not taken for an imaginary-axis eigenvalue."""
        diagonal = np.array([-0.5, -2e9])
        a = np.diag(diagonal)

        x = solve_are(a, -np.eye(2), np.eye(2))

        # Stabilizing root of x^2 - 2 a x - 1 = 0, written without cancellation
        expected = 1.0 / (np.sqrt(diagonal**2 + 1.0) - diagonal)
        np.testing.assert_allclose(np.diag(x), expected, rtol=1e-6)
        assert is_hurwitz(a - x)

    def test_residual_relative_to_constant_term(self):
        """Test the returned solution against |res| <= 1e-6 max(1, |Q|) on a stiff instance."""
        a = np.array([[-1.0, 3e4], [0.0, -5e5]])
        r = -np.diag([1.0, 1e-3])
        q = np.diag([2.0, 1.0])

        x = solve_are(a, r, q)

        assert riccati_residual(a, r, q, x) <= 1e-6

    def test_unconverged_residual_rejected(self):
        """Test that a residual above the requested tolerance raises InfeasibleError."""
        rng = np.random.default_rng(4)
        a = rng.standard_normal((4, 4))
        b = rng.standard_normal((4, 2))

        with pytest.raises(InfeasibleError, match="residual"):
            solve_are(a, -b @ b.T, np.eye(4), tolerance=1e-300)

    def test_unbalanced_matches_balanced(self):
        """Test that symplectic scaling does not change the solution."""
        a = np.array([[-1.0, 1e3], [0.0, -2.0]])
        r = -np.diag([1.0, 1e-2])
        q = np.diag([1e-2, 1.0])

        np.testing.assert_allclose(solve_are(a, r, q), solve_are(a, r, q, balanced=False), rtol=1e-6, atol=1e-10)

    def test_shape_mismatch(self):
        """Test that incompatible operands raise DimensionError."""
        with pytest.raises(DimensionError):
            solve_are(np.eye(2), np.eye(3), np.eye(2))


class TestHinfNorm:
    """Test cases for hinf_norm."""

    def test_first_order(self, first_order):
        """Test that the norm of 2 / (s + 4) is its DC gain."""
        norm, peak = hinf_norm(first_order)

        assert norm == pytest.approx(0.5, rel=1e-6)
        assert peak == 0.0

    def test_resonant_peak(self):
        """Test the resonant peak 1 / (2 zeta sqrt(1 - zeta^2)) at sqrt(1 - 2 zeta^2)."""
        zeta = 0.1
        norm, peak = hinf_norm(_resonant(zeta))

        assert norm == pytest.approx(1.0 / (2.0 * zeta * np.sqrt(1.0 - zeta**2)), rel=1e-4)
        assert peak == pytest.approx(np.sqrt(1.0 - 2.0 * zeta**2), rel=1e-2)

    def test_feedthrough_dominated(self):
        """Test that an all-pass-like high-frequency gain reports an infinite peak."""
        system = StateSpaceModel(a=[[-1.0]], b=[[1.0]], c=[[1.0]], d=[[-2.0]])

        norm, peak = hinf_norm(system)

        assert norm == pytest.approx(2.0, rel=1e-4)
        assert peak == float("inf")

    def test_static(self):
        """Test the norm of a memoryless system."""
        system = StateSpaceModel(a=np.zeros((0, 0)), b=np.zeros((0, 2)), c=np.zeros((1, 0)), d=[[3.0, 4.0]])

        assert hinf_norm(system)[0] == pytest.approx(5.0)

    @pytest.mark.parametrize("seed", [4, 5, 6, 7])
    def test_bounds_dense_grid(self, seed, random_stable):
        """Test that the norm dominates a dense frequency grid and is attained at the peak."""
        system = random_stable(seed, states=6)
        grid = np.concatenate([[0.0], np.logspace(-3, 3, 2000)])
        sampled = max(np.linalg.svd(system.evaluate(1j * omega), compute_uv=False)[0] for omega in grid)

        norm, peak = hinf_norm(system)

        assert norm * (1.0 + 1e-4) >= sampled
        if np.isfinite(peak):
            attained = np.linalg.svd(system.evaluate(1j * peak), compute_uv=False)[0]
            assert attained == pytest.approx(norm, rel=1e-6)

    def test_unstable(self):
        """Test that an unstable system raises NormUndefinedError."""
        with pytest.raises(NormUndefinedError):
            hinf_norm(StateSpaceModel(a=[[1.0]], b=[[1.0]], c=[[1.0]], d=[[0.0]]))


class TestZohDiscretize:
    """Test cases for zoh_discretize."""

    def test_scalar(self):
        """Test the closed form for a first-order lag."""
        system = StateSpaceModel(a=[[-1.0]], b=[[1.0]], c=[[1.0]], d=[[0.0]])

        a_d, b_d = zoh_discretize(system, 0.1)

        assert a_d[0, 0] == pytest.approx(np.exp(-0.1))
        assert b_d[0, 0] == pytest.approx(1.0 - np.exp(-0.1))

    def test_semigroup(self, random_stable):
        """Test that two steps of h equal one step of 2h."""
        system = random_stable(8, states=4)

        a_h, b_h = zoh_discretize(system, 0.05)
        a_2h, b_2h = zoh_discretize(system, 0.1)

        np.testing.assert_allclose(a_2h, a_h @ a_h, atol=1e-12)
        np.testing.assert_allclose(b_2h, a_h @ b_h + b_h, atol=1e-12)

    def test_integrator(self):
        """Test that a pure integrator accumulates h per step."""
        system = StateSpaceModel(a=[[0.0]], b=[[1.0]], c=[[1.0]], d=[[0.0]])

        a_d, b_d = zoh_discretize(system, 0.01)

        assert a_d[0, 0] == pytest.approx(1.0)
        assert b_d[0, 0] == pytest.approx(0.01)

    @pytest.mark.parametrize("h", [0.0, -1e-3])
    def test_non_positive_step(self, first_order, h):
        """Test that a non-positive step raises DimensionError."""
        with pytest.raises(DimensionError, match="time step"):
            zoh_discretize(first_order, h)


class TestDcGain:
    """Test cases for dc_gain."""

    def test_first_order(self, first_order):
        """Test D - C A^-1 B for 2 / (s + 4)."""
        assert dc_gain(first_order)[0, 0] == pytest.approx(0.5)

    def test_singular(self):
        """Test that an integrator has no finite DC gain."""
        with pytest.raises(StabilityError):
            dc_gain(StateSpaceModel(a=[[0.0]], b=[[1.0]], c=[[1.0]], d=[[0.0]]))
