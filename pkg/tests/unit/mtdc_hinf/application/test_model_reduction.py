"""Unit tests for balanced truncation."""

import numpy as np
import pytest

from mtdc_hinf.application.model_reduction import (
    balance,
    error_system,
    hsv_table,
    random_stable_system,
    reduce_controller,
    select_order,
    truncate,
    verify_bound,
)
from mtdc_hinf.application.numerics import hinf_norm, solve_lyapunov
from mtdc_hinf.domain.enums import ControlCase
from mtdc_hinf.domain.exceptions import NumericalError, ParameterError, StabilityError
from mtdc_hinf.domain.models import BalancedRealization, HinfController, StateSpaceModel


def _within_bound(error: float, bound: float) -> bool:
    return error <= bound * (1.0 + 1e-4) + 1e-10


class TestBalance:
    """Test cases for balance."""

    def test_first_order(self, first_order):
        """Test the Hankel singular value of 2 / (s + 4)."""
        balanced = balance(first_order)

        np.testing.assert_allclose(balanced.hsv, [0.25])
        assert balanced.system.state_names == ("bal:0",)

    def test_gramians_equal_diagonal(self, random_stable):
        """Test that both gramians of the balanced realization equal diag(hsv)."""
        balanced = balance(random_stable(3, 5))
        system = balanced.system

        p = solve_lyapunov(system.a, system.b @ system.b.T)
        q = solve_lyapunov(system.a.T, system.c.T @ system.c)

        scale = balanced.hsv[0]
        np.testing.assert_allclose(p, np.diag(balanced.hsv), atol=1e-6 * scale)
        np.testing.assert_allclose(q, np.diag(balanced.hsv), atol=1e-6 * scale)

    def test_hsv_non_increasing(self, random_stable):
        """Test that singular values come sorted."""
        hsv = balance(random_stable(4, 6)).hsv

        assert np.all(np.diff(hsv) <= 0.0)
        assert np.all(hsv >= 0.0)

    def test_unstable(self):
        """Test that an unstable system cannot be balanced."""
        unstable = StateSpaceModel(a=[[0.5]], b=[[1.0]], c=[[1.0]], d=[[0.0]])

        with pytest.raises(StabilityError):
            balance(unstable)

    def test_non_minimal(self):
        """Test that an uncontrollable and an unobservable mode leave the realization with zero singular values."""
        system = StateSpaceModel(
            a=np.diag([-1.0, -2.0, -3.0]), b=[[1.0], [1.0], [0.0]], c=[[1.0, 0.0, 1.0]], d=[[0.0]]
        )

        balanced = balance(system)

        assert balanced.system.n_states == 1
        np.testing.assert_allclose(balanced.hsv, [0.5, 0.0, 0.0], atol=1e-12)
        result = truncate(balanced, 1, reference=system)
        assert result.error_norm == pytest.approx(0.0, abs=1e-9)

    @pytest.mark.parametrize("order", [1, 2])
    def test_stiff_chain_within_bound(self, order):
        """Test the truncation bound on a chain whose time constants span four decades."""
        system = StateSpaceModel(
            a=[[-1.0, 1e4, 0.0], [0.0, -1e2, 1e4], [0.0, 0.0, -1e4]],
            b=[[0.0], [0.0], [1.0]],
            c=[[1.0, 0.0, 0.0]],
            d=[[0.0]],
        )

        result = truncate(balance(system), order, reference=system)

        assert _within_bound(result.error_norm, result.bound)

    def test_gramian_residual_checked(self, first_order, mocker):
        """Test that a gramian failing its Lyapunov equation raises NumericalError."""
        mocker.patch(
            "mtdc_hinf.application.model_reduction.solve_lyapunov", side_effect=lambda a, q: np.zeros_like(q)
        )

        with pytest.raises(NumericalError, match="gramian residual"):
            balance(first_order)

    def test_static(self):
        """Test that a static system balances to itself with no singular values."""
        static = StateSpaceModel(a=np.zeros((0, 0)), b=np.zeros((0, 1)), c=np.zeros((1, 0)), d=[[2.0]])

        balanced = balance(static)

        assert balanced.order == 0
        assert balanced.system.n_states == 0
        assert balanced.system.d[0, 0] == 2.0


class TestTruncate:
    """Test cases for truncate and error_system."""

    @pytest.mark.parametrize("seed", [0, 1, 2])
    @pytest.mark.parametrize("order", [1, 3])
    def test_error_within_bound(self, random_stable, seed, order):
        """Test that the truncation error never exceeds twice the discarded tail."""
        system = random_stable(seed, 5)

        result = truncate(balance(system), order, reference=system)

        assert result.system.n_states == order
        assert result.bound == pytest.approx(2.0 * float(np.sum(balance(system).hsv[order:])))
        assert _within_bound(result.error_norm, result.bound)

    def test_full_order_exact(self, random_stable):
        """Test that keeping every state leaves a zero bound."""
        system = random_stable(7, 3)

        result = truncate(balance(system), 3)

        assert result.bound == 0.0
        assert result.error_norm is None

    @pytest.mark.parametrize("order", [0, 4])
    def test_order_range(self, random_stable, order):
        """Test that the order must lie in [1, n]."""
        with pytest.raises(ParameterError, match="order"):
            truncate(balance(random_stable(0, 3)), order)

    def test_error_system(self, first_order):
        """Test that a system minus itself has zero response."""
        difference = error_system(first_order, first_order)

        assert difference.n_states == 2
        assert abs(difference.evaluate(3j)[0, 0]) == pytest.approx(0.0, abs=1e-12)


class TestSelectOrder:
    """Test cases for select_order."""

    @pytest.fixture
    def balanced(self) -> BalancedRealization:
        system = StateSpaceModel(a=np.diag([-1.0, -2.0]), b=np.ones((2, 1)), c=np.ones((1, 2)), d=[[0.0]])
        return BalancedRealization(system=system, hsv=[3.0, 1.0])

    @pytest.mark.parametrize(("threshold", "expected"), [(0.7, 1), (0.75, 1), (0.8, 2), (1.0, 2)])
    def test_cumulative_energy(self, balanced, threshold, expected):
        """Test the smallest order whose energy reaches the threshold."""
        assert select_order(balanced, threshold) == expected

    @pytest.mark.parametrize("threshold", [0.0, 1.5])
    def test_threshold_range(self, balanced, threshold):
        """Test that the threshold must lie in (0, 1]."""
        with pytest.raises(ParameterError, match="energy_threshold"):
            select_order(balanced, threshold)

    def test_static(self):
        """Test that a static realization has no order to select."""
        static = StateSpaceModel(a=np.zeros((0, 0)), b=np.zeros((0, 1)), c=np.zeros((1, 0)), d=[[1.0]])

        with pytest.raises(ParameterError, match="static"):
            select_order(BalancedRealization(system=static, hsv=[]), 0.9)

    def test_hsv_table(self, balanced):
        """Test the rows of the singular value table."""
        assert hsv_table(balanced) == [(1, 3.0, 0.75), (2, 1.0, 1.0)]


class TestReduceController:
    """Test cases for reduce_controller."""

    def test_reduces_core(self, random_stable):
        """Test that a controller core is truncated and keeps its interface."""
        core = random_stable(5, 4, inputs=2, outputs=1)
        controller = HinfController(
            grid=2,
            case=ControlCase.CASE1,
            a=core.a,
            b=core.b,
            c=core.c,
            d=np.zeros((1, 2)),
            input_names=("g2.df", "g2.vdc"),
            output_names=("g2.pg_ref",),
        )
        balanced = balance(core.model_copy(update={"d": np.zeros((1, 2))}))

        reduction = reduce_controller(controller, 2, balanced)

        assert reduction.grid == 2
        assert reduction.full_order == 4
        assert reduction.order == 2
        assert _within_bound(reduction.result.error_norm, reduction.result.bound)

    def test_order_raised_to_meet_bound(self, random_stable, mocker):
        """Test that a truncation missing its bound is retried with one more state."""
        core = random_stable(5, 4, inputs=2, outputs=1).model_copy(update={"d": np.zeros((1, 2))})
        controller = HinfController(
            grid=1,
            case=ControlCase.CASE1,
            a=core.a,
            b=core.b,
            c=core.c,
            d=core.d,
            input_names=("g1.df", "g1.vdc"),
            output_names=("g1.pg_ref",),
        )
        calls = []

        def norm(system):
            calls.append(system)
            return (1e3, 0.0) if len(calls) == 1 else hinf_norm(system)

        mocker.patch("mtdc_hinf.application.model_reduction.hinf_norm", side_effect=norm)

        reduction = reduce_controller(controller, 2, balance(core))

        assert len(calls) == 2
        assert reduction.order == 3
        assert _within_bound(reduction.result.error_norm, reduction.result.bound)

    def test_bound_never_met(self, random_stable, mocker):
        """Test that a bound missed at every order raises NumericalError."""
        core = random_stable(6, 3, inputs=2, outputs=1).model_copy(update={"d": np.zeros((1, 2))})
        controller = HinfController(
            grid=3,
            case=ControlCase.CASE3,
            a=core.a,
            b=core.b,
            c=core.c,
            d=core.d,
            input_names=("g3.df", "g3.vdc"),
            output_names=("g3.pg_ref",),
        )
        mocker.patch("mtdc_hinf.application.model_reduction.hinf_norm", return_value=(1e3, 0.0))

        with pytest.raises(NumericalError, match="grid 3 controller exceeds its bound"):
            reduce_controller(controller, 1, balance(core))


class TestVerifyBound:
    """Test cases for the randomized bound check."""

    def test_random_systems(self):
        """Test that every random system respects its bound."""
        rng = np.random.default_rng(0)
        systems = [random_stable_system(rng, 4, 2, 2) for _ in range(5)]

        pairs = verify_bound(systems, order=2)

        assert len(pairs) == 5
        assert all(_within_bound(error, bound) for error, bound in pairs)
