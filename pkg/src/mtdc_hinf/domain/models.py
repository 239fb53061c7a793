from collections import Counter
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, model_validator
from typing_extensions import Annotated, Self

from mtdc_hinf.domain.enums import ControlCase, ConverterKind, SweepAxis
from mtdc_hinf.domain.exceptions import WiringError
from mtdc_hinf.domain.parameters import SystemParams


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


def as_matrix(value: Any) -> np.ndarray:
    """Coerce a value into a read-only, finite, two-dimensional float array."""
    array = np.array(value, dtype=float)
    if array.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got {array.ndim}-D")
    if not np.all(np.isfinite(array)):
        raise ValueError("matrix entries must be finite")
    return _frozen(array)


def as_vector(value: Any) -> np.ndarray:
    array = np.array(value, dtype=float)
    if array.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got {array.ndim}-D")
    return _frozen(array)


def as_complex_vector(value: Any) -> np.ndarray:
    array = np.array(value, dtype=complex).reshape(-1)
    return _frozen(array)


Matrix = Annotated[np.ndarray, BeforeValidator(as_matrix)]
Vector = Annotated[np.ndarray, BeforeValidator(as_vector)]
ComplexVector = Annotated[np.ndarray, BeforeValidator(as_complex_vector)]


def _check_unique(kind: str, names: Sequence[str]) -> None:
    duplicates = sorted(name for name, count in Counter(names).items() if count > 1)
    if duplicates:
        raise ValueError(f"duplicate {kind} names: {', '.join(duplicates)}")


class Spectrum(BaseModel):
    """Eigenvalues of a continuous-time state matrix (rad/s).

    Attributes:
        eigenvalues: All eigenvalues, complex pairs adjacent.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    eigenvalues: ComplexVector = Field(..., description="Eigenvalues in rad/s.")

    def __len__(self) -> int:
        return int(self.eigenvalues.shape[0])

    @property
    def max_real(self) -> float:
        if self.eigenvalues.size == 0:
            return -np.inf
        return float(np.max(self.eigenvalues.real))

    def is_stable(self, threshold: float = -1e-9) -> bool:
        """Return True when every real part lies strictly below the threshold."""
        return self.max_real < threshold

    @property
    def damping_ratios(self) -> np.ndarray:
        magnitude = np.abs(self.eigenvalues)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratios = np.where(magnitude > 0.0, -self.eigenvalues.real / magnitude, 1.0)
        return ratios

    @property
    def frequencies_hz(self) -> np.ndarray:
        return np.abs(self.eigenvalues.imag) / (2.0 * np.pi)


class StateSpaceModel(BaseModel):
    """Continuous-time linear system with named channels.

    dx/dt = A x + B u, y = C x + D u. Every state, input and output carries a unique
    name, so the name-to-index maps are bijections.

    Attributes:
        a, b, c, d: System matrices.
        state_names: One name per state.
        input_names: One name per input.
        output_names: One name per output.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    a: Matrix = Field(..., description="State matrix (n x n).")
    b: Matrix = Field(..., description="Input matrix (n x m).")
    c: Matrix = Field(..., description="Output matrix (p x n).")
    d: Matrix = Field(..., description="Feedthrough matrix (p x m).")
    state_names: Tuple[str, ...] = Field(default=(), description="State channel names.")
    input_names: Tuple[str, ...] = Field(default=(), description="Input channel names.")
    output_names: Tuple[str, ...] = Field(default=(), description="Output channel names.")

    @model_validator(mode="before")
    @classmethod
    def _default_names(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        data = dict(data)
        for key, matrix_key, axis, prefix in (
            ("state_names", "a", 0, "x"),
            ("input_names", "b", 1, "u"),
            ("output_names", "c", 0, "y"),
        ):
            if not data.get(key) and matrix_key in data:
                size = np.shape(data[matrix_key])[axis] if np.ndim(data[matrix_key]) == 2 else 0
                data[key] = tuple(f"{prefix}{index}" for index in range(size))
        return data

    @model_validator(mode="after")
    def _check_shapes(self) -> Self:
        n, m, p = len(self.state_names), len(self.input_names), len(self.output_names)
        expected = {"a": (n, n), "b": (n, m), "c": (p, n), "d": (p, m)}
        for key, shape in expected.items():
            actual = getattr(self, key).shape
            if actual != shape:
                raise ValueError(f"matrix {key} has shape {actual}, expected {shape}")
        _check_unique("state", self.state_names)
        _check_unique("input", self.input_names)
        _check_unique("output", self.output_names)
        return self

    @property
    def n_states(self) -> int:
        return len(self.state_names)

    @property
    def n_inputs(self) -> int:
        return len(self.input_names)

    @property
    def n_outputs(self) -> int:
        return len(self.output_names)

    def state_index(self, name: str) -> int:
        return _index_of(self.state_names, name, "state")

    def input_index(self, name: str) -> int:
        return _index_of(self.input_names, name, "input")

    def output_index(self, name: str) -> int:
        return _index_of(self.output_names, name, "output")

    def evaluate(self, s: complex) -> np.ndarray:
        """Evaluate the transfer matrix C (sI - A)^-1 B + D at one complex point."""
        if self.n_states == 0:
            return self.d.astype(complex)
        resolvent = np.linalg.solve(s * np.eye(self.n_states) - self.a, self.b.astype(complex))
        return self.c @ resolvent + self.d

    def select(
        self,
        inputs: Optional[Sequence[str]] = None,
        outputs: Optional[Sequence[str]] = None,
    ) -> "StateSpaceModel":
        """Restrict the model to a subset (or reordering) of its inputs and outputs.

        Raises:
            WiringError: If a requested channel does not exist.
        """
        inputs = self.input_names if inputs is None else tuple(inputs)
        outputs = self.output_names if outputs is None else tuple(outputs)
        columns = [self.input_index(name) for name in inputs]
        rows = [self.output_index(name) for name in outputs]
        return StateSpaceModel(
            a=self.a,
            b=self.b[:, columns],
            c=self.c[rows, :],
            d=self.d[np.ix_(rows, columns)],
            state_names=self.state_names,
            input_names=tuple(inputs),
            output_names=tuple(outputs),
        )

    def with_prefix(self, prefix: str) -> "StateSpaceModel":
        """Return the same system with every channel name prefixed by ``prefix``."""
        return self.model_copy(
            update={
                "state_names": tuple(prefix + name for name in self.state_names),
                "input_names": tuple(prefix + name for name in self.input_names),
                "output_names": tuple(prefix + name for name in self.output_names),
            }
        )

    def channels(self) -> List[Tuple[str, int, str]]:
        """List every channel as (kind, index, name)."""
        rows: List[Tuple[str, int, str]] = []
        for kind, names in (("state", self.state_names), ("input", self.input_names), ("output", self.output_names)):
            rows.extend((kind, index, name) for index, name in enumerate(names))
        return rows


def _index_of(names: Sequence[str], name: str, kind: str) -> int:
    try:
        return names.index(name)
    except ValueError as error:
        raise WiringError([name], reason=f"no {kind} channel with this name") from error


class GridModel(BaseModel):
    """Linearized model of one AC grid together with its MTDC converter.

    The grid exposes its reference inputs r_k, the load disturbance w_dk, the DC port
    current input and the six outputs Y_k. ``a_block`` holds the block-diagonal component
    matrix before the SG/network/converter couplings were closed, so that
    ``system.a == a_block + coupling``.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid: int = Field(..., ge=1, description="Grid index k.")
    converter_kind: ConverterKind = Field(..., description="Converter family at the grid's DC bus.")
    system: StateSpaceModel = Field(..., description="Assembled grid model.")
    a_block: Matrix = Field(..., description="Block-diagonal component state matrix.")
    references: Tuple[str, ...] = Field(..., description="Reference inputs r_k.")
    disturbance: str = Field(..., description="Load disturbance input w_dk.")
    port_input: str = Field(..., description="DC current drawn by the network at the converter bus.")
    port_output: str = Field(..., description="Converter DC bus voltage deviation.")
    measurements: Tuple[str, ...] = Field(..., description="The six outputs Y_k.")

    @model_validator(mode="after")
    def _check_partitions(self) -> Self:
        expected = 2 if self.converter_kind == ConverterKind.LCC else 3
        if len(self.references) != expected:
            raise ValueError(f"grid {self.grid} needs {expected} reference channels, got {len(self.references)}")
        if len(self.measurements) != 6:
            raise ValueError(f"grid {self.grid} needs 6 outputs, got {len(self.measurements)}")
        return self

    @property
    def coupling(self) -> np.ndarray:
        return self.system.a - self.a_block


class CompositePlant(BaseModel):
    """Interconnected MTDC plant seen from each decentralized controller.

    Attributes:
        system: Inputs are every grid's references followed by the disturbances; outputs
            are every grid's Y_k followed by auxiliary wind-farm channels.
        references: Reference inputs r_k per grid.
        measurements: Local outputs Y_k per grid.
        remote: The channels {df_j, vdc_j} each grid shares with the others.
        disturbances: Load disturbances w_dk and the wind deviation, in that order.
        params: Parameters the plant was built from.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    system: StateSpaceModel = Field(..., description="Composite model X_E.")
    references: Dict[int, Tuple[str, ...]] = Field(..., description="r_k channel names per grid.")
    measurements: Dict[int, Tuple[str, ...]] = Field(..., description="Y_k channel names per grid.")
    remote: Dict[int, Tuple[str, ...]] = Field(..., description="Shared {df_j, vdc_j} channel names per grid.")
    disturbances: Tuple[str, ...] = Field(..., description="Disturbance channel names w.")
    params: SystemParams = Field(..., description="Parameters the plant was built from.")

    @model_validator(mode="after")
    def _check_channels(self) -> Self:
        unresolved = [
            name
            for names in list(self.references.values()) + [self.disturbances]
            for name in names
            if name not in self.system.input_names
        ]
        unresolved += [
            name
            for names in list(self.measurements.values()) + list(self.remote.values())
            for name in names
            if name not in self.system.output_names
        ]
        if unresolved:
            raise WiringError(unresolved, reason="composite plant channels missing from its system")
        return self

    @property
    def grids(self) -> List[int]:
        return sorted(self.references)

    @property
    def a_e(self) -> np.ndarray:
        return self.system.a

    @property
    def all_references(self) -> Tuple[str, ...]:
        return tuple(name for k in self.grids for name in self.references[k])

    def _columns(self, names: Sequence[str]) -> np.ndarray:
        return self.system.b[:, [self.system.input_index(name) for name in names]]

    def b_re(self) -> np.ndarray:
        return self._columns(self.all_references)

    def b_rek(self, k: int) -> np.ndarray:
        return self._columns(self.references[k])

    def b_we(self) -> np.ndarray:
        return self._columns(self.disturbances)

    def drk_names(self, k: int) -> Tuple[str, ...]:
        """Disturbance channels seen by controller k: w and every other grid's references."""
        others = tuple(name for j in self.grids if j != k for name in self.references[j])
        return self.disturbances + others

    def b_drk(self, k: int) -> np.ndarray:
        return self._columns(self.drk_names(k))

    def measurement_names(self, k: int) -> Tuple[str, ...]:
        """Y_Tk: the local outputs of grid k followed by {df_j, vdc_j} for every j != k."""
        return self.measurements[k] + tuple(name for j in self.grids if j != k for name in self.remote[j])

    def c_tk(self, k: int) -> np.ndarray:
        return self.system.c[[self.system.output_index(name) for name in self.measurement_names(k)], :]

    def output_grid(self, name: str) -> Optional[int]:
        """Grid whose Y_k contains the channel, or None for auxiliary outputs."""
        for k, names in self.measurements.items():
            if name in names:
                return k
        return None


class GeneralizedPlant(BaseModel):
    """Generalized plant for H-infinity synthesis.

    dx/dt = A x + B1 d + B2 u, z = C1 x + D11 d + D12 u, y = C2 x + D21 d + D22 u.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    a: Matrix = Field(..., description="A_1.")
    b1: Matrix = Field(..., description="Disturbance input matrix.")
    b2: Matrix = Field(..., description="Control input matrix.")
    c1: Matrix = Field(..., description="Performance output matrix.")
    c2: Matrix = Field(..., description="Measurement output matrix.")
    d11: Matrix = Field(..., description="Disturbance-to-performance feedthrough.")
    d12: Matrix = Field(..., description="Control-to-performance feedthrough.")
    d21: Matrix = Field(..., description="Disturbance-to-measurement feedthrough.")
    d22: Matrix = Field(..., description="Control-to-measurement feedthrough.")
    state_names: Tuple[str, ...] = Field(..., description="State names.")
    disturbance_names: Tuple[str, ...] = Field(..., description="d_k channel names.")
    control_names: Tuple[str, ...] = Field(..., description="r_k channel names.")
    performance_names: Tuple[str, ...] = Field(..., description="Z_k channel names.")
    measurement_names: Tuple[str, ...] = Field(..., description="Y_Tk channel names.")
    integrated: Tuple[str, ...] = Field(default=(), description="Plant outputs whose integrals are measured.")
    grid: Optional[int] = Field(default=None, description="Grid index, None for centralized synthesis.")

    @model_validator(mode="after")
    def _check_shapes(self) -> Self:
        n, nd, nu = len(self.state_names), len(self.disturbance_names), len(self.control_names)
        nz, ny = len(self.performance_names), len(self.measurement_names)
        expected = {
            "a": (n, n),
            "b1": (n, nd),
            "b2": (n, nu),
            "c1": (nz, n),
            "c2": (ny, n),
            "d11": (nz, nd),
            "d12": (nz, nu),
            "d21": (ny, nd),
            "d22": (ny, nu),
        }
        for key, shape in expected.items():
            actual = getattr(self, key).shape
            if actual != shape:
                raise ValueError(f"matrix {key} has shape {actual}, expected {shape}")
        return self

    @property
    def n_states(self) -> int:
        return len(self.state_names)

    def as_system(self) -> StateSpaceModel:
        """The plant as one system from [d; u] to [z; y]."""
        return StateSpaceModel(
            a=self.a,
            b=np.hstack([self.b1, self.b2]),
            c=np.vstack([self.c1, self.c2]),
            d=np.block([[self.d11, self.d12], [self.d21, self.d22]]),
            state_names=self.state_names,
            input_names=self.disturbance_names + self.control_names,
            output_names=self.performance_names + self.measurement_names,
        )


INTEGRAL_SUFFIX = ":int"


class HinfController(BaseModel):
    """Decentralized controller for grid k.

    The core (A, B, C, D) reads the measurements Y_Tk and, for each channel in
    ``integrated``, its time integral (input name suffixed with ``:int``). The integrators
    are realized together with the core by the simulation and analysis layers.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid: int = Field(..., ge=1, description="Grid index k.")
    case: ControlCase = Field(..., description="Strategy the controller belongs to.")
    a: Matrix = Field(..., description="A_hk.")
    b: Matrix = Field(..., description="B_hk.")
    c: Matrix = Field(..., description="C_hk.")
    d: Matrix = Field(..., description="D_hk.")
    input_names: Tuple[str, ...] = Field(..., description="Core inputs: measurements then integrals.")
    output_names: Tuple[str, ...] = Field(..., description="Reference channels r_k driven.")
    integrated: Tuple[str, ...] = Field(default=(), description="Measurements integrated before the core.")
    gamma: Optional[float] = Field(default=None, gt=0.0, description="Achieved performance level.")

    @model_validator(mode="after")
    def _check(self) -> Self:
        n, m, p = self.a.shape[0], len(self.input_names), len(self.output_names)
        expected = {"a": (n, n), "b": (n, m), "c": (p, n), "d": (p, m)}
        for key, shape in expected.items():
            actual = getattr(self, key).shape
            if actual != shape:
                raise ValueError(f"matrix {key} has shape {actual}, expected {shape}")
        _check_unique("input", self.input_names)
        missing = [
            name
            for name in self.integrated
            if name not in self.input_names or name + INTEGRAL_SUFFIX not in self.input_names
        ]
        if missing:
            raise ValueError(f"integrated channels without measurement and integral inputs: {', '.join(missing)}")
        return self

    @property
    def order(self) -> int:
        return int(self.a.shape[0])

    @property
    def measurement_channels(self) -> Tuple[str, ...]:
        return tuple(name for name in self.input_names if not name.endswith(INTEGRAL_SUFFIX))

    @property
    def is_stable(self) -> bool:
        if self.order == 0:
            return True
        return bool(np.max(np.linalg.eigvals(self.a).real) < 0.0)

    def with_core(self, a: np.ndarray, b: np.ndarray, c: np.ndarray, d: np.ndarray) -> "HinfController":
        """Same interface, new core realization."""
        return HinfController(
            grid=self.grid,
            case=self.case,
            a=a,
            b=b,
            c=c,
            d=d,
            input_names=self.input_names,
            output_names=self.output_names,
            integrated=self.integrated,
            gamma=self.gamma,
        )


class FeasibilityResult(BaseModel):
    """Outcome of the Riccati and coupling tests at one performance level."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    gamma: float = Field(..., gt=0.0, description="Tested performance level.")
    feasible: bool = Field(..., description="All three conditions hold.")
    x_ok: bool = Field(..., description="State-feedback Riccati equation has a stabilizing PSD solution.")
    y_ok: bool = Field(..., description="Output-injection Riccati equation has a stabilizing PSD solution.")
    coupling_ok: bool = Field(..., description="Spectral radius of X Y is below gamma squared.")
    x: Optional[Matrix] = Field(default=None, description="X_inf when solvable.")
    y: Optional[Matrix] = Field(default=None, description="Y_inf when solvable.")
    rho: Optional[float] = Field(default=None, description="Spectral radius of X_inf Y_inf.")
    residual_x: Optional[float] = Field(default=None, description="Scaled residual of the X equation.")
    residual_y: Optional[float] = Field(default=None, description="Scaled residual of the Y equation.")
    reason: Optional[str] = Field(default=None, description="First failed condition.")


class GammaTrial(BaseModel):
    model_config = ConfigDict(frozen=True)

    gamma: float
    feasible: bool
    reason: Optional[str] = None


class SynthesisReport(BaseModel):
    """Record of one gamma-iteration.

    Attributes:
        gamma_sequence: Feasible levels in the order they were accepted.
        gamma_opt: Smallest feasible level found by bisection.
        gamma_final: Level the controller was realized at.
    """

    model_config = ConfigDict(frozen=True)

    grid: Optional[int] = Field(default=None, description="Grid index, None for centralized synthesis.")
    gamma_sequence: Tuple[float, ...] = Field(..., description="Accepted performance levels.")
    trials: Tuple[GammaTrial, ...] = Field(default=(), description="Every level tested.")
    gamma_opt: float = Field(..., gt=0.0, description="Upper end of the final bisection bracket.")
    gamma_final: float = Field(..., gt=0.0, description="Level the controller was realized at.")
    x_ok: bool = Field(..., description="Condition on X_inf at gamma_final.")
    y_ok: bool = Field(..., description="Condition on Y_inf at gamma_final.")
    coupling_ok: bool = Field(..., description="Coupling condition at gamma_final.")
    spectral_radius: float = Field(..., description="rho(X_inf Y_inf) at gamma_final.")
    residual_x: float = Field(..., description="Scaled X equation residual.")
    residual_y: float = Field(..., description="Scaled Y equation residual.")
    closed_loop_norm: float = Field(..., description="H-infinity norm of the closed loop from d to z.")
    closed_loop_stable: bool = Field(..., description="Closed loop with the generalized plant is stable.")
    controller_stable: bool = Field(default=True, description="Controller state matrix is Hurwitz.")
    controller_order: int = Field(..., ge=0, description="Order of the realized controller core.")

    @model_validator(mode="after")
    def _check_monotone(self) -> Self:
        if any(later > earlier for earlier, later in zip(self.gamma_sequence, self.gamma_sequence[1:])):
            raise ValueError("accepted gamma sequence must be non-increasing")
        return self

    @property
    def iterations(self) -> int:
        return len(self.trials)

    @property
    def norm_below_gamma(self) -> bool:
        return self.closed_loop_norm < self.gamma_final


class BalancedRealization(BaseModel):
    """Balanced realization with its Hankel singular values.

    ``system`` keeps only the numerically nonzero part of the spectrum of Hankel
    singular values; ``hsv`` lists all n of them.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    system: StateSpaceModel = Field(..., description="Balanced realization.")
    hsv: Vector = Field(..., description="Hankel singular values, non-increasing.")

    @model_validator(mode="after")
    def _check_hsv(self) -> Self:
        if np.any(self.hsv < 0.0) or np.any(np.diff(self.hsv) > 0.0):
            raise ValueError("Hankel singular values must be non-negative and non-increasing")
        if self.system.n_states > self.hsv.size:
            raise ValueError("balanced realization larger than the number of Hankel singular values")
        return self

    @property
    def order(self) -> int:
        return int(self.hsv.size)

    @property
    def energy(self) -> np.ndarray:
        """Cumulative energy E(r) for r = 1..n, with E(n) exactly 1."""
        total = float(np.sum(self.hsv))
        if total == 0.0:
            curve = np.ones(self.hsv.size)
        else:
            curve = np.cumsum(self.hsv) / total
            curve[-1] = 1.0
        return np.minimum(curve, 1.0)


class ReductionResult(BaseModel):
    """A truncated system and its a-priori error bound."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    system: StateSpaceModel = Field(..., description="Reduced-order model.")
    order: int = Field(..., ge=1, description="Requested order r.")
    bound: float = Field(..., ge=0.0, description="2 times the sum of discarded Hankel singular values.")
    error_norm: Optional[float] = Field(default=None, description="Measured H-infinity norm of G - G_r.")


class ControllerReduction(BaseModel):
    """Reduction record of one controller: its balancing and the accepted truncation."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid: int = Field(..., ge=1, description="Grid index k.")
    full_order: int = Field(..., ge=0, description="Order before reduction.")
    balanced: Optional[BalancedRealization] = Field(default=None, description="None when left unreduced.")
    result: Optional[ReductionResult] = Field(default=None, description="Accepted truncation.")

    @property
    def order(self) -> int:
        return self.full_order if self.result is None else self.result.system.n_states


class DelayModel(BaseModel):
    """Communication delay on controller measurement paths.

    Attributes:
        delay: Default delay T_d in seconds for every inter-grid link.
        link_delays: Overrides keyed by (receiving grid, sending grid).
        delay_all_measurements: Delay local measurements too.
    """

    model_config = ConfigDict(frozen=True)

    delay: float = Field(default=0.0, ge=0.0, description="Delay T_d in seconds.")
    link_delays: Dict[Tuple[int, int], float] = Field(default_factory=dict, description="Per-link delays.")
    delay_all_measurements: bool = Field(default=False, description="Delay local measurements as well.")

    @model_validator(mode="after")
    def _check_links(self) -> Self:
        if any(value < 0.0 for value in self.link_delays.values()):
            raise ValueError("link delays must be non-negative")
        return self

    def delay_for(self, receiver: int, sender: int) -> float:
        """Delay seen by the controller of ``receiver`` on measurements of ``sender``."""
        if receiver == sender and not self.delay_all_measurements:
            return 0.0
        return self.link_delays.get((receiver, sender), self.delay)

    @property
    def is_zero(self) -> bool:
        return self.delay == 0.0 and all(value == 0.0 for value in self.link_delays.values())


class EigenLocus(BaseModel):
    """Closed-loop spectra along a parameter sweep."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    axis: SweepAxis = Field(..., description="Swept parameter.")
    values: Tuple[float, ...] = Field(..., description="Sweep grid, ascending.")
    spectra: Tuple[Spectrum, ...] = Field(..., description="Spectrum at each value.")
    first_unstable: Optional[float] = Field(default=None, description="First value with an eigenvalue at Re >= -1e-9.")

    @model_validator(mode="after")
    def _check(self) -> Self:
        if len(self.values) != len(self.spectra):
            raise ValueError("one spectrum per sweep value is required")
        if any(later < earlier for earlier, later in zip(self.values, self.values[1:])):
            raise ValueError("sweep values must be ascending")
        return self


class SimulationMetrics(BaseModel):
    """Frequency and DC voltage deviation metrics (Hz and pu)."""

    model_config = ConfigDict(frozen=True)

    df_max: Tuple[float, ...] = Field(..., description="Per-grid peak |df_k| in Hz.")
    df_rms: Tuple[float, ...] = Field(..., description="Per-grid rms of df_k in Hz.")
    vdc_max: float = Field(..., description="Peak |dVdc| of the average DC voltage in pu.")
    vdc_rms: float = Field(..., description="rms of the average DC voltage deviation in pu.")

    @property
    def df_max_sum(self) -> float:
        return float(sum(self.df_max))

    @property
    def df_rms_sum(self) -> float:
        return float(sum(self.df_rms))


class SimulationResult(BaseModel):
    """Sampled closed-loop trajectories and their metrics.

    Attributes:
        time: Sample instants in seconds.
        frequency: Grid frequencies f_k in Hz, one column per grid.
        vdc: Average DC voltage in pu.
        generated_power: SG power deviation per grid in pu.
        converter_power: Converter power deviation per grid in pu.
        references: Reference trajectories keyed by channel name.
        stable: Whether the simulated closed loop was stable.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    case: ControlCase = Field(..., description="Strategy simulated.")
    time: Vector = Field(..., description="Time grid in seconds.")
    frequency: Matrix = Field(..., description="f_k in Hz (L x grids).")
    vdc: Vector = Field(..., description="Average DC voltage in pu.")
    generated_power: Matrix = Field(..., description="Generated power deviation per grid in pu.")
    converter_power: Matrix = Field(..., description="Converter power deviation per grid in pu.")
    references: Dict[str, Vector] = Field(default_factory=dict, description="Reference trajectories.")
    metrics: SimulationMetrics = Field(..., description="Summary metrics.")
    stable: bool = Field(..., description="Closed loop stability flag.")

    @model_validator(mode="after")
    def _check_lengths(self) -> Self:
        length = self.time.size
        series = [self.frequency.shape[0], self.vdc.size, self.generated_power.shape[0], self.converter_power.shape[0]]
        series += [trajectory.size for trajectory in self.references.values()]
        if any(size != length for size in series):
            raise ValueError("every trajectory must have one sample per time instant")
        return self


class ControllerSet(BaseModel):
    """Controllers of one strategy together with their synthesis reports."""

    model_config = ConfigDict(frozen=True)

    case: ControlCase = Field(..., description="Strategy.")
    controllers: Tuple[HinfController, ...] = Field(default=(), description="One controller per grid.")
    reports: Tuple[SynthesisReport, ...] = Field(default=(), description="Synthesis records, if any.")

    def for_grid(self, k: int) -> Optional[HinfController]:
        return next((controller for controller in self.controllers if controller.grid == k), None)
