from typing import Optional, Sequence, Tuple


class MtdcHinfException(Exception):
    """Base exception for modeling, synthesis and analysis errors."""


class ModelValidationError(MtdcHinfException):
    """Base class for errors caused by invalid inputs rather than numerical trouble."""


class NumericalError(MtdcHinfException):
    """Base class for failures of a numerical procedure on otherwise valid inputs."""


class DimensionError(ModelValidationError):
    """Raised when matrix operands have incompatible shapes.

    Attributes:
        operation: Name of the operation that rejected its operands.
        detail: Description of the offending shapes.
    """

    def __init__(self, operation: str, detail: str) -> None:
        self.operation = operation
        self.detail = detail
        super().__init__(f"Dimension mismatch in {operation}: {detail}")


class ParameterError(ModelValidationError):
    """Raised when a physical or algorithmic parameter is invalid.

    This occurs when:
    - A builder receives parameters of the wrong converter kind.
    - A numeric setting lies outside its admissible range.

    Attributes:
        field: Name of the offending field.
        reason: Why the value was rejected.
    """

    def __init__(self, field: str, reason: str) -> None:
        self.field = field
        self.reason = reason
        super().__init__(f"Invalid parameter '{field}': {reason}")


class WiringError(ModelValidationError):
    """Raised when named signals cannot be connected.

    This occurs when:
    - A block input is neither connected, external nor grounded.
    - A connection names a signal no block provides.
    - A controller measurement does not resolve against the plant.

    Attributes:
        unresolved: Names of the signals that could not be resolved.
    """

    def __init__(self, unresolved: Sequence[str], reason: Optional[str] = None) -> None:
        self.unresolved = list(unresolved)
        self.reason = reason
        message = f"Unresolved signals: {', '.join(self.unresolved)}"
        if reason:
            message += f". Reason: {reason}"
        super().__init__(message)


class TopologyError(ModelValidationError):
    """Raised when the DC line graph does not connect every converter bus.

    Attributes:
        buses: Buses unreachable from the first bus.
    """

    def __init__(self, buses: Sequence[int]) -> None:
        self.buses = list(buses)
        super().__init__(f"DC network does not connect buses: {', '.join(str(bus) for bus in self.buses)}")


class ConfigError(ModelValidationError):
    """Raised when a configuration or data file cannot be read.

    Attributes:
        path: The file that was requested.
        reason: What went wrong.
    """

    def __init__(self, path: str, reason: str) -> None:
        self.path = path
        self.reason = reason
        super().__init__(f"Cannot load '{path}': {reason}")


class StabilityError(NumericalError):
    """Raised when an operation requires a Hurwitz matrix and does not get one.

    This occurs when:
    - Solving a Lyapunov equation with a non-Hurwitz A.
    - Balancing an unstable controller.
    - A synthesized controller fails to stabilize its generalized plant.

    Attributes:
        subject: What was found unstable.
        max_real_part: Largest eigenvalue real part observed.
    """

    def __init__(self, subject: str, max_real_part: float) -> None:
        self.subject = subject
        self.max_real_part = max_real_part
        super().__init__(f"{subject} is not stable (max real part {max_real_part:.3e})")


class NormUndefinedError(NumericalError):
    """Raised when the H-infinity norm of an unstable system is requested."""

    def __init__(self, max_real_part: float) -> None:
        self.max_real_part = max_real_part
        super().__init__(f"H-infinity norm undefined for an unstable system (max real part {max_real_part:.3e})")


class InfeasibleError(NumericalError):
    """Raised when a Riccati equation has no stabilizing solution.

    This occurs when:
    - The Hamiltonian has eigenvalues on the imaginary axis.
    - The stable invariant subspace is not a graph subspace.
    - The candidate solution fails the residual or stabilization checks.

    Attributes:
        reason: The failed check.
    """

    def __init__(self, reason: str) -> None:
        self.reason = reason
        super().__init__(f"No stabilizing Riccati solution: {reason}")


class NoStabilizingControllerError(NumericalError):
    """Raised when no feasible performance level yields a controller that passes its checks.

    Attributes:
        grid: Grid the synthesis was run for (None for centralized synthesis).
        bracket: The last (low, high) levels tried.
    """

    def __init__(self, grid: Optional[int], bracket: Tuple[float, float]) -> None:
        self.grid = grid
        self.bracket = bracket
        target = "centralized plant" if grid is None else f"grid {grid}"
        super().__init__(
            f"No stabilizing H-infinity controller found for {target} "
            f"(last bracket gamma in [{bracket[0]:.4g}, {bracket[1]:.4g}])"
        )
