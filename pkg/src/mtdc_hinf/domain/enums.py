from enum import Enum


class ConverterKind(str, Enum):
    """Families of MTDC converter terminals.

    Attributes:
        GSVSC: Grid-side voltage-source converter with P-Vdc droop.
        LCC: Line-commutated converter with a power reference.
        WFVSC: Wind-farm-side voltage-source converter of the offshore wind farm.
    """

    GSVSC = "gsvsc"
    LCC = "lcc"
    WFVSC = "wfvsc"

    def __str__(self) -> str:
        return self.value


class ControlCase(str, Enum):
    """Secondary frequency-regulation strategies.

    Attributes:
        CASE1: Decentralized H-infinity synthesis per grid.
        CASE2: Decentralized PI on grid frequency, no device coordination.
        CASE3: Centralized H-infinity synthesis truncated to decentralized gains.
        DROOP_ONLY: Local droop loops only.
    """

    CASE1 = "case1"
    CASE2 = "case2"
    CASE3 = "case3"
    DROOP_ONLY = "droop_only"

    def __str__(self) -> str:
        return self.value


class WeightingKind(str, Enum):
    """Shapes of the performance, control and disturbance weights."""

    UNITY = "unity"
    LOW_PASS = "low_pass"
    BAND_PASS = "band_pass"

    def __str__(self) -> str:
        return self.value


class DisturbanceKind(str, Enum):
    """How a disturbance profile was produced.

    Attributes:
        STEP: Per-channel steps at a common onset.
        PIECEWISE: Piecewise-constant levels held between breakpoints.
        SAMPLED: A uniformly sampled series (generated or loaded from CSV).
    """

    STEP = "step"
    PIECEWISE = "piecewise"
    SAMPLED = "sampled"

    def __str__(self) -> str:
        return self.value


class SweepAxis(str, Enum):
    """Parameters an eigenvalue locus can be swept over."""

    FILTER_INDUCTANCE = "filter_inductance"
    UNCERTAINTY = "uncertainty"
    DELAY = "delay"

    def __str__(self) -> str:
        return self.value
