"""CSV outputs and the sampled-disturbance reader.

All files are comma separated with a header row, UTF-8, LF line endings and nine
significant digits. Time, when present, is the first column in seconds.
"""

import logging
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from mtdc_hinf.application.disturbances import from_samples
from mtdc_hinf.application.experiments import metrics_row
from mtdc_hinf.application.model_reduction import hsv_table
from mtdc_hinf.domain.exceptions import ConfigError
from mtdc_hinf.domain.models import (
    BalancedRealization,
    ControllerReduction,
    EigenLocus,
    HinfController,
    SimulationResult,
    Spectrum,
    StateSpaceModel,
    SynthesisReport,
)
from mtdc_hinf.domain.scenario import DisturbanceProfile

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.9g"
DISTURBANCE_COLUMNS = ("t", "dPL1", "dPL2", "dPL3", "dVw")

PathLike = Union[str, Path]


def write_table(table: pd.DataFrame, path: PathLike, index: bool = False) -> Path:
    """Write a frame with the package CSV conventions, creating parent directories."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    table.to_csv(target, index=index, float_format=FLOAT_FORMAT, lineterminator="\n", encoding="utf-8")
    logger.debug("Wrote %s (%d rows)", target, len(table))
    return target


def timeseries_frame(result: SimulationResult) -> pd.DataFrame:
    """Columns t, f1.., Vdc, Pg1.., P1.. and one column per reference trajectory."""
    columns = {"t": result.time}
    grids = result.frequency.shape[1]
    for index in range(grids):
        columns[f"f{index + 1}"] = result.frequency[:, index]
    columns["Vdc"] = result.vdc
    for index in range(grids):
        columns[f"Pg{index + 1}"] = result.generated_power[:, index]
    for index in range(grids):
        columns[f"P{index + 1}"] = result.converter_power[:, index]
    for name, trajectory in result.references.items():
        columns[name] = trajectory
    return pd.DataFrame(columns)


def write_timeseries(result: SimulationResult, path: PathLike) -> Path:
    return write_table(timeseries_frame(result), path)


def metrics_frame(result: SimulationResult) -> pd.DataFrame:
    return pd.DataFrame([metrics_row(result.case, result)])


def eigenlocus_frame(locus: EigenLocus) -> pd.DataFrame:
    """One row per eigenvalue per sweep point."""
    rows = []
    for value, spectrum in zip(locus.values, locus.spectra):
        for eigenvalue in spectrum.eigenvalues:
            rows.append({"value": value, "eig_real": eigenvalue.real, "eig_imag": eigenvalue.imag})
    return pd.DataFrame(rows, columns=["value", "eig_real", "eig_imag"])


def modes_frame(spectrum: Spectrum) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "eig_real": spectrum.eigenvalues.real,
            "eig_imag": spectrum.eigenvalues.imag,
            "damping": spectrum.damping_ratios,
            "frequency_hz": spectrum.frequencies_hz,
        }
    )


def hsv_frame(balanced: BalancedRealization, grid: Optional[int] = None) -> pd.DataFrame:
    table = pd.DataFrame(hsv_table(balanced), columns=["index", "hsv", "cumulative_energy"])
    if grid is not None:
        table.insert(0, "grid", grid)
    return table


def reduction_frame(reductions: Iterable[ControllerReduction]) -> pd.DataFrame:
    rows = [
        {
            "grid": item.grid,
            "full_order": item.full_order,
            "order": item.order,
            "bound": item.result.bound if item.result else np.nan,
            "error_norm": item.result.error_norm if item.result and item.result.error_norm is not None else np.nan,
        }
        for item in reductions
    ]
    return pd.DataFrame(rows, columns=["grid", "full_order", "order", "bound", "error_norm"])


def synthesis_report_frame(reports: Iterable[SynthesisReport]) -> pd.DataFrame:
    """One row per gamma-iteration; the accepted sequence is joined with ';'."""
    rows = []
    for report in reports:
        rows.append(
            {
                "grid": report.grid if report.grid is not None else "central",
                "gamma_opt": report.gamma_opt,
                "gamma_final": report.gamma_final,
                "gamma_sequence": ";".join(FLOAT_FORMAT % gamma for gamma in report.gamma_sequence),
                "trials": len(report.trials),
                "x_ok": report.x_ok,
                "y_ok": report.y_ok,
                "coupling_ok": report.coupling_ok,
                "spectral_radius": report.spectral_radius,
                "residual_x": report.residual_x,
                "residual_y": report.residual_y,
                "closed_loop_norm": report.closed_loop_norm,
                "closed_loop_stable": report.closed_loop_stable,
                "controller_stable": report.controller_stable,
                "controller_order": report.controller_order,
            }
        )
    return pd.DataFrame(rows)


def block_frame(
    a: np.ndarray,
    b: np.ndarray,
    c: np.ndarray,
    d: np.ndarray,
    states: Sequence[str],
    inputs: Sequence[str],
    outputs: Sequence[str],
) -> pd.DataFrame:
    """Dense [[A, B], [C, D]] labelled by state and channel names."""
    matrix = np.block([[a, b], [c, d]])
    labels_rows = [f"x:{name}" for name in states] + [f"y:{name}" for name in outputs]
    labels_columns = [f"x:{name}" for name in states] + [f"u:{name}" for name in inputs]
    return pd.DataFrame(matrix, index=labels_rows, columns=labels_columns)


def controller_frame(controller: HinfController) -> pd.DataFrame:
    states = [f"k:{index}" for index in range(controller.order)]
    return block_frame(
        controller.a,
        controller.b,
        controller.c,
        controller.d,
        states,
        controller.input_names,
        controller.output_names,
    )


def write_controller(controller: HinfController, directory: PathLike) -> Path:
    return write_table(controller_frame(controller), Path(directory) / f"controller_k{controller.grid}.csv", index=True)


def write_model(system: StateSpaceModel, directory: PathLike) -> List[Path]:
    """model_A.csv .. model_D.csv with row and column labels, plus the channel registry."""
    directory = Path(directory)
    blocks = {
        "A": (system.a, system.state_names, system.state_names),
        "B": (system.b, system.state_names, system.input_names),
        "C": (system.c, system.output_names, system.state_names),
        "D": (system.d, system.output_names, system.input_names),
    }
    written = []
    for name, (matrix, rows, columns) in blocks.items():
        frame = pd.DataFrame(matrix, index=list(rows), columns=list(columns))
        written.append(write_table(frame, directory / f"model_{name}.csv", index=True))
    registry = [("state", index, name) for index, name in enumerate(system.state_names)]
    registry += [("input", index, name) for index, name in enumerate(system.input_names)]
    registry += [("output", index, name) for index, name in enumerate(system.output_names)]
    written.append(write_table(pd.DataFrame(registry, columns=["kind", "index", "name"]), directory / "channels.csv"))
    return written


def read_disturbance_csv(path: PathLike) -> DisturbanceProfile:
    """Sampled profile from a ``t,dPL1,dPL2,dPL3,dVw`` file.

    Raises:
        ConfigError: If the file is missing or lacks a column.
    """
    source = Path(path)
    if not source.is_file():
        raise ConfigError(str(source), "file not found")
    try:
        table = pd.read_csv(source)
    except (OSError, ValueError, pd.errors.ParserError) as error:
        raise ConfigError(str(source), f"not a readable CSV ({error})") from error
    missing = [column for column in DISTURBANCE_COLUMNS if column not in table.columns]
    if missing:
        raise ConfigError(str(source), f"missing columns: {', '.join(missing)}")
    values = table[list(DISTURBANCE_COLUMNS[1:])].to_numpy(dtype=float)
    logger.info("Read %d disturbance samples from %s", len(table), source)
    return from_samples(table["t"].to_numpy(dtype=float), values)
