"""Case-study protocols: case comparison, robustness studies, weighting study and the summary report."""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from mtdc_hinf.application.analysis import delay_margin, pade_block, stability_fraction
from mtdc_hinf.application.disturbances import gen_regd_like, load_step, square_wave
from mtdc_hinf.application.grid_model import build_plant, perturb
from mtdc_hinf.application.model_reduction import random_stable_system, verify_bound
from mtdc_hinf.application.simulation import simulate_closed_loop
from mtdc_hinf.application.strategies import strategy_for
from mtdc_hinf.domain.enums import ControlCase, WeightingKind
from mtdc_hinf.domain.exceptions import MtdcHinfException, StabilityError
from mtdc_hinf.domain.models import CompositePlant, ControllerSet, SimulationResult
from mtdc_hinf.domain.scenario import CommunicationMask, Scenario, WeightingFunction, WeightSet

logger = logging.getLogger(__name__)

COMPARED_CASES = (ControlCase.CASE1, ControlCase.CASE2, ControlCase.CASE3)
WIND_AMPLITUDE = 0.5


def design(scenario: Scenario, plant: Optional[CompositePlant] = None, threads: int = 1) -> ControllerSet:
    """Controllers of the scenario's case, designed on the nominal plant."""
    plant = plant or build_plant(scenario.system)
    return strategy_for(scenario.case, threads=threads).design(plant, scenario)


def run_case(
    scenario: Scenario,
    controllers: Optional[ControllerSet] = None,
    plant: Optional[CompositePlant] = None,
    threads: int = 1,
    duration: Optional[float] = None,
) -> Tuple[ControllerSet, SimulationResult]:
    """Design (unless given) and simulate one case.

    Controllers are designed on the nominal plant and simulated on the plant perturbed
    by the scenario's uncertainty.
    """
    nominal = plant or build_plant(scenario.system)
    if controllers is None:
        controllers = design(scenario, nominal, threads)
    result = simulate_closed_loop(
        perturb(nominal, scenario.uncertainty),
        controllers.controllers,
        scenario.disturbance,
        sample_period=scenario.sample_period,
        duration=duration,
        delay=scenario.delay,
        comm_mask=scenario.comm_mask,
        case=scenario.case,
    )
    return controllers, result


def simulate(scenario: Scenario, threads: int = 1, duration: Optional[float] = None) -> SimulationResult:
    """Simulate the scenario's case over its disturbance, or over ``duration`` seconds."""
    _, result = run_case(scenario, threads=threads, duration=duration)
    return result


def metrics_row(case: ControlCase, result: SimulationResult) -> Dict[str, Any]:
    metrics = result.metrics
    row: Dict[str, Any] = {"case": str(case)}
    for index, value in enumerate(metrics.df_max, start=1):
        row[f"df_max_{index}"] = value
    row["df_max_sum"] = metrics.df_max_sum
    for index, value in enumerate(metrics.df_rms, start=1):
        row[f"df_rms_{index}"] = value
    row["df_rms_sum"] = metrics.df_rms_sum
    row["vdc_max"] = metrics.vdc_max
    row["vdc_rms"] = metrics.vdc_rms
    row["stable"] = result.stable
    return row


def _with_reductions(table: pd.DataFrame) -> pd.DataFrame:
    """Relative reduction achieved by Case 1 against every row, (x - x_case1) / x."""
    reference = table[table["case"] == str(ControlCase.CASE1)]
    if reference.empty:
        return table
    for column in ("df_max_sum", "df_rms_sum", "vdc_max", "vdc_rms"):
        base = float(reference[column].iloc[0])
        values = table[column].to_numpy(dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            table[f"case1_reduction_{column}"] = np.where(values > 0.0, (values - base) / values, 0.0)
    return table


def compare_cases(
    scenario: Scenario,
    cases: Sequence[ControlCase] = COMPARED_CASES,
    threads: int = 1,
) -> pd.DataFrame:
    """One metrics row per case on the same plant and disturbance, in the order given."""
    plant = build_plant(scenario.system)

    def run(case: ControlCase) -> Dict[str, Any]:
        try:
            _, result = run_case(scenario.model_copy(update={"case": case}), plant=plant)
        except MtdcHinfException:
            logger.error("Case %s failed", case)
            raise
        return metrics_row(case, result)

    with ThreadPoolExecutor(max_workers=max(threads, 1)) as executor:
        rows = list(executor.map(run, cases))
    return _with_reductions(pd.DataFrame(rows))


def communication_masks(grids: Sequence[int]) -> List[Tuple[str, CommunicationMask]]:
    """Full communication, loss of each inter-grid link, and no communication."""
    masks = [("full", CommunicationMask())]
    for position, first in enumerate(grids):
        for second in grids[position + 1 :]:
            masks.append((f"loss_{first}_{second}", CommunicationMask.between(first, second)))
    masks.append(("none", CommunicationMask.isolated(tuple(grids))))
    return masks


def communication_failure_study(
    scenario: Scenario,
    controllers: Optional[ControllerSet] = None,
    threads: int = 1,
) -> pd.DataFrame:
    """Case 1 step responses under every communication condition."""
    scenario = scenario.model_copy(update={"case": ControlCase.CASE1})
    plant = build_plant(scenario.system)
    controllers = controllers or design(scenario, plant, threads)

    def run(item: Tuple[str, CommunicationMask]) -> Dict[str, Any]:
        label, mask = item
        _, result = run_case(scenario.model_copy(update={"comm_mask": mask}), controllers, plant)
        return {"condition": label, **metrics_row(scenario.case, result)}

    with ThreadPoolExecutor(max_workers=max(threads, 1)) as executor:
        rows = list(executor.map(run, communication_masks(plant.grids)))
    return pd.DataFrame(rows)


def uncertainty_study(
    scenario: Scenario,
    levels: Sequence[float] = (0.1, 0.2, 0.3, 0.4, 0.5),
    seeds: Sequence[int] = tuple(range(200)),
    controllers: Optional[ControllerSet] = None,
    threads: int = 1,
) -> pd.DataFrame:
    """Fraction of stable closed loops over seeded perturbations at each level."""
    plant = build_plant(scenario.system)
    controllers = controllers or design(scenario, plant, threads)
    rows = []
    for level in levels:
        fraction = stability_fraction(plant, controllers.controllers, level, seeds, threads)
        logger.info("Uncertainty level %.2f: %.1f%% stable", level, 100.0 * fraction)
        rows.append({"level": level, "stable_fraction": fraction, "samples": len(seeds)})
    return pd.DataFrame(rows)


def weighting_for(kind: WeightingKind, value: float) -> WeightingFunction:
    if kind == WeightingKind.LOW_PASS:
        return WeightingFunction.low_pass(cutoff=value)
    if kind == WeightingKind.BAND_PASS:
        return WeightingFunction.band_pass(bandwidth=value)
    return WeightingFunction.unity()


def _with_point_comparison(table: pd.DataFrame) -> pd.DataFrame:
    """Column ``case1_le_case3`` per weighting value, empty where either case failed."""
    case1, case3 = str(ControlCase.CASE1), str(ControlCase.CASE3)
    ok = table[table["status"] == "ok"]
    wide = ok.pivot_table(index="value", columns="case", values="df_rms_sum", aggfunc="first")
    if case1 not in wide or case3 not in wide:
        table["case1_le_case3"] = None
        return table
    both = wide[[case1, case3]].dropna()
    verdict = {value: bool(row[case1] <= row[case3]) for value, row in both.iterrows()}
    table["case1_le_case3"] = [verdict.get(value) for value in table["value"]]
    return table


def run_weighting_study(
    scenario: Scenario,
    kind: WeightingKind,
    values: Sequence[float],
    threads: int = 1,
) -> pd.DataFrame:
    """Re-synthesize Cases 1 and 3 per weighting and run the scenario's disturbance.

    A point whose design or simulation fails is recorded as failed and the study
    continues. ``case1_le_case3`` compares the summed rms frequency deviations of the
    two cases at each value where both succeeded.
    """
    plant = build_plant(scenario.system)

    def run(point: Tuple[float, ControlCase]) -> Dict[str, Any]:
        value, case = point
        weights = WeightSet.uniform(weighting_for(kind, value))
        weighted = scenario.model_copy(update={"case": case, "weights": weights})
        row: Dict[str, Any] = {"kind": str(kind), "value": value, "case": str(case)}
        try:
            controllers, result = run_case(weighted, plant=plant)
        except MtdcHinfException as error:
            logger.warning("Weighting point %s=%g failed for %s: %s", kind, value, case, error)
            return {**row, "status": "failed", "df_rms_sum": np.nan, "vdc_rms": np.nan, "gamma": np.nan}
        gammas = [report.gamma_final for report in controllers.reports]
        return {
            **row,
            "status": "ok",
            "df_rms_sum": result.metrics.df_rms_sum,
            "vdc_rms": result.metrics.vdc_rms,
            "gamma": max(gammas) if gammas else np.nan,
        }

    points = [(float(value), case) for value in values for case in (ControlCase.CASE1, ControlCase.CASE3)]
    with ThreadPoolExecutor(max_workers=max(threads, 1)) as executor:
        rows = list(executor.map(run, points))
    return _with_point_comparison(pd.DataFrame(rows))


def delay_stress(scenario: Scenario, threads: int = 1) -> pd.DataFrame:
    """Cases 1 and 3 under alternating load steps with the scenario's delay."""
    stressed = scenario.model_copy(update={"disturbance": square_wave(duration=scenario.disturbance.duration)})
    return compare_cases(stressed, (ControlCase.CASE1, ControlCase.CASE3), threads)


def pade_fidelity(delay: float = 0.05) -> Tuple[float, float]:
    """(max |1 - |P(jw)|| over [1e-2, 1e4] rad/s, max phase error against exp(-jwT) for wT <= 1)."""
    block = pade_block(delay)
    omegas = np.logspace(-2.0, 4.0, 400)
    response = np.array([block.evaluate(1j * omega)[0, 0] for omega in omegas])
    magnitude_error = float(np.max(np.abs(1.0 - np.abs(response))))
    low = omegas * delay <= 1.0
    phase_error = np.abs(np.angle(response[low] * np.exp(1j * omegas[low] * delay)))
    return magnitude_error, float(np.max(phase_error)) if phase_error.size else 0.0


def _margin(plant: CompositePlant, controllers: ControllerSet) -> float:
    """Delay margin, inf when none is found up to 0.6 s and nan when unstable without delay."""
    try:
        margin = delay_margin(plant, controllers.controllers)
    except StabilityError:
        return float("nan")
    return float("inf") if margin is None else margin


def _continuous(scenario: Scenario, seed: int) -> Scenario:
    return scenario.model_copy(update={"disturbance": gen_regd_like(seed, 200.0, 0.1, WIND_AMPLITUDE)})


def _strictly_ordered(table: pd.DataFrame, column: str) -> bool:
    values = table.set_index("case")[column]
    return bool(values[str(ControlCase.CASE1)] < values[str(ControlCase.CASE3)] < values[str(ControlCase.CASE2)])


def run_report(scenario: Scenario, seeds: Sequence[int] = (0, 1, 2), threads: int = 1) -> pd.DataFrame:
    """Qualitative checks on the scenario's plant, one row per check.

    Columns: check, value, reference, passed. References are the magnitudes the
    checks were calibrated against; only the ordering or bound is judged.
    """
    rows: List[Dict[str, Any]] = []

    def add(check: str, value: float, reference: float, passed: bool) -> None:
        rows.append({"check": check, "value": value, "reference": reference, "passed": bool(passed)})

    plant = build_plant(scenario.system)
    step = scenario.model_copy(update={"disturbance": load_step()})
    table = compare_cases(step, threads=threads)
    sums = table.set_index("case")["df_max_sum"]
    references = {ControlCase.CASE1: 0.178, ControlCase.CASE2: 0.730, ControlCase.CASE3: 0.194}
    ordered = _strictly_ordered(table, "df_max_sum")
    for case, reference in references.items():
        add(f"step_df_max_sum_{case}", float(sums[str(case)]), reference, ordered)
    vdc = table.set_index("case")["vdc_max"]
    case1 = str(ControlCase.CASE1)
    add("step_vdc_max_case1_smallest", float(vdc[case1]), np.nan, vdc.idxmin() == case1)

    for seed in seeds:
        table = compare_cases(_continuous(scenario, seed), threads=threads)
        indexed = table.set_index("case")
        for column, reference in (("df_rms_sum", 0.009), ("vdc_rms", 0.002)):
            value = float(indexed.loc[str(ControlCase.CASE1), column])
            add(f"continuous_{column}_case1_seed{seed}", value, reference, _strictly_ordered(table, column))

    case1 = design(scenario.model_copy(update={"case": ControlCase.CASE1}), plant, threads)
    case3 = design(scenario.model_copy(update={"case": ControlCase.CASE3}), plant, threads)
    margin1, margin3 = _margin(plant, case1), _margin(plant, case3)
    add("delay_margin_case1", margin1, 0.51, 0.01 < margin1 <= 0.6)
    add("delay_margin_case3_below_case1", margin3, np.nan, bool(margin3 < margin1))

    failure = communication_failure_study(step, case1, threads)
    unmasked = float(failure.loc[failure["condition"] == "full", "df_max_sum"].iloc[0])
    worst = float(failure["df_max_sum"].max())
    add("communication_failure_all_stable", float(failure["stable"].mean()), 1.0, bool(failure["stable"].all()))
    add("communication_failure_within_3x", worst / unmasked if unmasked else np.nan, 3.0, worst <= 3.0 * unmasked)

    magnitude_error, phase_error = pade_fidelity()
    add("pade_magnitude_error", magnitude_error, 1e-10, magnitude_error <= 1e-10)
    add("pade_phase_error", phase_error, 0.01, phase_error < 0.01)

    rng = np.random.default_rng(scenario.uncertainty.seed)
    systems = [random_stable_system(rng, int(rng.integers(2, 9)), 2, 2) for _ in range(50)]
    pairs = verify_bound(systems, order=1)
    worst_ratio = max(error / bound for error, bound in pairs if bound > 0.0)
    add("reduction_bound_ratio", worst_ratio, 1.0, worst_ratio <= 1.0 + 1e-6)

    report = pd.DataFrame(rows, columns=["check", "value", "reference", "passed"])
    logger.info("Report: %d of %d checks passed", int(report["passed"].sum()), len(report))
    return report

