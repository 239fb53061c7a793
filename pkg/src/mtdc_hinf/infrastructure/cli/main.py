"""Command-line entry point.

Every subcommand reads a scenario file (``--config``; the nominal scenario when absent)
and writes CSV files under ``--out``. Exit codes: 0 success, 2 invalid input,
3 numerical failure, 64 usage error.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, NoReturn, Optional, Sequence

import pandas as pd
from pydantic import ValidationError

from mtdc_hinf.application.analysis import delay_margin, gain_sensitivity, sweep_eigen
from mtdc_hinf.application.experiments import (
    communication_failure_study,
    compare_cases,
    delay_stress,
    design,
    run_report,
    run_weighting_study,
    simulate,
    uncertainty_study,
)
from mtdc_hinf.application.grid_model import build_plant
from mtdc_hinf.application.model_reduction import reduce_controllers
from mtdc_hinf.application.numerics import eigenvalues
from mtdc_hinf.application.strategies import strategy_for
from mtdc_hinf.domain.enums import ControlCase
from mtdc_hinf.domain.exceptions import ModelValidationError, NumericalError, StabilityError
from mtdc_hinf.infrastructure.persistence.config_loader import LoadedScenario, default_scenario, load_scenario
from mtdc_hinf.infrastructure.persistence.csv_io import (
    eigenlocus_frame,
    hsv_frame,
    metrics_frame,
    modes_frame,
    reduction_frame,
    synthesis_report_frame,
    write_controller,
    write_model,
    write_table,
    write_timeseries,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_USAGE = 64

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


class UsageError(Exception):
    """Raised by the parser instead of exiting, so usage errors map to their own exit code."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _scenario(args: argparse.Namespace) -> LoadedScenario:
    if args.config is None:
        return default_scenario(args.seed)
    return load_scenario(args.config, args.seed)


def _case(args: argparse.Namespace, loaded: LoadedScenario) -> LoadedScenario:
    if getattr(args, "case", None) is None:
        return loaded
    return loaded.model_copy(update={"scenario": loaded.scenario.model_copy(update={"case": ControlCase(args.case)})})


def cmd_build_model(args: argparse.Namespace) -> str:
    loaded = _scenario(args)
    plant = build_plant(loaded.scenario.system)
    write_model(plant.system, args.out)
    spectrum = eigenvalues(plant.system.a)
    write_table(modes_frame(spectrum), args.out / "modes.csv")
    return f"{plant.system.n_states} states, max real part {spectrum.max_real:.4g}"


def cmd_synthesize(args: argparse.Namespace) -> str:
    scenario = _case(args, _scenario(args)).scenario
    plant = build_plant(scenario.system)
    controllers = strategy_for(scenario.case, threads=args.threads, reduce=False).design(plant, scenario)
    for controller in controllers.controllers:
        write_controller(controller, args.out)
    if controllers.reports:
        write_table(synthesis_report_frame(controllers.reports), args.out / "synthesis_report.csv")
    orders = ", ".join(str(controller.order) for controller in controllers.controllers)
    return f"{scenario.case}: {len(controllers.controllers)} controllers of order {orders or '-'}"


def cmd_reduce(args: argparse.Namespace) -> str:
    scenario = _case(args, _scenario(args)).scenario
    plant = build_plant(scenario.system)
    full = strategy_for(scenario.case, threads=args.threads, reduce=False).design(plant, scenario)
    threshold = scenario.reduction_threshold if scenario.reduction_threshold is not None else 1.0
    reduced, reductions = reduce_controllers(plant, full, threshold, args.threads)
    tables = [hsv_frame(item.balanced, item.grid) for item in reductions if item.balanced is not None]
    if tables:
        write_table(pd.concat(tables, ignore_index=True), args.out / "hsv.csv")
    write_table(reduction_frame(reductions), args.out / "reduction.csv")
    for controller in reduced.controllers:
        write_controller(controller, args.out)
    summary = ", ".join(f"grid {item.grid}: {item.full_order} -> {item.order}" for item in reductions)
    return summary or "nothing to reduce"


def cmd_analyze(args: argparse.Namespace) -> str:
    loaded = _case(args, _scenario(args))
    scenario, settings = loaded.scenario, loaded.analysis
    plant = build_plant(scenario.system)
    controllers = design(scenario, plant, args.threads)

    locus = sweep_eigen(
        plant,
        controllers.controllers,
        settings.axis,
        sorted(settings.values),
        comm_mask=scenario.comm_mask,
        seed=scenario.uncertainty.seed,
        threads=args.threads,
    )
    write_table(eigenlocus_frame(locus), args.out / "eigenlocus.csv")

    margin: Optional[float]
    try:
        margin = delay_margin(plant, controllers.controllers, settings.t_hi, comm_mask=scenario.comm_mask)
    except StabilityError as error:
        logger.warning("No delay margin: %s", error)
        margin = None
    margins = pd.DataFrame([{"case": str(scenario.case), "t_hi": settings.t_hi, "delay_margin": margin}])
    write_table(margins, args.out / "delay_margin.csv")

    first = scenario.uncertainty.seed
    seeds = range(first, first + settings.seeds)
    write_table(
        uncertainty_study(scenario, settings.levels, seeds, controllers, args.threads), args.out / "uncertainty.csv"
    )
    if controllers.controllers:
        sensitivity = pd.concat(
            [gain_sensitivity(controller).assign(controller=controller.grid) for controller in controllers.controllers],
            ignore_index=True,
        )
        write_table(sensitivity, args.out / "gain_sensitivity.csv")
    crossing = "none" if locus.first_unstable is None else f"{locus.first_unstable:.4g}"
    return f"{scenario.case}: instability along {settings.axis} at {crossing}, delay margin {margin}"


def cmd_simulate(args: argparse.Namespace) -> str:
    loaded = _case(args, _scenario(args))
    result = simulate(loaded.scenario, args.threads, loaded.duration)
    write_timeseries(result, args.out / "timeseries.csv")
    write_table(metrics_frame(result), args.out / "metrics.csv")
    flag = "" if result.stable else " (unstable)"
    return f"{loaded.scenario.case}: sum |df|max {result.metrics.df_max_sum:.4g} Hz{flag}"


def cmd_compare(args: argparse.Namespace) -> str:
    loaded = _scenario(args)
    scenario = loaded.scenario
    if args.study == "weighting":
        study = loaded.weighting_study
        table = run_weighting_study(scenario, study.kind, study.values, args.threads)
        write_table(table, args.out / "weighting.csv")
        return f"{int((table['status'] == 'ok').sum())} of {len(table)} weighting points synthesized"
    if args.study == "communication":
        table = communication_failure_study(scenario, threads=args.threads)
        write_table(table, args.out / "communication.csv")
        return f"{int(table['stable'].sum())} of {len(table)} communication conditions stable"
    if args.study == "delay":
        table = delay_stress(scenario, args.threads)
    else:
        table = compare_cases(scenario, threads=args.threads)
    write_table(table, args.out / "metrics.csv")
    return f"{len(table)} cases compared"


def cmd_report(args: argparse.Namespace) -> str:
    loaded = _scenario(args)
    first = 0 if args.seed is None else args.seed
    report = run_report(loaded.scenario, seeds=(first, first + 1, first + 2), threads=args.threads)
    write_table(report, args.out / "report.csv")
    return f"{int(report['passed'].sum())} of {len(report)} checks passed"


COMMANDS: Dict[str, Callable[[argparse.Namespace], str]] = {
    "build-model": cmd_build_model,
    "synthesize": cmd_synthesize,
    "reduce": cmd_reduce,
    "analyze": cmd_analyze,
    "simulate": cmd_simulate,
    "compare": cmd_compare,
    "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", type=Path, default=None, help="Scenario JSON file (schema 1)")
    common.add_argument("--out", type=Path, default=Path("results"), help="Output directory")
    common.add_argument("--seed", type=int, default=None, help="Override every stochastic seed")
    common.add_argument("--threads", type=int, default=1, help="Worker threads for parallel studies")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")

    parser = _Parser(prog="mtdc-hinf", description="Decentralized H-infinity frequency regulation of MTDC-linked grids")
    commands = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)
    cases = [str(case) for case in ControlCase]
    for name, help_text in (
        ("build-model", "Write the linearized plant and its modes"),
        ("synthesize", "Synthesize controllers and write their realizations"),
        ("reduce", "Balance and truncate the synthesized controllers"),
        ("analyze", "Eigenvalue sweep, delay margin, uncertainty robustness and gain sensitivity"),
        ("simulate", "Simulate the scenario's case"),
    ):
        command = commands.add_parser(name, parents=[common], help=help_text)
        command.add_argument("--case", choices=cases, default=None, help="Override the scenario's case")
    compare = commands.add_parser("compare", parents=[common], help="Compare strategies on one scenario")
    compare.add_argument("--study", choices=["cases", "weighting", "communication", "delay"], default="cases")
    commands.add_parser("report", parents=[common], help="Run the qualitative checks")
    return parser


def configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, format=LOG_FORMAT, force=True)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse ``argv``, run the subcommand and return the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as error:
        print(f"mtdc-hinf: error: {error}", file=sys.stderr)
        return EXIT_USAGE
    configure_logging(args.verbose)
    if args.threads < 1:
        print("mtdc-hinf: error: --threads must be at least 1", file=sys.stderr)
        return EXIT_USAGE

    try:
        args.out.mkdir(parents=True, exist_ok=True)
        summary = COMMANDS[args.command](args)
    except (ModelValidationError, ValidationError) as error:
        logger.debug("Validation failure", exc_info=True)
        print(f"mtdc-hinf: invalid input: {error}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as error:
        logger.debug("Numerical failure", exc_info=True)
        print(f"mtdc-hinf: numerical failure: {error}", file=sys.stderr)
        return EXIT_NUMERICAL
    print(f"{args.command}: {summary}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
