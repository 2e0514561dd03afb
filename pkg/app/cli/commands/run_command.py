import argparse
import logging
import re
import time
from pathlib import Path

from app.core.config import RESULTS_DIR
from app.core.exceptions import MetricSpaceMismatchError
from app.cli.common import add_sim_arguments, record_outcomes, resolve_settings
from app.services.config_service import ConfigService
from app.services.experiment_service import CellOutcome, ExperimentService
from app.services.results_service import ResultsService
from app.services.scenario_service import ScenarioService
from app.services.simulation_service import SimulationService

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("run", help="run one simulation and write its results file")
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--scenario", choices=["synthetic"], help="generate the synthetic benchmark")
    source.add_argument("--scenario-file", type=Path, help="replay a scenario text file")
    add_sim_arguments(parser)
    parser.add_argument("--output", type=Path, default=None, help="results JSON path")
    parser.add_argument("--trace-csv", type=Path, default=None, help="also write the per-window trace as CSV")
    parser.set_defaults(handler=handle)


def default_output(outcome: CellOutcome) -> Path:
    sim = outcome.config.sim
    horizon = re.sub(r"[^0-9a-z]", "", sim.horizon.label.lower())
    return RESULTS_DIR / f"run_{horizon}_a{sim.alpha:g}_s{sim.rng_seed}.json"


def handle(args: argparse.Namespace) -> int:
    settings = resolve_settings(args, defaults={"budget": "wall_clock"})

    if args.scenario == "synthetic":
        outcome = ExperimentService.run_cell(settings)
    else:
        resolved = ConfigService.build(settings)
        scenario = ScenarioService.read(args.scenario_file, resolved.sim.delta)
        if scenario.space != resolved.sim.metric_space:
            if "metric_space" in settings:
                raise MetricSpaceMismatchError(
                    f"--metric-space {resolved.sim.metric_space.value} does not match "
                    f"the {scenario.space.value} scenario file"
                )
            resolved = ConfigService.build({**settings, "metric_space": scenario.space.value})
        started = time.perf_counter()
        metrics = SimulationService.run_simulation(resolved.sim, scenario)
        outcome = CellOutcome(
            label=args.scenario_file.name,
            config=resolved,
            metrics=metrics,
            elapsed_s=time.perf_counter() - started,
            scenario={"source": "file", "path": args.scenario_file.name},
        )

    document = ResultsService.document(
        outcome.config.sim, outcome.metrics, kind="run", label=outcome.label, scenario=outcome.scenario
    )
    path = ResultsService.write_json(document, args.output or default_output(outcome))
    if args.trace_csv:
        ResultsService.write_trace_csv(document, args.trace_csv)

    logger.info("run finished in %.2fs", outcome.elapsed_s)
    record_outcomes("run", [outcome], results_path=path)
    print(ResultsService.summary(document))
    print(f"results: {path}")
    return 0
