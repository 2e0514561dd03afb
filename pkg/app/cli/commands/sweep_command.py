import argparse
import logging
from pathlib import Path

from app.core.exceptions import ConfigError
from app.core.config import RESULTS_DIR
from app.cli.common import add_sim_arguments, record_outcomes, resolve_settings
from app.services.experiment_service import REGIMES, ExperimentService, parse_horizons
from app.services.results_service import ResultsService

logger = logging.getLogger(__name__)


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _seeds(text: str) -> list[int]:
    """`0-9` or `1,4,7`."""
    text = text.strip()
    if "-" in text and "," not in text:
        first, last = (int(v) for v in text.split("-", 1))
        if last < first:
            raise argparse.ArgumentTypeError("seed range ends before it starts")
        return list(range(first, last + 1))
    return [int(v) for v in text.split(",") if v.strip()]


def register(subparsers) -> None:
    parser = subparsers.add_parser("sweep", help="alpha x horizon grid averaged over seeds")
    parser.add_argument("--alphas", type=_floats, default=[0.0, 0.25, 0.5, 0.75, 1.0])
    parser.add_argument("--horizons", type=parse_horizons, default=parse_horizons("0,1,2,3,4,5,v"))
    parser.add_argument("--seeds", type=_seeds, default=list(range(10)))
    parser.add_argument(
        "--regime",
        choices=sorted(REGIMES),
        default="under",
        help="under: 20 agents / 10 tasks per window; over: 10 agents / 20 tasks, capacity 1/3",
    )
    parser.add_argument("--workers", type=int, default=1, help="parallel processes for the cells")
    parser.add_argument("--output", type=Path, default=None, help="averaged table CSV path")
    add_sim_arguments(parser)
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    if args.workers < 1:
        raise ConfigError("--workers must be >= 1")
    if not args.alphas or not args.seeds:
        raise ConfigError("--alphas and --seeds must not be empty")

    defaults = {"budget": "generations", "generations": 300, **REGIMES[args.regime]}
    base = resolve_settings(args, defaults=defaults)
    outcomes = ExperimentService.sweep(base, args.alphas, args.horizons, args.seeds, workers=args.workers)

    table = ResultsService.sweep_table(ExperimentService.sweep_row(o) for o in outcomes)
    path = args.output or RESULTS_DIR / f"sweep_{args.regime}.csv"
    ResultsService.write_sweep(table, path)

    logger.info("sweep of %d cells took %.2fs of compute", len(outcomes), sum(o.elapsed_s for o in outcomes))
    record_outcomes("sweep", outcomes, results_path=path)
    print(table.to_string(float_format=lambda v: f"{v:.2f}"))
    print(f"table: {path}")
    return 0
