import argparse
import logging
from datetime import date
from pathlib import Path

from app.core.exceptions import ConfigError
from app.core.config import RESULTS_DIR, TAXI_FIXTURE_PATH
from app.cli.common import add_sim_arguments, record_outcomes, resolve_settings
from app.services.experiment_service import ExperimentService, parse_horizons
from app.services.taxi_service import date_span

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("taxi", help="simulate NYC taxi nights from a trip CSV")
    parser.add_argument("--csv", type=Path, default=TAXI_FIXTURE_PATH, help="trip data CSV")
    parser.add_argument("--start", type=date.fromisoformat, default=date(2013, 1, 7), help="first night (YYYY-MM-DD)")
    parser.add_argument("--end", type=date.fromisoformat, default=None, help="last night, defaults to 2013-01-09")
    parser.add_argument("--night", type=date.fromisoformat, default=None, help="a single night")
    parser.add_argument("--first-hour", type=int, default=0, help="hour each night starts, time 0 of the simulation")
    parser.add_argument("--last-hour", type=int, default=7, help="exclusive")
    parser.add_argument("--fleet", type=int, default=20, help="number of taxis")
    parser.add_argument("--horizons", type=parse_horizons, default=None, help="e.g. 0,1,2,3,4,5,v")
    parser.add_argument("--export-dir", type=Path, default=None, help="write each night as a scenario file")
    parser.add_argument("--output", type=Path, default=None, help="report JSON path")
    add_sim_arguments(parser, synthetic=False)
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    if args.night is not None:
        dates = [args.night]
    else:
        dates = date_span(args.start, args.end or date(2013, 1, 9))
    if args.fleet < 1:
        raise ConfigError("--fleet must be >= 1")

    settings = resolve_settings(args)
    single = settings.pop("horizon", "0")
    horizons = args.horizons or [str(single)]

    report, outcomes = ExperimentService.taxi(
        args.csv,
        dates,
        fleet_size=args.fleet,
        horizons=horizons,
        settings=settings,
        hour_range=(args.first_hour, args.last_hour),
        export_dir=args.export_dir,
    )

    path = args.output or RESULTS_DIR / f"taxi_{dates[0].isoformat()}_{dates[-1].isoformat()}_n{args.fleet}.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report.model_dump_json(indent=2) + "\n", encoding="utf-8")
    record_outcomes("taxi", outcomes, results_path=path)

    print(f"rows={report.rows} retained={report.retained} dropped={sum(report.drops.values())} {report.drops}")
    for night in report.nights:
        print(f"{night.night}: {night.requests} requests, hourly {night.hourly}")
        for t in night.triples:
            print(f"  {t.horizon:<5} distance {t.total_distance_m:12.1f} m  idle {t.total_idle_s:10.1f} s  "
                  f"assigned {t.percent_assigned:6.2f}%")
    if len(report.nights) > 1:
        print("mean:")
        for t in report.mean:
            print(f"  {t.horizon:<5} distance {t.total_distance_m:12.1f} m  idle {t.total_idle_s:10.1f} s  "
                  f"assigned {t.percent_assigned:6.2f}%")
    if report.idle_trend_holds is not None:
        print(f"idle trend H(0) >= largest fixed horizon: {'yes' if report.idle_trend_holds else 'no'}")
    print(f"report: {path}")
    return 0
