import argparse
from pathlib import Path

from app.cli.common import add_sim_arguments, resolve_settings
from app.services.config_service import ConfigService
from app.services.scenario_service import ScenarioService


def register(subparsers) -> None:
    parser = subparsers.add_parser("scenario", help="generate a synthetic scenario file")
    parser.add_argument("--output", type=Path, required=True)
    add_sim_arguments(parser)
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    resolved = ConfigService.build(resolve_settings(args))
    scenario = ScenarioService.generate(resolved.synthetic)
    path = ScenarioService.write(scenario, args.output)
    print(f"{len(scenario.agents)} agents, {len(scenario.requests)} requests -> {path}")
    return 0
