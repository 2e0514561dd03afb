import argparse

from app.cli.commands import history_command, run_command, scenario_command, sweep_command, taxi_command

COMMANDS = (run_command, sweep_command, taxi_command, scenario_command, history_command)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="horizon-dispatch",
        description="Online multi-task assignment with receding-horizon availability anticipation.",
    )
    parser.add_argument("--log-level", default=None, help="overrides HDISPATCH_LOG_LEVEL")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        command.register(subparsers)
    return parser
