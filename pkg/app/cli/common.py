import argparse
import logging
from pathlib import Path
from typing import Any, Optional

from app.core.config import LEDGER_ENABLED
from app.services.config_service import ConfigService

logger = logging.getLogger(__name__)

# Flag dest -> config key, for flags whose names differ from the key.
_FLAG_KEYS = {"seed": "rng_seed"}

SIM_FLAGS = (
    "delta",
    "total_windows",
    "alpha",
    "horizon",
    "max_k",
    "capacity",
    "metric_space",
    "seed",
    "population_size",
    "p_muta",
    "p_swap",
    "epsilon",
    "budget",
    "generations",
)
SYNTHETIC_FLAGS = ("agents", "tasks_per_window", "world_size", "velocity", "travel_budget")


def add_sim_arguments(parser: argparse.ArgumentParser, synthetic: bool = True) -> None:
    """Flags mirroring SimConfig/GAParams; unset flags leave the config file value."""
    parser.add_argument("--config", type=Path, default=None, help="KEY=value config file")
    sim = parser.add_argument_group("simulation")
    sim.add_argument("--delta", type=float, default=None, help="window duration in seconds")
    sim.add_argument("--total-windows", type=int, default=None)
    sim.add_argument("--alpha", type=float, default=None, help="distance weight in [0, 1]")
    sim.add_argument("--horizon", default=None, help="receding horizon k, or 'variable'")
    sim.add_argument("--max-k", type=int, default=None, help="largest k tried by the variable horizon")
    sim.add_argument("--capacity", default=None, help="'unbounded' or a fraction of |R_tau| such as 1/3")
    sim.add_argument("--metric-space", choices=["planar", "geographic"], default=None)
    sim.add_argument("--seed", type=int, default=None)

    ga = parser.add_argument_group("genetic algorithm")
    ga.add_argument("--population-size", type=int, default=None)
    ga.add_argument("--p-muta", type=float, default=None)
    ga.add_argument("--p-swap", type=float, default=None)
    ga.add_argument("--epsilon", default=None, help="convergence threshold, or 'none' to run the whole budget")
    ga.add_argument("--budget", choices=["wall_clock", "generations"], default=None)
    ga.add_argument("--generations", type=int, default=None)

    if synthetic:
        world = parser.add_argument_group("synthetic scenario")
        world.add_argument("--agents", type=int, default=None)
        world.add_argument("--tasks-per-window", type=int, default=None)
        world.add_argument("--world-size", type=float, default=None)
        world.add_argument("--velocity", type=float, default=None)
        world.add_argument("--travel-budget", default=None, help="meters, or 'inf'")


def flag_settings(args: argparse.Namespace) -> dict[str, Any]:
    flags = {}
    for dest in (*SIM_FLAGS, *SYNTHETIC_FLAGS):
        if hasattr(args, dest):
            flags[_FLAG_KEYS.get(dest, dest)] = getattr(args, dest)
    return flags


def resolve_settings(args: argparse.Namespace, defaults: Optional[dict[str, Any]] = None) -> dict[str, Any]:
    """defaults < config file < flags."""
    file_settings = ConfigService.read_file(args.config) if args.config else {}
    return ConfigService.merge(defaults, file_settings, flag_settings(args))


def record_outcomes(kind: str, outcomes: list, results_path: Optional[Path] = None) -> None:
    """Write outcomes to the run ledger; ledger failures only warn."""
    if not LEDGER_ENABLED or not outcomes:
        return

    from app.db.session import SessionLocal, init_db
    from app.services.ledger_service import LedgerService

    db = SessionLocal()
    try:
        init_db()
        for outcome in outcomes:
            LedgerService.record_run(
                db,
                kind=kind,
                seed=outcome.config.sim.rng_seed,
                config={
                    "sim": outcome.config.sim.model_dump(mode="json"),
                    "scenario": outcome.scenario,
                },
                metrics=outcome.metrics,
                label=outcome.label,
                results_path=str(results_path) if results_path else None,
                elapsed_s=outcome.elapsed_s,
            )
    except Exception as exc:
        logger.warning("ledger write failed: %s", exc)
    finally:
        db.close()
