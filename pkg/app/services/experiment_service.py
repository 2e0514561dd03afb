import logging
import time
from concurrent.futures import ProcessPoolExecutor
from datetime import date
from itertools import product
from pathlib import Path
from typing import Any, Iterable, Optional

import numpy as np
from pydantic import BaseModel, Field

from app.core.config import TAXI_DELTA_S
from app.core.logging_config import kv
from app.schemas.results_schema import HorizonTriple, TaxiNightReport, TaxiReport
from app.schemas.scenario_schema import Scenario
from app.schemas.solution_schema import SimMetrics
from app.services.config_service import ConfigService, ResolvedConfig
from app.services.scenario_service import ScenarioService
from app.services.simulation_service import SimulationService
from app.services.taxi_service import TaxiService

logger = logging.getLogger(__name__)

# Load regimes of the synthetic benchmark: fewer tasks than agents, and more.
REGIMES = {
    "under": {"agents": 20, "tasks_per_window": 10, "capacity": "unbounded"},
    "over": {"agents": 10, "tasks_per_window": 20, "capacity": "1/3"},
}


class CellOutcome(BaseModel):
    """One finished simulation of an experiment grid."""

    label: str
    config: ResolvedConfig
    metrics: SimMetrics
    elapsed_s: float = 0.0
    scenario: dict[str, Any] = Field(default_factory=dict)


def parse_horizons(text: str) -> list[str]:
    """`0,3,v` -> ['0', '3', 'v']."""
    items = [item.strip().lower() for item in text.split(",") if item.strip()]
    if not items:
        raise ValueError("empty horizon list")
    return items


def horizon_label(horizon: str) -> str:
    return "H(v)" if horizon in {"v", "variable"} else f"H({int(horizon)})"


class ExperimentService:
    """Synthetic runs, alpha x horizon sweeps and taxi nights built on the simulation loop."""

    @staticmethod
    def synthetic_scenario(resolved: ResolvedConfig) -> Scenario:
        return ScenarioService.generate(resolved.synthetic)

    @staticmethod
    def run_cell(settings: dict[str, Any]) -> CellOutcome:
        """Generate the synthetic scenario for `settings` and simulate it."""
        resolved = ConfigService.build(settings)
        scenario = ExperimentService.synthetic_scenario(resolved)
        started = time.perf_counter()
        metrics = SimulationService.run_simulation(resolved.sim, scenario)
        return CellOutcome(
            label=f"alpha={resolved.sim.alpha} {resolved.sim.horizon.label} seed={resolved.sim.rng_seed}",
            config=resolved,
            metrics=metrics,
            elapsed_s=time.perf_counter() - started,
            scenario={"source": "synthetic", **resolved.synthetic.model_dump(mode="json")},
        )

    @staticmethod
    def sweep_settings(
        base: dict[str, Any],
        alphas: Iterable[float],
        horizons: Iterable[str],
        seeds: Iterable[int],
    ) -> list[dict[str, Any]]:
        """Cross product alpha x horizon x seed, in that nesting order."""
        return [
            ConfigService.merge(base, {"alpha": alpha, "horizon": horizon, "rng_seed": seed})
            for alpha, horizon, seed in product(list(alphas), list(horizons), list(seeds))
        ]

    @staticmethod
    def sweep(
        base: dict[str, Any],
        alphas: Iterable[float],
        horizons: Iterable[str],
        seeds: Iterable[int],
        workers: int = 1,
    ) -> list[CellOutcome]:
        """Run every cell of the grid; results come back in grid order.

        Args:
            base: Settings shared by every cell
            alphas: Alpha values
            horizons: Horizon settings ('0'..'k' or 'v')
            seeds: Seeds averaged per cell
            workers: Process count; 1 runs sequentially

        Returns:
            One outcome per (alpha, horizon, seed)
        """
        cells = ExperimentService.sweep_settings(base, alphas, horizons, seeds)
        # Validate every cell before spending compute on any of them.
        for cell in cells:
            ConfigService.build(cell)

        logger.info(kv(cells=len(cells), workers=workers))
        if workers <= 1:
            return [ExperimentService.run_cell(cell) for cell in cells]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(ExperimentService.run_cell, cells))

    @staticmethod
    def sweep_row(outcome: CellOutcome) -> dict[str, Any]:
        sim = outcome.config.sim
        return {
            "alpha": sim.alpha,
            "horizon": sim.horizon.label,
            "seed": sim.rng_seed,
            "total_distance_m": outcome.metrics.total_distance,
            "total_idle_s": outcome.metrics.total_idle,
            "percent_assigned": outcome.metrics.percent_assigned,
        }

    @staticmethod
    def taxi_settings(settings: dict[str, Any], hour_range: tuple[int, int]) -> dict[str, Any]:
        """Taxi defaults (5 min windows over the night, geographic space) under `settings`."""
        delta = float(settings.get("delta") or TAXI_DELTA_S)
        night_seconds = (hour_range[1] - hour_range[0]) * 3600
        defaults = {
            "delta": delta,
            "total_windows": int(np.ceil(night_seconds / delta)),
            "budget": "wall_clock",
        }
        return ConfigService.merge(defaults, settings, {"metric_space": "geographic"})

    @staticmethod
    def idle_trend(triples: list[HorizonTriple]) -> Optional[bool]:
        """idle(H(0)) >= idle of the largest fixed horizon, or None when not comparable."""
        fixed = {}
        for triple in triples:
            if triple.horizon.startswith("H(") and triple.horizon[2:-1].isdigit():
                fixed[int(triple.horizon[2:-1])] = triple.total_idle_s
        if 0 not in fixed or max(fixed) == 0:
            return None
        return fixed[0] >= fixed[max(fixed)]

    @staticmethod
    def taxi(
        path: Path,
        dates: list[date],
        fleet_size: int,
        horizons: list[str],
        settings: dict[str, Any],
        hour_range: tuple[int, int] = (0, 7),
        export_dir: Optional[Path] = None,
    ) -> tuple[TaxiReport, list[CellOutcome]]:
        """Ingest the trip file and simulate every night under every horizon.

        Each night gets its own random fleet (seeded by run seed and date);
        all horizons of a night share that fleet.

        Returns:
            The report (per-night triples, their mean, the idle-trend flag)
            and the individual outcomes for the ledger
        """
        base = ExperimentService.taxi_settings(settings, hour_range)
        configs = {h: ConfigService.build(ConfigService.merge(base, {"horizon": h})) for h in horizons}
        first = next(iter(configs.values())).sim
        ingest = TaxiService.ingest(path, dates, hour_range=hour_range, delta=first.delta)

        outcomes: list[CellOutcome] = []
        nights: list[TaxiNightReport] = []
        for night in sorted(ingest.nights):
            requests = ingest.nights[night]
            rng = np.random.default_rng([first.rng_seed, night.toordinal()])
            scenario = TaxiService.night_scenario(requests, TaxiService.make_taxi_fleet(fleet_size, rng))
            if export_dir is not None:
                ScenarioService.write(scenario, Path(export_dir) / f"taxi_{night.isoformat()}.txt")

            report = TaxiNightReport(night=night.isoformat(), requests=len(requests), hourly=ingest.hourly[night])
            for horizon, resolved in configs.items():
                started = time.perf_counter()
                metrics = SimulationService.run_simulation(resolved.sim, scenario)
                label = horizon_label(horizon)
                report.triples.append(HorizonTriple(
                    horizon=label,
                    total_distance_m=metrics.total_distance,
                    total_idle_s=metrics.total_idle,
                    percent_assigned=metrics.percent_assigned,
                ))
                outcomes.append(CellOutcome(
                    label=f"{night.isoformat()} {label}",
                    config=resolved,
                    metrics=metrics,
                    elapsed_s=time.perf_counter() - started,
                    scenario={"source": "taxi", "night": night.isoformat(), "fleet_size": fleet_size},
                ))
                logger.info(kv(night=night.isoformat(), horizon=label, assigned=metrics.percent_assigned))
            nights.append(report)

        mean: list[HorizonTriple] = []
        for horizon in horizons:
            label = horizon_label(horizon)
            triples = [t for n in nights for t in n.triples if t.horizon == label]
            if not triples:
                continue
            mean.append(HorizonTriple(
                horizon=label,
                total_distance_m=float(np.mean([t.total_distance_m for t in triples])),
                total_idle_s=float(np.mean([t.total_idle_s for t in triples])),
                percent_assigned=float(np.mean([t.percent_assigned for t in triples])),
            ))

        report = TaxiReport(
            fleet_size=fleet_size,
            seed=first.rng_seed,
            config=base,
            rows=ingest.total_rows,
            retained=ingest.retained,
            drops=ingest.drops,
            nights=nights,
            mean=mean,
            idle_trend_holds=ExperimentService.idle_trend(mean),
        )
        return report, outcomes
