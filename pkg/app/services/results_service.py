import logging
from pathlib import Path
from typing import Any, Iterable, Optional

import pandas as pd

from app.core.logging_config import kv
from app.schemas.config_schema import SimConfig
from app.schemas.results_schema import ResultsDocument, WindowRecord
from app.schemas.solution_schema import SimMetrics

logger = logging.getLogger(__name__)

SWEEP_METRICS = ("total_distance_m", "total_idle_s", "percent_assigned")


class ResultsService:
    """Results documents, flat traces and the averaged sweep table."""

    @staticmethod
    def document(
        config: SimConfig,
        metrics: SimMetrics,
        kind: str = "run",
        label: Optional[str] = None,
        scenario: Optional[dict[str, Any]] = None,
    ) -> ResultsDocument:
        """Snapshot a finished run together with its fully resolved config."""
        return ResultsDocument(
            kind=kind,
            label=label,
            seed=config.rng_seed,
            config=config.model_dump(mode="json"),
            scenario=scenario or {},
            total_distance_m=metrics.total_distance,
            total_idle_s=metrics.total_idle,
            tail_idle_s=metrics.tail_idle,
            percent_assigned=metrics.percent_assigned,
            vacuous=metrics.vacuous,
            presented=metrics.presented,
            assigned=metrics.assigned,
            carried=metrics.carried,
            stranded=metrics.stranded,
            unpresented=metrics.unpresented,
            per_window=[
                WindowRecord(
                    window=w.window,
                    n_tasks=w.n_tasks,
                    assigned=w.assigned,
                    carried=w.carried,
                    chosen_k=w.chosen_k,
                    fitness=w.fitness,
                    fitness_by_k=w.fitness_by_k,
                    available_agents=w.available_agents,
                    busy_agents_assigned=w.busy_agents_assigned,
                    distance_m=w.distance,
                    idle_s=w.idle,
                )
                for w in metrics.per_window
            ],
        )

    @staticmethod
    def write_json(document: ResultsDocument, path: Path) -> Path:
        """Rewrite `path` with the document (never appends)."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(document.model_dump_json(indent=2) + "\n", encoding="utf-8")
        logger.info(kv(results=str(path)))
        return path

    @staticmethod
    def trace_frame(document: ResultsDocument) -> pd.DataFrame:
        # The per-horizon fitness map stays in the JSON document only.
        columns = [name for name in WindowRecord.model_fields if name != "fitness_by_k"]
        return pd.DataFrame([w.model_dump(exclude={"fitness_by_k"}) for w in document.per_window], columns=columns)

    @staticmethod
    def write_trace_csv(document: ResultsDocument, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        ResultsService.trace_frame(document).to_csv(path, index=False, lineterminator="\n")
        return path

    @staticmethod
    def summary(document: ResultsDocument) -> str:
        """Human summary printed after a run."""
        config = document.config
        horizon = config["horizon"]
        horizon_label = f"H({horizon['k']})" if horizon["kind"] == "fixed" else f"H(v, k<={horizon['max_k']})"
        lines = [
            f"seed={document.seed} alpha={config['alpha']} horizon={horizon_label} windows={config['total_windows']}",
            f"total distance   {document.total_distance_m:.3f} m",
            f"total idle       {document.total_idle_s:.3f} s",
            f"tail idle        {document.tail_idle_s:.3f} s",
            f"assigned         {document.assigned}/{document.presented + document.unpresented} "
            f"({document.percent_assigned:.2f}%{', vacuous' if document.vacuous else ''})",
        ]
        if document.carried or document.stranded or document.unpresented:
            lines.append(
                f"carried={document.carried} stranded={document.stranded} unpresented={document.unpresented}"
            )
        return "\n".join(lines)

    @staticmethod
    def sweep_table(rows: Iterable[dict[str, Any]]) -> pd.DataFrame:
        """Average cells over seeds: one row per alpha, metric x horizon columns.

        Args:
            rows: Dicts with alpha, horizon (label), seed and the sweep metrics

        Returns:
            Pivoted frame, columns ordered by metric then by horizon as first seen
        """
        frame = pd.DataFrame(list(rows))
        if frame.empty:
            return frame
        horizon_order = list(dict.fromkeys(frame["horizon"]))
        means = frame.groupby(["alpha", "horizon"], sort=False)[list(SWEEP_METRICS)].mean()
        table = means.unstack("horizon")
        table = table.reindex(
            columns=pd.MultiIndex.from_product([list(SWEEP_METRICS), horizon_order], names=[None, "horizon"])
        )
        return table.sort_index()

    @staticmethod
    def write_sweep(table: pd.DataFrame, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        flat = table.copy()
        flat.columns = [f"{metric}[{horizon}]" for metric, horizon in flat.columns]
        flat.to_csv(path, float_format="%.6f", lineterminator="\n")
        return path
