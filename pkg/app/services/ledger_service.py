import json
from typing import Any, List, Optional

from sqlalchemy import select
from sqlalchemy.orm import Session

from app.models.simulation_run_table import SimulationRun, WindowTrace
from app.schemas.solution_schema import SimMetrics


class LedgerService:
    """Persists finished runs so sweeps and taxi nights can be listed later."""

    @staticmethod
    def record_run(
        db: Session,
        kind: str,
        seed: int,
        config: dict[str, Any],
        metrics: SimMetrics,
        label: Optional[str] = None,
        results_path: Optional[str] = None,
        elapsed_s: Optional[float] = None,
    ) -> SimulationRun:
        """Store one run with its per-window trace.

        Args:
            db: Database session
            kind: run, sweep or taxi
            seed: Run seed
            config: Resolved configuration (JSON-serializable)
            metrics: Final metrics of the run
            label: Optional human label (sweep cell, taxi night)
            results_path: Results document written for the run, if any
            elapsed_s: Wall-clock compute time

        Returns:
            The stored run
        """
        run = SimulationRun(
            kind=kind,
            label=label,
            seed=seed,
            config=json.dumps(config, sort_keys=True, default=str),
            total_distance_m=metrics.total_distance,
            total_idle_s=metrics.total_idle,
            tail_idle_s=metrics.tail_idle,
            percent_assigned=metrics.percent_assigned,
            presented=metrics.presented,
            assigned=metrics.assigned,
            results_path=results_path,
            elapsed_s=elapsed_s,
        )
        run.windows = [
            WindowTrace(
                window=w.window,
                n_tasks=w.n_tasks,
                assigned=w.assigned,
                carried=w.carried,
                chosen_k=w.chosen_k,
                fitness=w.fitness,
                distance_m=w.distance,
                idle_s=w.idle,
            )
            for w in metrics.per_window
        ]

        db.add(run)
        try:
            db.commit()
        except Exception:
            db.rollback()
            raise
        db.refresh(run)
        return run

    @staticmethod
    def get_run(db: Session, run_id: str) -> Optional[SimulationRun]:
        return db.get(SimulationRun, run_id)

    @staticmethod
    def list_runs(db: Session, kind: Optional[str] = None, limit: int = 50, offset: int = 0) -> List[SimulationRun]:
        """List runs newest first.

        Args:
            db: Database session
            kind: Optional kind filter
            limit: Max results to return
            offset: Results offset for pagination

        Returns:
            List of runs
        """
        stmt = select(SimulationRun)
        if kind:
            stmt = stmt.where(SimulationRun.kind == kind)
        stmt = stmt.order_by(SimulationRun.created_at.desc(), SimulationRun.id).offset(offset).limit(limit)
        return list(db.execute(stmt).scalars().all())
