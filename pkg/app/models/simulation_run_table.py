import json
from datetime import datetime
from json import JSONDecodeError
from uuid import uuid4

from sqlalchemy import DateTime, Float, ForeignKey, Index, Integer, String, Text, func
from sqlalchemy.orm import Mapped, mapped_column, relationship

from app.db.base import Base


class SimulationRun(Base):
    __tablename__ = "simulation_runs"

    id: Mapped[str] = mapped_column(String(36), primary_key=True, default=lambda: str(uuid4()))

    # run | sweep | taxi
    kind: Mapped[str] = mapped_column(String(20), nullable=False)
    label: Mapped[str | None] = mapped_column(String(255), nullable=True)
    seed: Mapped[int] = mapped_column(Integer, nullable=False)

    # Fully resolved SimConfig (and scenario parameters) as JSON.
    config: Mapped[str] = mapped_column(Text, nullable=False)

    total_distance_m: Mapped[float] = mapped_column(Float, nullable=False)
    total_idle_s: Mapped[float] = mapped_column(Float, nullable=False)
    tail_idle_s: Mapped[float] = mapped_column(Float, nullable=False)
    percent_assigned: Mapped[float] = mapped_column(Float, nullable=False)
    presented: Mapped[int] = mapped_column(Integer, nullable=False, default=0)
    assigned: Mapped[int] = mapped_column(Integer, nullable=False, default=0)

    results_path: Mapped[str | None] = mapped_column(String(1024), nullable=True)
    # Real compute time; kept out of results files, which must be deterministic.
    elapsed_s: Mapped[float | None] = mapped_column(Float, nullable=True)

    created_at: Mapped[datetime] = mapped_column(DateTime, server_default=func.now(), nullable=False)

    windows = relationship(
        "WindowTrace",
        back_populates="run",
        cascade="all, delete-orphan",
        order_by="WindowTrace.window",
    )

    __table_args__ = (
        Index("ix_simulation_runs_kind", "kind"),
        Index("ix_simulation_runs_created_at", "created_at"),
    )

    def __repr__(self) -> str:
        return (
            f"<SimulationRun {self.kind}:{self.label} seed={self.seed} "
            f"assigned={self.percent_assigned:.1f}% at={self.created_at}>"
        )

    @property
    def config_dict(self) -> dict:
        try:
            return json.loads(self.config)
        except (JSONDecodeError, TypeError):
            return {}

    @property
    def summary_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind,
            "label": self.label,
            "seed": self.seed,
            "total_distance_m": self.total_distance_m,
            "total_idle_s": self.total_idle_s,
            "percent_assigned": self.percent_assigned,
            "created_at": self.created_at.isoformat() if self.created_at else None,
        }


class WindowTrace(Base):
    __tablename__ = "window_traces"

    id: Mapped[int] = mapped_column(Integer, primary_key=True, autoincrement=True)
    run_id: Mapped[str] = mapped_column(ForeignKey("simulation_runs.id"), nullable=False, index=True)

    window: Mapped[int] = mapped_column(Integer, nullable=False)
    n_tasks: Mapped[int] = mapped_column(Integer, nullable=False)
    assigned: Mapped[int] = mapped_column(Integer, nullable=False)
    carried: Mapped[int] = mapped_column(Integer, nullable=False)
    chosen_k: Mapped[int | None] = mapped_column(Integer, nullable=True)
    fitness: Mapped[float | None] = mapped_column(Float, nullable=True)
    distance_m: Mapped[float] = mapped_column(Float, nullable=False)
    idle_s: Mapped[float] = mapped_column(Float, nullable=False)

    run = relationship("SimulationRun", back_populates="windows")
