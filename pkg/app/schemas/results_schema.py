from typing import Any, Optional

from pydantic import BaseModel, Field


class WindowRecord(BaseModel):
    window: int
    n_tasks: int
    assigned: int
    carried: int
    chosen_k: Optional[int] = None
    fitness: Optional[float] = None
    fitness_by_k: dict[int, float] = Field(default_factory=dict)
    available_agents: int = 0
    busy_agents_assigned: int = 0
    distance_m: float = 0.0
    idle_s: float = 0.0


class ResultsDocument(BaseModel):
    """One run's results file. Everything needed to rerun it is in `config`."""

    kind: str = "run"
    label: Optional[str] = None
    seed: int
    config: dict[str, Any]
    scenario: dict[str, Any] = Field(default_factory=dict)

    total_distance_m: float
    total_idle_s: float
    tail_idle_s: float
    percent_assigned: float
    vacuous: bool = False

    presented: int = 0
    assigned: int = 0
    carried: int = 0
    stranded: int = 0
    unpresented: int = 0

    per_window: list[WindowRecord] = Field(default_factory=list)


class HorizonTriple(BaseModel):
    """Distance, idle and percent assigned of one horizon setting on one night."""

    horizon: str
    total_distance_m: float
    total_idle_s: float
    percent_assigned: float


class TaxiNightReport(BaseModel):
    night: str
    requests: int
    hourly: list[int] = Field(default_factory=list)
    triples: list[HorizonTriple] = Field(default_factory=list)


class TaxiReport(BaseModel):
    fleet_size: int
    seed: int
    config: dict[str, Any]
    rows: int
    retained: int
    drops: dict[str, int] = Field(default_factory=dict)
    nights: list[TaxiNightReport] = Field(default_factory=list)
    mean: list[HorizonTriple] = Field(default_factory=list)
    # None when the run lacks H(0) or a positive fixed horizon to compare.
    idle_trend_holds: Optional[bool] = None
