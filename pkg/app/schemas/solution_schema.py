from typing import Optional

from pydantic import BaseModel, Field

from app.schemas.geo_schema import CostVariant, Location, MetricSpace
from app.schemas.request_schema import Agent, AvailableAgent, Request

# Empty chromosome slot.
EMPTY = -1


class AgentForecast(BaseModel):
    model_config = {"frozen": True}

    agent_id: int
    completion_time: float
    completion_location: Location
    available_within_horizon: bool = False


class GAProblem(BaseModel):
    """One window's assignment problem: R_tau onto the available agents."""

    model_config = {"frozen": True}

    window_index: int = Field(ge=0)
    now: float = Field(ge=0.0)
    tasks: list[Request] = Field(default_factory=list)
    agents: list[AvailableAgent] = Field(min_length=1)
    capacity: int = Field(ge=1)
    alpha: float = Field(ge=0.0, le=1.0)
    variant: CostVariant = CostVariant.REACH_ONLY
    space: MetricSpace = MetricSpace.PLANAR

    @property
    def n_slots(self) -> int:
        return len(self.agents) * self.capacity


class WindowSolution(BaseModel):
    """Decoded assignment: agent id -> ordered request ids, plus leftovers."""

    assignments: dict[int, list[int]] = Field(default_factory=dict)
    unassigned: list[int] = Field(default_factory=list)

    @property
    def assigned_count(self) -> int:
        return sum(len(ids) for ids in self.assignments.values())

    @property
    def is_empty(self) -> bool:
        return self.assigned_count == 0


class GAResult(BaseModel):
    best_chromosome: tuple[int, ...] = ()
    best_fitness: float = 0.0
    solution: WindowSolution = Field(default_factory=WindowSolution)
    generations: int = 0
    l_max: float = 1.0
    total_length: float = 0.0


class HorizonResult(BaseModel):
    """GA outcome for one window together with the horizon that produced it."""

    k: int
    fitness: float
    result: GAResult
    available_agents: int = 0
    # Fitness per k tried (a single entry for fixed horizons).
    fitness_by_k: dict[int, float] = Field(default_factory=dict)


class OracleResult(BaseModel):
    objective: float
    total_length: float
    assigned: int
    assignments: dict[int, list[int]] = Field(default_factory=dict)


class WindowMetrics(BaseModel):
    window: int
    n_tasks: int
    assigned: int
    carried: int
    chosen_k: Optional[int] = None
    fitness: Optional[float] = None
    # Best fitness per horizon tried; one entry under a fixed horizon.
    fitness_by_k: dict[int, float] = Field(default_factory=dict)
    available_agents: int = 0
    # Assignments handed to agents that were still busy (0 under H(0)).
    busy_agents_assigned: int = 0
    distance_by_agent: dict[int, float] = Field(default_factory=dict)
    idle_by_agent: dict[int, float] = Field(default_factory=dict)

    @property
    def distance(self) -> float:
        return sum(self.distance_by_agent.values())

    @property
    def idle(self) -> float:
        return sum(self.idle_by_agent.values())


class SimMetrics(BaseModel):
    total_distance: float = 0.0
    total_idle: float = 0.0
    tail_idle: float = 0.0
    percent_assigned: float = 100.0
    # True when the scenario generated no request, so percent_assigned is vacuous.
    vacuous: bool = False
    presented: int = 0
    assigned: int = 0
    carried: int = 0
    stranded: int = 0
    unpresented: int = 0
    per_window: list[WindowMetrics] = Field(default_factory=list)


class WindowState(BaseModel):
    """What the horizon controller sees at a window boundary."""

    window_index: int = Field(ge=0)
    now: float = Field(ge=0.0)
    tasks: list[Request] = Field(default_factory=list)
    agents: list[Agent] = Field(default_factory=list)
    variant: CostVariant = CostVariant.REACH_ONLY
    space: MetricSpace = MetricSpace.PLANAR
