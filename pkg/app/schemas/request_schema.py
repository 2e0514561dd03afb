from typing import Optional

from pydantic import BaseModel, Field, model_validator

from app.schemas.geo_schema import Location


class Request(BaseModel):
    """A task registered at `registered_at` seconds from simulation start."""

    model_config = {"frozen": True}

    id: int = Field(ge=0)
    pickup: Location
    # Present only in pickup/dropoff scenarios.
    dropoff: Optional[Location] = None
    registered_at: float = Field(ge=0.0)
    registered_window: int = Field(ge=0)

    @model_validator(mode="after")
    def _same_space(self) -> "Request":
        if self.dropoff is not None and self.dropoff.space != self.pickup.space:
            raise ValueError("pickup and dropoff must share a metric space")
        return self

    @property
    def end_location(self) -> Location:
        return self.dropoff if self.dropoff is not None else self.pickup


class Agent(BaseModel):
    """A mobile resource. Mutated only by the simulation engine.

    `position` is where the agent stood when its current plan was issued
    (`plan_issued_at`); the live position is derived by the anticipation
    service. `travel_budget=None` means unbounded.
    """

    model_config = {"validate_assignment": False}

    id: int = Field(ge=0)
    position: Location
    velocity: float = Field(gt=0.0)
    plan: list[Request] = Field(default_factory=list)
    plan_issued_at: float = Field(default=0.0, ge=0.0)
    distance_traveled: float = Field(default=0.0, ge=0.0)
    travel_budget: Optional[float] = Field(default=None, gt=0.0)

    @model_validator(mode="after")
    def _unique_plan(self) -> "Agent":
        ids = [r.id for r in self.plan]
        if len(ids) != len(set(ids)):
            raise ValueError(f"agent {self.id} plan holds duplicate request ids")
        return self

    @property
    def plan_ids(self) -> list[int]:
        return [r.id for r in self.plan]

    @property
    def budget_exhausted(self) -> bool:
        return self.travel_budget is not None and self.distance_traveled >= self.travel_budget

    @property
    def remaining_budget(self) -> float:
        if self.travel_budget is None:
            return float("inf")
        return max(0.0, self.travel_budget - self.distance_traveled)


class AvailableAgent(BaseModel):
    """An agent selected by availability anticipation, with its GA start."""

    model_config = {"frozen": True}

    agent_id: int
    start: Location
    # When new tasks can begin: now for idle agents, plan completion otherwise.
    start_time: float


class RequestBuffer(BaseModel):
    """Requests not yet presented to a window, and those left unassigned."""

    # Ordered by (registered_at, id).
    pending: list[Request] = Field(default_factory=list)
    # Presented but unassigned; they keep their original registration time.
    carried: list[Request] = Field(default_factory=list)

    @classmethod
    def of(cls, requests: list[Request]) -> "RequestBuffer":
        return cls(pending=sorted(requests, key=lambda r: (r.registered_at, r.id)))
