from typing import Optional

from pydantic import BaseModel, Field, model_validator

from app.core.exceptions import MetricSpaceMismatchError
from app.schemas.geo_schema import CostVariant, MetricSpace
from app.schemas.request_schema import Agent, Request


class SyntheticSpec(BaseModel):
    model_config = {"frozen": True}

    world_size: float = Field(default=10.0, gt=0.0)
    n_agents: int = Field(default=20, ge=1)
    tasks_per_window: int = Field(default=10, ge=1)
    total_windows: int = Field(default=30, ge=1)
    velocity: float = Field(default=1.0, gt=0.0)
    # None means unbounded.
    travel_budget: Optional[float] = Field(default=150.0, gt=0.0)
    delta: float = Field(default=5.0, gt=0.0)
    rng_seed: int = Field(default=0, ge=0)


class Scenario(BaseModel):
    """Initial fleet plus the full request stream of one simulation."""

    space: MetricSpace = MetricSpace.PLANAR
    variant: CostVariant = CostVariant.REACH_ONLY
    agents: list[Agent] = Field(default_factory=list)
    requests: list[Request] = Field(default_factory=list)

    @model_validator(mode="after")
    def _consistent(self) -> "Scenario":
        for agent in self.agents:
            if agent.position.space != self.space:
                raise MetricSpaceMismatchError(f"agent {agent.id} is not in {self.space.value} space")
        wants_dropoff = self.variant == CostVariant.PICKUP_DROPOFF
        ids = set()
        for request in self.requests:
            if request.pickup.space != self.space:
                raise MetricSpaceMismatchError(f"request {request.id} is not in {self.space.value} space")
            if (request.dropoff is not None) != wants_dropoff:
                raise ValueError(f"request {request.id} dropoff presence does not match {self.variant.value}")
            if request.id in ids:
                raise ValueError(f"duplicate request id {request.id}")
            ids.add(request.id)
        if len({a.id for a in self.agents}) != len(self.agents):
            raise ValueError("duplicate agent ids")
        return self
