import math
from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, Field, model_validator

from app.schemas.geo_schema import MetricSpace


class FixedHorizon(BaseModel):
    """H(k) = k * delta."""

    model_config = {"frozen": True}

    kind: Literal["fixed"] = "fixed"
    k: int = Field(default=0, ge=0)

    @property
    def label(self) -> str:
        return f"H({self.k})"


class VariableHorizon(BaseModel):
    """H(v): solve for every k in 0..max_k and keep the lowest fitness."""

    model_config = {"frozen": True}

    kind: Literal["variable"] = "variable"
    max_k: int = Field(default=5, ge=0)

    @property
    def label(self) -> str:
        return "H(v)"


HorizonMode = Annotated[Union[FixedHorizon, VariableHorizon], Field(discriminator="kind")]


class FractionCapacity(BaseModel):
    """Per-agent window capacity C = ceil(fraction * |R_tau|)."""

    model_config = {"frozen": True}

    kind: Literal["fraction"] = "fraction"
    fraction: float = Field(gt=0.0, le=1.0)

    def capacity_for(self, n_tasks: int) -> int:
        return max(1, math.ceil(self.fraction * n_tasks))


class UnboundedCapacity(BaseModel):
    """No per-agent cap: one agent may take every task of the window."""

    model_config = {"frozen": True}

    kind: Literal["unbounded"] = "unbounded"

    def capacity_for(self, n_tasks: int) -> int:
        return max(1, n_tasks)


CapacityRule = Annotated[Union[FractionCapacity, UnboundedCapacity], Field(discriminator="kind")]


class WallClockBudget(BaseModel):
    model_config = {"frozen": True}

    kind: Literal["wall_clock"] = "wall_clock"
    # None means "the window duration delta".
    seconds: Optional[float] = Field(default=None, gt=0.0)


class GenerationsBudget(BaseModel):
    model_config = {"frozen": True}

    kind: Literal["generations"] = "generations"
    generations: int = Field(default=300, ge=1)


GABudget = Annotated[Union[WallClockBudget, GenerationsBudget], Field(discriminator="kind")]


class GAParams(BaseModel):
    model_config = {"frozen": True}

    population_size: int = Field(default=100, ge=4)
    p_muta: float = Field(default=0.3, ge=0.0, le=1.0)
    p_swap: float = Field(default=0.5, ge=0.0, le=1.0)
    elite_fraction: float = Field(default=0.30, gt=0.0, lt=1.0)
    # None disables the convergence stop; only the budget ends the run.
    epsilon: Optional[float] = Field(default=1e-6, ge=0.0)
    budget: GABudget = Field(default_factory=GenerationsBudget)

    @property
    def elite_count(self) -> int:
        # Crossover needs two parents.
        return max(2, int(self.elite_fraction * self.population_size))

    @model_validator(mode="after")
    def _room_for_children(self) -> "GAParams":
        if self.elite_count >= self.population_size:
            raise ValueError("elite selection leaves no room for children")
        return self


class SimConfig(BaseModel):
    model_config = {"frozen": True}

    delta: float = Field(default=5.0, gt=0.0)
    total_windows: int = Field(default=30, ge=1)
    alpha: float = Field(default=0.75, ge=0.0, le=1.0)
    horizon: HorizonMode = Field(default_factory=FixedHorizon)
    capacity: CapacityRule = Field(default_factory=UnboundedCapacity)
    metric_space: MetricSpace = MetricSpace.PLANAR
    rng_seed: int = Field(default=0, ge=0)
    ga: GAParams = Field(default_factory=GAParams)

    def ga_seconds(self, runs: int = 1) -> Optional[float]:
        """Wall-clock seconds one GA run may use, or None under a generations budget."""
        budget = self.ga.budget
        if isinstance(budget, GenerationsBudget):
            return None
        seconds = budget.seconds if budget.seconds is not None else self.delta
        return seconds / max(1, runs)
