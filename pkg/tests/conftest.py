import os

import numpy as np
import pytest

# Keep test runs out of the real ledger database.
os.environ.setdefault("HDISPATCH_LEDGER", "0")

from app.schemas.config_schema import FixedHorizon, GAParams, GenerationsBudget, SimConfig  # noqa: E402
from app.schemas.geo_schema import CostVariant, Location, MetricSpace  # noqa: E402
from app.schemas.request_schema import Agent, AvailableAgent, Request  # noqa: E402
from app.schemas.solution_schema import GAProblem  # noqa: E402


def loc(x: float, y: float) -> Location:
    return Location(x=x, y=y)


def geo(lat: float, lon: float) -> Location:
    return Location(x=lat, y=lon, space=MetricSpace.GEOGRAPHIC)


def req(rid: int, x: float, y: float, t: float = 0.0, dropoff: Location | None = None, delta: float = 5.0) -> Request:
    return Request(
        id=rid,
        pickup=Location(x=x, y=y, space=dropoff.space if dropoff else MetricSpace.PLANAR),
        dropoff=dropoff,
        registered_at=t,
        registered_window=int(t // delta),
    )


def agent(aid: int, x: float, y: float, velocity: float = 1.0, plan=None, issued: float = 0.0, budget=None) -> Agent:
    return Agent(
        id=aid,
        position=loc(x, y),
        velocity=velocity,
        plan=list(plan or []),
        plan_issued_at=issued,
        travel_budget=budget,
    )


def problem(tasks, starts, capacity=None, alpha=0.75, now=0.0, variant=CostVariant.REACH_ONLY, space=MetricSpace.PLANAR) -> GAProblem:
    return GAProblem(
        window_index=int(now // 5),
        now=now,
        tasks=tasks,
        agents=[AvailableAgent(agent_id=i, start=s, start_time=now) for i, s in enumerate(starts)],
        capacity=capacity or max(1, len(tasks)),
        alpha=alpha,
        variant=variant,
        space=space,
    )


def random_problem(rng: np.random.Generator, n_agents: int, n_tasks: int, capacity=None, alpha=0.75, now=0.0) -> GAProblem:
    starts = [loc(*p) for p in rng.uniform(0, 10, size=(n_agents, 2)).tolist()]
    times = sorted(rng.uniform(0, now, size=n_tasks).tolist()) if now else [0.0] * n_tasks
    tasks = [req(i, x, y, t=t) for i, ((x, y), t) in enumerate(zip(rng.uniform(0, 10, size=(n_tasks, 2)).tolist(), times))]
    return problem(tasks, starts, capacity=capacity, alpha=alpha, now=now)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def ga_params() -> GAParams:
    return GAParams(budget=GenerationsBudget(generations=60))


@pytest.fixture
def small_config() -> SimConfig:
    return SimConfig(
        total_windows=6,
        alpha=0.75,
        horizon=FixedHorizon(k=2),
        ga=GAParams(population_size=30, budget=GenerationsBudget(generations=25)),
    )
