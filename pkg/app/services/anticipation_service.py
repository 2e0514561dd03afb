import bisect
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from app.schemas.geo_schema import CostVariant, Location, MetricSpace
from app.schemas.request_schema import Agent, AvailableAgent
from app.schemas.solution_schema import AgentForecast
from app.services.geometry_service import GeometryService


@dataclass(frozen=True)
class _Trajectory:
    """Straight-line legs of an agent's plan, walked at constant velocity."""

    points: list[Location]
    # cumulative[i] is the path distance from the issue position to points[i].
    cumulative: list[float]
    # Path distance at which each planned request is completed.
    request_done_at: list[float]

    @property
    def length(self) -> float:
        return self.cumulative[-1]

    @classmethod
    def of(cls, agent: Agent, variant: CostVariant, space: MetricSpace) -> "_Trajectory":
        points = [agent.position, *GeometryService.waypoints(agent.plan, variant)]
        legs = GeometryService.leg_lengths(agent.position, agent.plan, variant, space)
        cumulative = [0.0, *np.cumsum(legs).tolist()]
        per_request = 2 if variant == CostVariant.PICKUP_DROPOFF else 1
        done_at = [cumulative[per_request * (i + 1)] for i in range(len(agent.plan))]
        return cls(points=points, cumulative=cumulative, request_done_at=done_at)

    def point_at(self, s: float) -> Location:
        if s <= 0.0:
            return self.points[0]
        if s >= self.length:
            return self.points[-1]
        i = bisect.bisect_right(self.cumulative, s) - 1
        a, b = self.points[i], self.points[i + 1]
        leg = self.cumulative[i + 1] - self.cumulative[i]
        frac = (s - self.cumulative[i]) / leg if leg > 0 else 1.0
        return Location(x=a.x + frac * (b.x - a.x), y=a.y + frac * (b.y - a.y), space=a.space)


def _check_velocity(agent: Agent) -> None:
    if not agent.velocity > 0:
        raise ValueError(f"agent {agent.id} has non-positive velocity {agent.velocity}")


class AnticipationService:
    """Deterministic kinematic prediction of when and where agents free up."""

    @staticmethod
    def forecast(
        agent: Agent,
        now: float,
        variant: CostVariant,
        space: MetricSpace,
        horizon: Optional[float] = None,
    ) -> AgentForecast:
        """Predict plan completion time and location.

        An empty plan completes "now" at the current position. When `horizon`
        is given, `available_within_horizon` is filled in with the same rule
        `availability_anticipation` applies.
        """
        _check_velocity(agent)

        if not agent.plan:
            completion_time, completion_location = now, agent.position
        else:
            length = GeometryService.path_length(agent.position, agent.plan, variant, space)
            completion_time = agent.plan_issued_at + length / agent.velocity
            completion_location = GeometryService.end_location(agent.position, agent.plan, variant)

        available = False
        if horizon is not None:
            available = AnticipationService._is_available(completion_time, now, horizon, idle=not agent.plan)

        return AgentForecast(
            agent_id=agent.id,
            completion_time=completion_time,
            completion_location=completion_location,
            available_within_horizon=available,
        )

    @staticmethod
    def position_at(agent: Agent, t: float, variant: CostVariant, space: MetricSpace) -> Location:
        """Position at time `t`, interpolated along the plan's legs.

        Geographic legs are interpolated linearly in latitude/longitude.
        """
        _check_velocity(agent)
        if not agent.plan:
            return agent.position
        trajectory = _Trajectory.of(agent, variant, space)
        return trajectory.point_at(agent.velocity * (t - agent.plan_issued_at))

    @staticmethod
    def distance_covered(agent: Agent, t0: float, t1: float, variant: CostVariant, space: MetricSpace) -> float:
        """Path distance the agent moves during [t0, t1]."""
        if not agent.plan or t1 <= t0:
            return 0.0
        trajectory = _Trajectory.of(agent, variant, space)
        s0 = min(max(0.0, agent.velocity * (t0 - agent.plan_issued_at)), trajectory.length)
        s1 = min(max(0.0, agent.velocity * (t1 - agent.plan_issued_at)), trajectory.length)
        return s1 - s0

    @staticmethod
    def completed_prefix(agent: Agent, s: float, variant: CostVariant, space: MetricSpace) -> tuple[int, float, Location]:
        """Requests completed after `s` meters along the plan.

        Returns the count, the path distance at which the last of them was
        completed and the location where that happened (0, 0.0 and the issue
        position when none is done yet).
        """
        if not agent.plan:
            return 0, 0.0, agent.position
        trajectory = _Trajectory.of(agent, variant, space)
        done = bisect.bisect_right(trajectory.request_done_at, s + 1e-9)
        if done == 0:
            return 0, 0.0, agent.position
        per_request = 2 if variant == CostVariant.PICKUP_DROPOFF else 1
        return done, trajectory.request_done_at[done - 1], trajectory.points[per_request * done]

    @staticmethod
    def plan_length(agent: Agent, variant: CostVariant, space: MetricSpace) -> float:
        return _Trajectory.of(agent, variant, space).length if agent.plan else 0.0

    @staticmethod
    def point_along(agent: Agent, s: float, variant: CostVariant, space: MetricSpace) -> Location:
        if not agent.plan:
            return agent.position
        return _Trajectory.of(agent, variant, space).point_at(s)

    @staticmethod
    def _is_available(completion_time: float, now: float, horizon: float, idle: bool) -> bool:
        # Idle (or already finished) agents are available even at H(0);
        # busy agents must finish strictly inside the horizon.
        if idle or completion_time <= now:
            return True
        return completion_time < now + horizon

    @staticmethod
    def availability_anticipation(
        horizon: float,
        agents: Sequence[Agent],
        now: float,
        variant: CostVariant,
        space: MetricSpace,
    ) -> list[AvailableAgent]:
        """Agents that will be free within `horizon` seconds, with their anticipated start.

        Args:
            horizon: H in seconds (k * delta)
            agents: Fleet snapshot
            now: Current simulation time (window boundary)
            variant: Cost variant of the simulation
            space: Metric space of the simulation

        Returns:
            Available agents in fleet order; agents with an exhausted travel
            budget are never returned
        """
        if horizon < 0:
            raise ValueError("horizon must be >= 0")

        available: list[AvailableAgent] = []
        for agent in agents:
            if agent.budget_exhausted:
                continue
            forecast = AnticipationService.forecast(agent, now, variant, space, horizon=horizon)
            if forecast.available_within_horizon:
                available.append(
                    AvailableAgent(
                        agent_id=agent.id,
                        start=forecast.completion_location,
                        start_time=max(now, forecast.completion_time),
                    )
                )
        return available
