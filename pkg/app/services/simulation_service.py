import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

from app.core.exceptions import CapacityViolationError, MetricSpaceMismatchError
from app.core.logging_config import kv
from app.schemas.config_schema import SimConfig
from app.schemas.geo_schema import CostVariant, MetricSpace
from app.schemas.request_schema import Agent, Request, RequestBuffer
from app.schemas.scenario_schema import Scenario
from app.schemas.solution_schema import SimMetrics, WindowMetrics, WindowSolution, WindowState
from app.services.anticipation_service import AnticipationService
from app.services.horizon_service import HorizonService

logger = logging.getLogger(__name__)


@dataclass
class AdvanceReport:
    distance_by_agent: dict[int, float] = field(default_factory=dict)
    idle_by_agent: dict[int, float] = field(default_factory=dict)
    # Requests dropped from plans of agents whose travel budget ran out.
    stranded: int = 0


@dataclass
class CommitReport:
    carried: list[Request]
    assigned: int
    busy_agents_assigned: int
    agents_assigned: list[int]


class SimulationService:
    """The online loop: batch requests per window, anticipate, solve, commit, move."""

    @staticmethod
    def get_tasks(buffer: RequestBuffer, window: int, delta: float) -> tuple[list[Request], int]:
        """Move the window's new requests out of the buffer and join them with carried ones.

        Returns R_tau (carried first, then new, each by registration time) and
        the number of new requests.
        """
        if window < 0:
            raise ValueError("window must be >= 0")

        end = (window + 1) * delta
        split = 0
        while split < len(buffer.pending) and buffer.pending[split].registered_at < end:
            split += 1
        new, buffer.pending = buffer.pending[:split], buffer.pending[split:]

        carried = sorted(buffer.carried, key=lambda r: (r.registered_at, r.id))
        buffer.carried = []
        return carried + new, len(new)

    @staticmethod
    def commit_solution(
        solution: WindowSolution,
        agents: dict[int, Agent],
        tasks: list[Request],
        now: float,
        capacity: int,
    ) -> CommitReport:
        """Append each agent's new requests after its current plan.

        Idle agents start the new plan at `now` from where they stand; busy
        agents keep moving and take the new requests once their plan ends.
        """
        by_id = {t.id: t for t in tasks}
        seen: set[int] = set()
        busy_assigned = 0

        for agent_id, request_ids in solution.assignments.items():
            if agent_id not in agents:
                raise ValueError(f"solution references unknown agent {agent_id}")
            if len(request_ids) > capacity:
                raise CapacityViolationError(
                    f"agent {agent_id} got {len(request_ids)} requests, capacity is {capacity}"
                )
            for rid in request_ids:
                if rid not in by_id:
                    raise ValueError(f"request {rid} is not part of this window")
                if rid in seen:
                    raise ValueError(f"request {rid} assigned twice")
                seen.add(rid)

        for agent_id, request_ids in solution.assignments.items():
            if not request_ids:
                continue
            agent = agents[agent_id]
            new = [by_id[rid] for rid in request_ids]
            if agent.plan:
                busy_assigned += 1
                agent.plan = [*agent.plan, *new]
            else:
                agent.plan = new
                agent.plan_issued_at = now

        carried = [t for t in tasks if t.id not in seen]
        return CommitReport(
            carried=carried,
            assigned=len(seen),
            busy_agents_assigned=busy_assigned,
            agents_assigned=[a for a, ids in solution.assignments.items() if ids],
        )

    @staticmethod
    def _advance_agent(agent: Agent, t0: float, t1: float, variant: CostVariant, space: MetricSpace) -> tuple[float, float, int]:
        if not agent.plan:
            return 0.0, t1 - t0, 0

        length = AnticipationService.plan_length(agent, variant, space)
        s0 = min(max(0.0, agent.velocity * (t0 - agent.plan_issued_at)), length)
        s1 = min(max(0.0, agent.velocity * (t1 - agent.plan_issued_at)), length)

        budget = agent.remaining_budget
        if s1 - s0 > budget:
            # Out of budget: the agent stops where the budget ends, short of its plan.
            s1 = s0 + budget
            done, _, _ = AnticipationService.completed_prefix(agent, s1, variant, space)
            stranded = len(agent.plan) - done
            halted_at = agent.plan_issued_at + s1 / agent.velocity
            agent.position = AnticipationService.point_along(agent, s1, variant, space)
            agent.plan = []
            agent.plan_issued_at = halted_at
            agent.distance_traveled = agent.travel_budget
            # A halted agent has an empty plan from here on, so it idles.
            return budget, t1 - max(halted_at, t0), stranded

        distance = s1 - s0
        agent.distance_traveled += distance
        if agent.travel_budget is not None:
            agent.distance_traveled = min(agent.distance_traveled, agent.travel_budget)

        completion = agent.plan_issued_at + length / agent.velocity
        if completion <= t1:
            agent.position = AnticipationService.point_along(agent, length, variant, space)
            agent.plan = []
            agent.plan_issued_at = completion
            return distance, t1 - max(completion, t0), 0

        done, anchor, location = AnticipationService.completed_prefix(agent, s1, variant, space)
        if done:
            agent.plan_issued_at += anchor / agent.velocity
            agent.position = location
            agent.plan = agent.plan[done:]
        return distance, 0.0, 0

    @staticmethod
    def advance_time(agents: list[Agent], t0: float, t1: float, variant: CostVariant, space: MetricSpace) -> AdvanceReport:
        """Move every agent from t0 to t1 and report distance and idle deltas.

        Completed requests leave the plan; the plan is re-anchored at the
        completion of the last of them, so `position` stays the plan's start.
        """
        if t1 < t0:
            raise ValueError("cannot move backwards in time")

        report = AdvanceReport()
        for agent in agents:
            distance, idle, stranded = SimulationService._advance_agent(agent, t0, t1, variant, space)
            report.distance_by_agent[agent.id] = distance
            report.idle_by_agent[agent.id] = idle
            report.stranded += stranded
        return report

    @staticmethod
    def run_simulation(
        config: SimConfig,
        scenario: Scenario,
        on_window: Optional[Callable[[WindowMetrics], None]] = None,
    ) -> SimMetrics:
        """Run T windows of get_tasks -> solve -> commit -> advance.

        Args:
            config: Simulation config; its metric space must match the scenario's
            scenario: Initial fleet and request stream (left untouched)
            on_window: Optional callback receiving each window's metrics

        Returns:
            Accumulated metrics with the per-window trace
        """
        if config.metric_space != scenario.space:
            raise MetricSpaceMismatchError(
                f"config uses {config.metric_space.value} space, scenario uses {scenario.space.value}"
            )

        started = time.perf_counter()
        agents = [a.model_copy(deep=True) for a in scenario.agents]
        by_id = {a.id: a for a in agents}
        buffer = RequestBuffer.of(scenario.requests)
        metrics = SimMetrics()
        # Idle accrued since each agent's last assignment; what is left at the end is tail idle.
        idle_since_assignment = {a.id: 0.0 for a in agents}

        for window in range(config.total_windows):
            now = window * config.delta
            tasks, new_count = SimulationService.get_tasks(buffer, window, config.delta)
            metrics.presented += new_count

            state = WindowState(
                window_index=window,
                now=now,
                tasks=tasks,
                agents=agents,
                variant=scenario.variant,
                space=scenario.space,
            )
            outcome = HorizonService.solve_window(state, config)
            capacity = config.capacity.capacity_for(len(tasks))
            commit = SimulationService.commit_solution(outcome.result.solution, by_id, tasks, now, capacity)
            buffer.carried = commit.carried
            for agent_id in commit.agents_assigned:
                idle_since_assignment[agent_id] = 0.0

            moved = SimulationService.advance_time(agents, now, now + config.delta, scenario.variant, scenario.space)
            for agent_id, idle in moved.idle_by_agent.items():
                idle_since_assignment[agent_id] += idle

            window_metrics = WindowMetrics(
                window=window,
                n_tasks=len(tasks),
                assigned=commit.assigned,
                carried=len(commit.carried),
                chosen_k=outcome.k if tasks else None,
                fitness=outcome.fitness if tasks else None,
                fitness_by_k=outcome.fitness_by_k if tasks else {},
                available_agents=outcome.available_agents,
                busy_agents_assigned=commit.busy_agents_assigned,
                distance_by_agent=moved.distance_by_agent,
                idle_by_agent=moved.idle_by_agent,
            )
            metrics.per_window.append(window_metrics)
            metrics.assigned += commit.assigned
            metrics.stranded += moved.stranded
            metrics.total_distance += window_metrics.distance
            metrics.total_idle += window_metrics.idle

            logger.debug(kv(
                window=window,
                tasks=len(tasks),
                assigned=commit.assigned,
                k=outcome.k,
                fitness=outcome.fitness,
                available=outcome.available_agents,
            ))
            if on_window is not None:
                on_window(window_metrics)

        metrics.carried = len(buffer.carried)
        metrics.unpresented = len(buffer.pending)
        metrics.tail_idle = sum(idle_since_assignment.values())
        # Every generated request counts, including those still pending after the last window.
        generated = len(scenario.requests)
        if generated:
            metrics.percent_assigned = 100.0 * metrics.assigned / generated
        else:
            metrics.percent_assigned, metrics.vacuous = 100.0, True

        logger.info(kv(
            windows=config.total_windows,
            presented=metrics.presented,
            percent_assigned=metrics.percent_assigned,
            distance_m=metrics.total_distance,
            idle_s=metrics.total_idle,
            elapsed_s=time.perf_counter() - started,
        ))
        return metrics
