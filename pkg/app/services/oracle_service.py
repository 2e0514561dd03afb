from itertools import permutations, product

from app.core.exceptions import InstanceTooLargeError
from app.schemas.geo_schema import CostVariant
from app.schemas.solution_schema import GAProblem, OracleResult
from app.services.geometry_service import GeometryService

MAX_TASKS = 8
MAX_AGENTS = 3


class OracleService:
    """Exhaustive solver for tiny window problems, used to check the GA."""

    @staticmethod
    def _best_routes(problem: GAProblem) -> list[dict[int, tuple[float, tuple[int, ...]]]]:
        """Per agent: task bitmask -> (shortest open path, visiting order)."""
        space, tasks = problem.space, problem.tasks
        pickup_dropoff = problem.variant == CostVariant.PICKUP_DROPOFF
        ends = [t.end_location if pickup_dropoff else t.pickup for t in tasks]
        service = [
            GeometryService.distance(t.pickup, t.dropoff, space) if pickup_dropoff else 0.0
            for t in tasks
        ]
        link = [[GeometryService.distance(ends[i], tasks[j].pickup, space) for j in range(len(tasks))] for i in range(len(tasks))]

        routes = []
        for agent in problem.agents:
            reach = [GeometryService.distance(agent.start, t.pickup, space) for t in tasks]
            best: dict[int, tuple[float, tuple[int, ...]]] = {0: (0.0, ())}
            for mask in range(1, 1 << len(tasks)):
                members = [i for i in range(len(tasks)) if mask >> i & 1]
                if len(members) > problem.capacity:
                    continue
                candidates = []
                for order in permutations(members):
                    length = reach[order[0]] + service[order[0]]
                    for prev, nxt in zip(order, order[1:]):
                        length += link[prev][nxt] + service[nxt]
                    candidates.append((length, order))
                best[mask] = min(candidates, key=lambda c: c[0])
            routes.append(best)
        return routes

    @staticmethod
    def full_assignment(problem: GAProblem) -> int:
        return min(len(problem.tasks), problem.n_slots)

    @staticmethod
    def brute_force(problem: GAProblem, l_max: float = 1.0, min_assigned: int = 0) -> OracleResult:
        """Minimum of alpha * sum(l_a) / l_max + (1 - alpha) * (1 - assigned / |R_tau|).

        Every task goes to one agent or stays unassigned, agents respect the
        capacity and each agent visits its tasks in the best order. Pass the
        GA run's L_max to compare with its fitness; the default 1.0 leaves
        the distance term in raw meters.

        `min_assigned` restricts the search to assignments placing at least
        that many tasks; `full_assignment(problem)` is the count every GA
        chromosome places.
        """
        n_tasks, n_agents = len(problem.tasks), len(problem.agents)
        if n_tasks > MAX_TASKS or n_agents > MAX_AGENTS:
            raise InstanceTooLargeError(
                f"oracle handles at most {MAX_TASKS} tasks and {MAX_AGENTS} agents, got {n_tasks}/{n_agents}"
            )
        if not 0 <= min_assigned <= OracleService.full_assignment(problem):
            raise ValueError(f"cannot place {min_assigned} tasks in {problem.n_slots} slots")
        if n_tasks == 0:
            return OracleResult(objective=0.0, total_length=0.0, assigned=0)

        routes = OracleService._best_routes(problem)
        alpha = problem.alpha
        best: OracleResult | None = None

        # Owner index n_agents means "unassigned".
        for owners in product(range(n_agents + 1), repeat=n_tasks):
            masks = [0] * n_agents
            for task, owner in enumerate(owners):
                if owner < n_agents:
                    masks[owner] |= 1 << task
            if any(mask not in routes[a] for a, mask in enumerate(masks)):
                continue

            total = sum(routes[a][mask][0] for a, mask in enumerate(masks))
            assigned = sum(1 for owner in owners if owner < n_agents)
            if assigned < min_assigned:
                continue
            objective = alpha * total / l_max + (1 - alpha) * (1 - assigned / n_tasks)
            if best is None or objective < best.objective:
                best = OracleResult(
                    objective=objective,
                    total_length=total,
                    assigned=assigned,
                    assignments={
                        problem.agents[a].agent_id: [problem.tasks[i].id for i in routes[a][mask][1]]
                        for a, mask in enumerate(masks)
                        if mask
                    },
                )
        return best
