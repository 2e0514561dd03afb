import logging
import time
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from app.core.logging_config import kv
from app.schemas.config_schema import GAParams, WallClockBudget
from app.schemas.geo_schema import CostVariant
from app.schemas.request_schema import Request
from app.schemas.solution_schema import EMPTY, GAProblem, GAResult, WindowSolution
from app.services.geometry_service import GeometryService

logger = logging.getLogger(__name__)

GENE_DTYPE = np.int64


@dataclass(frozen=True)
class CostTables:
    """Precomputed distances for evaluating whole populations at once.

    Origins are the agents' anticipated starts followed by each task's end
    point; `approach[o, t]` is the distance from origin `o` to the pickup
    of task `t`, and `service[t]` the pickup->dropoff distance (0 when
    tasks are done on arrival).
    """

    ids: np.ndarray
    lookup: np.ndarray
    approach: np.ndarray
    service: np.ndarray
    n_agents: int
    capacity: int

    @classmethod
    def build(cls, problem: GAProblem) -> "CostTables":
        space = problem.space
        ids = np.array([t.id for t in problem.tasks], dtype=GENE_DTYPE)
        lookup = np.full(int(ids.max()) + 1, -1, dtype=GENE_DTYPE)
        lookup[ids] = np.arange(len(ids))

        starts = np.array([a.start.as_tuple() for a in problem.agents], dtype=float)
        pickups = np.array([t.pickup.as_tuple() for t in problem.tasks], dtype=float)
        if problem.variant == CostVariant.PICKUP_DROPOFF:
            GeometryService.waypoints(problem.tasks, problem.variant)  # raises on a missing dropoff
            ends = np.array([t.dropoff.as_tuple() for t in problem.tasks], dtype=float)
            service = np.array([
                GeometryService.distance(t.pickup, t.dropoff, space) for t in problem.tasks
            ])
        else:
            ends = pickups
            service = np.zeros(len(problem.tasks))

        approach = GeometryService.pairwise(np.vstack([starts, ends]), pickups, space)
        return cls(
            ids=ids,
            lookup=lookup,
            approach=approach,
            service=service,
            n_agents=len(problem.agents),
            capacity=problem.capacity,
        )

    def local(self, population: np.ndarray) -> np.ndarray:
        filled = population >= 0
        return np.where(filled, self.lookup[np.where(filled, population, 0)], EMPTY)

    def lengths(self, population: np.ndarray) -> np.ndarray:
        """Sum over agents of the open-path length, one value per chromosome."""
        population = np.atleast_2d(population)
        n_pop = population.shape[0]
        local = self.local(population).reshape(n_pop, self.n_agents, self.capacity)

        # Visit order is the left-to-right slot order with EMPTYs dropped.
        order = np.argsort(local < 0, axis=2, kind="stable")
        compact = np.take_along_axis(local, order, axis=2)
        visited = compact >= 0

        prev = np.empty_like(compact)
        prev[:, :, 0] = np.arange(self.n_agents)[None, :]
        prev[:, :, 1:] = self.n_agents + compact[:, :, :-1]

        target = np.where(visited, compact, 0)
        origin = np.where(visited, prev, 0)
        legs = self.approach[origin, target] + self.service[target]
        return np.where(visited, legs, 0.0).sum(axis=(1, 2))

    def assigned(self, population: np.ndarray) -> np.ndarray:
        return (np.atleast_2d(population) >= 0).sum(axis=1)


def _check_budget(params: GAParams, time_limit: Optional[float]) -> None:
    if isinstance(params.budget, WallClockBudget) and time_limit is None and params.budget.seconds is None:
        raise ValueError("wall-clock budget needs a time limit (the window duration)")


class GAService:
    """Genetic algorithm assigning one window's tasks to the available agents.

    A chromosome is a flat array of `n_agents * capacity` slots holding
    request ids or EMPTY; slot `s` belongs to agent `s // capacity` and the
    left-to-right order inside a segment is the visit order.
    """

    @staticmethod
    def boltzmann_weights(tasks: Sequence[Request], tau_time: float) -> np.ndarray:
        """Selection probabilities exp(-t_r / tau_time) / Q, uniform when tau_time is 0."""
        if len(tasks) == 0:
            raise ValueError("no tasks to weight")
        logits = GAService._logits(tasks, tau_time)
        weights = np.exp(logits - logits.max())
        return weights / weights.sum()

    @staticmethod
    def _logits(tasks: Sequence[Request], tau_time: float) -> np.ndarray:
        if tau_time == 0:
            return np.zeros(len(tasks))
        return -np.array([t.registered_at for t in tasks], dtype=float) / tau_time

    @staticmethod
    def init_population(problem: GAProblem, params: GAParams, rng: np.random.Generator) -> np.ndarray:
        """Boltzmann-weighted random placement of tasks into empty slots.

        Each chromosome takes min(|R_tau|, slots) tasks, drawn without
        replacement with renormalized Boltzmann weights, each dropped into
        a uniformly random empty slot.
        """
        n_pop, n_tasks, n_slots = params.population_size, len(problem.tasks), problem.n_slots
        placed = min(n_tasks, n_slots)
        ids = np.array([t.id for t in problem.tasks], dtype=GENE_DTYPE)

        # Gumbel top-k yields the same ordered sample as repeated renormalized draws.
        keys = GAService._logits(problem.tasks, problem.now)[None, :] + rng.gumbel(size=(n_pop, n_tasks))
        picks = np.argsort(-keys, axis=1, kind="stable")[:, :placed]
        slots = np.argsort(rng.random((n_pop, n_slots)), axis=1, kind="stable")[:, :placed]

        population = np.full((n_pop, n_slots), EMPTY, dtype=GENE_DTYPE)
        population[np.arange(n_pop)[:, None], slots] = ids[picks]
        return population

    @staticmethod
    def compute_l_max(population: np.ndarray, problem: GAProblem, tables: Optional[CostTables] = None) -> float:
        """Worst first-generation total distance; 1.0 when every chromosome travels 0 m."""
        if len(population) == 0:
            raise ValueError("empty population")
        tables = tables or CostTables.build(problem)
        worst = float(tables.lengths(population).max())
        return worst if worst > 0 else 1.0

    @staticmethod
    def _scores(population: np.ndarray, problem: GAProblem, tables: CostTables, l_max: float) -> tuple[np.ndarray, np.ndarray]:
        lengths = tables.lengths(population)
        assigned = tables.assigned(population)
        scores = problem.alpha * lengths / l_max + (1 - problem.alpha) * (1 - assigned / len(problem.tasks))
        return scores, lengths

    @staticmethod
    def fitness(chromosome: np.ndarray, problem: GAProblem, l_max: float, tables: Optional[CostTables] = None) -> float:
        """alpha * sum(l_a) / L_max + (1 - alpha) * (1 - assigned / |R_tau|)."""
        if l_max <= 0:
            raise ValueError("L_max must be > 0")
        tables = tables or CostTables.build(problem)
        scores, _ = GAService._scores(np.atleast_2d(chromosome), problem, tables, l_max)
        return float(scores[0])

    @staticmethod
    def _crossover_batch(parents1: np.ndarray, parents2: np.ndarray, cuts: np.ndarray) -> np.ndarray:
        n_children, n_slots = parents1.shape
        positions = np.arange(n_slots)[None, :]
        children = np.where(positions < cuts[:, None], parents1, EMPTY)

        table_size = int(max(parents1.max(), parents2.max(), 0)) + 1
        present = np.zeros((n_children, table_size), dtype=bool)
        rows, cols = np.nonzero(children >= 0)
        present[rows, children[rows, cols]] = True

        filled = parents2 >= 0
        keep = filled & ~present[np.arange(n_children)[:, None], np.where(filled, parents2, 0)]
        dest = cuts[:, None] + np.cumsum(keep, axis=1) - 1
        keep &= dest < n_slots

        rows, cols = np.nonzero(keep)
        children[rows, dest[rows, cols]] = parents2[rows, cols]
        return children

    @staticmethod
    def crossover(
        parent1: np.ndarray,
        parent2: np.ndarray,
        rng: np.random.Generator,
        cut: Optional[int] = None,
    ) -> np.ndarray:
        """One-point order crossover.

        Slots before the cut come from `parent1`; the rest are filled left to
        right with `parent2`'s genes in order, skipping EMPTYs and genes the
        child already holds. Leftover slots stay EMPTY.
        """
        parent1, parent2 = np.asarray(parent1), np.asarray(parent2)
        if parent1.shape != parent2.shape:
            raise ValueError("parents differ in length")
        if cut is None:
            cut = int(rng.integers(0, len(parent1) + 1))
        return GAService._crossover_batch(parent1[None, :], parent2[None, :], np.array([cut]))[0]

    @staticmethod
    def _swap_batch(chromosomes: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        n, n_slots = chromosomes.shape
        out = chromosomes.copy()
        if n == 0:
            return out
        i = rng.integers(0, n_slots, size=n)
        j = (i + rng.integers(1, n_slots, size=n)) % n_slots
        rows = np.arange(n)
        out[rows, i], out[rows, j] = chromosomes[rows, j], chromosomes[rows, i]
        return out

    @staticmethod
    def _inversion_batch(chromosomes: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        n, n_slots = chromosomes.shape
        if n == 0:
            return chromosomes.copy()
        ends = np.sort(rng.integers(0, n_slots, size=(n, 2)), axis=1)
        lo, hi = ends[:, :1], ends[:, 1:]
        positions = np.arange(n_slots)[None, :]
        inside = (positions >= lo) & (positions <= hi)
        source = np.where(inside, lo + hi - positions, positions)
        return np.take_along_axis(chromosomes, source, axis=1)

    @staticmethod
    def mutate_swap(chromosome: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        chromosome = np.asarray(chromosome)
        if len(chromosome) < 2:
            raise ValueError("swap needs at least 2 slots")
        return GAService._swap_batch(chromosome[None, :], rng)[0]

    @staticmethod
    def mutate_inversion(chromosome: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        chromosome = np.asarray(chromosome)
        if len(chromosome) < 2:
            raise ValueError("inversion needs at least 2 slots")
        return GAService._inversion_batch(chromosome[None, :], rng)[0]

    @staticmethod
    def evolve_generation(
        population: np.ndarray,
        scores: np.ndarray,
        params: GAParams,
        rng: np.random.Generator,
    ) -> np.ndarray:
        """Keep the best 30% and refill with mutated crossover children.

        One draw v per child gates mutation: v < p_muta and v < p_swap swaps,
        v < p_muta and v >= p_swap inverts.
        """
        n_pop, n_slots = population.shape
        n_elite = params.elite_count
        elite = population[np.argsort(scores, kind="stable")[:n_elite]]

        n_children = n_pop - n_elite
        first = rng.integers(0, n_elite, size=n_children)
        second = (first + rng.integers(1, n_elite, size=n_children)) % n_elite
        cuts = rng.integers(0, n_slots + 1, size=n_children)
        children = GAService._crossover_batch(elite[first], elite[second], cuts)

        v = rng.random(n_children)
        mutated = v < params.p_muta
        swap = mutated & (v < params.p_swap)
        invert = mutated & (v >= params.p_swap)
        if n_slots >= 2:
            children[swap] = GAService._swap_batch(children[swap], rng)
            children[invert] = GAService._inversion_batch(children[invert], rng)

        return np.vstack([elite, children])

    @staticmethod
    def decode(chromosome: np.ndarray, problem: GAProblem) -> WindowSolution:
        chromosome = np.asarray(chromosome)
        assignments: dict[int, list[int]] = {}
        for a, agent in enumerate(problem.agents):
            segment = chromosome[a * problem.capacity:(a + 1) * problem.capacity]
            genes = [int(g) for g in segment if g >= 0]
            if genes:
                assignments[agent.agent_id] = genes
        placed = {g for genes in assignments.values() for g in genes}
        unassigned = [t.id for t in problem.tasks if t.id not in placed]
        return WindowSolution(assignments=assignments, unassigned=unassigned)

    @staticmethod
    def run_ga(
        problem: GAProblem,
        params: GAParams,
        rng: np.random.Generator,
        time_limit: Optional[float] = None,
    ) -> GAResult:
        """Evolve until the best score stalls within epsilon or the budget runs out.

        Args:
            problem: Window problem (non-empty tasks and agents)
            params: GA parameters and budget
            rng: Random generator, the only source of randomness
            time_limit: Wall-clock seconds for a WallClock budget; overrides
                the budget's own `seconds`

        Returns:
            Best-ever chromosome (first found on ties), decoded
        """
        if not problem.tasks:
            raise ValueError("GA needs at least one task")
        _check_budget(params, time_limit)
        if isinstance(params.budget, WallClockBudget):
            seconds = time_limit if time_limit is not None else params.budget.seconds
            max_generations = None
        else:
            seconds = None
            max_generations = params.budget.generations

        started = time.perf_counter()
        tables = CostTables.build(problem)
        population = GAService.init_population(problem, params, rng)
        l_max = GAService.compute_l_max(population, problem, tables)
        scores, lengths = GAService._scores(population, problem, tables, l_max)

        best_i = int(np.argmin(scores))
        best, best_score, best_length = population[best_i].copy(), float(scores[best_i]), float(lengths[best_i])
        previous_min = best_score
        generations = 1

        while True:
            if max_generations is not None and generations >= max_generations:
                break
            if seconds is not None and time.perf_counter() - started >= seconds:
                break

            population = GAService.evolve_generation(population, scores, params, rng)
            scores, lengths = GAService._scores(population, problem, tables, l_max)
            generations += 1

            i = int(np.argmin(scores))
            current_min = float(scores[i])
            if current_min < best_score:
                best, best_score, best_length = population[i].copy(), current_min, float(lengths[i])
            if params.epsilon is not None and abs(current_min - previous_min) <= params.epsilon:
                break
            previous_min = current_min

        logger.debug(kv(
            window=problem.window_index,
            tasks=len(problem.tasks),
            agents=len(problem.agents),
            generations=generations,
            fitness=best_score,
        ))

        return GAResult(
            best_chromosome=tuple(int(g) for g in best),
            best_fitness=best_score,
            solution=GAService.decode(best, problem),
            generations=generations,
            l_max=l_max,
            total_length=best_length,
        )

