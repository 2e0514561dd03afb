import logging
from typing import Optional

import numpy as np

from app.schemas.config_schema import FixedHorizon, SimConfig
from app.schemas.solution_schema import GAProblem, GAResult, HorizonResult, WindowSolution, WindowState
from app.services.anticipation_service import AnticipationService
from app.services.ga_service import GAService

logger = logging.getLogger(__name__)


def horizon_rng(seed: int, window: int, k: int) -> np.random.Generator:
    """Independent, order-free random stream for (run seed, window, horizon k)."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(window, k)))


def empty_fitness(alpha: float, n_tasks: int) -> float:
    # Nothing assigned: the distance term is 0 and every task counts as unassigned.
    return (1 - alpha) if n_tasks else 0.0


class HorizonService:
    """Runs the GA for a fixed receding horizon H(k) or the variable horizon H(v)."""

    @staticmethod
    def solve_window_fixed(
        k: int,
        state: WindowState,
        config: SimConfig,
        rng: Optional[np.random.Generator] = None,
        time_limit: Optional[float] = None,
    ) -> HorizonResult:
        """Anticipate availability within k * delta and assign the window's tasks.

        Args:
            k: Horizon multiple, H(k) = k * delta
            state: Window snapshot (tasks, agents, time)
            config: Simulation config
            rng: Random generator; derived from (seed, window, k) when omitted
            time_limit: Wall-clock seconds for the GA; the config's budget when omitted

        Returns:
            The window result; an empty solution when there are no tasks or no
            available agent
        """
        if k < 0:
            raise ValueError("k must be >= 0")

        available = AnticipationService.availability_anticipation(
            k * config.delta, state.agents, state.now, state.variant, state.space
        )

        if not state.tasks or not available:
            fitness = empty_fitness(config.alpha, len(state.tasks))
            result = GAResult(
                best_fitness=fitness,
                solution=WindowSolution(unassigned=[t.id for t in state.tasks]),
            )
            return HorizonResult(k=k, fitness=fitness, result=result, available_agents=len(available), fitness_by_k={k: fitness})

        problem = GAProblem(
            window_index=state.window_index,
            now=state.now,
            tasks=state.tasks,
            agents=available,
            capacity=config.capacity.capacity_for(len(state.tasks)),
            alpha=config.alpha,
            variant=state.variant,
            space=state.space,
        )
        rng = rng or horizon_rng(config.rng_seed, state.window_index, k)
        if time_limit is None:
            time_limit = config.ga_seconds()

        result = GAService.run_ga(problem, config.ga, rng, time_limit=time_limit)
        return HorizonResult(
            k=k,
            fitness=result.best_fitness,
            result=result,
            available_agents=len(available),
            fitness_by_k={k: result.best_fitness},
        )

    @staticmethod
    def solve_window_variable(max_k: int, state: WindowState, config: SimConfig) -> HorizonResult:
        """Solve H(0)..H(max_k) independently and keep the lowest fitness (ties: smallest k).

        The wall-clock budget of the window is split evenly across the runs.
        """
        if max_k < 0:
            raise ValueError("max_k must be >= 0")

        time_limit = config.ga_seconds(runs=max_k + 1)
        best: Optional[HorizonResult] = None
        fitness_by_k: dict[int, float] = {}
        for k in range(max_k + 1):
            candidate = HorizonService.solve_window_fixed(k, state, config, time_limit=time_limit)
            fitness_by_k[k] = candidate.fitness
            if best is None or candidate.fitness < best.fitness:
                best = candidate

        return best.model_copy(update={"fitness_by_k": fitness_by_k})

    @staticmethod
    def solve_window(state: WindowState, config: SimConfig) -> HorizonResult:
        horizon = config.horizon
        if isinstance(horizon, FixedHorizon):
            return HorizonService.solve_window_fixed(horizon.k, state, config)
        return HorizonService.solve_window_variable(horizon.max_k, state, config)
