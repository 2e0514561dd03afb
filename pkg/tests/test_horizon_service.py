import pytest

from app.schemas.config_schema import FixedHorizon, GAParams, GenerationsBudget, SimConfig, VariableHorizon
from app.schemas.solution_schema import WindowState
from app.services.horizon_service import HorizonService, empty_fitness, horizon_rng
from tests.conftest import agent, req


def _config(**overrides) -> SimConfig:
    fields = {"alpha": 0.75, "ga": GAParams(population_size=30, budget=GenerationsBudget(generations=30))}
    fields.update(overrides)
    return SimConfig(**fields)


def _busy_state():
    # Both agents finish 4 s after now: invisible at H(0), visible from H(1) with delta=5.
    agents = [
        agent(0, 0, 0, plan=[req(100, 4, 0)]),
        agent(1, 10, 0, plan=[req(101, 6, 0)]),
    ]
    tasks = [req(0, 4, 1, t=0.0), req(1, 6, 1, t=0.0)]
    return WindowState(window_index=0, now=0.0, tasks=tasks, agents=agents)


def test_no_tasks_gives_an_empty_solution():
    state = WindowState(window_index=0, now=0.0, tasks=[], agents=[agent(0, 0, 0)])
    result = HorizonService.solve_window_fixed(0, state, _config())
    assert result.result.solution.is_empty
    assert result.fitness == 0.0


def test_no_available_agent_leaves_everything_unassigned():
    result = HorizonService.solve_window_fixed(0, _busy_state(), _config())
    assert result.available_agents == 0
    assert result.result.solution.unassigned == [0, 1]
    assert result.fitness == pytest.approx(empty_fitness(0.75, 2))


def test_horizon_makes_busy_agents_available():
    result = HorizonService.solve_window_fixed(1, _busy_state(), _config(alpha=0.25))
    assert result.available_agents == 2
    assert result.result.solution.assigned_count == 2


def test_variable_with_max_k_zero_equals_fixed_zero():
    state, config = _busy_state(), _config()
    fixed = HorizonService.solve_window_fixed(0, state, config)
    variable = HorizonService.solve_window_variable(0, state, config)
    assert variable.k == 0
    assert variable.fitness == fixed.fitness


def test_variable_picks_a_horizon_that_can_assign():
    state = _busy_state()
    result = HorizonService.solve_window_variable(3, state, _config(alpha=0.25, horizon=VariableHorizon(max_k=3)))
    assert result.k >= 1
    assert result.fitness < 1 - 0.25
    assert set(result.fitness_by_k) == {0, 1, 2, 3}
    assert result.fitness == min(result.fitness_by_k.values())


def test_variable_breaks_ties_towards_smallest_k():
    # Idle agents are available at every horizon, so every k solves the same problem.
    state = WindowState(window_index=0, now=0.0, tasks=[req(0, 1, 1)], agents=[agent(0, 0, 0)])
    result = HorizonService.solve_window_variable(4, state, _config())
    assert result.k == 0


def test_variable_fitness_never_exceeds_any_fixed_horizon():
    state, config = _busy_state(), _config()
    variable = HorizonService.solve_window_variable(5, state, config)
    for k in range(6):
        assert variable.fitness <= HorizonService.solve_window_fixed(k, state, config).fitness


def test_dispatch_by_config_mode():
    state = _busy_state()
    assert HorizonService.solve_window(state, _config(horizon=FixedHorizon(k=2))).k == 2
    assert set(HorizonService.solve_window(state, _config(horizon=VariableHorizon(max_k=2))).fitness_by_k) == {0, 1, 2}


def test_horizon_streams_are_independent_and_reproducible():
    a = horizon_rng(1, 3, 2).random(4)
    assert (a == horizon_rng(1, 3, 2).random(4)).all()
    assert not (a == horizon_rng(1, 3, 1).random(4)).all()


def test_negative_k_is_rejected():
    with pytest.raises(ValueError):
        HorizonService.solve_window_fixed(-1, _busy_state(), _config())
