import pytest

from app.core.exceptions import ScenarioFormatError
from app.schemas.geo_schema import CostVariant, MetricSpace
from app.schemas.scenario_schema import Scenario, SyntheticSpec
from app.services.scenario_service import ScenarioService
from tests.conftest import agent, geo, req


@pytest.mark.parametrize("agents,per_window,total", [(20, 10, 300), (10, 20, 600)])
def test_generate_request_counts(agents, per_window, total):
    scenario = ScenarioService.generate(SyntheticSpec(n_agents=agents, tasks_per_window=per_window))
    assert len(scenario.agents) == agents
    assert len(scenario.requests) == total


def test_generate_stays_in_world_and_stamps_window_start():
    spec = SyntheticSpec(n_agents=5, tasks_per_window=4, total_windows=6, delta=5.0, rng_seed=9)
    scenario = ScenarioService.generate(spec)
    points = [a.position for a in scenario.agents] + [r.pickup for r in scenario.requests]
    assert all(0.0 <= p.x <= 10.0 and 0.0 <= p.y <= 10.0 for p in points)
    for r in scenario.requests:
        assert r.registered_at == r.registered_window * 5.0
        assert r.dropoff is None
    assert all(a.travel_budget == 150.0 and a.velocity == 1.0 for a in scenario.agents)


def test_generate_is_deterministic_per_seed():
    a = ScenarioService.generate(SyntheticSpec(rng_seed=4))
    b = ScenarioService.generate(SyntheticSpec(rng_seed=4))
    c = ScenarioService.generate(SyntheticSpec(rng_seed=5))
    assert a == b
    assert a != c


def test_text_format_replays_exactly(tmp_path):
    scenario = ScenarioService.generate(SyntheticSpec(n_agents=3, tasks_per_window=2, total_windows=3, travel_budget=None))
    path = ScenarioService.write(scenario, tmp_path / "s.txt")
    assert ScenarioService.read(path, delta=5.0) == scenario
    assert path.read_text().startswith("# horizon-dispatch scenario v1\n")


def test_pickup_dropoff_lines_carry_six_fields():
    scenario = Scenario(
        space=MetricSpace.GEOGRAPHIC,
        variant=CostVariant.PICKUP_DROPOFF,
        agents=[],
        requests=[req(0, 40.7, -74.0, t=12.0, dropoff=geo(40.75, -73.99))],
    )
    text = ScenarioService.dumps(scenario)
    assert text.splitlines()[-1].split() == ["0", "12.0", "40.7", "-74.0", "40.75", "-73.99"]
    assert ScenarioService.loads(text, delta=300.0).requests[0].dropoff == geo(40.75, -73.99)


@pytest.mark.parametrize("text", [
    "agent 0 1.0 2.0 1.0\n",
    "0 0.0 1.0\n",
    "0 zero 1.0 2.0\n",
    "# space=spherical\n",
    "0 0.0 1.0 2.0\n0 5.0 1.0 2.0\n",
    "0 0.0 1.0 2.0 3.0 4.0\n",
])
def test_malformed_files_are_rejected(text):
    with pytest.raises(ScenarioFormatError):
        ScenarioService.loads(text, delta=5.0)


def test_missing_file(tmp_path):
    with pytest.raises(ScenarioFormatError):
        ScenarioService.read(tmp_path / "nope.txt", delta=5.0)


def test_scenario_rejects_foreign_space_agents():
    with pytest.raises(ValueError):
        Scenario(space=MetricSpace.GEOGRAPHIC, agents=[agent(0, 1, 1)])
