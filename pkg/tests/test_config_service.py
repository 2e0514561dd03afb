import pytest

from app.core.exceptions import ConfigError
from app.schemas.config_schema import (
    FixedHorizon,
    FractionCapacity,
    GAParams,
    GenerationsBudget,
    SimConfig,
    UnboundedCapacity,
    VariableHorizon,
    WallClockBudget,
)
from app.services.config_service import ConfigService


def test_defaults():
    resolved = ConfigService.build({})
    assert resolved.sim == SimConfig()
    assert resolved.sim.delta == 5.0
    assert resolved.synthetic.travel_budget == 150.0
    assert resolved.synthetic.world_size == 10.0


def test_file_values_are_parsed(tmp_path):
    path = tmp_path / "sim.env"
    path.write_text(
        "# over-loaded regime\n"
        "ALPHA=0.5\n"
        "HORIZON=variable\n"
        "MAX_K=3\n"
        "CAPACITY=1/3\n"
        "BUDGET=generations\n"
        "GENERATIONS=120\n"
        "AGENTS=10\n"
        "TASKS_PER_WINDOW=20\n"
        "TRAVEL_BUDGET=inf\n"
    )
    resolved = ConfigService.build(ConfigService.read_file(path))
    assert resolved.sim.alpha == 0.5
    assert resolved.sim.horizon == VariableHorizon(max_k=3)
    assert resolved.sim.capacity == FractionCapacity(fraction=1 / 3)
    assert resolved.sim.ga.budget == GenerationsBudget(generations=120)
    assert resolved.synthetic.n_agents == 10
    assert resolved.synthetic.tasks_per_window == 20
    assert resolved.synthetic.travel_budget is None


def test_flags_override_file(tmp_path):
    path = tmp_path / "sim.env"
    path.write_text("ALPHA=0.25\nHORIZON=2\n")
    settings = ConfigService.merge(ConfigService.read_file(path), {"alpha": 0.9, "horizon": None})
    resolved = ConfigService.build(settings)
    assert resolved.sim.alpha == 0.9
    assert resolved.sim.horizon == FixedHorizon(k=2)


def test_unknown_keys_are_rejected(tmp_path):
    path = tmp_path / "sim.env"
    path.write_text("ALPHA=0.5\nSPEED=3\n")
    with pytest.raises(ConfigError, match="SPEED"):
        ConfigService.read_file(path)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        ConfigService.read_file(tmp_path / "absent.env")


@pytest.mark.parametrize("settings", [
    {"alpha": "1.5"},
    {"horizon": "soon"},
    {"capacity": "lots"},
    {"capacity": "0"},
    {"budget": "forever"},
    {"population_size": "2"},
    {"delta": "-1"},
])
def test_invalid_values_raise_config_error(settings):
    with pytest.raises(ConfigError):
        ConfigService.build(settings)


def test_budget_and_epsilon_parsing():
    assert ConfigService.build({"budget": "wall_clock"}).sim.ga.budget == WallClockBudget()
    assert ConfigService.build({"generations": 7}).sim.ga.budget == GenerationsBudget(generations=7)
    assert ConfigService.build({"epsilon": "none"}).sim.ga.epsilon is None
    assert ConfigService.build({"capacity": "unbounded"}).sim.capacity == UnboundedCapacity()


def test_capacity_rules():
    assert FractionCapacity(fraction=1 / 3).capacity_for(20) == 7
    assert FractionCapacity(fraction=1 / 3).capacity_for(0) == 1
    assert UnboundedCapacity().capacity_for(12) == 12


def test_ga_seconds_split():
    config = SimConfig(delta=6.0, ga=GAParams(budget=WallClockBudget()))
    assert config.ga_seconds() == 6.0
    assert config.ga_seconds(runs=6) == 1.0
    assert SimConfig().ga_seconds() is None


def test_elite_count():
    assert GAParams(population_size=100).elite_count == 30
    assert GAParams(population_size=4).elite_count == 2
