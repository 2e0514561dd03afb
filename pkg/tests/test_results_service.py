import pytest

from app.schemas.config_schema import SimConfig, VariableHorizon
from app.schemas.results_schema import HorizonTriple
from app.schemas.solution_schema import SimMetrics, WindowMetrics
from app.services.experiment_service import ExperimentService, horizon_label, parse_horizons
from app.services.results_service import ResultsService


def _metrics() -> SimMetrics:
    window = WindowMetrics(window=0, n_tasks=3, assigned=2, carried=1, chosen_k=2, fitness=0.4,
                           distance_by_agent={0: 1.5, 1: 2.5}, idle_by_agent={0: 0.0, 1: 3.0})
    return SimMetrics(total_distance=4.0, total_idle=3.0, tail_idle=3.0, percent_assigned=66.7,
                      presented=3, assigned=2, carried=1, per_window=[window])


def test_document_carries_config_and_trace(tmp_path):
    config = SimConfig(rng_seed=7, horizon=VariableHorizon(max_k=4))
    doc = ResultsService.document(config, _metrics(), label="demo")
    assert doc.seed == 7
    assert doc.config["horizon"] == {"kind": "variable", "max_k": 4}
    assert doc.per_window[0].distance_m == pytest.approx(4.0)
    assert doc.per_window[0].idle_s == pytest.approx(3.0)

    path = tmp_path / "out" / "r.json"
    ResultsService.write_json(doc, path)
    ResultsService.write_json(doc, path)
    assert path.read_text().count('"total_distance_m"') == 1
    assert "H(v, k<=4)" in ResultsService.summary(doc)


def test_sweep_table_averages_over_seeds():
    rows = [
        {"alpha": a, "horizon": h, "seed": s, "total_distance_m": 10 * a + s, "total_idle_s": 1.0, "percent_assigned": 100.0}
        for a in (0.0, 1.0) for h in ("H(0)", "H(v)") for s in (0, 2)
    ]
    table = ResultsService.sweep_table(rows)
    assert table.shape == (2, 6)
    assert table.loc[1.0, ("total_distance_m", "H(0)")] == pytest.approx(11.0)
    assert list(table.columns.get_level_values("horizon")[:2]) == ["H(0)", "H(v)"]


def test_horizon_parsing_and_labels():
    assert parse_horizons("0, 3 ,v") == ["0", "3", "v"]
    assert [horizon_label(h) for h in ("0", "5", "v")] == ["H(0)", "H(5)", "H(v)"]
    with pytest.raises(ValueError):
        parse_horizons(" , ")


def _triple(h, idle):
    return HorizonTriple(horizon=h, total_distance_m=0.0, total_idle_s=idle, percent_assigned=50.0)


def test_idle_trend_flag():
    assert ExperimentService.idle_trend([_triple("H(0)", 9.0), _triple("H(5)", 4.0), _triple("H(v)", 1.0)]) is True
    assert ExperimentService.idle_trend([_triple("H(0)", 1.0), _triple("H(3)", 4.0)]) is False
    assert ExperimentService.idle_trend([_triple("H(0)", 1.0), _triple("H(v)", 4.0)]) is None


def test_sweep_settings_cross_product():
    cells = ExperimentService.sweep_settings({"agents": 5}, [0.0, 0.5, 1.0], ["0", "3", "v"], range(10))
    assert len(cells) == 90
    assert cells[0] == {"agents": 5, "alpha": 0.0, "horizon": "0", "rng_seed": 0}
