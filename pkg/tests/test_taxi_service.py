from datetime import date

import numpy as np
import pytest

from app.core.config import NYC_BBOX, TAXI_FIXTURE_PATH
from app.core.exceptions import IngestError
from app.schemas.config_schema import FixedHorizon, GAParams, GenerationsBudget, SimConfig
from app.schemas.geo_schema import MetricSpace
from app.services.experiment_service import ExperimentService
from app.services.simulation_service import SimulationService
from app.services.taxi_service import DropReason, TaxiService, date_span

NIGHTS = date_span(date(2013, 1, 7), date(2013, 1, 9))


@pytest.fixture(scope="module")
def ingested():
    return TaxiService.ingest(TAXI_FIXTURE_PATH, NIGHTS)


def test_fixture_counts(ingested):
    assert ingested.total_rows == 1000
    assert ingested.retained == 896
    assert ingested.drops == {
        DropReason.MALFORMED: 4,
        DropReason.UNPARSABLE: 40,
        DropReason.DATE: 20,
        DropReason.HOUR: 20,
        DropReason.BBOX: 20,
    }
    assert {night: len(reqs) for night, reqs in ingested.nights.items()} == {
        date(2013, 1, 7): 298,
        date(2013, 1, 8): 299,
        date(2013, 1, 9): 299,
    }


def test_hourly_profile(ingested):
    assert ingested.hourly[date(2013, 1, 7)] == [43, 42, 42, 42, 42, 44, 43]
    assert ingested.hourly[date(2013, 1, 8)] == [43, 43, 42, 43, 44, 42, 42]
    assert ingested.hourly[date(2013, 1, 9)] == [42, 43, 43, 42, 42, 44, 43]


def test_pickup_time_becomes_registration_time(ingested):
    times = [r.registered_at for r in ingested.nights[date(2013, 1, 7)]]
    assert 5400.0 in times
    assert times == sorted(times)
    request = next(r for r in ingested.nights[date(2013, 1, 7)] if r.registered_at == 5400.0)
    assert request.registered_window == 18


def test_requests_are_geographic_with_dense_ids(ingested):
    requests = ingested.nights[date(2013, 1, 8)]
    assert [r.id for r in requests] == list(range(len(requests)))
    for r in requests:
        assert r.pickup.space == MetricSpace.GEOGRAPHIC
        assert r.dropoff is not None
        assert NYC_BBOX["min_lat"] <= r.pickup.lat <= NYC_BBOX["max_lat"]
        assert NYC_BBOX["min_lon"] <= r.dropoff.lon <= NYC_BBOX["max_lon"]


def test_narrower_hour_range():
    result = TaxiService.ingest(TAXI_FIXTURE_PATH, [date(2013, 1, 7)], hour_range=(0, 2))
    assert len(result.nights[date(2013, 1, 7)]) == 43 + 42
    assert result.hourly[date(2013, 1, 7)] == [43, 42]


def test_small_hand_written_file(tmp_path):
    header = "pickup_datetime,pickup_latitude,pickup_longitude,dropoff_latitude,dropoff_longitude"
    rows = [f"2013-01-07 0{h}:00:00,40.70,-74.00,40.75,-73.95" for h in range(7)]
    rows += [f"2013-01-07 {h:02d}:00:00,40.70,-74.00,40.75,-73.95" for h in (7, 8, 23)]
    rows.append("2013-01-07 01:00:00,0.0,-74.00,40.75,-73.95")
    path = tmp_path / "trips.csv"
    path.write_text("\n".join([header, *rows]) + "\n")

    result = TaxiService.ingest(path, [date(2013, 1, 7)])
    assert result.retained == 7
    assert result.drops == {DropReason.HOUR: 3, DropReason.BBOX: 1}


def test_missing_file_and_bad_header(tmp_path):
    with pytest.raises(IngestError):
        TaxiService.ingest(tmp_path / "missing.csv", NIGHTS)
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(IngestError):
        TaxiService.ingest(bad, NIGHTS)


def test_fleet_is_seeded_and_inside_the_box():
    fleet = TaxiService.make_taxi_fleet(1000, np.random.default_rng(1))
    assert len({a.id for a in fleet}) == 1000
    assert all(a.travel_budget is None for a in fleet)
    assert all(NYC_BBOX["min_lat"] <= a.position.lat <= NYC_BBOX["max_lat"] for a in fleet)
    again = TaxiService.make_taxi_fleet(1000, np.random.default_rng(1))
    assert [a.position for a in fleet] == [a.position for a in again]


def test_night_simulation_assigns_requests(ingested):
    night = date(2013, 1, 7)
    scenario = TaxiService.night_scenario(ingested.nights[night], TaxiService.make_taxi_fleet(20, np.random.default_rng(0)))
    config = SimConfig(
        delta=300.0,
        total_windows=84,
        metric_space=MetricSpace.GEOGRAPHIC,
        horizon=FixedHorizon(k=2),
        ga=GAParams(population_size=40, budget=GenerationsBudget(generations=40)),
    )
    metrics = SimulationService.run_simulation(config, scenario)
    assert metrics.presented == 298
    assert metrics.percent_assigned > 0
    assert metrics.total_distance > 0


def test_night_starts_at_the_first_hour():
    night = date(2013, 1, 7)
    result = TaxiService.ingest(TAXI_FIXTURE_PATH, [night], hour_range=(1, 7))
    times = [r.registered_at for r in result.nights[night]]
    assert len(times) == 255
    assert result.hourly[night] == [42, 42, 42, 42, 44, 43]
    assert all(0.0 <= t < 6 * 3600 for t in times)
    # The 01:30 pickup lands half an hour into the night.
    request = next(r for r in result.nights[night] if r.registered_at == 1800.0)
    assert request.registered_window == 6


def test_every_request_is_presented_with_a_late_first_hour():
    settings = {"budget": "generations", "generations": 10, "population_size": 20}
    report, outcomes = ExperimentService.taxi(
        TAXI_FIXTURE_PATH, [date(2013, 1, 7)], fleet_size=20, horizons=["0"], settings=settings, hour_range=(1, 7)
    )
    metrics = outcomes[0].metrics
    assert len(metrics.per_window) == 72
    assert metrics.presented == 255
    assert metrics.unpresented == 0
    assert sum(w.n_tasks for w in metrics.per_window[:12]) >= 42
    assert report.nights[0].hourly == [42, 42, 42, 42, 44, 43]
