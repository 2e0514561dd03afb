import math

import numpy as np
import pytest

from app.schemas.geo_schema import CostVariant, MetricSpace
from app.services.anticipation_service import AnticipationService
from tests.conftest import agent, loc, req

REACH, PLANAR = CostVariant.REACH_ONLY, MetricSpace.PLANAR


def _integrate_completion(start, points, velocity, dt=1e-3):
    """Fixed-step movement; leftover step length carries into the next leg."""
    x, y = start
    t, i = 0.0, 0
    while i < len(points):
        budget = velocity * dt
        t += dt
        while budget > 0 and i < len(points):
            tx, ty = points[i]
            gap = math.hypot(tx - x, ty - y)
            if gap <= budget:
                budget -= gap
                x, y = tx, ty
                i += 1
            else:
                x += (tx - x) * budget / gap
                y += (ty - y) * budget / gap
                budget = 0.0
    return t


def test_forecast_single_task():
    a = agent(0, 0, 0, plan=[req(0, 3, 4)], issued=10.0)
    f = AnticipationService.forecast(a, now=11.0, variant=REACH, space=PLANAR)
    assert f.completion_time == pytest.approx(15.0)
    assert f.completion_location == loc(3, 4)


def test_forecast_empty_plan_is_now():
    a = agent(0, 2, 2)
    f = AnticipationService.forecast(a, now=7.0, variant=REACH, space=PLANAR)
    assert f.completion_time == 7.0
    assert f.completion_location == loc(2, 2)


def test_forecast_two_legs_at_double_speed():
    a = agent(0, 0, 0, velocity=2.0, plan=[req(0, 3, 4), req(1, 3, 0)])
    f = AnticipationService.forecast(a, now=0.0, variant=REACH, space=PLANAR)
    assert f.completion_time == pytest.approx(4.5)


def test_forecast_pickup_dropoff_ends_at_dropoff():
    a = agent(0, 0, 0, plan=[req(0, 0, 3, dropoff=loc(4, 3))])
    f = AnticipationService.forecast(a, now=0.0, variant=CostVariant.PICKUP_DROPOFF, space=PLANAR)
    assert f.completion_time == pytest.approx(7.0)
    assert f.completion_location == loc(4, 3)


@pytest.mark.parametrize("n_plans", [25, pytest.param(1000, marks=pytest.mark.slow)])
def test_forecast_matches_fixed_step_integrator(n_plans):
    rng = np.random.default_rng(7)
    for _ in range(n_plans):
        n_tasks = int(rng.integers(1, 11))
        velocity = float(rng.uniform(2.0, 6.0))
        start = tuple(rng.uniform(0, 10, size=2).tolist())
        points = [tuple(p) for p in rng.uniform(0, 10, size=(n_tasks, 2)).tolist()]
        a = agent(0, *start, velocity=velocity, plan=[req(i, *p) for i, p in enumerate(points)])

        analytic = AnticipationService.forecast(a, now=0.0, variant=REACH, space=PLANAR).completion_time
        assert abs(analytic - _integrate_completion(start, points, velocity)) <= 2e-3


def test_position_moves_linearly():
    a = agent(0, 0, 0, plan=[req(0, 10, 0)])
    assert AnticipationService.position_at(a, 4.0, REACH, PLANAR) == loc(4, 0)


def test_position_clamps_at_completion():
    a = agent(0, 0, 0, plan=[req(0, 10, 0)])
    assert AnticipationService.position_at(a, 50.0, REACH, PLANAR) == loc(10, 0)


def test_position_across_legs():
    a = agent(0, 0, 0, plan=[req(0, 3, 0), req(1, 3, 4)])
    p = AnticipationService.position_at(a, 5.0, REACH, PLANAR)
    assert p.x == pytest.approx(3.0)
    assert p.y == pytest.approx(2.0)


def test_distance_covered_is_clamped_to_the_plan():
    a = agent(0, 0, 0, plan=[req(0, 10, 0)], issued=2.0)
    assert AnticipationService.distance_covered(a, 0.0, 5.0, REACH, PLANAR) == pytest.approx(3.0)
    assert AnticipationService.distance_covered(a, 5.0, 100.0, REACH, PLANAR) == pytest.approx(7.0)


def test_completed_prefix_counts_reached_tasks():
    a = agent(0, 0, 0, plan=[req(0, 3, 0), req(1, 3, 4), req(2, 0, 4)])
    done, anchor, where = AnticipationService.completed_prefix(a, 7.5, REACH, PLANAR)
    assert done == 2
    assert anchor == pytest.approx(7.0)
    assert where == loc(3, 4)


def test_busy_agent_inside_horizon_is_available():
    busy = agent(0, 0, 0, plan=[req(0, 3, 0)], issued=0.0)
    available = AnticipationService.availability_anticipation(5.0, [busy], now=0.0, variant=REACH, space=PLANAR)
    assert [a.agent_id for a in available] == [0]
    assert available[0].start == loc(3, 0)
    assert available[0].start_time == pytest.approx(3.0)


def test_zero_horizon_keeps_only_idle_agents():
    idle = agent(0, 1, 1)
    busy = agent(1, 0, 0, plan=[req(0, 3, 0)])
    available = AnticipationService.availability_anticipation(0.0, [idle, busy], now=0.0, variant=REACH, space=PLANAR)
    assert [a.agent_id for a in available] == [0]
    assert available[0].start_time == 0.0


def test_exhausted_agents_are_never_available():
    tired = agent(0, 1, 1, budget=10.0)
    tired.distance_traveled = 10.0
    assert AnticipationService.availability_anticipation(100.0, [tired], 0.0, REACH, PLANAR) == []


def test_availability_matches_forecast_filter(rng):
    now, horizon = 10.0, 2 * 5.0
    agents = []
    for i in range(10):
        n = int(rng.integers(0, 4))
        plan = [req(100 * i + j, *rng.uniform(0, 10, size=2).tolist()) for j in range(n)]
        agents.append(agent(i, *rng.uniform(0, 10, size=2).tolist(), plan=plan, issued=float(rng.uniform(0, now))))

    expected = []
    for a in agents:
        f = AnticipationService.forecast(a, now, REACH, PLANAR)
        if not a.plan or f.completion_time <= now or f.completion_time < now + horizon:
            expected.append(a.id)

    available = AnticipationService.availability_anticipation(horizon, agents, now, REACH, PLANAR)
    assert [a.agent_id for a in available] == expected


def test_negative_horizon_is_rejected():
    with pytest.raises(ValueError):
        AnticipationService.availability_anticipation(-1.0, [], 0.0, REACH, PLANAR)


def test_availability_grows_with_the_horizon(rng):
    now = 10.0
    agents = []
    for i in range(20):
        n = int(rng.integers(0, 5))
        plan = [req(100 * i + j, *rng.uniform(0, 10, size=2).tolist()) for j in range(n)]
        agents.append(agent(i, *rng.uniform(0, 10, size=2).tolist(), plan=plan, issued=float(rng.uniform(0, now))))

    previous: set[int] = set()
    for horizon in (0.0, 1.0, 5.0, 10.0, 25.0, 60.0):
        ids = {a.agent_id for a in AnticipationService.availability_anticipation(horizon, agents, now, REACH, PLANAR)}
        assert previous <= ids
        previous = ids
    assert previous == {a.id for a in agents}
