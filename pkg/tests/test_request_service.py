import pytest

from app.core.exceptions import CostVariantError, MetricSpaceMismatchError
from app.schemas.geo_schema import CostVariant, Location, MetricSpace
from app.schemas.request_schema import Agent, RequestBuffer
from app.services.request_service import IdSource, RequestService
from tests.conftest import geo, loc, req


def test_first_request_gets_id_zero_and_window_zero():
    r = RequestService.new_request(loc(2, 3), None, 0.0, IdSource(), delta=5)
    assert r.id == 0
    assert r.registered_window == 0
    assert r.dropoff is None


def test_registered_window_is_floor_of_time_over_delta():
    r = RequestService.new_request(loc(2, 3), None, 12.5, IdSource(), delta=5)
    assert r.registered_window == 2


def test_ids_are_distinct_and_dense():
    ids = IdSource()
    a = RequestService.new_request(loc(0, 0), None, 0.0, ids, delta=5)
    b = RequestService.new_request(loc(1, 1), None, 0.0, ids, delta=5)
    assert (a.id, b.id) == (0, 1)


def test_dropoff_required_only_for_pickup_dropoff():
    with pytest.raises(CostVariantError):
        RequestService.new_request(loc(0, 0), loc(1, 1), 0.0, IdSource(), delta=5)
    with pytest.raises(CostVariantError):
        RequestService.new_request(loc(0, 0), None, 0.0, IdSource(), delta=5, variant=CostVariant.PICKUP_DROPOFF)


def test_space_mismatch_is_rejected():
    with pytest.raises(MetricSpaceMismatchError):
        RequestService.new_request(geo(40.7, -74.0), None, 0.0, IdSource(), delta=5)


def test_negative_time_is_rejected():
    with pytest.raises(ValueError):
        RequestService.new_request(loc(0, 0), None, -1.0, IdSource(), delta=5)


@pytest.mark.parametrize("x,y", [(float("nan"), 0.0), (0.0, float("inf"))])
def test_non_finite_locations_are_invalid(x, y):
    with pytest.raises(ValueError):
        Location(x=x, y=y)


def test_geographic_range_is_checked():
    with pytest.raises(ValueError):
        Location(x=91.0, y=0.0, space=MetricSpace.GEOGRAPHIC)
    assert geo(40.7, -74.0).lat == 40.7


def test_agent_plan_must_not_repeat_requests():
    r = req(1, 1, 1)
    with pytest.raises(ValueError):
        Agent(id=0, position=loc(0, 0), velocity=1.0, plan=[r, r])


def test_buffer_orders_by_time_then_id():
    buffer = RequestBuffer.of([req(3, 0, 0, t=5), req(2, 0, 0, t=5), req(9, 0, 0, t=0)])
    assert [r.id for r in buffer.pending] == [9, 2, 3]
