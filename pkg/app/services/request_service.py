import math
from itertools import count
from typing import Iterator, Optional

from app.core.exceptions import CostVariantError, MetricSpaceMismatchError
from app.schemas.geo_schema import CostVariant, Location, MetricSpace
from app.schemas.request_schema import Request


class IdSource:
    """Dense non-negative ids, 0, 1, 2, ... ."""

    def __init__(self, start: int = 0):
        self._counter: Iterator[int] = count(start)

    def next_id(self) -> int:
        return next(self._counter)


class RequestService:
    """Construction of requests for one simulation's metric space and cost variant."""

    @staticmethod
    def window_of(registered_at: float, delta: float) -> int:
        return int(math.floor(registered_at / delta))

    @staticmethod
    def new_request(
        pickup: Location,
        dropoff: Optional[Location],
        registered_at: float,
        id_source: IdSource,
        delta: float,
        variant: CostVariant = CostVariant.REACH_ONLY,
        space: MetricSpace = MetricSpace.PLANAR,
    ) -> Request:
        """Build a request with a fresh id.

        Args:
            pickup: Task location
            dropoff: Arrival location, required iff variant is PICKUP_DROPOFF
            registered_at: Seconds since simulation start
            id_source: Shared id counter of the simulation
            delta: Window duration, used to derive the registration window
            variant: Cost variant of the simulation
            space: Metric space of the simulation

        Returns:
            The new request
        """
        for loc in (pickup, dropoff):
            if loc is not None and loc.space != space:
                raise MetricSpaceMismatchError(f"location in {loc.space.value} space, simulation uses {space.value}")

        if (dropoff is not None) != (variant == CostVariant.PICKUP_DROPOFF):
            raise CostVariantError(f"dropoff presence does not match the {variant.value} variant")

        if registered_at < 0:
            raise ValueError("registered_at must be >= 0")

        return Request(
            id=id_source.next_id(),
            pickup=pickup,
            dropoff=dropoff,
            registered_at=registered_at,
            registered_window=RequestService.window_of(registered_at, delta),
        )
