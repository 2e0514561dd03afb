import math
from typing import Sequence

import numpy as np

from app.core.config import EARTH_RADIUS_M
from app.core.exceptions import CostVariantError, MetricSpaceMismatchError
from app.schemas.geo_schema import CostVariant, Location, MetricSpace
from app.schemas.request_schema import Request


class GeometryService:
    """Distances and open-path costs in planar or geographic space."""

    @staticmethod
    def distance(a: Location, b: Location, space: MetricSpace) -> float:
        """Straight-line distance in meters: Euclidean or haversine great-circle."""
        if a.space != space or b.space != space:
            raise MetricSpaceMismatchError(
                f"cannot measure {a.space.value}->{b.space.value} in {space.value} space"
            )

        if space == MetricSpace.PLANAR:
            return math.hypot(b.x - a.x, b.y - a.y)

        lat1, lat2 = math.radians(a.lat), math.radians(b.lat)
        dlat = lat2 - lat1
        dlon = math.radians(b.lon - a.lon)
        h = math.sin(dlat / 2) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2) ** 2
        return 2 * EARTH_RADIUS_M * math.asin(math.sqrt(min(1.0, h)))

    @staticmethod
    def pairwise(origins: np.ndarray, targets: np.ndarray, space: MetricSpace) -> np.ndarray:
        """Distance matrix between (n, 2) and (m, 2) coordinate arrays, shape (n, m)."""
        origins = np.asarray(origins, dtype=float).reshape(-1, 2)
        targets = np.asarray(targets, dtype=float).reshape(-1, 2)

        if space == MetricSpace.PLANAR:
            diff = origins[:, None, :] - targets[None, :, :]
            return np.hypot(diff[..., 0], diff[..., 1])

        lat1 = np.radians(origins[:, 0])[:, None]
        lat2 = np.radians(targets[:, 0])[None, :]
        dlat = lat2 - lat1
        dlon = np.radians(targets[:, 1])[None, :] - np.radians(origins[:, 1])[:, None]
        h = np.sin(dlat / 2) ** 2 + np.cos(lat1) * np.cos(lat2) * np.sin(dlon / 2) ** 2
        return 2 * EARTH_RADIUS_M * np.arcsin(np.sqrt(np.minimum(1.0, h)))

    @staticmethod
    def waypoints(requests: Sequence[Request], variant: CostVariant) -> list[Location]:
        """Locations visited in order: pickups, or pickup/dropoff pairs."""
        points: list[Location] = []
        for request in requests:
            points.append(request.pickup)
            if variant == CostVariant.PICKUP_DROPOFF:
                if request.dropoff is None:
                    raise CostVariantError(f"request {request.id} has no dropoff")
                points.append(request.dropoff)
        return points

    @staticmethod
    def leg_lengths(start: Location, requests: Sequence[Request], variant: CostVariant, space: MetricSpace) -> list[float]:
        points = [start, *GeometryService.waypoints(requests, variant)]
        return [GeometryService.distance(a, b, space) for a, b in zip(points, points[1:])]

    @staticmethod
    def path_length(start: Location, requests: Sequence[Request], variant: CostVariant, space: MetricSpace) -> float:
        """Length of the open path from `start` through `requests` in the given order.

        Args:
            start: Agent (current or anticipated) position
            requests: Ordered requests
            variant: REACH_ONLY sums start->p1->p2...; PICKUP_DROPOFF adds each
                pickup->dropoff leg and links dropoff_i->pickup_(i+1)
            space: Metric space of every location

        Returns:
            Path length in meters, 0.0 for an empty list
        """
        return math.fsum(GeometryService.leg_lengths(start, requests, variant, space))

    @staticmethod
    def end_location(start: Location, requests: Sequence[Request], variant: CostVariant) -> Location:
        """Where the path ends: last task, or last dropoff in pickup/dropoff mode."""
        if not requests:
            return start
        last = requests[-1]
        if variant == CostVariant.PICKUP_DROPOFF:
            if last.dropoff is None:
                raise CostVariantError(f"request {last.id} has no dropoff")
            return last.dropoff
        return last.pickup
