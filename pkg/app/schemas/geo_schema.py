import math
from enum import Enum

from pydantic import BaseModel, model_validator

from app.core.exceptions import InvalidLocationError


class MetricSpace(str, Enum):
    PLANAR = "planar"
    GEOGRAPHIC = "geographic"


class CostVariant(str, Enum):
    # Request is done once its pickup is reached (synthetic benchmark).
    REACH_ONLY = "reach_only"
    # Request is done at its dropoff (taxi benchmark).
    PICKUP_DROPOFF = "pickup_dropoff"


class Location(BaseModel):
    """A coordinate pair tagged with the metric space it lives in.

    Planar: `x`/`y` in meters. Geographic: `x` is latitude and `y` is
    longitude, both in degrees.
    """

    model_config = {"frozen": True}

    x: float
    y: float
    space: MetricSpace = MetricSpace.PLANAR

    @model_validator(mode="after")
    def _check_range(self) -> "Location":
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise InvalidLocationError(f"non-finite coordinates ({self.x}, {self.y})")
        if self.space == MetricSpace.GEOGRAPHIC:
            if not -90.0 <= self.x <= 90.0:
                raise InvalidLocationError(f"latitude {self.x} outside [-90, 90]")
            if not -180.0 <= self.y <= 180.0:
                raise InvalidLocationError(f"longitude {self.y} outside [-180, 180]")
        return self

    @property
    def lat(self) -> float:
        return self.x

    @property
    def lon(self) -> float:
        return self.y

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)
