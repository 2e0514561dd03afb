import logging
from collections import Counter
from datetime import date, datetime, timedelta
from pathlib import Path
from typing import Iterable, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field

from app.core.config import NYC_BBOX, TAXI_COLUMNS, TAXI_DELTA_S, TAXI_VELOCITY_MPS
from app.core.exceptions import IngestError
from app.core.logging_config import kv
from app.schemas.geo_schema import CostVariant, Location, MetricSpace
from app.schemas.request_schema import Agent, Request
from app.schemas.scenario_schema import Scenario
from app.services.request_service import IdSource, RequestService

logger = logging.getLogger(__name__)

DATETIME_FORMAT = "%Y-%m-%d %H:%M:%S"
CHUNK_ROWS = 100_000


class DropReason:
    MALFORMED = "malformed"
    UNPARSABLE = "unparsable"
    DATE = "date"
    HOUR = "hour"
    BBOX = "bbox"


class TaxiIngestResult(BaseModel):
    """Requests per night plus the bookkeeping of every row read."""

    nights: dict[date, list[Request]] = Field(default_factory=dict)
    drops: dict[str, int] = Field(default_factory=dict)
    total_rows: int = 0
    # Requests registered per hour of the night, one entry per hour in range.
    hourly: dict[date, list[int]] = Field(default_factory=dict)

    @property
    def retained(self) -> int:
        return sum(len(reqs) for reqs in self.nights.values())

    @property
    def dropped(self) -> int:
        return sum(self.drops.values())


def _in_box(lat: pd.Series, lon: pd.Series, bbox: dict) -> pd.Series:
    return lat.between(bbox["min_lat"], bbox["max_lat"]) & lon.between(bbox["min_lon"], bbox["max_lon"])


def date_span(start: date, end: date) -> list[date]:
    if end < start:
        raise ValueError("date range ends before it starts")
    return [start + timedelta(days=i) for i in range((end - start).days + 1)]


class TaxiService:
    """NYC 2013 trip records to pickup/dropoff requests, and random taxi fleets."""

    @staticmethod
    def ingest(
        path: Path,
        dates: Iterable[date],
        hour_range: tuple[int, int] = (0, 7),
        columns: Optional[dict[str, str]] = None,
        bbox: Optional[dict] = None,
        delta: float = TAXI_DELTA_S,
    ) -> TaxiIngestResult:
        """Read a trip CSV and keep the rows of the requested nights.

        Args:
            path: CSV file with a header row
            dates: Nights to keep; each night starts at `first_hour` on its date
            hour_range: [start, end) pickup hours kept
            columns: Logical column -> CSV header name, defaults to the 2013 schema
            bbox: Coordinate box both pickup and dropoff must fall in
            delta: Window duration used for each request's registration window

        Returns:
            Requests per night (ids dense from 0 in pickup-time order, times in
            seconds since the night starts) and drop counts by reason
        """
        path = Path(path)
        if not path.exists():
            raise IngestError(f"trip file not found: {path}")

        columns = {**TAXI_COLUMNS, **(columns or {})}
        bbox = bbox or NYC_BBOX
        wanted_dates = set(dates)
        first_hour, last_hour = hour_range
        if not 0 <= first_hour < last_hour <= 24:
            raise ValueError(f"invalid hour range {hour_range}")

        try:
            header = [c.strip() for c in pd.read_csv(path, nrows=0).columns]
        except (pd.errors.EmptyDataError, pd.errors.ParserError, UnicodeDecodeError) as exc:
            raise IngestError(f"unreadable header in {path}: {exc}") from exc
        missing = [name for name in columns.values() if name not in header]
        if missing:
            raise IngestError(f"malformed header, missing columns: {', '.join(missing)}")

        drops: Counter = Counter()
        malformed: list[list[str]] = []
        kept: list[pd.DataFrame] = []
        total = 0

        def _bad_line(fields: list[str]) -> None:
            # Returning None skips the line.
            malformed.append(fields)

        reader = pd.read_csv(
            path,
            dtype=str,
            engine="python",
            on_bad_lines=_bad_line,
            skipinitialspace=True,
            chunksize=CHUNK_ROWS,
        )
        for chunk in reader:
            chunk.columns = [c.strip() for c in chunk.columns]
            total += len(chunk)

            picked_at = pd.to_datetime(chunk[columns["pickup_datetime"]], format=DATETIME_FORMAT, errors="coerce")
            coords = {
                key: pd.to_numeric(chunk[columns[key]], errors="coerce")
                for key in ("pickup_latitude", "pickup_longitude", "dropoff_latitude", "dropoff_longitude")
            }

            parsed = picked_at.notna()
            for values in coords.values():
                parsed &= values.notna()
            in_dates = parsed & picked_at.dt.date.isin(wanted_dates)
            in_hours = in_dates & (picked_at.dt.hour >= first_hour) & (picked_at.dt.hour < last_hour)
            in_box = in_hours & _in_box(coords["pickup_latitude"], coords["pickup_longitude"], bbox) \
                & _in_box(coords["dropoff_latitude"], coords["dropoff_longitude"], bbox)

            drops[DropReason.UNPARSABLE] += int((~parsed).sum())
            drops[DropReason.DATE] += int((parsed & ~in_dates).sum())
            drops[DropReason.HOUR] += int((in_dates & ~in_hours).sum())
            drops[DropReason.BBOX] += int((in_hours & ~in_box).sum())

            kept.append(pd.DataFrame({
                "picked_at": picked_at[in_box],
                **{key: values[in_box] for key, values in coords.items()},
            }))

        drops[DropReason.MALFORMED] += len(malformed)
        total += len(malformed)

        result = TaxiIngestResult(
            drops={reason: count for reason, count in drops.items() if count},
            total_rows=total,
        )
        frame = pd.concat(kept, ignore_index=True) if kept else pd.DataFrame()

        for night in sorted(wanted_dates):
            if frame.empty:
                result.nights[night] = []
                result.hourly[night] = [0] * (last_hour - first_hour)
                continue

            night_start = pd.Timestamp(datetime.combine(night, datetime.min.time())) + pd.Timedelta(hours=first_hour)
            rows = frame[frame["picked_at"].dt.date == night]
            rows = rows.assign(seconds=(rows["picked_at"] - night_start).dt.total_seconds())
            rows = rows.sort_values("seconds", kind="stable")

            ids = IdSource()
            requests = [
                RequestService.new_request(
                    pickup=Location(x=row.pickup_latitude, y=row.pickup_longitude, space=MetricSpace.GEOGRAPHIC),
                    dropoff=Location(x=row.dropoff_latitude, y=row.dropoff_longitude, space=MetricSpace.GEOGRAPHIC),
                    registered_at=float(row.seconds),
                    id_source=ids,
                    delta=delta,
                    variant=CostVariant.PICKUP_DROPOFF,
                    space=MetricSpace.GEOGRAPHIC,
                )
                for row in rows.itertuples(index=False)
            ]
            result.nights[night] = requests

            hours = (rows["seconds"] // 3600).astype(int)
            counts = hours.value_counts()
            result.hourly[night] = [int(counts.get(h, 0)) for h in range(last_hour - first_hour)]

        logger.info(kv(
            file=path.name,
            rows=result.total_rows,
            retained=result.retained,
            dropped=result.dropped,
            **{f"drop_{reason}": count for reason, count in result.drops.items()},
        ))
        return result

    @staticmethod
    def make_taxi_fleet(
        n: int,
        rng: np.random.Generator,
        bbox: Optional[dict] = None,
        velocity: float = TAXI_VELOCITY_MPS,
    ) -> list[Agent]:
        """`n` taxis placed uniformly at random in the box, unbounded travel budget."""
        if n < 1:
            raise ValueError("fleet size must be >= 1")
        bbox = bbox or NYC_BBOX
        lats = rng.uniform(bbox["min_lat"], bbox["max_lat"], size=n)
        lons = rng.uniform(bbox["min_lon"], bbox["max_lon"], size=n)
        return [
            Agent(
                id=i,
                position=Location(x=lat, y=lon, space=MetricSpace.GEOGRAPHIC),
                velocity=velocity,
                travel_budget=None,
            )
            for i, (lat, lon) in enumerate(zip(lats.tolist(), lons.tolist()))
        ]

    @staticmethod
    def night_scenario(requests: list[Request], fleet: list[Agent]) -> Scenario:
        return Scenario(
            space=MetricSpace.GEOGRAPHIC,
            variant=CostVariant.PICKUP_DROPOFF,
            agents=fleet,
            requests=requests,
        )
