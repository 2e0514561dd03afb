"""Regenerate the 1000-row taxi trip fixture used by the ingestion tests.

Rows follow the 2013 trip-data layout. Every 50-row block plants one row per
drop reason (unparsable time, empty dropoff longitude, wrong day, wrong hour,
pickup outside the box) and four rows carry an extra field, so the expected
counts are known by construction:

    rows=1000 malformed=4 unparsable=40 date=20 hour=20 bbox=20 retained=896
"""

import argparse
import sys
from pathlib import Path

_ROOT = Path(__file__).resolve().parents[1]
if str(_ROOT) not in sys.path:
    sys.path.insert(0, str(_ROOT))

from app.core.config import TAXI_FIXTURE_PATH

HEADER = (
    "medallion, hack_license, vendor_id, rate_code, store_and_fwd_flag, pickup_datetime, "
    "dropoff_datetime, passenger_count, trip_time_in_secs, trip_distance, pickup_longitude, "
    "pickup_latitude, dropoff_longitude, dropoff_latitude"
)
MALFORMED_ROWS = {99, 349, 599, 849}


def _row(i: int) -> str:
    r = i % 50
    day, hour, minute, second = 7 + i % 3, i % 7, (i * 13) % 60, (i * 29) % 60
    if i == 3:
        hour, minute, second = 1, 30, 0

    plat = f"{40.70 + ((i * 37) % 300) / 1000:.6f}"
    plon = f"{-74.02 + ((i * 53) % 250) / 1000:.6f}"
    dlat = f"{40.65 + ((i * 71) % 300) / 1000:.6f}"
    dlon = f"{-74.05 + ((i * 17) % 300) / 1000:.6f}"
    if r == 21:
        day = 12
    if r == 33:
        hour = 9
    if r == 13:
        plat = "0.0"
    if r == 41:
        dlon = ""

    pick = f"2013-01-{day:02d} {hour:02d}:{minute:02d}:{second:02d}"
    if r == 7:
        pick = "not-a-date"
    drop = f"2013-01-{day:02d} {hour:02d}:{(minute + 9) % 60:02d}:{second:02d}"

    fields = [
        f"{i * 2654435761 % 4294967296:032X}",
        f"{i * 40503 % 65536:032X}",
        "VTS",
        "1",
        "",
        pick,
        drop,
        str(1 + i % 4),
        str(300 + (i * 7) % 1200),
        f"{0.5 + (i % 40) / 10:.2f}",
        plon,
        plat,
        dlon,
        dlat,
    ]
    if i in MALFORMED_ROWS:
        fields.append("EXTRA")
    return ",".join(fields)


def main() -> None:
    parser = argparse.ArgumentParser(description="Write the synthetic NYC taxi trip fixture.")
    parser.add_argument("--output", type=Path, default=TAXI_FIXTURE_PATH)
    parser.add_argument("--rows", type=int, default=1000)
    args = parser.parse_args()

    if args.rows < 1:
        raise SystemExit("--rows must be >= 1")

    args.output.parent.mkdir(parents=True, exist_ok=True)
    lines = [HEADER, *(_row(i) for i in range(args.rows))]
    args.output.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"Wrote {args.rows} rows to {args.output}")


if __name__ == "__main__":
    main()
