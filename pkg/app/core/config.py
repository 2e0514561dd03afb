import os
from pathlib import Path

from dotenv import load_dotenv

BASE_DIR = Path(__file__).resolve().parents[2]

load_dotenv(BASE_DIR / ".env")

RESULTS_DIR = Path(os.getenv("HDISPATCH_RESULTS_DIR", str(BASE_DIR / "results")))

LEDGER_PATH = RESULTS_DIR / "ledger.db"
DATABASE_URL = os.getenv("HDISPATCH_DATABASE_URL", f"sqlite:///{LEDGER_PATH}")

# Set HDISPATCH_LEDGER=0 to skip recording runs in the ledger database.
LEDGER_ENABLED = os.getenv("HDISPATCH_LEDGER", "1").strip().lower() not in {"0", "false", "no", "off"}

LOG_LEVEL = os.getenv("HDISPATCH_LOG_LEVEL", "INFO").upper()

FIXTURES_DIR = BASE_DIR / "tests" / "fixtures"
TAXI_FIXTURE_PATH = FIXTURES_DIR / "taxi_trips_2013_sample.csv"

# Published 2013 trip-data schema; headers in the raw files carry stray spaces.
TAXI_COLUMNS = {
    "pickup_datetime": os.getenv("HDISPATCH_COL_PICKUP_DATETIME", "pickup_datetime"),
    "pickup_latitude": os.getenv("HDISPATCH_COL_PICKUP_LAT", "pickup_latitude"),
    "pickup_longitude": os.getenv("HDISPATCH_COL_PICKUP_LON", "pickup_longitude"),
    "dropoff_latitude": os.getenv("HDISPATCH_COL_DROPOFF_LAT", "dropoff_latitude"),
    "dropoff_longitude": os.getenv("HDISPATCH_COL_DROPOFF_LON", "dropoff_longitude"),
}

# New York bounding box used for record filtering and fleet placement.
NYC_BBOX = {
    "min_lat": 40.4,
    "max_lat": 41.1,
    "min_lon": -74.3,
    "max_lon": -73.6,
}

EARTH_RADIUS_M = 6_371_000.0

# 30 mph, the New York speed limit.
TAXI_VELOCITY_MPS = 30 * 1609.344 / 3600
TAXI_DELTA_S = 300.0
