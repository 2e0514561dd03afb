import argparse

from app.core.exceptions import ConfigError
from app.db.session import SessionLocal, init_db
from app.services.ledger_service import LedgerService


def register(subparsers) -> None:
    parser = subparsers.add_parser("history", help="list runs recorded in the ledger")
    parser.add_argument("--kind", choices=["run", "sweep", "taxi"], default=None)
    parser.add_argument("--limit", type=int, default=20)
    parser.add_argument("--offset", type=int, default=0)
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    if args.limit < 1 or args.offset < 0:
        raise ConfigError("--limit must be >= 1 and --offset >= 0")

    init_db()
    db = SessionLocal()
    try:
        runs = LedgerService.list_runs(db, kind=args.kind, limit=args.limit, offset=args.offset)
        if not runs:
            print("no runs recorded")
        for run in runs:
            created = run.created_at.strftime("%Y-%m-%d %H:%M:%S") if run.created_at else "-"
            print(
                f"{created}  {run.kind:<5} {run.label or '-':<32} "
                f"dist={run.total_distance_m:.1f} idle={run.total_idle_s:.1f} "
                f"assigned={run.percent_assigned:.2f}%  {run.id}"
            )
    finally:
        db.close()
    return 0
