import logging
import sys
from typing import Optional, Sequence

from app.cli.router import build_parser
from app.core.logging_config import configure_logging

logger = logging.getLogger(__name__)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level)

    try:
        return args.handler(args)
    except ValueError as exc:
        # DispatchError and pydantic's ValidationError are both ValueErrors.
        logger.debug("command failed", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return 2
