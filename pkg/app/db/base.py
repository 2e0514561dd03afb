from sqlalchemy.orm import DeclarativeBase


class Base(DeclarativeBase):
    """Metadata root for the run ledger tables."""
