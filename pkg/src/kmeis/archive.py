"""
Optional SQLite/SQL archive of CLI runs.
"""
import logging
from typing import Dict, List, Optional

from sqlalchemy import create_engine
from sqlalchemy.exc import SQLAlchemyError
from sqlalchemy.orm import sessionmaker

from kmeis.models import Base, RunRecord

logger = logging.getLogger(__name__)


class RunArchive:
    """Stores one RunRecord per command through a SQLAlchemy session."""

    def __init__(self, database_url: str):
        """
        Args:
            database_url: SQLAlchemy URL, e.g. ``sqlite:///kmeis_runs.db``
        """
        self.engine = create_engine(database_url, echo=False)
        Base.metadata.create_all(self.engine)
        Session = sessionmaker(bind=self.engine)
        self.session = Session()
        logger.debug("run archive at %s", database_url)

    def record(self, command: str, config_json: Optional[str], output: str, exit_code: int) -> Optional[int]:
        """Insert a run; failures are logged and never propagate to the caller."""
        try:
            run = RunRecord(command=command, config_json=config_json, output=output, exit_code=exit_code)
            self.session.add(run)
            self.session.commit()
            return run.id
        except SQLAlchemyError as e:
            logger.error("could not archive run %r: %s", command, e)
            self.session.rollback()
            return None

    def recent(self, limit: int = 20) -> List[Dict]:
        runs = (
            self.session.query(RunRecord)
            .order_by(RunRecord.id.desc())
            .limit(limit)
            .all()
        )
        return [run.to_dict() for run in runs]

    def close(self) -> None:
        self.session.close()
        self.engine.dispose()
