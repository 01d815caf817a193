from datetime import datetime, timezone

from sqlalchemy import Column, DateTime, Integer, String, Text

from .base import Base


def _utcnow() -> datetime:
    return datetime.now(timezone.utc)


class RunRecord(Base):
    """One archived CLI invocation"""
    __tablename__ = 'runs'

    id = Column(Integer, primary_key=True)
    command = Column(String(255), nullable=False)
    config_json = Column(Text)  # job configuration as given, or null
    output = Column(Text)
    exit_code = Column(Integer, nullable=False, default=0)
    created_at = Column(DateTime, default=_utcnow)

    def to_dict(self):
        return {
            "id": self.id,
            "command": self.command,
            "config_json": self.config_json,
            "output": self.output,
            "exit_code": self.exit_code,
            "created_at": self.created_at.isoformat() if self.created_at else None,
        }

    def __repr__(self):
        return f"<RunRecord(id={self.id}, command='{self.command}', exit_code={self.exit_code})>"
