"""
Process-level settings read from the environment (and a local ``.env`` file).
"""
import os
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field, field_validator

load_dotenv(override=False)

ENV_PREFIX = "KMEIS_"
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class Settings(BaseModel):
    precision_digits: int = Field(30, ge=10, description="Working decimal digits for special functions")
    tits_cap: int = Field(10000, ge=1, description="Step cap for Tits-cone reduction")
    string_cap: int = Field(64, ge=1, description="Step cap for root-string walks")
    threads: int = Field(1, ge=1, description="Worker threads for shell-parallel work")
    log_level: str = Field("WARNING", description="Root logging level")
    database_url: Optional[str] = Field(None, description="SQLAlchemy URL of the run archive")

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, value: str) -> str:
        level = value.upper()
        if level not in LOG_LEVELS:
            raise ValueError(f"log level must be one of {', '.join(LOG_LEVELS)}")
        return level

    @classmethod
    def from_env(cls) -> "Settings":
        """Collect every ``KMEIS_*`` variable that is set; unset ones keep defaults."""
        values = {}
        for name in cls.model_fields:
            raw = os.environ.get(ENV_PREFIX + name.upper())
            if raw not in (None, ""):
                values[name] = raw
        return cls(**values)
