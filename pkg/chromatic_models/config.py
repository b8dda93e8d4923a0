"""
Runtime settings read from the environment (and a local .env file)
"""

import os
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, field_validator

load_dotenv()

ENV_PREFIX = "CHROMATIC_MODELS_"


class Settings(BaseModel):
    model_config = ConfigDict(frozen=True)

    log_level: str = "WARNING"
    db_url: Optional[str] = None
    orbit_cap: int = Field(default=10_000, gt=0)
    max_bits: int = Field(default=4096, gt=0)
    chi_size_limit: int = Field(default=20, ge=0)
    # unset: each class descriptor picks its own completion probability
    completion: Optional[str] = None

    @field_validator("log_level")
    @classmethod
    def _upper_level(cls, value: str) -> str:
        return value.upper()

    @field_validator("completion")
    @classmethod
    def _probability(cls, value: Optional[str]) -> Optional[str]:
        if value is None:
            return None
        try:
            p = Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"bad completion probability {value!r}") from exc
        if not 0 <= p <= 1:
            raise ValueError(f"completion probability {value} outside [0, 1]")
        return value

    @property
    def completion_probability(self) -> Optional[Fraction]:
        return None if self.completion is None else Fraction(self.completion)


def _env(name: str) -> Optional[str]:
    value = os.getenv(ENV_PREFIX + name)
    return value if value not in (None, "") else None


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Build the settings once per process (tests clear the cache)."""
    raw = {
        "log_level": _env("LOG_LEVEL"),
        "db_url": _env("DB_URL"),
        "orbit_cap": _env("ORBIT_CAP"),
        "max_bits": _env("MAX_BITS"),
        "chi_size_limit": _env("CHI_SIZE_LIMIT"),
        "completion": _env("COMPLETION"),
    }
    return Settings(**{k: v for k, v in raw.items() if v is not None})
