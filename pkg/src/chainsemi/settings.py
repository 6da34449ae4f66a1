"""Runtime configuration, read from ``CHAINSEMI_*`` environment variables."""

import os
from typing import Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


def _default_workers() -> int:
    return os.cpu_count() or 1


class ChainsemiSettings(BaseSettings):
    """Limits and parallelism used by the enumeration and closure engines."""

    model_config = SettingsConfigDict(env_prefix="CHAINSEMI_")

    cap: int = Field(8, ge=1, description="Largest n that may be enumerated")
    element_cap: int = Field(
        2_000_000, ge=1, description="Largest semigroup a closure may build"
    )
    table_limit: int = Field(
        10_000, ge=1, description="Largest set given a full product table"
    )
    chunk_cells: int = Field(
        4_000_000, ge=1, description="Products computed per vectorised block"
    )
    workers: int = Field(default_factory=_default_workers, ge=1)


def get_settings(**overrides) -> ChainsemiSettings:
    """Read settings from the environment, applying any explicit overrides.

    Overrides that are ``None`` are ignored, so CLI options can be passed
    straight through.
    """
    return ChainsemiSettings(**{k: v for k, v in overrides.items() if v is not None})


def resolve(settings: Optional[ChainsemiSettings]) -> ChainsemiSettings:
    return settings if settings is not None else get_settings()
