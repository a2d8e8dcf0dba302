"""Configuration management for OpenGov-LieSphere."""

from contextlib import contextmanager
from functools import lru_cache
from typing import Any, Dict, Iterator

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Numerical defaults and runtime settings."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="LIESPHERE_",
        case_sensitive=False,
        extra="ignore",
    )

    # Residual tolerances
    quadric_tol: float = Field(default=1e-8)
    rank_tol: float = Field(default=1e-6)
    cluster_tol: float = Field(default=1e-4)
    normal_tol: float = Field(default=1e-6)

    # Finite differences
    fd_step_fraction: float = Field(default=1e-4)
    richardson: bool = Field(default=True)

    # Dupin verification
    dupin_yes_tol: float = Field(default=1e-5)
    dupin_no_tol: float = Field(default=1e-3)
    leaf_length: float = Field(default=1.0)
    leaf_step: float = Field(default=0.05)
    leaf_seeds: int = Field(default=3)

    # Isoparametric criterion
    witness_tol: float = Field(default=1e-6)
    witness_margin: float = Field(default=1e-6)

    # Randomness
    seed: int = Field(default=0)

    # Logging
    log_level: str = Field(default="WARNING")
    log_format: str = Field(default="json")

    # Reports
    report_schema: str = Field(default="1")

    @field_validator(
        "quadric_tol",
        "rank_tol",
        "cluster_tol",
        "normal_tol",
        "fd_step_fraction",
        "dupin_yes_tol",
        "dupin_no_tol",
        "leaf_length",
        "leaf_step",
        "witness_tol",
        "witness_margin",
    )
    @classmethod
    def positive(cls, v: float) -> float:
        """Tolerances and lengths must be strictly positive."""
        if v <= 0:
            raise ValueError("must be positive")
        return v

    @field_validator("log_format")
    @classmethod
    def known_format(cls, v: str) -> str:
        """Only the json and console renderers exist."""
        v = v.lower()
        if v not in ("json", "console"):
            raise ValueError("log_format must be 'json' or 'console'")
        return v


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()


settings = get_settings()


@contextmanager
def overridden(data: Dict[str, Any]) -> Iterator[Settings]:
    """Temporarily replace settings values (validated as a whole) on the shared instance."""
    changes = {k.replace("-", "_"): v for k, v in data.items()}
    unknown = sorted(set(changes) - set(Settings.model_fields))
    if unknown:
        raise ValueError(f"unknown settings: {', '.join(unknown)}")
    current = settings.model_dump()
    validated = Settings.model_validate({**current, **changes})
    for key in changes:
        setattr(settings, key, getattr(validated, key))
    try:
        yield settings
    finally:
        for key, value in current.items():
            setattr(settings, key, value)
