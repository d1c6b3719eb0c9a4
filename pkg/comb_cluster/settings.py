"""Pydantic-based runtime settings.

Reads ``COMB_CLUSTER_*`` environment variables (and optionally a ``.env`` file). These
are process-level knobs: numerical tolerances, dense-oracle limits, sampling layout and
logging. Per-run physics lives in :class:`comb_cluster.adapters.config_loader.PipelineConfig`.
"""
from __future__ import annotations

from functools import lru_cache

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Centralised configuration loaded from environment variables."""

    # ---------------------------------------------------------------------
    # Dense oracles
    # ---------------------------------------------------------------------
    DENSE_MODE_LIMIT: int = Field(
        default=512, ge=2, validation_alias="COMB_CLUSTER_DENSE_MODE_LIMIT"
    )

    # ---------------------------------------------------------------------
    # Tolerances
    # ---------------------------------------------------------------------
    REL_THRESHOLD: float = Field(
        default=1e-6, gt=0.0, lt=1.0, validation_alias="COMB_CLUSTER_REL_THRESHOLD"
    )
    NULLIFIER_TOLERANCE: float = Field(
        default=1e-10, gt=0.0, validation_alias="COMB_CLUSTER_NULLIFIER_TOLERANCE"
    )
    PURITY_TOLERANCE: float = Field(
        default=1e-9, gt=0.0, validation_alias="COMB_CLUSTER_PURITY_TOLERANCE"
    )
    ORACLE_TOLERANCE: float = Field(
        default=1e-12, gt=0.0, validation_alias="COMB_CLUSTER_ORACLE_TOLERANCE"
    )
    ORTHOGONALITY_TOLERANCE: float = Field(
        default=1e-14, gt=0.0, validation_alias="COMB_CLUSTER_ORTHOGONALITY_TOLERANCE"
    )
    MC_Z_LIMIT: float = Field(default=5.0, gt=0.0, validation_alias="COMB_CLUSTER_MC_Z_LIMIT")

    # ---------------------------------------------------------------------
    # Sampling
    # ---------------------------------------------------------------------
    SAMPLE_CHUNK: int = Field(default=4096, ge=1, validation_alias="COMB_CLUSTER_SAMPLE_CHUNK")
    SAMPLE_WORKERS: int = Field(default=1, ge=1, validation_alias="COMB_CLUSTER_SAMPLE_WORKERS")

    # ---------------------------------------------------------------------
    # Logging
    # ---------------------------------------------------------------------
    JSON_LOGS: bool = Field(default=False, validation_alias="COMB_CLUSTER_JSON_LOGS")
    LOG_LEVEL: str = Field(default="INFO", validation_alias="COMB_CLUSTER_LOG_LEVEL")

    model_config = SettingsConfigDict(
        env_file=".env", case_sensitive=False, extra="ignore", populate_by_name=True
    )


@lru_cache()
def get_settings() -> "Settings":  # noqa: D401
    """Return a **cached** Settings instance (Singleton)."""

    return Settings()
