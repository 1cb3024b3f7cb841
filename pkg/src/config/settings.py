"""Configuration module for the perspective-shift toolkit.

This module defines the application settings using Pydantic Settings,
loading defaults from environment variables. Nothing is required: every
value has a default and every CLI flag overrides the matching setting.
"""

from typing import Literal

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings loaded from environment variables (prefix TDKPS_)."""

    # Test defaults
    default_permutations: int = Field(
        default=1000, description="Permutation count B when not given", ge=1
    )
    alpha: float = Field(
        default=0.05, description="Significance level for rejections", gt=0.0, lt=1.0
    )
    dim_request: str = Field(
        default="auto",
        description="Embedding dimension: a positive integer or 'auto'",
        pattern=r"^(auto|[1-9][0-9]*)$",
    )

    # Execution
    threads: int = Field(default=1, description="Worker count for loops", ge=1)

    # Logging Settings
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"] = Field(
        default="INFO", description="Logging level"
    )
    log_format: Literal["json", "text"] = Field(
        default="text", description="Logging format (json for pipelines, text for desks)"
    )

    model_config = SettingsConfigDict(
        env_prefix="TDKPS_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )
