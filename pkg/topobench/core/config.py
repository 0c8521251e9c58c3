"""
Configuration management for topobench.

This module handles tool-wide settings through Pydantic BaseSettings
(environment variables and .env) and per-run configuration loaded from
JSON profiles with command-line overrides.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from core.exceptions import FilterConfigError
from models.schemas import (
    BaselineName,
    CliqueGenParams,
    FilterConfig,
    GraphletConfig,
    LogRegHyper,
    TaskName,
    TriangleGenParams,
    WLConfig,
)


# Load environment variables from .env file
load_dotenv()

logger = logging.getLogger(__name__)


class Settings(BaseSettings):
    """
    Tool settings with environment variable support.

    All settings can be overridden via TOPOBENCH_-prefixed environment variables.
    """
    model_config = SettingsConfigDict(
        env_prefix="TOPOBENCH_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=True,
        extra="ignore",
    )

    APP_NAME: str = Field(default="topobench", description="Tool name")
    VERSION: str = Field(default="1.0.0", description="Tool version recorded in manifests")
    LOG_LEVEL: str = Field(default="INFO", description="Logging level")

    DEFAULT_SEED: int = Field(default=7, description="Master seed when none is given")
    WORKERS: int = Field(default=1, ge=1, description="Worker processes for candidate generation")
    OUTPUT_DIR: str = Field(default="runs/desk", description="Default output directory")
    PROFILE_DIR: str = Field(default="profiles", description="Directory of shipped run profiles")


class RunConfig(BaseModel):
    """
    Configuration of one benchmark run.

    Parsable from a JSON profile and from command-line flags; flags override
    the file. Nested generator, filter and baseline sections keep their own
    validation.
    """
    task: TaskName = Field(TaskName.TRIANGLES, description="Benchmark task")
    seed: int = Field(7, description="Master seed")
    candidates: int = Field(20000, ge=2, description="Candidate pool size")
    out: str = Field("runs/desk", description="Output directory")
    workers: int = Field(1, ge=1, description="Generation worker processes")
    baseline: BaselineName = Field(BaselineName.UNDERMANNED, description="Baseline featurizer")

    triangles: TriangleGenParams = Field(default_factory=TriangleGenParams)
    clique: CliqueGenParams = Field(default_factory=CliqueGenParams)
    filter: FilterConfig = Field(default_factory=FilterConfig)
    logreg: LogRegHyper = Field(default_factory=LogRegHyper)
    wl: WLConfig = Field(default_factory=WLConfig)
    graphlets: GraphletConfig = Field(default_factory=GraphletConfig)

    @model_validator(mode="after")
    def validate_sizes(self) -> "RunConfig":
        """Filtered splits must fit in the candidate pool."""
        if self.filter.train_size + self.filter.test_size > self.candidates:
            raise ValueError("train_size + test_size exceed the candidate count")
        if self.candidates % 2:
            raise ValueError("candidates must be even for a balanced pool")
        return self

    @property
    def out_dir(self) -> Path:
        return Path(self.out)

    def generator_params(self) -> BaseModel:
        """Generator parameters of the selected task."""
        return self.triangles if self.task == TaskName.TRIANGLES else self.clique


# Flat flag name -> path inside RunConfig
FLAG_PATHS: Dict[str, tuple] = {
    "task": ("task",),
    "seed": ("seed",),
    "candidates": ("candidates",),
    "out": ("out",),
    "workers": ("workers",),
    "baseline": ("baseline",),
    "train_size": ("filter", "train_size"),
    "test_size": ("filter", "test_size"),
    "folds": ("filter", "folds"),
    "train_folds": ("filter", "train_folds"),
    "threshold": ("clique", "distance_threshold"),
    "clique_size": ("clique", "clique_size"),
    "wl_iterations": ("wl", "iterations"),
    "samples": ("graphlets", "samples"),
    "graphlet_size": ("graphlets", "size"),
}


def _apply_override(data: Dict[str, Any], path: tuple, value: Any) -> None:
    target = data
    for key in path[:-1]:
        target = target.setdefault(key, {})
    target[path[-1]] = value


def load_run_config(config_file: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """
    Build a RunConfig from an optional JSON profile and flag overrides.

    Args:
        config_file: Path of a JSON profile, or None for defaults
        overrides: Flat flag values; None values are ignored

    Returns:
        Validated RunConfig

    Raises:
        FilterConfigError: If the file is unreadable or the result is invalid
    """
    data: Dict[str, Any] = {"seed": settings.DEFAULT_SEED, "out": settings.OUTPUT_DIR, "workers": settings.WORKERS}
    if config_file:
        try:
            data.update(json.loads(Path(config_file).read_text(encoding="utf-8")))
        except (OSError, json.JSONDecodeError) as e:
            logger.error(f"Failed to read config file {config_file}: {e}")
            raise FilterConfigError(
                message=f"Cannot read config file {config_file}: {e}",
                details={"config_file": config_file},
            )
        # ba_m is derived from clique_size; a profile value would go stale under --clique-size
        if overrides and overrides.get("clique_size") is not None:
            data.get("clique", {}).pop("ba_m", None)

    for name, value in (overrides or {}).items():
        if value is None or name not in FLAG_PATHS:
            continue
        _apply_override(data, FLAG_PATHS[name], value)

    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        field_errors = {
            ".".join(str(part) for part in err["loc"]) or "run": err["msg"] for err in e.errors()
        }
        raise FilterConfigError(
            message="Invalid run configuration",
            field_errors=field_errors,
        )


# Global settings instance
settings = Settings()
