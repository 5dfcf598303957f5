"""Configuration models and loader for the bilinear games package."""

from pathlib import Path
from typing import Literal

import yaml
from pydantic import BaseModel, Field, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class SolverConfig(BaseModel):
    """Automatic algorithm routing."""

    lowrank_threshold: int = Field(
        default=6,
        ge=0,
        description="Route to low-rank when min(rank A, rank B) + k1 + k2 is at most this",
    )
    oracle_auto_limit: int = Field(
        default=16,
        ge=1,
        description="Largest M + N + k1 + k2 the automatic route hands to the oracle",
    )
    jobs: int = Field(default=1, ge=1, description="Worker processes for grid/enumeration")


class OracleConfig(BaseModel):
    """Brute-force oracle limits."""

    max_constraints: int = Field(
        default=24, ge=1, description="Refuse games with M + N + k1 + k2 above this"
    )
    max_support_dim: int = Field(default=6, ge=1, description="Support enumeration limit per side")


class FptasConfig(BaseModel):
    """Grid scheme settings."""

    box_duals: bool = Field(default=True, description="Bound p, q by +-l!Z^l in absolute-scheme cells")
    max_cells: int = Field(default=200_000, ge=1, description="Refuse grids larger than this")


class Rank1Config(BaseModel):
    """Binary search settings."""

    strict: bool = Field(
        default=False,
        description="Raise DegenerateGame instead of falling back to low-rank enumeration",
    )


class LoggingConfig(BaseModel):
    """Logging defaults."""

    level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = Field(default="WARNING")
    rich_tracebacks: bool = Field(default=False)


class ProjectConfig(BaseModel):
    """Complete project configuration loaded from YAML."""

    solver: SolverConfig = Field(default_factory=SolverConfig)
    oracle: OracleConfig = Field(default_factory=OracleConfig)
    fptas: FptasConfig = Field(default_factory=FptasConfig)
    rank1: Rank1Config = Field(default_factory=Rank1Config)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)

    @model_validator(mode="after")
    def check_oracle_limits(self) -> "ProjectConfig":
        """The automatic oracle route must fit under the oracle's own guard."""
        if self.solver.oracle_auto_limit > self.oracle.max_constraints:
            raise ValueError(
                f"solver.oracle_auto_limit ({self.solver.oracle_auto_limit}) exceeds "
                f"oracle.max_constraints ({self.oracle.max_constraints})"
            )
        return self


class Settings(BaseSettings):
    """Environment overrides (BILINEAR_* variables or a .env file)."""

    model_config = SettingsConfigDict(
        env_prefix="BILINEAR_", env_file=".env", env_file_encoding="utf-8", extra="ignore"
    )

    config_path: Path | None = Field(default=None, description="Alternative config.yaml")
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] | None = Field(default=None)
    jobs: int | None = Field(default=None, ge=1)


def load_config(config_path: Path | str | None = None) -> ProjectConfig:
    """Load project configuration from YAML file.

    Args:
        config_path: Path to config.yaml. If None, looks in project root.

    Returns:
        ProjectConfig instance with all settings loaded.
    """
    if config_path is None:
        config_path = Path(__file__).parent.parent.parent.parent / "config.yaml"
    else:
        config_path = Path(config_path)

    if not config_path.exists():
        raise FileNotFoundError(f"Config file not found: {config_path}")

    with open(config_path) as f:
        config_data = yaml.safe_load(f) or {}

    return ProjectConfig(**config_data)


def load_settings() -> Settings:
    """Load environment settings (BILINEAR_* variables, .env file)."""
    return Settings()


_config: ProjectConfig | None = None
_settings: Settings | None = None


def get_config() -> ProjectConfig:
    """Get or create the project config singleton.

    Falls back to built-in defaults when no config.yaml is installed alongside
    the package (e.g. a wheel install).
    """
    global _config
    if _config is None:
        settings = get_settings()
        try:
            _config = load_config(settings.config_path)
        except FileNotFoundError:
            if settings.config_path is not None:
                raise
            _config = ProjectConfig()
        if settings.jobs is not None:
            _config.solver.jobs = settings.jobs
        if settings.log_level is not None:
            _config.logging.level = settings.log_level
    return _config


def get_settings() -> Settings:
    """Get or create the settings singleton."""
    global _settings
    if _settings is None:
        _settings = load_settings()
    return _settings


def set_config(config: ProjectConfig | None) -> None:
    """Replace (or with None, reset) the config singleton."""
    global _config
    _config = config
