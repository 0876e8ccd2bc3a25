from pathlib import Path
from typing import Literal

from pydantic_settings import BaseSettings, SettingsConfigDict

# Application version - single source of truth
APP_VERSION = "0.1.0"


class Settings(BaseSettings):
    app_name: str = "treeopt"
    debug: bool = False

    # Logging
    log_level: str = "WARNING"  # Override with TREEOPT_LOG_LEVEL or --log-level
    log_to_file: bool = False
    log_dir: Path = Path.cwd() / "logs"

    # Solver defaults
    oracle_limit: int = 24  # largest n the brute-force oracle will enumerate
    block_strategy: Literal["exhaustive", "implicit", "implicit-reuse"] = "exhaustive"

    # Batch comparison
    compare_workers: int = 1

    # Environment only, the CLI reads no configuration file
    model_config = SettingsConfigDict(env_prefix="TREEOPT_")


settings = Settings()
