"""Application configuration settings."""

from pathlib import Path

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    model_config = SettingsConfigDict(env_file=".env", env_file_encoding="utf-8", case_sensitive=False, extra="ignore")

    # Database
    database_url: str = "sqlite:///./lte_mlb.db"
    db_echo: bool = False

    # Simulation outputs
    output_dir: str = "results"
    matrix_workers: int = 1
    default_seed_count: int = 5

    # Application
    app_name: str = "LTE Mobility Load Balancing Simulator"
    debug: bool = False
    log_level: str = "INFO"

    @property
    def output_path(self) -> Path:
        """Output directory as a Path."""
        return Path(self.output_dir)


# Global settings instance
settings = Settings()
