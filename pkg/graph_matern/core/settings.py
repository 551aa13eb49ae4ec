import os

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    # Application
    APP_NAME: str = "graph-matern"
    DEBUG: bool = False
    LOG_LEVEL: str | None = None

    # Parallelism for replicate/fold/multi-start loops
    NUM_THREADS: int = Field(default=1, ge=1)

    # Resource guards for the dense reference paths
    DENSE_MAX_DOFS: int = Field(default=500, ge=1)
    FD_MAX_NODES: int = Field(default=5000, ge=1)

    # Numerics
    COINCIDENCE_RTOL: float = Field(default=1e-12, gt=0)
    BRIDGE_JITTER: float = Field(default=1e-12, gt=0)
    RANK_TOL: float = Field(default=1e-10, gt=0)

    # Optimizer
    MLE_STARTS: int = Field(default=3, ge=1)
    MLE_FATOL: float = Field(default=1e-8, gt=0)
    MLE_XATOL: float = Field(default=1e-8, gt=0)
    MLE_MAXITER: int = Field(default=2000, ge=1)

    # Output
    CSV_DIGITS: int = Field(default=17, ge=1, le=17)
    SUMMARY_DIGITS: int = Field(default=6, ge=1, le=17)

    model_config = SettingsConfigDict(
        env_prefix="GRAPH_MATERN_",
        env_file=".env.test" if os.getenv("TESTING") else ".env",
        env_file_encoding="utf-8",
        case_sensitive=True,
        extra="ignore",
    )

    ENVIRONMENT: str = Field(
        default="development",
        description="Application environment (development, testing, production)",
    )

    @property
    def is_production(self) -> bool:
        """Check if running in production environment."""
        return self.ENVIRONMENT.lower() == "production"

    @property
    def is_development(self) -> bool:
        """Check if running in development environment."""
        return self.ENVIRONMENT.lower() == "development"

    @property
    def is_testing(self) -> bool:
        """Check if running in testing environment."""
        return self.ENVIRONMENT.lower() == "testing"


settings = Settings()
