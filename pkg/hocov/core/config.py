"""
Library configuration management using Pydantic settings.
"""

from typing import Optional
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Library settings with environment variable support."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="HOCOV_",
        case_sensitive=True,
        extra="ignore"
    )

    # Application Settings
    APP_NAME: str = "hocov"

    # Special functions
    BESSEL_SMALL_ARG: float = Field(
        default=1e-6,
        description="Below this |x| the spherical Bessel leading term is returned"
    )
    BESSEL_MAX_TERMS: int = Field(
        default=200,
        description="Term cap for the spherical Bessel power series"
    )
    BESSEL_SERIES_TOL: float = Field(
        default=1e-17,
        description="Relative term tolerance of the double-precision series path"
    )

    # Kernels and covariance families
    LAG_ZERO_THRESHOLD: float = Field(
        default=1e-6,
        description="Lags below this use the analytic h -> 0 limit"
    )
    KERNEL_MAX_R: int = 8
    KERNEL_MAX_S: int = 32
    GAUSSIAN_TRUNCATION: float = Field(
        default=12.0,
        description="Half-width of the integration window for Gaussian-type kernels"
    )
    QUADRATURE_ABS_TOL: float = 1e-10

    # Fitting
    GLOBAL_BUDGET_PER_PARAM: int = Field(
        default=500,
        description="DIRECT-L evaluations per free parameter"
    )
    DIRECT_EPSILON: float = 1e-4
    LOCAL_TOL: float = 1e-10
    LOCAL_MAX_EVALS: int = 2000
    LOCAL_INITIAL_RADIUS: float = Field(
        default=0.1,
        description="Initial trust-region radius in unit-box coordinates"
    )

    # Variograms and simulation
    DEFAULT_N_BINS: int = 15
    DEFAULT_N_SIM: int = 39
    DUPLICATE_TOL: float = 1e-9
    JITTER_START: float = 1e-10  # relative to C(0)
    JITTER_MAX: float = 1e-6
    MAX_SIMULATION_POINTS: int = 5000
    MAX_PD_POINTS: int = 500

    # Logging Settings
    LOG_LEVEL: str = "INFO"
    LOG_FORMAT: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    LOG_FILE: Optional[str] = Field(
        default=None,
        description="Optional log file appended to alongside stdout"
    )


# Global settings instance
settings = Settings()
