"""Application Configuration"""

from typing import Optional

from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings"""

    model_config = SettingsConfigDict(
        env_prefix="HAAL_",
        env_file=".env",
        case_sensitive=True,
        extra="ignore",
    )

    # Numeric root isolation
    PRECISION: float = 1e-12

    # Witness verification
    RANK_TOLERANCE: float = 1e-6
    BOCK_TOLERANCE: float = 1e-8

    # Exponential map
    EXP_TOLERANCE: float = 1e-10
    HOMOMORPHISM_TOLERANCE: float = 1e-9
    HOMOMORPHISM_SAMPLES: int = 100

    # Enumeration
    ENUMERATION_BOUND: int = 100
    RANDOM_SEED: int = 0

    # Output
    SCHEMA_VERSION: str = "haal/1"

    # Logging
    LOG_LEVEL: str = "WARNING"
    LOG_FILE: Optional[str] = None

    @field_validator(
        "PRECISION",
        "RANK_TOLERANCE",
        "BOCK_TOLERANCE",
        "EXP_TOLERANCE",
        "HOMOMORPHISM_TOLERANCE",
    )
    @classmethod
    def validate_tolerance(cls, v: float) -> float:
        if not v > 0:
            raise ValueError("tolerances must be strictly positive")
        return v

    @field_validator("LOG_LEVEL")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        valid_levels = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
        if v.upper() not in valid_levels:
            raise ValueError(f"LOG_LEVEL must be one of {valid_levels}")
        return v.upper()


# Global settings instance
settings = Settings()
