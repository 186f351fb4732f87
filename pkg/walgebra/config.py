import os
from pathlib import Path
from typing import Literal, Optional

from pydantic_settings import BaseSettings

# Get the project root directory
ROOT_DIR = Path(__file__).resolve().parent.parent


class Settings(BaseSettings):
    # Directories
    CACHE_DIR: Path = ROOT_DIR / "cache"
    GOLDEN_DIR: Path = ROOT_DIR / "golden"

    # Pipeline settings
    DEFAULT_SEED: int = 20240601
    SAMPLE_POINTS: int = 3  # Rational sample points per generic-rank check
    JET_ORDER: Optional[int] = None  # Jet order of the W brackets; None means 2(eta_r + 1) + 2
    FULL_CHECKS: bool = False  # Full symbolic Jacobi / curvature sweeps on large orbits

    # Data settings
    F4_LABEL_TABLE: Literal["corrected", "raw"] = "corrected"

    # Output settings
    OUTPUT_FORMAT: Literal["json", "text"] = "text"
    LOG_LEVEL: str = "INFO"

    class Config:
        env_file = ".env"
        case_sensitive = True


# Create settings instance
settings = Settings()

# Ensure directories exist
os.makedirs(settings.CACHE_DIR, exist_ok=True)
