"""
Application Configuration Management
Runtime settings for the simulator and retrodiction toolkit
"""

import os
import json
import base64
import tempfile
from typing import Optional
from pydantic_settings import BaseSettings, SettingsConfigDict
from pydantic import Field


class Settings(BaseSettings):
    """Application settings loaded from environment variables"""

    # Application
    APP_NAME: str = "optoretro"
    APP_DESCRIPTION: str = "Homodyne record simulator and matched-filter retrodiction toolkit"

    # Logging
    LOG_LEVEL: str = Field(default="INFO", env="LOG_LEVEL")

    # Google Cloud Logging
    GOOGLE_CLOUD_PROJECT: str = Field(default="", env="GOOGLE_CLOUD_PROJECT")
    GOOGLE_CREDENTIALS_BASE64: str = Field(
        default="",
        env="GOOGLE_CREDENTIALS_BASE64",
        description="Base64-encoded service account JSON"
    )
    ENABLE_CLOUD_LOGGING: bool = Field(default=False, env="ENABLE_CLOUD_LOGGING")

    # Numerics
    OMEGA_MEMORY_MB: float = Field(
        default=256.0,
        env="OMEGA_MEMORY_MB",
        description="Memory budget for the dense two-time noise matrix"
    )
    COND_LIMIT: float = Field(
        default=1e8,
        env="COND_LIMIT",
        description="Estimates refuse to normalize above this cond(J)"
    )
    N_OMEGA_DRAWS: int = Field(
        default=512,
        env="N_OMEGA_DRAWS",
        description="Monte Carlo frequency draws for broadened expectations"
    )
    BROADENED_SEED: int = Field(
        default=20240611,
        env="BROADENED_SEED",
        description="Fixed internal seed of the broadened expectations"
    )
    BROADENING_RATIO_WARN: float = Field(
        default=0.1,
        env="BROADENING_RATIO_WARN",
        description="Warn when (sigma_k + sigma_l)/|omega_k - omega_l| exceeds this"
    )
    STRICT_PHYSICALITY: bool = Field(
        default=False,
        env="STRICT_PHYSICALITY",
        description="Reject constructed states violating the uncertainty bound"
    )

    # Sweeps and outputs
    GRID_POINTS_PER_DECADE: int = Field(default=40, env="GRID_POINTS_PER_DECADE")
    SWEEP_WORKERS: int = Field(default=4, env="SWEEP_WORKERS")
    PSD_SEGMENTS: int = Field(default=8, env="PSD_SEGMENTS")
    OUTPUT_DIR: str = Field(default="results", env="OUTPUT_DIR")

    # Internal (set automatically)
    _credentials_path: Optional[str] = None

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=True,
        extra="ignore",
    )

    def omega_budget_bytes(self) -> int:
        """Memory budget for the noise matrix in bytes"""
        return int(self.OMEGA_MEMORY_MB * 1024 * 1024)

    def is_cloud_logging_enabled(self) -> bool:
        """Check if Google Cloud Logging is properly configured"""
        return (
            self.ENABLE_CLOUD_LOGGING and
            bool(self.GOOGLE_CLOUD_PROJECT) and
            bool(self.GOOGLE_CREDENTIALS_BASE64)
        )

    def get_credentials_path(self) -> Optional[str]:
        """
        Get the path to Google Cloud credentials file
        Decodes base64 credentials and writes to temp file

        Returns:
            str: Path to credentials file or None
        """
        if self._credentials_path and os.path.exists(self._credentials_path):
            return self._credentials_path

        if not self.GOOGLE_CREDENTIALS_BASE64:
            return None

        try:
            credentials_json = base64.b64decode(
                self.GOOGLE_CREDENTIALS_BASE64
            ).decode('utf-8')
            json.loads(credentials_json)

            creds_path = os.path.join(tempfile.gettempdir(), 'gcp-credentials.json')
            with open(creds_path, 'w') as f:
                f.write(credentials_json)

            os.environ['GOOGLE_APPLICATION_CREDENTIALS'] = creds_path
            self._credentials_path = creds_path
            return creds_path

        except (ValueError, json.JSONDecodeError):
            print("✗ Invalid GOOGLE_CREDENTIALS_BASE64 payload")
            return None


# Global settings instance
settings = Settings()
