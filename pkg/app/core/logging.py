"""
Logging Setup
Console logging on stderr with an optional Google Cloud Logging handler
"""

import sys
import logging
from typing import Dict, Optional

from app import __version__
from app.core.config import settings

LOG_FORMAT = '%(asctime)s | %(levelname)-8s | %(name)s | %(message)s'
DATE_FORMAT = '%Y-%m-%d %H:%M:%S'

# Loggers of libraries pulled in by the cloud handler
QUIET_LOGGERS = ("google.auth", "google.cloud", "urllib3", "grpc")


def _resolve_level(level: Optional[str]) -> int:
    name = (level or settings.LOG_LEVEL).upper()
    resolved = logging.getLevelName(name)
    return resolved if isinstance(resolved, int) else logging.INFO


def _attach_cloud_handler(root_logger: logging.Logger, level: int, labels: Dict[str, str]):
    logger = logging.getLogger(__name__)
    try:
        creds_path = settings.get_credentials_path()
        if not creds_path:
            raise RuntimeError("Failed to decode Google credentials from base64")

        import google.cloud.logging
        from google.cloud.logging_v2.handlers import CloudLoggingHandler

        client = google.cloud.logging.Client(project=settings.GOOGLE_CLOUD_PROJECT)
        cloud_handler = CloudLoggingHandler(
            client,
            name=settings.APP_NAME,
            labels={"app": settings.APP_NAME, "version": __version__, **labels},
        )
        cloud_handler.setLevel(level)
        root_logger.addHandler(cloud_handler)

        logger.info(f"✅ Google Cloud Logging initialized (project {settings.GOOGLE_CLOUD_PROJECT})")

    except ImportError:
        logger.error("❌ google-cloud-logging not installed")
    except Exception as e:
        logger.error(f"❌ Failed to initialize Google Cloud Logging: {e}")


def setup_logging(level: Optional[str] = None, labels: Optional[Dict[str, str]] = None):
    """
    Configure the root logger

    Console output goes to stderr; stdout carries the JSON that
    `validate-config` prints. The cloud handler is attached only when
    enabled and its credentials decode.

    Args:
        level: Level name overriding settings.LOG_LEVEL
        labels: Extra labels on cloud log entries, e.g. the CLI command
    """
    resolved = _resolve_level(level)

    root_logger = logging.getLogger()
    root_logger.setLevel(resolved)
    root_logger.handlers.clear()

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(resolved)
    console_handler.setFormatter(logging.Formatter(fmt=LOG_FORMAT, datefmt=DATE_FORMAT))
    root_logger.addHandler(console_handler)

    if settings.is_cloud_logging_enabled():
        _attach_cloud_handler(root_logger, resolved, {k: str(v) for k, v in (labels or {}).items()})
    elif settings.ENABLE_CLOUD_LOGGING:
        logging.getLogger(__name__).warning(
            "⚠️  ENABLE_CLOUD_LOGGING set without GOOGLE_CLOUD_PROJECT and GOOGLE_CREDENTIALS_BASE64"
        )

    for name in QUIET_LOGGERS:
        logging.getLogger(name).setLevel(logging.WARNING)


def get_logger(name: str) -> logging.Logger:
    """
    Get a logger instance with the given name

    Args:
        name: Logger name (typically __name__)

    Returns:
        logging.Logger: Configured logger instance
    """
    return logging.getLogger(name)


def log_section(logger: logging.Logger, title: str, width: int = 60):
    """Banner line, title, banner line"""
    logger.info("=" * width)
    logger.info(title)
    logger.info("=" * width)
