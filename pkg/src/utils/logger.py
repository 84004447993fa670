"""Logging setup"""

import sys
from typing import Optional

from loguru import logger

from src.config import settings

LOG_FORMAT = (
    "<green>{time:YYYY-MM-DD HH:mm:ss.SSS}</green> | "
    "<level>{level: <8}</level> | "
    "<cyan>{extra[name]}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> - "
    "<level>{message}</level>"
)

logger.configure(extra={"name": "haal"})


def setup_logger(level: Optional[str] = None):
    """Configure loguru sinks; stdout is reserved for JSON output"""
    logger.remove()
    logger.add(
        sys.stderr,
        level=(level or settings.LOG_LEVEL).upper(),
        format=LOG_FORMAT,
        backtrace=False,
        diagnose=False,
    )
    if settings.LOG_FILE:
        logger.add(
            settings.LOG_FILE,
            level="DEBUG",
            format=LOG_FORMAT,
            rotation="10 MB",
            retention=5,
        )
    return logger


def get_logger(name: str):
    """Return a logger bound to a module name"""
    return logger.bind(name=name)
