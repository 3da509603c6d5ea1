"""Logging utilities

All loggers hang below the ``qtraj`` root so one set of handlers serves the
CLI, the numerics and joblib workers alike.
"""

import logging
from pathlib import Path
from typing import Optional
from src.config import get_settings

ROOT = "qtraj"
CONSOLE_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
FILE_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(funcName)s:%(lineno)d - %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


def _qualified(name: str) -> str:
    if name == ROOT or name.startswith(f"{ROOT}."):
        return name
    return f"{ROOT}.{name}"


def setup_logger(name: str = ROOT, log_file: Optional[str] = None) -> logging.Logger:
    """Attach console and optional file handlers to the qtraj root logger.

    Calling it again replaces the handlers, so the CLI can redirect the log
    file per run. Returns the logger for ``name``.
    """
    settings = get_settings()
    root = logging.getLogger(ROOT)
    root.setLevel(getattr(logging, settings.logging.level.upper(), logging.INFO))
    for handler in list(root.handlers):
        root.removeHandler(handler)
        handler.close()
    root.propagate = False

    console = logging.StreamHandler()
    console.setLevel(root.level)
    console.setFormatter(logging.Formatter(CONSOLE_FORMAT, datefmt=DATE_FORMAT))
    root.addHandler(console)

    log_path = log_file or settings.logging.file
    if log_path:
        Path(log_path).parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_path)
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(logging.Formatter(FILE_FORMAT, datefmt=DATE_FORMAT))
        root.addHandler(file_handler)

    return logging.getLogger(_qualified(name))


def get_logger(name: str = ROOT) -> logging.Logger:
    """Logger below the qtraj root, configuring the root on first use"""
    if not logging.getLogger(ROOT).handlers:
        setup_logger()
    return logging.getLogger(_qualified(name))
