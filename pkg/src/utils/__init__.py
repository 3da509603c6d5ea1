"""Utility modules"""

from .logger import setup_logger, get_logger
from .helpers import content_hash
from .output import ensure_dir, write_frame, write_json

__all__ = [
    "setup_logger",
    "get_logger",
    "content_hash",
    "ensure_dir",
    "write_frame",
    "write_json",
]
