"""CSV and JSON output helpers shared by every exporter"""

import json
from pathlib import Path
from typing import Any, Dict

import pandas as pd

from src.config import get_settings


def ensure_dir(path: Path) -> None:
    """Create parent directories if they do not exist."""
    path.parent.mkdir(parents=True, exist_ok=True)


def write_frame(frame: pd.DataFrame, path: Path) -> Path:
    """Write a DataFrame as CSV with the configured float format, no index column."""
    path = Path(path)
    ensure_dir(path)
    frame.to_csv(path, index=False, float_format=get_settings().output.csv_float_format, lineterminator="\n")
    return path


def write_json(payload: Dict[str, Any], path: Path) -> Path:
    """Write a JSON document with sorted keys so reruns are byte-identical."""
    path = Path(path)
    ensure_dir(path)
    with open(path, "w") as f:
        json.dump(payload, f, indent=2, sort_keys=True, default=str)
        f.write("\n")
    return path
