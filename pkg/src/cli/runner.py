"""Run subcommands, write manifests and validate configs"""

import platform
import time
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional

import joblib
import numpy as np
import pandas as pd
import pydantic
import scipy
import yaml
from pydantic import BaseModel, Field, ValidationError

import src
from src.config import ConfigError, ExperimentConfig, get_settings, partial_range_problems, read_config_file
from src.utils.helpers import content_hash
from src.utils.logger import get_logger
from src.utils.output import write_json
from . import builders
from .commands import COMMANDS

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2


def package_versions() -> Dict[str, str]:
    return {
        "qtraj": src.__version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "pandas": pd.__version__,
        "pydantic": pydantic.VERSION,
        "joblib": joblib.__version__,
        "pyyaml": yaml.__version__,
    }


def format_validation_error(error: ValidationError) -> List[str]:
    """One line per pydantic error, prefixed by its dotted location"""
    lines = []
    for item in error.errors():
        location = ".".join(str(part) for part in item["loc"])
        message = item["msg"].removeprefix("Value error, ")
        lines.append(f"{location}: {message}" if location else message)
    return lines


def _load(config_path: str, seed: Optional[int]) -> ExperimentConfig:
    raw = read_config_file(config_path)
    if seed is not None:
        raw.setdefault("integration", {})["seed"] = seed
    return ExperimentConfig.model_validate(raw)


def run(
    subcommand: str,
    config_path: str,
    out_dir: Optional[str] = None,
    threads: Optional[int] = None,
    seed: Optional[int] = None,
) -> int:
    """Execute one subcommand; returns 0 on success, 2 for config errors, 1 otherwise"""
    logger = get_logger("runner")
    if subcommand not in COMMANDS:
        logger.error(f"Unknown subcommand: {subcommand}")
        return EXIT_CONFIG

    out_path = Path(out_dir or get_settings().output.out_dir)
    try:
        config = _load(config_path, seed)
        builders.integration_config(config)
    except ValidationError as e:
        for line in format_validation_error(e):
            logger.error(f"Invalid config: {line}")
        return EXIT_CONFIG
    except ConfigError as e:
        logger.error(f"Invalid config: {e}")
        return EXIT_CONFIG

    command = COMMANDS[subcommand](n_jobs=threads)
    started_at = datetime.now(timezone.utc).isoformat()
    started = time.perf_counter()
    logger.info(f"Running {subcommand} with {config_path} -> {out_path}")
    try:
        outputs = command.execute(config, out_path)
    except ConfigError as e:
        logger.error(f"Invalid config: {e}")
        return EXIT_CONFIG
    except Exception as e:
        logger.error(f"{subcommand} failed: {e}", exc_info=True)
        return EXIT_RUNTIME
    wall_time = time.perf_counter() - started

    with open(config_path, "rb") as f:
        input_hash = content_hash(f.read())
    manifest: Dict[str, Any] = {
        "subcommand": subcommand,
        "config": config.model_dump(mode="json"),
        "seed": config.integration.seed,
        "versions": package_versions(),
        "timing": {"started": started_at, "wall_time_s": wall_time},
        "input_hash": input_hash,
        "outputs": sorted(str(Path(p).relative_to(out_path)) for p in outputs.values()),
    }
    write_json(manifest, out_path / "manifest.json")
    logger.info(f"{subcommand} finished in {wall_time:.1f}s; {len(outputs)} files written")
    return EXIT_OK


class ValidationReport(BaseModel):
    """Outcome of checking a config without running it"""
    valid: bool = Field(..., description="No errors found")
    errors: List[str] = Field(default_factory=list, description="Invariant violations")
    warnings: List[str] = Field(default_factory=list, description="Problems that do not block validation")
    normalized: Optional[Dict[str, Any]] = Field(default=None, description="Config with defaults filled in")


def validate(config_path: str) -> ValidationReport:
    """List every violation in a config file; raises ConfigError when it cannot be read"""
    raw = read_config_file(config_path)
    try:
        config = ExperimentConfig.model_validate(raw)
    except ValidationError as e:
        errors = []
        for line in format_validation_error(e):
            errors.extend(part.strip() for part in line.split("; "))
        # schema failures skip the model-level range checks; run them on the sections that parsed
        errors.extend(p for p in partial_range_problems(raw) if p not in errors)
        return ValidationReport(valid=False, errors=errors)

    warnings = []
    violation = builders.guard_message(config)
    if violation:
        if config.integration.allow_large_dt:
            warnings.append(f"{violation}; allowed by integration.allow_large_dt")
        else:
            warnings.append(f"{violation}; runs will refuse it unless integration.allow_large_dt is set")
    if config.probe.efficiency < 1.0:
        warnings.append(f"probe.efficiency={config.probe.efficiency:g}: trajectories support efficiency 1 only")
    return ValidationReport(valid=True, warnings=warnings, normalized=config.model_dump(mode="json"))


def validate_command(config_path: str) -> int:
    """Print a validation report; exit 0 iff the config is valid"""
    try:
        report = validate(config_path)
    except ConfigError as e:
        print(f"error: {e}")
        return EXIT_CONFIG
    for warning in report.warnings:
        print(f"warning: {warning}")
    if not report.valid:
        for error in report.errors:
            print(f"error: {error}")
        return EXIT_CONFIG
    print("ok")
    print(yaml.safe_dump(report.normalized, sort_keys=False), end="")
    return EXIT_OK
