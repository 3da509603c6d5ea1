"""Experiment driver: subcommands, manifests and config validation"""

from .base import BaseCommand
from .commands import (
    COMMANDS,
    TrajectoryCommand,
    SpectrumRecordCommand,
    SpectrumSteadyCommand,
    SpectrumPerturbativeCommand,
    LiouvilleEigCommand,
    EffectiveModesCommand,
    PeakScanCommand,
    ZenoCommand,
    CorrelationCommand,
)
from .runner import (
    EXIT_OK,
    EXIT_RUNTIME,
    EXIT_CONFIG,
    ValidationReport,
    run,
    validate,
    validate_command,
    package_versions,
)

__all__ = [
    "BaseCommand",
    "COMMANDS",
    "TrajectoryCommand",
    "SpectrumRecordCommand",
    "SpectrumSteadyCommand",
    "SpectrumPerturbativeCommand",
    "LiouvilleEigCommand",
    "EffectiveModesCommand",
    "PeakScanCommand",
    "ZenoCommand",
    "CorrelationCommand",
    "EXIT_OK",
    "EXIT_RUNTIME",
    "EXIT_CONFIG",
    "ValidationReport",
    "run",
    "validate",
    "validate_command",
    "package_versions",
]
