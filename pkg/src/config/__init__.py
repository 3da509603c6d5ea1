"""Configuration management module"""

from .settings import Settings, get_settings
from .experiment import (
    ConfigError,
    ExperimentConfig,
    LatticeSection,
    ProbeSection,
    InitialStateKind,
    InitialStateSection,
    IntegrationSection,
    EnsembleSection,
    AnalysisSection,
    range_problems,
    partial_range_problems,
    read_config_file,
    load_config,
)

__all__ = [
    "Settings",
    "get_settings",
    "ConfigError",
    "ExperimentConfig",
    "LatticeSection",
    "ProbeSection",
    "InitialStateKind",
    "InitialStateSection",
    "IntegrationSection",
    "EnsembleSection",
    "AnalysisSection",
    "range_problems",
    "partial_range_problems",
    "read_config_file",
    "load_config",
]
