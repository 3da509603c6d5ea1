"""Experiment configuration loaded from YAML files or run manifests"""

from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml
from pydantic import BaseModel, Field, ValidationError, model_validator


class ConfigError(ValueError):
    """Configuration file is unreadable or malformed"""


class LatticeSection(BaseModel):
    """Chain parameters"""
    n_sites: int = Field(..., ge=1, description="Number of sites N")
    coupling: float = Field(..., description="Hopping J")


class ProbeSection(BaseModel):
    """Monitored sites and measurement strength"""
    sites: List[int] = Field(..., min_length=1, description="1-based probed sites")
    strength: float = Field(..., ge=0.0, description="Measurement strength k (units of J)")
    efficiency: float = Field(default=1.0, ge=0.0, le=1.0, description="Detector efficiency mu")


class InitialStateKind(str, Enum):
    """Initial-state factory"""
    EIGENSTATE = "eigenstate"
    SITE = "site"
    THERMAL = "thermal"
    STEADY = "steady"


class InitialStateSection(BaseModel):
    """Initial density matrix"""
    kind: InitialStateKind = Field(..., description="eigenstate | site | thermal | steady")
    index: Optional[int] = Field(default=None, description="Eigen-index k or site n (1-based)")
    beta: Optional[float] = Field(default=None, ge=0.0, description="Inverse temperature for thermal states")

    @model_validator(mode="after")
    def _check_parameters(self) -> "InitialStateSection":
        if self.kind in (InitialStateKind.EIGENSTATE, InitialStateKind.SITE) and self.index is None:
            raise ValueError(f"initial_state.index is required for kind '{self.kind.value}'")
        if self.kind == InitialStateKind.THERMAL and self.beta is None:
            raise ValueError("initial_state.beta is required for kind 'thermal'")
        return self


class IntegrationSection(BaseModel):
    """Time stepping and seeding"""
    dt: Optional[float] = Field(default=None, gt=0.0, description="Step; default dt_default_factor / max(|J|, k)")
    t_final: float = Field(..., gt=0.0, description="Total time")
    seed: int = Field(default=0, ge=0, lt=2**64, description="Master seed")
    renormalize_every_step: bool = Field(default=True, description="Re-Hermitize and renormalize each step")
    allow_large_dt: bool = Field(default=False, description="Override the dt guard")
    diagnostics_stride: int = Field(default=1, ge=1, description="Keep diagnostics every this many steps")


class EnsembleSection(BaseModel):
    """Number of trajectories"""
    n_traj: int = Field(default=1, ge=1, description="Trajectories per ensemble")


class AnalysisSection(BaseModel):
    """Spectral, correlation and sweep settings"""
    omega_max: Optional[float] = Field(default=None, gt=0.0, description="Upper end of the frequency grid")
    omega_points: Optional[int] = Field(default=None, ge=3, description="Points on the frequency grid")
    mean_subtract: bool = Field(default=True, description="Subtract the record mean before transforming")
    floor_subtract: bool = Field(default=False, description="Subtract the shot-noise floor from periodograms")
    tau_max: float = Field(default=10.0, gt=0.0, description="Largest correlation lag")
    tau_points: int = Field(default=101, ge=2, description="Lags on the correlation grid")
    sizes: List[int] = Field(default_factory=lambda: [7, 13, 19, 25], description="Chain lengths for peak scans")
    strengths: List[float] = Field(default_factory=lambda: [10.0, 20.0, 40.0], description="k values for Zeno sweeps")
    record_peaks: bool = Field(default=False, description="Also locate peaks of averaged record periodograms in peak-scan")
    survival_t_max: Optional[float] = Field(default=None, gt=0.0, description="Span of the survival fit")


class ExperimentConfig(BaseModel):
    """Complete description of one experiment"""
    lattice: LatticeSection
    probe: ProbeSection
    initial_state: InitialStateSection
    integration: IntegrationSection
    ensemble: EnsembleSection = Field(default_factory=EnsembleSection)
    analysis: AnalysisSection = Field(default_factory=AnalysisSection)

    @model_validator(mode="after")
    def _check_ranges(self) -> "ExperimentConfig":
        problems = range_problems(self)
        if problems:
            raise ValueError("; ".join(problems))
        return self


def range_problems(config: ExperimentConfig) -> List[str]:
    """Every out-of-range site or index reference"""
    return _range_problems(config.lattice, config.probe, config.initial_state, config.analysis)


def _range_problems(
    lattice: Optional[LatticeSection],
    probe: Optional[ProbeSection],
    initial_state: Optional[InitialStateSection],
    analysis: Optional[AnalysisSection],
) -> List[str]:
    problems = []
    if lattice is not None and probe is not None:
        for site in probe.sites:
            if not 1 <= site <= lattice.n_sites:
                problems.append(f"probe site out of range: {site} not in 1..{lattice.n_sites}")
    if probe is not None and len(set(probe.sites)) != len(probe.sites):
        problems.append(f"probe sites repeated: {probe.sites}")
    if lattice is not None and initial_state is not None and initial_state.index is not None:
        index, n_sites = initial_state.index, lattice.n_sites
        if initial_state.kind == InitialStateKind.SITE and not 1 <= index <= n_sites:
            problems.append(f"initial site out of range: {index} not in 1..{n_sites}")
        if initial_state.kind == InitialStateKind.EIGENSTATE and not 1 <= index <= n_sites:
            problems.append(f"initial eigen-index out of range: {index} not in 1..{n_sites}")
    if analysis is not None:
        if any(size < 1 for size in analysis.sizes):
            problems.append(f"analysis.sizes must be positive: {analysis.sizes}")
        if any(strength <= 0 for strength in analysis.strengths):
            problems.append(f"analysis.strengths must be positive: {analysis.strengths}")
    return problems


def partial_range_problems(raw: Dict[str, Any]) -> List[str]:
    """Range problems among whichever sections of a raw mapping validate on their own"""
    sections: Dict[str, Any] = {}
    for name in ("lattice", "probe", "initial_state", "analysis"):
        model = ExperimentConfig.model_fields[name].annotation
        value = raw.get(name)
        if value is None and name != "analysis":
            sections[name] = None
            continue
        try:
            sections[name] = model.model_validate(value if value is not None else {})
        except ValidationError:
            sections[name] = None
    return _range_problems(**sections)


def read_config_file(path: str) -> Dict[str, Any]:
    """Parse a YAML config (or JSON manifest) into a plain mapping"""
    try:
        with open(Path(path)) as f:
            raw = yaml.safe_load(f)
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"config {path} is not valid YAML: {e}") from e
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path} must be a mapping with sections")
    # run manifests embed the full config under "config"
    if "lattice" not in raw and isinstance(raw.get("config"), dict):
        raw = raw["config"]
    return raw


def load_config(path: str) -> ExperimentConfig:
    """Read and validate a config file; raises ConfigError or pydantic ValidationError"""
    return ExperimentConfig.model_validate(read_config_file(path))
