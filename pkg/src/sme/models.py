"""Probe, integration and result models for conditioned trajectories"""

import math
from typing import List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.config import get_settings
from src.lattice import LatticeSpec, Operator, site_projector
from src.states import DensityMatrix


class ProbeConfig(BaseModel):
    """Continuously monitored observable and its measurement strength"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    observable: Operator = Field(..., description="Hermitian probed observable, usually a site projector")
    strength: float = Field(..., ge=0.0, description="Measurement strength k (units of J)")
    efficiency: float = Field(default=1.0, ge=0.0, le=1.0, description="Detector efficiency mu")
    sites: Optional[List[int]] = Field(default=None, description="1-based probed sites, when built from sites")

    @field_validator("strength")
    @classmethod
    def _finite_strength(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError(f"strength must be finite, got {value}")
        return value

    @model_validator(mode="after")
    def _check_observable(self) -> "ProbeConfig":
        if not self.observable.is_hermitian():
            raise ValueError("probed observable must be Hermitian")
        return self

    @classmethod
    def on_sites(
        cls, spec: LatticeSpec, sites: Sequence[int], strength: float, efficiency: float = 1.0
    ) -> "ProbeConfig":
        """Probe the total population of the given 1-based sites"""
        return cls(
            observable=site_projector(spec, sites),
            strength=strength,
            efficiency=efficiency,
            sites=sorted(set(sites)),
        )

    @property
    def dim(self) -> int:
        return self.observable.dim


def rate_scale(coupling: float, strength: float) -> float:
    """Fastest rate in the problem, max(|J|, k)"""
    scale = max(abs(coupling), strength)
    return scale if scale > 0 else 1.0


def default_dt(coupling: float, strength: float) -> float:
    """Default step dt_default_factor / max(|J|, k)"""
    return get_settings().simulation.dt_default_factor / rate_scale(coupling, strength)


def dt_guard(coupling: float, strength: float) -> float:
    """Largest step allowed without an explicit override"""
    return get_settings().simulation.dt_guard_factor / rate_scale(coupling, strength)


class IntegrationConfig(BaseModel):
    """Fixed-step integration parameters"""
    model_config = ConfigDict(frozen=True)

    dt: float = Field(..., gt=0.0, description="Time step (units 1/J)")
    t_final: float = Field(..., gt=0.0, description="Total simulated time")
    seed: int = Field(default=0, ge=0, lt=2**64, description="Master seed; with the trajectory index it fixes every dW")
    renormalize_every_step: bool = Field(default=True, description="Re-Hermitize and renormalize the trace after each step")
    allow_large_dt: bool = Field(default=False, description="Skip the dt <= guard check")
    diagnostics_stride: int = Field(default=1, ge=1, description="Record populations/parity/purity every this many steps")
    ensemble_samples: int = Field(
        default_factory=lambda: get_settings().simulation.ensemble_samples,
        ge=2,
        description="Coarse time points (including t=0 and t_final) where full states are kept",
    )

    @model_validator(mode="after")
    def _check_span(self) -> "IntegrationConfig":
        if self.t_final < self.dt:
            raise ValueError(f"t_final={self.t_final} is shorter than dt={self.dt}")
        return self

    @property
    def n_steps(self) -> int:
        return int(round(self.t_final / self.dt))

    def check_guard(self, coupling: float, strength: float) -> None:
        """Raise when dt exceeds the guard and no override is set"""
        limit = dt_guard(coupling, strength)
        if self.dt > limit and not self.allow_large_dt:
            raise ValueError(
                f"dt={self.dt:g} exceeds guard dt <= {get_settings().simulation.dt_guard_factor:g}/max(|J|, k) = {limit:g}; "
                "set allow_large_dt to override"
            )


class MeasurementRecord(BaseModel):
    """Homodyne increments lambda_i = <O> dt + dW_i / sqrt(8k) on t_i = i dt"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    dt: float = Field(..., gt=0.0, description="Sample spacing")
    samples: np.ndarray = Field(..., description="Raw record increments (units of time)")
    probe: ProbeConfig = Field(..., description="Probe that produced the record")

    @field_validator("samples", mode="before")
    @classmethod
    def _as_samples(cls, value) -> np.ndarray:
        samples = np.array(value, dtype=float)
        if samples.ndim != 1:
            raise ValueError("record samples must be one-dimensional")
        if not np.all(np.isfinite(samples)):
            raise ValueError("record samples must be finite")
        samples.setflags(write=False)
        return samples

    @property
    def duration(self) -> float:
        return self.samples.shape[0] * self.dt

    @property
    def times(self) -> np.ndarray:
        return self.dt * np.arange(self.samples.shape[0])


class TrajectoryResult(BaseModel):
    """Diagnostics, record and final state of one stochastic run"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    index: int = Field(default=0, description="Trajectory index within its ensemble")
    times: np.ndarray = Field(..., description="Diagnostic time grid")
    record: Optional[MeasurementRecord] = Field(default=None, description="Measurement record (None when unprobed)")
    site_populations: np.ndarray = Field(..., description="p_n(t), shape (len(times), N)")
    parity_weights: np.ndarray = Field(..., description="(p_od, p_ev) per time, shape (len(times), 2)")
    purity: np.ndarray = Field(..., description="tr[rho^2] per time")
    final_state: DensityMatrix = Field(..., description="State at t_final")
    sample_times: np.ndarray = Field(..., description="Coarse grid where full states are kept")
    state_samples: np.ndarray = Field(..., description="Density matrices on sample_times, shape (S, N, N)")

    @model_validator(mode="after")
    def _check_populations(self) -> "TrajectoryResult":
        totals = self.site_populations.sum(axis=1)
        if np.max(np.abs(totals - 1.0)) > 1e-8:
            raise ValueError("site populations do not sum to one")
        return self


class EnsembleResult(BaseModel):
    """Independent trajectories plus their averaged state on the coarse grid"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    trajectories: List[TrajectoryResult] = Field(..., description="Runs in trajectory-index order")
    sample_times: np.ndarray = Field(..., description="Coarse time grid")
    mean_states: np.ndarray = Field(..., description="Ensemble-averaged density matrices, shape (S, N, N)")
    seed: int = Field(..., description="Master seed")
    stream_seeds: List[int] = Field(..., description="Derived 64-bit seed per trajectory")
    wall_time: float = Field(..., description="Wall-clock seconds")
    n_jobs: int = Field(..., description="Parallel workers requested")

    @property
    def n_traj(self) -> int:
        return len(self.trajectories)

    def mean_state(self, i: int) -> DensityMatrix:
        """Averaged state at sample_times[i]"""
        return DensityMatrix.positive_part(self.mean_states[i])

    @property
    def records(self) -> List[MeasurementRecord]:
        return [t.record for t in self.trajectories if t.record is not None]
