"""Stochastic master equation: conditioned trajectories and seeded ensembles"""

from .models import (
    ProbeConfig,
    IntegrationConfig,
    MeasurementRecord,
    TrajectoryResult,
    EnsembleResult,
    rate_scale,
    default_dt,
    dt_guard,
)
from .integrator import (
    SMEIntegrationError,
    dissipator,
    innovation,
    sme_step,
    simulate_trajectory,
    trajectory_rng,
    stream_seed,
    sample_indices,
)
from .ensemble import simulate_ensemble
from .export import (
    trajectory_frame,
    write_trajectory_csv,
    ensemble_mean_frame,
    ensemble_summary,
    write_ensemble_outputs,
)

__all__ = [
    "ProbeConfig",
    "IntegrationConfig",
    "MeasurementRecord",
    "TrajectoryResult",
    "EnsembleResult",
    "rate_scale",
    "default_dt",
    "dt_guard",
    "SMEIntegrationError",
    "dissipator",
    "innovation",
    "sme_step",
    "simulate_trajectory",
    "trajectory_rng",
    "stream_seed",
    "sample_indices",
    "simulate_ensemble",
    "trajectory_frame",
    "write_trajectory_csv",
    "ensemble_mean_frame",
    "ensemble_summary",
    "write_ensemble_outputs",
]
