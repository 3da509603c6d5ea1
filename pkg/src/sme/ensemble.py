"""Seeded, order-independent ensembles of conditioned trajectories"""

import time
from typing import Optional

import numpy as np
from joblib import Parallel, delayed

from src.config import get_settings
from src.lattice import LatticeSpec, analytic_eigensystem
from src.states import DensityMatrix
from src.utils.logger import get_logger
from .integrator import sample_indices, simulate_trajectory, stream_seed
from .models import EnsembleResult, IntegrationConfig, ProbeConfig


def simulate_ensemble(
    spec: LatticeSpec,
    initial: DensityMatrix,
    probe: Optional[ProbeConfig],
    integ: IntegrationConfig,
    n_traj: int,
    n_jobs: Optional[int] = None,
    backend: Optional[str] = None,
) -> EnsembleResult:
    """Run n_traj trajectories, trajectory i drawing its noise from stream (seed, i).

    Trajectories are returned and averaged in index order, so the output does
    not depend on n_jobs or on scheduling.
    """
    if n_traj < 1:
        raise ValueError(f"n_traj must be at least 1, got {n_traj}")
    settings = get_settings()
    logger = get_logger("Ensemble")
    n_jobs = settings.simulation.threads if n_jobs is None else n_jobs
    backend = backend or settings.simulation.joblib_backend

    eigensystem = analytic_eigensystem(spec)
    logger.info(
        f"Running {n_traj} trajectories: N={spec.n_sites}, J={spec.coupling}, "
        f"k={probe.strength if probe else 0.0}, dt={integ.dt:g}, T={integ.t_final:g}, "
        f"seed={integ.seed}, n_jobs={n_jobs}"
    )
    started = time.perf_counter()
    trajectories = Parallel(n_jobs=n_jobs, backend=backend)(
        delayed(simulate_trajectory)(spec, initial, probe, integ, index=i, eigensystem=eigensystem)
        for i in range(n_traj)
    )
    wall_time = time.perf_counter() - started

    coarse_steps = sample_indices(integ.n_steps, integ.ensemble_samples)
    mean_states = np.zeros((coarse_steps.shape[0], spec.n_sites, spec.n_sites), dtype=complex)
    for trajectory in trajectories:
        mean_states += trajectory.state_samples
    mean_states /= n_traj

    logger.info(f"Ensemble finished in {wall_time:.1f}s")
    return EnsembleResult(
        trajectories=list(trajectories),
        sample_times=integ.dt * coarse_steps,
        mean_states=mean_states,
        seed=integ.seed,
        stream_seeds=[stream_seed(integ.seed, i) for i in range(n_traj)],
        wall_time=wall_time,
        n_jobs=n_jobs,
    )
