"""CSV/JSON export of trajectories and ensemble summaries"""

from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd

from src.utils.output import write_frame, write_json
from .models import EnsembleResult, TrajectoryResult


def trajectory_path(out_dir: str, index: int) -> Path:
    """Path of the CSV for one trajectory"""
    return Path(out_dir) / "trajectories" / f"trajectory_{index:05d}.csv"


def trajectory_frame(result: TrajectoryResult) -> pd.DataFrame:
    """Columns t, lambda, p_site_1..p_site_N, p_od, p_ev, purity.

    lambda at row t is the increment over [t, t + stride*dt) summed from the raw
    samples; the final row has no increment and holds NaN, as do all rows of
    an unprobed run.
    """
    n_rows = result.times.shape[0]
    increments = np.full(n_rows, np.nan)
    if result.record is not None:
        samples = result.record.samples
        stride = 1 if n_rows < 2 else int(round((result.times[1] - result.times[0]) / result.record.dt))
        n_full = n_rows - 1
        if stride == 1:
            increments[:n_full] = samples[:n_full]
        else:
            increments[:n_full] = samples[: n_full * stride].reshape(n_full, stride).sum(axis=1)

    columns: Dict[str, Any] = {"t": result.times, "lambda": increments}
    for n in range(result.site_populations.shape[1]):
        columns[f"p_site_{n + 1}"] = result.site_populations[:, n]
    columns["p_od"] = result.parity_weights[:, 0]
    columns["p_ev"] = result.parity_weights[:, 1]
    columns["purity"] = result.purity
    return pd.DataFrame(columns)


def write_trajectory_csv(result: TrajectoryResult, out_dir: str) -> Path:
    """Write one trajectory CSV under out_dir/trajectories/"""
    return write_frame(trajectory_frame(result), trajectory_path(out_dir, result.index))


def ensemble_mean_frame(ensemble: EnsembleResult) -> pd.DataFrame:
    """Long-form ensemble-averaged state: one row per (t, i, j) with re/im parts"""
    n_samples, n_sites, _ = ensemble.mean_states.shape
    rows_i, rows_j = np.meshgrid(np.arange(1, n_sites + 1), np.arange(1, n_sites + 1), indexing="ij")
    frames = []
    for s in range(n_samples):
        rho = ensemble.mean_states[s]
        frames.append(
            pd.DataFrame(
                {
                    "t": np.full(n_sites * n_sites, ensemble.sample_times[s]),
                    "i": rows_i.ravel(),
                    "j": rows_j.ravel(),
                    "re": rho.real.ravel(),
                    "im": rho.imag.ravel(),
                }
            )
        )
    return pd.concat(frames, ignore_index=True)


def ensemble_summary(ensemble: EnsembleResult, config: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """Seeds, config echo, timing and final-state statistics"""
    final_purity = [float(t.purity[-1]) for t in ensemble.trajectories]
    final_p_od = [float(t.parity_weights[-1, 0]) for t in ensemble.trajectories]
    return {
        "config": config or {},
        "seed": ensemble.seed,
        "n_traj": ensemble.n_traj,
        "stream_seeds": ensemble.stream_seeds,
        "n_jobs": ensemble.n_jobs,
        "wall_time_s": ensemble.wall_time,
        "final_purity_min": min(final_purity),
        "final_purity_mean": float(np.mean(final_purity)),
        "final_p_od": final_p_od,
    }


def write_ensemble_outputs(
    ensemble: EnsembleResult, out_dir: str, config: Optional[Dict[str, Any]] = None
) -> Dict[str, Path]:
    """Write every trajectory CSV plus ensemble_summary.json and ensemble_mean.csv"""
    paths = {f"trajectory_{t.index}": write_trajectory_csv(t, out_dir) for t in ensemble.trajectories}
    paths["ensemble_summary"] = write_json(ensemble_summary(ensemble, config), Path(out_dir) / "ensemble_summary.json")
    paths["ensemble_mean"] = write_frame(ensemble_mean_frame(ensemble), Path(out_dir) / "ensemble_mean.csv")
    return paths
