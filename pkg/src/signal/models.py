"""Spectrum and correlation estimates"""

from enum import Enum
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class SpectrumKind(str, Enum):
    """Estimator that produced a spectrum"""
    PERIODOGRAM = "periodogram"
    STEADY_STATE = "steady_state"
    PERTURBATIVE = "perturbative"


class CorrelationKind(str, Enum):
    """Estimator that produced a correlation function"""
    ANALYTIC = "analytic"
    MONTE_CARLO = "monte_carlo"


def _as_real_vector(value, name: str) -> np.ndarray:
    vector = np.array(value, dtype=float)
    if vector.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    vector.setflags(write=False)
    return vector


class SpectrumEstimate(BaseModel):
    """Spectral values on a strictly increasing frequency grid"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    omegas: np.ndarray = Field(..., description="Angular frequencies (units of J)")
    values: np.ndarray = Field(..., description="Spectral density at each frequency")
    stderr: Optional[np.ndarray] = Field(default=None, description="Standard error of the mean, when averaged")
    kind: SpectrumKind = Field(..., description="Estimator")
    meta: Dict[str, Any] = Field(default_factory=dict, description="Probe parameters, T, n_traj, ...")

    @field_validator("omegas", "values", mode="before")
    @classmethod
    def _as_vectors(cls, value, info) -> np.ndarray:
        return _as_real_vector(value, info.field_name)

    @field_validator("stderr", mode="before")
    @classmethod
    def _as_stderr(cls, value) -> Optional[np.ndarray]:
        return None if value is None else _as_real_vector(value, "stderr")

    @model_validator(mode="after")
    def _check_grid(self) -> "SpectrumEstimate":
        if self.omegas.shape != self.values.shape:
            raise ValueError(f"grid has {self.omegas.shape[0]} points but {self.values.shape[0]} values")
        if self.stderr is not None and self.stderr.shape != self.values.shape:
            raise ValueError("stderr length does not match values")
        if np.any(np.diff(self.omegas) <= 0):
            raise ValueError("frequency grid must be strictly increasing")
        return self

    @property
    def n_traj(self) -> int:
        return int(self.meta.get("n_traj", 1))

    def with_values(self, values: np.ndarray, **meta: Any) -> "SpectrumEstimate":
        """Copy on the same grid with new values and extra meta entries"""
        return SpectrumEstimate(
            omegas=self.omegas,
            values=values,
            stderr=self.stderr,
            kind=self.kind,
            meta={**self.meta, **meta},
        )

    def to_frame(self) -> pd.DataFrame:
        """Columns omega, value (plus stderr when present)"""
        frame = pd.DataFrame({"omega": self.omegas, "value": self.values})
        if self.stderr is not None:
            frame["stderr"] = self.stderr
        return frame


class CorrelationEstimate(BaseModel):
    """Record correlation function on a lag grid"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    taus: np.ndarray = Field(..., description="Non-negative increasing lags")
    values: np.ndarray = Field(..., description="E[lambda_t lambda_t+tau]; the tau=0 entry excludes the white-noise term")
    stderr: Optional[np.ndarray] = Field(default=None, description="Per-lag standard error (Monte Carlo only)")
    equal_time: Optional[float] = Field(default=None, description="Raw tau=0 moment including the dW^2 contribution")
    kind: CorrelationKind = Field(..., description="Estimator")
    meta: Dict[str, Any] = Field(default_factory=dict, description="dt, k, n_records, ...")

    @field_validator("taus", "values", mode="before")
    @classmethod
    def _as_vectors(cls, value, info) -> np.ndarray:
        return _as_real_vector(value, info.field_name)

    @field_validator("stderr", mode="before")
    @classmethod
    def _as_stderr(cls, value) -> Optional[np.ndarray]:
        return None if value is None else _as_real_vector(value, "stderr")

    @model_validator(mode="after")
    def _check_lags(self) -> "CorrelationEstimate":
        if self.taus.shape != self.values.shape:
            raise ValueError("taus and values differ in length")
        if self.stderr is not None and self.stderr.shape != self.values.shape:
            raise ValueError("stderr length does not match values")
        if self.taus.size and (self.taus[0] < 0 or np.any(np.diff(self.taus) <= 0)):
            raise ValueError("lags must be non-negative and increasing")
        return self

    def to_frame(self) -> pd.DataFrame:
        """Columns tau, value (plus stderr when present)"""
        frame = pd.DataFrame({"tau": self.taus, "value": self.values})
        if self.stderr is not None:
            frame["stderr"] = self.stderr
        return frame
