"""Size-scaling and power-law fits"""

import math
from enum import Enum
from typing import Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field


class InsufficientDataError(ValueError):
    """Too few points or records for the requested estimate"""


class ScalingModel(str, Enum):
    """f(N) = c / N^p with fixed p"""
    INVERSE_N = "inverse_N"
    INVERSE_N_SQUARED = "inverse_N_squared"

    @property
    def power(self) -> int:
        return 1 if self is ScalingModel.INVERSE_N else 2


class ScalingFit(BaseModel):
    """Least-squares coefficient of c / N^p and its RMS relative residual"""
    model: ScalingModel = Field(..., description="Fitted law")
    coefficient: float = Field(..., description="c")
    residual: float = Field(..., description="RMS of (c N^-p - f) / f")
    n_points: int = Field(..., description="Points used")


def scaling_fit(points: Sequence[Tuple[float, float]], model: ScalingModel) -> ScalingFit:
    """Fit f = c / N^p in closed form, c = sum f N^-p / sum N^-2p"""
    if len(points) < 3:
        raise InsufficientDataError(f"scaling fit needs at least 3 points, got {len(points)}")
    sizes = np.array([p[0] for p in points], dtype=float)
    values = np.array([p[1] for p in points], dtype=float)
    if np.any(sizes <= 0) or np.any(values == 0):
        raise ValueError("sizes must be positive and values non-zero")
    basis = sizes ** (-model.power)
    coefficient = float(np.dot(values, basis) / np.dot(basis, basis))
    relative = (coefficient * basis - values) / values
    return ScalingFit(
        model=model,
        coefficient=coefficient,
        residual=float(math.sqrt(np.mean(relative ** 2))),
        n_points=len(points),
    )


def power_law_exponent(xs: Sequence[float], ys: Sequence[float]) -> Tuple[float, float]:
    """(exponent, prefactor) of y = a x^p from a straight-line fit in log-log"""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape[0] < 2 or xs.shape != ys.shape:
        raise InsufficientDataError("power-law fit needs at least 2 matching points")
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise ValueError("power-law fit needs positive data")
    slope, intercept = np.polyfit(np.log(xs), np.log(ys), 1)
    return float(slope), float(math.exp(intercept))
