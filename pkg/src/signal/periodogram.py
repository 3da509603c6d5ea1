"""Finite-time power spectra of measurement records"""

import math
from typing import Iterable, List, Optional

import numpy as np
import scipy.signal

from src.sme.models import MeasurementRecord
from .models import SpectrumEstimate, SpectrumKind

QUADRATURE_CHUNK = 256


def shot_noise_floor(strength: float) -> float:
    """White-noise level 1/(16 pi k) that the record noise adds to a periodogram"""
    if strength <= 0:
        raise ValueError(f"strength must be positive, got {strength}")
    return 1.0 / (16.0 * math.pi * strength)


def dft_grid(n_samples: int, dt: float) -> np.ndarray:
    """omega_m = 2 pi m / T for m = 0..M/2"""
    return 2.0 * math.pi * np.arange(n_samples // 2 + 1) / (n_samples * dt)


def _direct_transform(samples: np.ndarray, times: np.ndarray, omegas: np.ndarray) -> np.ndarray:
    """sum_i exp(-i omega t_i) x_i on an arbitrary grid, in chunks of frequencies"""
    out = np.empty(omegas.shape[0], dtype=complex)
    for start in range(0, omegas.shape[0], QUADRATURE_CHUNK):
        block = omegas[start:start + QUADRATURE_CHUNK]
        out[start:start + QUADRATURE_CHUNK] = np.exp(-1j * np.outer(block, times)) @ samples
    return out


def periodogram(
    record: MeasurementRecord,
    omega_grid: Optional[Iterable[float]] = None,
    mean_subtract: bool = False,
    window: Optional[str] = None,
) -> SpectrumEstimate:
    """P(omega) = |sum_i exp(-i omega t_i) lambda_i|^2 / (2 pi T), t_i = i dt.

    The raw increments already carry the dt measure. Without omega_grid the
    DFT grid 2 pi m / T is used (FFT); any other grid falls back to direct
    quadrature. window="hann" tapers the record, scaled to unit mean square.
    """
    samples = np.array(record.samples, dtype=float)
    if samples.shape[0] == 0:
        raise ValueError("record is empty")
    if mean_subtract:
        samples = samples - samples.mean()
    if window is not None:
        taper = scipy.signal.get_window(window, samples.shape[0], fftbins=False)
        samples = samples * taper / math.sqrt(np.mean(taper ** 2))

    duration = record.duration
    if omega_grid is None:
        omegas = dft_grid(samples.shape[0], record.dt)
        transform = np.fft.rfft(samples)
    else:
        omegas = np.asarray(list(omega_grid), dtype=float)
        transform = _direct_transform(samples, record.times, omegas)

    values = np.abs(transform) ** 2 / (2.0 * math.pi * duration)
    return SpectrumEstimate(
        omegas=omegas,
        values=values,
        kind=SpectrumKind.PERIODOGRAM,
        meta={
            "strength": record.probe.strength,
            "sites": record.probe.sites,
            "T": duration,
            "dt": record.dt,
            "n_traj": 1,
            "mean_subtract": mean_subtract,
            "window": window,
        },
    )


def average_spectra(spectra: List[SpectrumEstimate]) -> SpectrumEstimate:
    """Pointwise mean with standard error; meta n_traj is the summed count"""
    if not spectra:
        raise ValueError("no spectra to average")
    first = spectra[0]
    for other in spectra[1:]:
        if other.kind != first.kind:
            raise ValueError(f"cannot average {other.kind.value} with {first.kind.value} spectra")
        if other.omegas.shape != first.omegas.shape or not np.array_equal(other.omegas, first.omegas):
            raise ValueError("spectra must share an identical frequency grid")
    if len(spectra) == 1:
        return first

    stacked = np.vstack([s.values for s in spectra])
    stderr = stacked.std(axis=0, ddof=1) / math.sqrt(len(spectra))
    return SpectrumEstimate(
        omegas=first.omegas,
        values=stacked.mean(axis=0),
        stderr=stderr,
        kind=first.kind,
        meta={**first.meta, "n_traj": sum(s.n_traj for s in spectra)},
    )


def subtract_floor(spectrum: SpectrumEstimate, strength: float) -> SpectrumEstimate:
    """Remove the shot-noise floor from a periodogram"""
    floor = shot_noise_floor(strength)
    return spectrum.with_values(spectrum.values - floor, floor_subtracted=floor)


def restrict_band(spectrum: SpectrumEstimate, omega_min: float, omega_max: float) -> SpectrumEstimate:
    """Sub-grid with omega_min <= omega <= omega_max"""
    mask = (spectrum.omegas >= omega_min) & (spectrum.omegas <= omega_max)
    if not mask.any():
        raise ValueError(f"no grid points in [{omega_min}, {omega_max}]")
    return SpectrumEstimate(
        omegas=spectrum.omegas[mask],
        values=spectrum.values[mask],
        stderr=None if spectrum.stderr is None else spectrum.stderr[mask],
        kind=spectrum.kind,
        meta=dict(spectrum.meta),
    )
