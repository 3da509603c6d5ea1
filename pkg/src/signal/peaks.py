"""Peak extraction, band weights and Lorentzian fits"""

import math
from typing import Optional

import numpy as np
from pydantic import BaseModel, Field
from scipy.integrate import trapezoid
from scipy.optimize import curve_fit
from scipy.signal import find_peaks

from .models import SpectrumEstimate, SpectrumKind

# prominences below this fraction of the spectrum's magnitude are solver roundoff
NUMERICAL_FLOOR = 1e-9
# the noise reading skips this many half-widths either side of a peak
EXCLUDED_WIDTHS = 3.0


class NoPeakFoundError(ValueError):
    """No local maximum passed the prominence test"""


def _grid_step(omegas: np.ndarray) -> float:
    return float(np.median(np.diff(omegas))) if omegas.shape[0] > 1 else 1.0


def _local_noise(spectrum: SpectrumEstimate, index: int, left: float, right: float, half_window: int) -> float:
    """Noise scale next to a peak, read beyond three half-widths of the peak"""
    size = spectrum.values.shape[0]
    reach = EXCLUDED_WIDTHS * max(index - left, right - index, 1.0)
    start, stop = max(0, int(math.floor(index - reach))), min(size, int(math.ceil(index + reach)) + 1)
    lo, hi = max(0, start - half_window), min(size, stop + half_window)
    outside = np.r_[lo:max(lo, start), min(hi, stop):hi]
    if outside.size == 0:
        outside = np.setdiff1d(np.arange(size), np.arange(start, stop))
    if spectrum.stderr is not None:
        return float(np.median(spectrum.stderr[outside])) if outside.size else float(spectrum.stderr[index])
    # a single periodogram ordinate scatters by its own mean
    return float(np.median(np.abs(spectrum.values[outside]))) if outside.size else 0.0


def _refine(omegas: np.ndarray, values: np.ndarray, index: int) -> float:
    left, centre, right = values[index - 1], values[index], values[index + 1]
    curvature = left - 2.0 * centre + right
    offset = 0.5 * (left - right) / curvature if curvature != 0 else 0.0
    return float(omegas[index] + offset * (omegas[index + 1] - omegas[index - 1]) / 2.0)


def dominant_peak(
    spectrum: SpectrumEstimate,
    omega_min: Optional[float] = None,
    relative_prominence: float = 0.25,
    noise_factor: float = 3.0,
    noise_window: Optional[int] = None,
) -> float:
    """Lowest-frequency qualifying peak above omega_min, refined by parabolic interpolation.

    Prominence is measured from the higher of the two bases either side of a
    maximum, so a line riding on a broad background keeps only its own
    height. A maximum qualifies when its prominence reaches
    relative_prominence times the largest prominence above omega_min. Sampled
    spectra (periodograms, or anything carrying a stderr) must also clear
    noise_factor times the noise next to the peak: the median stderr
    beyond three half-widths of the peak, or for a bare periodogram the
    median level there. omega_min defaults to three grid steps.
    """
    omegas, values = spectrum.omegas, spectrum.values
    if omegas.shape[0] < 3:
        raise NoPeakFoundError("spectrum has fewer than 3 points")
    step = _grid_step(omegas)
    omega_min = 3.0 * step if omega_min is None else omega_min
    half_window = noise_window or max(5, omegas.shape[0] // 20)
    sampled = spectrum.stderr is not None or spectrum.kind is SpectrumKind.PERIODOGRAM

    indices, props = find_peaks(values, prominence=0.0, width=0.0)
    above = omegas[indices] > omega_min
    if not above.any():
        raise NoPeakFoundError(f"no local maximum above omega={omega_min:.4g}")
    indices = indices[above]
    prominences = props["prominences"][above]
    lefts, rights = props["left_ips"][above], props["right_ips"][above]

    floor = NUMERICAL_FLOOR * float(np.max(np.abs(values)))
    threshold = max(relative_prominence * float(prominences.max()), floor)
    for index, prominence, left, right in zip(indices, prominences, lefts, rights):
        if prominence < threshold:
            continue
        if sampled and prominence <= noise_factor * _local_noise(spectrum, index, left, right, half_window):
            continue
        return _refine(omegas, values, index)
    raise NoPeakFoundError(
        f"no peak above omega={omega_min:.4g} with prominence >= {relative_prominence:g} x the largest"
        + (f" and > {noise_factor:g} x local noise" if sampled else "")
    )


def band_power(spectrum: SpectrumEstimate, center: float, half_width: float) -> float:
    """Integral of the spectrum over |omega - center| <= half_width"""
    if half_width <= 0:
        raise ValueError(f"half_width must be positive, got {half_width}")
    mask = np.abs(spectrum.omegas - center) <= half_width
    if mask.sum() < 2:
        return 0.0
    return float(trapezoid(spectrum.values[mask], spectrum.omegas[mask]))


def series_peak_times(
    times: np.ndarray,
    values: np.ndarray,
    min_height: Optional[float] = None,
    min_separation: Optional[float] = None,
) -> np.ndarray:
    """Times of local maxima of a population series"""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.shape != values.shape:
        raise ValueError("times and values differ in length")
    distance = None
    if min_separation is not None and times.shape[0] > 1:
        distance = max(1, int(round(min_separation / (times[1] - times[0]))))
    indices, _ = find_peaks(values, height=min_height, distance=distance)
    return times[indices]


def refocusing_period(
    times: np.ndarray,
    values: np.ndarray,
    min_height: float = 0.4,
    min_separation: Optional[float] = None,
) -> float:
    """Median time between dominant maxima of a probed-site population; NaN with fewer than two"""
    peaks = series_peak_times(times, values, min_height=min_height, min_separation=min_separation)
    if peaks.shape[0] < 2:
        return math.nan
    return float(np.median(np.diff(peaks)))


class LorentzianFit(BaseModel):
    """S(omega) = amplitude * width^2 / (omega^2 + width^2) + offset"""
    half_width: float = Field(..., description="Half width at half maximum")
    amplitude: float = Field(..., description="Peak height above the offset")
    offset: float = Field(default=0.0, description="Constant background")
    rms_error: float = Field(..., description="Root-mean-square residual")


def _lorentzian(omega: np.ndarray, amplitude: float, width: float, offset: float = 0.0) -> np.ndarray:
    return amplitude * width ** 2 / (omega ** 2 + width ** 2) + offset


def fit_lorentzian(spectrum: SpectrumEstimate, with_offset: bool = False) -> LorentzianFit:
    """Fit a zero-centred Lorentzian; the start width is read off the half-maximum crossing"""
    omegas, values = spectrum.omegas, spectrum.values
    peak = float(values[np.argmin(np.abs(omegas))])
    below = np.flatnonzero(values < 0.5 * peak)
    width0 = float(abs(omegas[below[0]])) if below.size else float(omegas[-1] - omegas[0]) / 2.0
    width0 = max(width0, _grid_step(omegas))

    if with_offset:
        params, _ = curve_fit(_lorentzian, omegas, values, p0=[peak, width0, 0.0], maxfev=20000)
        amplitude, width, offset = (float(p) for p in params)
        model = _lorentzian(omegas, amplitude, width, offset)
    else:
        params, _ = curve_fit(lambda w, a, g: _lorentzian(w, a, g), omegas, values, p0=[peak, width0], maxfev=20000)
        amplitude, width = (float(p) for p in params)
        offset = 0.0
        model = _lorentzian(omegas, amplitude, width)
    rms = float(np.sqrt(np.mean((model - values) ** 2)))
    return LorentzianFit(half_width=abs(width), amplitude=amplitude, offset=offset, rms_error=rms)
