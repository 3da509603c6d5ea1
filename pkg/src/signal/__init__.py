"""Record spectra, peak analysis, scaling fits and correlation functions"""

from .models import SpectrumKind, CorrelationKind, SpectrumEstimate, CorrelationEstimate
from .periodogram import (
    shot_noise_floor,
    dft_grid,
    periodogram,
    average_spectra,
    subtract_floor,
    restrict_band,
)
from .peaks import (
    NoPeakFoundError,
    LorentzianFit,
    dominant_peak,
    band_power,
    series_peak_times,
    refocusing_period,
    fit_lorentzian,
)
from .scaling import InsufficientDataError, ScalingModel, ScalingFit, scaling_fit, power_law_exponent
from .correlation import analytic_record_correlation, mc_record_correlation, transient_time
from .export import write_spectrum_csv, write_correlation_csv

__all__ = [
    "SpectrumKind",
    "CorrelationKind",
    "SpectrumEstimate",
    "CorrelationEstimate",
    "shot_noise_floor",
    "dft_grid",
    "periodogram",
    "average_spectra",
    "subtract_floor",
    "restrict_band",
    "NoPeakFoundError",
    "LorentzianFit",
    "dominant_peak",
    "band_power",
    "series_peak_times",
    "refocusing_period",
    "fit_lorentzian",
    "InsufficientDataError",
    "ScalingModel",
    "ScalingFit",
    "scaling_fit",
    "power_law_exponent",
    "analytic_record_correlation",
    "mc_record_correlation",
    "transient_time",
    "write_spectrum_csv",
    "write_correlation_csv",
]
