"""CSV export of spectra and correlation functions"""

from pathlib import Path

from src.utils.output import write_frame
from .models import CorrelationEstimate, SpectrumEstimate


def write_spectrum_csv(spectrum: SpectrumEstimate, path: Path) -> Path:
    """Columns omega, value and stderr when present"""
    return write_frame(spectrum.to_frame(), path)


def write_correlation_csv(correlation: CorrelationEstimate, path: Path) -> Path:
    """Columns tau, value and stderr when present"""
    return write_frame(correlation.to_frame(), path)
