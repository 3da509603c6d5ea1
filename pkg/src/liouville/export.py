"""CSV export of generator eigenvalues and effective modes"""

from pathlib import Path

import pandas as pd

from src.utils.output import write_frame
from .generator import LiouvilleSpectrum
from .zeno import EffectiveModes


def eigenvalue_frame(spectrum: LiouvilleSpectrum) -> pd.DataFrame:
    """Columns re, im"""
    return pd.DataFrame({"re": spectrum.eigenvalues.real, "im": spectrum.eigenvalues.imag})


def write_eigenvalues_csv(spectrum: LiouvilleSpectrum, path: Path) -> Path:
    return write_frame(eigenvalue_frame(spectrum), path)


def mode_frame(modes: EffectiveModes) -> pd.DataFrame:
    """One row per (mode, site): eigenvalue parts and |<n|w_l>|^2"""
    rows = []
    for l in range(modes.dim):
        for n in range(modes.dim):
            rows.append(
                {
                    "mode": l + 1,
                    "re": modes.values[l].real,
                    "im": modes.values[l].imag,
                    "site": n + 1,
                    "weight": abs(modes.states[n, l]) ** 2,
                }
            )
    return pd.DataFrame(rows)


def write_modes_csv(modes: EffectiveModes, path: Path) -> Path:
    return write_frame(mode_frame(modes), path)
