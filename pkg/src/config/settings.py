"""Application settings and configuration"""

import os
from typing import Optional
from pydantic import BaseModel, Field
from dotenv import load_dotenv

# Load environment variables
load_dotenv()


class LoggingSettings(BaseModel):
    """Logging configuration"""
    level: str = Field(default="INFO", description="Log level (DEBUG, INFO, WARNING, ERROR)")
    file: Optional[str] = Field(default="./logs/qtraj.log", description="Log file path (empty = console only)")


class SimulationSettings(BaseModel):
    """Trajectory integration and ensemble settings"""
    threads: int = Field(default=-1, description="Parallel workers for ensembles (-1 = all cores)")
    joblib_backend: str = Field(default="loky", description="joblib backend: loky, threading, multiprocessing")
    dt_guard_factor: float = Field(default=0.01, description="Largest allowed dt in units of 1/max(|J|, k)")
    dt_default_factor: float = Field(default=0.001, description="Default dt in units of 1/max(|J|, k)")
    ensemble_samples: int = Field(default=11, description="Coarse time points kept per trajectory for ensemble averages")


class SpectrumSettings(BaseModel):
    """Frequency grid defaults"""
    omega_points: int = Field(default=400, description="Points on the default frequency grid")
    omega_span: float = Field(default=1.2, description="Grid extends to this multiple of the largest Bohr frequency")


class OutputSettings(BaseModel):
    """Output settings"""
    out_dir: str = Field(default="./output", description="Default output directory")
    csv_float_format: str = Field(default="%.12e", description="printf-style float format for CSV files")


class Settings(BaseModel):
    """Application settings"""
    logging: LoggingSettings = Field(default_factory=LoggingSettings)
    simulation: SimulationSettings = Field(default_factory=SimulationSettings)
    spectrum: SpectrumSettings = Field(default_factory=SpectrumSettings)
    output: OutputSettings = Field(default_factory=OutputSettings)

    @classmethod
    def from_env(cls) -> "Settings":
        """Create settings from environment variables"""
        return cls(
            logging=LoggingSettings(
                level=os.getenv("LOG_LEVEL", "INFO"),
                file=os.getenv("LOG_FILE", "./logs/qtraj.log") or None
            ),
            simulation=SimulationSettings(
                threads=int(os.getenv("QTRAJ_THREADS", "-1")),
                joblib_backend=os.getenv("QTRAJ_JOBLIB_BACKEND", "loky"),
                dt_guard_factor=float(os.getenv("QTRAJ_DT_GUARD_FACTOR", "0.01")),
                dt_default_factor=float(os.getenv("QTRAJ_DT_DEFAULT_FACTOR", "0.001")),
                ensemble_samples=int(os.getenv("QTRAJ_ENSEMBLE_SAMPLES", "11")),
            ),
            spectrum=SpectrumSettings(
                omega_points=int(os.getenv("QTRAJ_OMEGA_POINTS", "400")),
                omega_span=float(os.getenv("QTRAJ_OMEGA_SPAN", "1.2")),
            ),
            output=OutputSettings(
                out_dir=os.getenv("QTRAJ_OUTPUT_DIR", "./output"),
                csv_float_format=os.getenv("QTRAJ_CSV_FLOAT_FORMAT", "%.12e"),
            )
        )


# Global settings instance
_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """Get or create global settings instance"""
    global _settings
    if _settings is None:
        _settings = Settings.from_env()
    return _settings
