"""Base class for experiment subcommands"""

from abc import ABC, abstractmethod
from pathlib import Path
from typing import Dict, List, Optional

from src.config import ExperimentConfig
from src.sme import EnsembleResult, simulate_ensemble
from src.utils.logger import get_logger
from . import builders


class BaseCommand(ABC):
    """One qtraj subcommand: reads a validated config, writes files under out_dir"""

    name: str = ""
    description: str = ""

    def __init__(self, n_jobs: Optional[int] = None):
        self.n_jobs = n_jobs
        self.logger = get_logger(self.name)

    @abstractmethod
    def execute(self, config: ExperimentConfig, out_dir: Path) -> Dict[str, Path]:
        """Run the analysis and return the written files by label"""
        pass

    def run_ensemble(self, config: ExperimentConfig, n_sites: Optional[int] = None,
                     sites: Optional[List[int]] = None) -> EnsembleResult:
        """Ensemble for the configured experiment, optionally on another chain length or probe"""
        spec = builders.lattice_spec(config, n_sites)
        probe = builders.probe_config(config, spec, sites=sites)
        initial = builders.initial_state(config, spec, probe)
        integ = builders.integration_config(config)
        return simulate_ensemble(spec, initial, probe, integ, config.ensemble.n_traj, n_jobs=self.n_jobs)
