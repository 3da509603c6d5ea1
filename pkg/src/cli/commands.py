"""qtraj subcommands"""

import math
from pathlib import Path
from typing import Dict, List, Optional, Type

import numpy as np
import pandas as pd

from src.config import ConfigError, ExperimentConfig, get_settings
from src.lattice import analytic_eigensystem, build_hamiltonian
from src.liouville import (
    cluster_eigenvalues,
    effective_modes,
    fit_survival_decay,
    liouvillian_spectrum,
    localized_modes,
    perturbative_spectrum,
    steady_state,
    steady_state_spectrum,
    write_eigenvalues_csv,
    write_modes_csv,
    zeno_rate_candidates,
    zeno_subspace_dimension,
)
from src.signal import (
    InsufficientDataError,
    NoPeakFoundError,
    ScalingModel,
    analytic_record_correlation,
    average_spectra,
    dominant_peak,
    fit_lorentzian,
    mc_record_correlation,
    periodogram,
    power_law_exponent,
    refocusing_period,
    restrict_band,
    scaling_fit,
    subtract_floor,
    write_correlation_csv,
    write_spectrum_csv,
)
from src.sme import write_ensemble_outputs
from src.states import pure_state_on_site
from src.utils.output import write_frame, write_json
from . import builders
from .base import BaseCommand


# Zeno linewidths are fitted on [0, ZENO_FIT_SPAN x escape rate]
ZENO_FIT_SPAN = 4.0


def _require_probe(config: ExperimentConfig) -> None:
    if config.probe.strength <= 0:
        raise ConfigError("this subcommand needs probe.strength > 0")


def _stationary_state(config: ExperimentConfig, spec, probe, l):
    """Steady state reached from the configured initial state"""
    return steady_state(l, rho0=builders.initial_state(config, spec, probe))


class TrajectoryCommand(BaseCommand):
    """Conditioned trajectories, ensemble summary and averaged state"""

    name = "trajectory"
    description = "Integrate an ensemble of conditioned trajectories"

    def execute(self, config: ExperimentConfig, out_dir: Path) -> Dict[str, Path]:
        ensemble = self.run_ensemble(config)
        paths = write_ensemble_outputs(ensemble, str(out_dir), config.model_dump(mode="json"))
        if config.probe.strength > 0 and len(config.probe.sites) == 1:
            paths["refocusing"] = write_json(self._refocusing(config, ensemble), out_dir / "refocusing.json")
        return paths

    def _refocusing(self, config: ExperimentConfig, ensemble) -> dict:
        """Spacing of population maxima on the probed site, per trajectory"""
        site = config.probe.sites[0]
        # packets return no sooner than N/(2J); maxima closer than half that are one event
        separation = config.lattice.n_sites / (4.0 * config.lattice.coupling) if config.lattice.coupling > 0 else None
        periods = [
            refocusing_period(t.times, t.site_populations[:, site - 1], min_separation=separation)
            for t in ensemble.trajectories
        ]
        finite = [p for p in periods if math.isfinite(p)]
        median = float(np.median(finite)) if finite else None
        self.logger.info(f"Site {site}: median refocusing period {median} over {len(finite)} trajectories")
        return {"site": site, "periods": [p if math.isfinite(p) else None for p in periods], "median_period": median}


class SpectrumRecordCommand(BaseCommand):
    """Averaged record periodogram, raw and with the shot-noise floor removed"""

    name = "spectrum-record"
    description = "Average record periodograms over an ensemble"

    def execute(self, config: ExperimentConfig, out_dir: Path) -> Dict[str, Path]:
        _require_probe(config)
        spec = builders.lattice_spec(config)
        ensemble = self.run_ensemble(config)
        omega_max = float(builders.omega_grid(config, spec)[-1])
        spectra = [
            restrict_band(periodogram(record, mean_subtract=config.analysis.mean_subtract), 0.0, omega_max)
            for record in ensemble.records
        ]
        averaged = average_spectra(spectra)
        floored = subtract_floor(averaged, config.probe.strength)
        self.logger.info(f"Averaged {len(spectra)} periodograms on {averaged.omegas.shape[0]} frequencies")
        main = floored if config.analysis.floor_subtract else averaged
        return {
            "spectrum_record": write_spectrum_csv(main, out_dir / "spectrum_record.csv"),
            "spectrum_record_raw": write_spectrum_csv(averaged, out_dir / "spectrum_record_raw.csv"),
            "spectrum_record_floor_subtracted": write_spectrum_csv(
                floored, out_dir / "spectrum_record_floor_subtracted.csv"
            ),
        }


class SpectrumSteadyCommand(BaseCommand):
    """Resolvent spectrum of the probed observable"""

    name = "spectrum-steady"
    description = "Steady-state spectrum from the generator resolvent"

    def execute(self, config: ExperimentConfig, out_dir: Path) -> Dict[str, Path]:
        _require_probe(config)
        spec = builders.lattice_spec(config)
        probe = builders.probe_config(config, spec)
        l = builders.liouvillian(spec, probe)
        rho_ss = _stationary_state(config, spec, probe, l)
        spectrum = steady_state_spectrum(l, probe.observable, rho_ss, builders.omega_grid(config, spec))
        return {"spectrum_steady": write_spectrum_csv(spectrum, out_dir / "spectrum_steady.csv")}


class SpectrumPerturbativeCommand(BaseCommand):
    """Weak-probing Lorentzian sum next to the resolvent spectrum it is scaled to"""

    name = "spectrum-perturbative"
    description = "Perturbative line-shape spectrum"

    def execute(self, config: ExperimentConfig, out_dir: Path) -> Dict[str, Path]:
        _require_probe(config)
        spec = builders.lattice_spec(config)
        probe = builders.probe_config(config, spec)
        l = builders.liouvillian(spec, probe)
        rho_ss = _stationary_state(config, spec, probe, l)
        grid = builders.omega_grid(config, spec)
        reference = steady_state_spectrum(l, probe.observable, rho_ss, grid)
        spectrum = perturbative_spectrum(
            analytic_eigensystem(spec), config.probe.sites, rho_ss, grid, config.probe.strength, reference=reference
        )
        self.logger.info(f"Perturbative spectrum scale {spectrum.meta['scale']:.6g}")
        return {
            "spectrum_perturbative": write_spectrum_csv(spectrum, out_dir / "spectrum_perturbative.csv"),
            "spectrum_steady": write_spectrum_csv(reference, out_dir / "spectrum_steady.csv"),
        }


class LiouvilleEigCommand(BaseCommand):
    """Generator eigenvalues and their clustering"""

    name = "liouville-eig"
    description = "Eigenvalues of the Lindblad generator"

    def execute(self, config: ExperimentConfig, out_dir: Path) -> Dict[str, Path]:
        spec = builders.lattice_spec(config)
        probe = builders.probe_config(config, spec)
        spectrum = liouvillian_spectrum(builders.liouvillian(spec, probe))
        paths = {"liouville_eigenvalues": write_eigenvalues_csv(spectrum, out_dir / "liouville_eigenvalues.csv")}
        if probe is not None:
            clusters = cluster_eigenvalues(spectrum, probe.strength, n_probed=len(config.probe.sites))
            self.logger.info(
                f"Eigenvalue groups: {clusters.near_zero} near Re=0, {clusters.near_strength} near Re=-k, "
                f"gap={clusters.gap}"
            )
            paths["liouville_clusters"] = write_json(clusters.model_dump(), out_dir / "liouville_clusters.json")
        return paths


class EffectiveModesCommand(BaseCommand):
    """Modes of H - i k O and their weight on the probed sites"""

    name = "effective-modes"
    description = "Eigenmodes of the effective non-Hermitian Hamiltonian"

    def execute(self, config: ExperimentConfig, out_dir: Path) -> Dict[str, Path]:
        _require_probe(config)
        spec = builders.lattice_spec(config)
        probe = builders.probe_config(config, spec)
        modes = effective_modes(build_hamiltonian(spec), probe)
        weights = modes.site_weights(config.probe.sites)
        summary = {
            "zeno_subspace_dimension": zeno_subspace_dimension(modes),
            "localized_modes": [i + 1 for i in localized_modes(modes, config.probe.sites)],
            "max_weight_of_other_modes": float(np.sort(weights)[-2]) if weights.shape[0] > 1 else None,
        }
        return {
            "effective_modes": write_modes_csv(modes, out_dir / "effective_modes.csv"),
            "effective_modes_summary": write_json(summary, out_dir / "effective_modes_summary.json"),
        }


class PeakScanCommand(BaseCommand):
    """Lowest spectral peak versus chain length, with 1/N and 1/N^2 fits"""

    name = "peak-scan"
    description = "Dominant peak frequency across chain lengths"

    def _fits(self, sizes: List[int], peaks: List[float], label: str) -> Dict[str, Optional[dict]]:
        points = [(n, p) for n, p in zip(sizes, peaks) if np.isfinite(p)]
        if len(points) < 2:
            raise InsufficientDataError(f"only {len(points)} {label} peaks found across sizes {sizes}")
        if len(points) < 3:
            self.logger.warning(f"Only {len(points)} peaks found; skipping scaling fits")
            return {m.value: None for m in ScalingModel}
        return {m.value: scaling_fit(points, m).model_dump(mode="json") for m in ScalingModel}

    def execute(self, config: ExperimentConfig, out_dir: Path) -> Dict[str, Path]:
        _require_probe(config)
        sizes = config.analysis.sizes
        steady_peaks, record_peaks = [], []
        for n_sites in sizes:
            spec = builders.lattice_spec(config, n_sites)
            middle = [spec.middle_site]
            probe = builders.probe_config(config, spec, sites=middle)
            l = builders.liouvillian(spec, probe)
            rho_ss = _stationary_state(config, spec, probe, l)
            grid = builders.omega_grid(config, spec)
            spectrum = steady_state_spectrum(l, probe.observable, rho_ss, grid)
            steady_peaks.append(self._peak(spectrum, n_sites, "steady-state"))

            if config.analysis.record_peaks:
                ensemble = self.run_ensemble(config, n_sites=n_sites, sites=middle)
                averaged = average_spectra([
                    restrict_band(periodogram(r, mean_subtract=config.analysis.mean_subtract), 0.0, float(grid[-1]))
                    for r in ensemble.records
                ])
                record_peaks.append(self._peak(subtract_floor(averaged, config.probe.strength), n_sites, "record"))

        columns = {"n_sites": sizes, "peak_steady": steady_peaks}
        fits = {"steady": self._fits(sizes, steady_peaks, "steady-state")}
        if config.analysis.record_peaks:
            columns["peak_record"] = record_peaks
            fits["record"] = self._fits(sizes, record_peaks, "record")
        return {
            "peak_scan": write_frame(pd.DataFrame(columns), out_dir / "peak_scan.csv"),
            "peak_scan_fits": write_json(fits, out_dir / "peak_scan_fits.json"),
        }

    def _peak(self, spectrum, n_sites: int, label: str) -> float:
        try:
            return dominant_peak(spectrum)
        except NoPeakFoundError as e:
            self.logger.warning(f"N={n_sites}: no {label} peak ({e})")
            return math.nan


class ZenoCommand(BaseCommand):
    """Survival-decay fits, analytic rate candidates and Lorentzian widths across k"""

    name = "zeno"
    description = "Strong-probing escape rates and spectral widths"

    def execute(self, config: ExperimentConfig, out_dir: Path) -> Dict[str, Path]:
        if len(config.probe.sites) != 1:
            raise ConfigError("zeno needs a single probed site")
        site = config.probe.sites[0]
        spec = builders.lattice_spec(config)
        rows, curves = [], []
        for strength in config.analysis.strengths:
            probe = builders.probe_config(config, spec, strength=strength)
            l = builders.liouvillian(spec, probe)
            candidates = zeno_rate_candidates(spec, site, strength)
            if candidates.variance_rate <= 0:
                raise ConfigError(f"site {site} has no neighbours; nothing escapes")
            t_max = config.analysis.survival_t_max or 5.0 / candidates.variance_rate
            survival = fit_survival_decay(l, site, t_max)

            rho_ss = steady_state(l, rho0=pure_state_on_site(spec, site))
            points = config.analysis.omega_points or get_settings().spectrum.omega_points
            grid = np.linspace(0.0, ZENO_FIT_SPAN * survival.rate, points)
            # the fast cluster adds lines of width ~k, nearly flat on this band; the offset takes them up
            line = fit_lorentzian(steady_state_spectrum(l, probe.observable, rho_ss, grid), with_offset=True)
            width = line.half_width

            rows.append({
                "strength": strength,
                "fitted_rate": survival.rate,
                "plateau": survival.plateau,
                "variance_rate": candidates.variance_rate,
                "printed_rate": candidates.printed_rate,
                "lorentzian_half_width": width,
                "lorentzian_offset": line.offset,
            })
            curves.append(pd.DataFrame({"strength": strength, "t": survival.times, "p_site": survival.survival}))
            self.logger.info(
                f"k={strength:g}: fitted rate {survival.rate:.5g}, candidates "
                f"{candidates.variance_rate:.5g} / {candidates.printed_rate:.5g}, width {width:.5g}"
            )

        table = pd.DataFrame(rows)
        summary = {"site": site, "tau0_readings": ["variance 4/(k tau0^2)", "printed 4 J^2/k"]}
        if len(rows) >= 2:
            summary["rate_exponent"] = power_law_exponent(table["strength"], table["fitted_rate"])[0]
            summary["width_exponent"] = power_law_exponent(table["strength"], table["lorentzian_half_width"])[0]
        return {
            "zeno_rates": write_frame(table, out_dir / "zeno_rates.csv"),
            "zeno_survival": write_frame(pd.concat(curves, ignore_index=True), out_dir / "zeno_survival.csv"),
            "zeno_summary": write_json(summary, out_dir / "zeno_summary.json"),
        }


class CorrelationCommand(BaseCommand):
    """Closed-form record correlation against the Monte Carlo estimate"""

    name = "correlation"
    description = "Analytic versus Monte Carlo record correlation"

    def execute(self, config: ExperimentConfig, out_dir: Path) -> Dict[str, Path]:
        _require_probe(config)
        spec = builders.lattice_spec(config)
        probe = builders.probe_config(config, spec)
        l = builders.liouvillian(spec, probe)
        dt = builders.resolved_dt(config)
        taus = builders.tau_grid(config, dt)
        rho_ss = _stationary_state(config, spec, probe, l)
        analytic = analytic_record_correlation(l, rho_ss, probe.observable, taus, dt)
        ensemble = self.run_ensemble(config)
        mc = mc_record_correlation(ensemble.records, taus, coupling=config.lattice.coupling)
        return {
            "correlation_analytic": write_correlation_csv(analytic, out_dir / "correlation_analytic.csv"),
            "correlation_mc": write_correlation_csv(mc, out_dir / "correlation_mc.csv"),
            "correlation_equal_time": write_json(
                {"equal_time": mc.equal_time, "noise_moment": dt / (8.0 * config.probe.strength)},
                out_dir / "correlation_equal_time.json",
            ),
        }


COMMANDS: Dict[str, Type[BaseCommand]] = {
    command.name: command
    for command in (
        TrajectoryCommand,
        SpectrumRecordCommand,
        SpectrumSteadyCommand,
        SpectrumPerturbativeCommand,
        LiouvilleEigCommand,
        EffectiveModesCommand,
        PeakScanCommand,
        ZenoCommand,
        CorrelationCommand,
    )
}
