"""Turn an ExperimentConfig into lattice, probe, state and grid objects"""

from typing import Optional

import numpy as np

from src.config import ConfigError, ExperimentConfig, InitialStateKind, get_settings
from src.lattice import LatticeSpec, analytic_eigensystem, build_hamiltonian
from src.liouville import LiouvilleOperator, build_liouvillian, default_omega_grid, steady_state
from src.sme import IntegrationConfig, ProbeConfig, default_dt, dt_guard
from src.states import (
    DensityMatrix,
    eigenstate_density,
    maximally_mixed,
    pure_state_on_site,
    thermal_state,
)


def lattice_spec(config: ExperimentConfig, n_sites: Optional[int] = None) -> LatticeSpec:
    return LatticeSpec(n_sites=n_sites or config.lattice.n_sites, coupling=config.lattice.coupling)


def probe_config(
    config: ExperimentConfig,
    spec: LatticeSpec,
    sites: Optional[list] = None,
    strength: Optional[float] = None,
) -> Optional[ProbeConfig]:
    """Probe on the configured sites; None for an unprobed (k = 0) run"""
    strength = config.probe.strength if strength is None else strength
    if strength == 0.0:
        return None
    return ProbeConfig.on_sites(spec, sites or config.probe.sites, strength, config.probe.efficiency)


def liouvillian(spec: LatticeSpec, probe: Optional[ProbeConfig]) -> LiouvilleOperator:
    return build_liouvillian(build_hamiltonian(spec), probe)


def resolved_dt(config: ExperimentConfig) -> float:
    """Configured dt, or the default step for this J and k"""
    if config.integration.dt is not None:
        return config.integration.dt
    return default_dt(config.lattice.coupling, config.probe.strength)


def guard_message(config: ExperimentConfig) -> Optional[str]:
    """Description of a dt guard violation, or None"""
    dt = resolved_dt(config)
    limit = dt_guard(config.lattice.coupling, config.probe.strength)
    if dt <= limit:
        return None
    factor = get_settings().simulation.dt_guard_factor
    return f"dt={dt:g} exceeds guard dt <= {factor:g}/max(|J|, k) = {limit:g}"


def integration_config(config: ExperimentConfig) -> IntegrationConfig:
    """Integration parameters with dt resolved; refuses a guard violation without override"""
    violation = guard_message(config)
    if violation and not config.integration.allow_large_dt:
        raise ConfigError(f"{violation}; set integration.allow_large_dt to override")
    section = config.integration
    return IntegrationConfig(
        dt=resolved_dt(config),
        t_final=section.t_final,
        seed=section.seed,
        renormalize_every_step=section.renormalize_every_step,
        allow_large_dt=section.allow_large_dt,
        diagnostics_stride=section.diagnostics_stride,
    )


def initial_state(config: ExperimentConfig, spec: LatticeSpec, probe: Optional[ProbeConfig]) -> DensityMatrix:
    """Initial density matrix; kind 'steady' starts from the long-time state reached from I/N"""
    section = config.initial_state
    if section.kind == InitialStateKind.EIGENSTATE:
        return eigenstate_density(analytic_eigensystem(spec), section.index)
    if section.kind == InitialStateKind.SITE:
        return pure_state_on_site(spec, section.index)
    if section.kind == InitialStateKind.THERMAL:
        return thermal_state(build_hamiltonian(spec), section.beta)
    return steady_state(liouvillian(spec, probe), rho0=maximally_mixed(spec.n_sites))


def omega_grid(config: ExperimentConfig, spec: LatticeSpec) -> np.ndarray:
    """Configured grid on [0, omega_max], or the default Bohr-frequency span"""
    analysis = config.analysis
    if analysis.omega_max is None:
        return default_omega_grid(analytic_eigensystem(spec), n_points=analysis.omega_points)
    return np.linspace(0.0, analysis.omega_max, analysis.omega_points or get_settings().spectrum.omega_points)


def tau_grid(config: ExperimentConfig, dt: float) -> np.ndarray:
    """Lags on multiples of dt spanning [0, tau_max]"""
    analysis = config.analysis
    steps = np.unique(np.rint(np.linspace(0.0, analysis.tau_max, analysis.tau_points) / dt).astype(int))
    return steps * dt
