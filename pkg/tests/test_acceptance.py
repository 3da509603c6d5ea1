"""End-to-end checks of trajectories, spectra and correlations against deterministic results.

These integrate hundreds of long trajectories; run with `pytest -m slow`.
"""

import math

import numpy as np
import pytest

from src.lattice import LatticeSpec, analytic_eigensystem, build_hamiltonian
from src.liouville import (
    build_liouvillian,
    cluster_eigenvalues,
    fit_survival_decay,
    liouvillian_spectrum,
    lindblad_evolve,
    steady_state,
    steady_state_spectrum,
    zeno_rate_candidates,
)
from src.signal import (
    ScalingModel,
    analytic_record_correlation,
    average_spectra,
    band_power,
    dominant_peak,
    fit_lorentzian,
    mc_record_correlation,
    periodogram,
    power_law_exponent,
    refocusing_period,
    restrict_band,
    scaling_fit,
    series_peak_times,
    subtract_floor,
)
from src.sme import IntegrationConfig, MeasurementRecord, ProbeConfig, simulate_ensemble
from src.states import (
    attractor_weights,
    eigenstate_density,
    maximally_mixed,
    pure_state_on_site,
    thermal_state,
)

pytestmark = pytest.mark.slow


def _setup(n_sites, sites, strength):
    spec = LatticeSpec(n_sites=n_sites, coupling=1.0)
    probe = ProbeConfig.on_sites(spec, sites, strength)
    return spec, probe, build_liouvillian(build_hamiltonian(spec), probe)


def _tail(record, start):
    return MeasurementRecord(dt=record.dt, samples=record.samples[start:], probe=record.probe)


def test_ensemble_average_follows_lindblad():
    """Test the trajectory average matches deterministic propagation and every trajectory stays pure"""
    spec, probe, l = _setup(5, [2], 1.0)
    initial = eigenstate_density(analytic_eigensystem(spec), 1)
    integ = IntegrationConfig(dt=1e-3, t_final=20.0, seed=2024, diagnostics_stride=100, ensemble_samples=10)
    ensemble = simulate_ensemble(spec, initial, probe, integ, n_traj=200)

    reference = lindblad_evolve(l, initial, ensemble.sample_times)
    distances = np.linalg.norm(ensemble.mean_states - reference, axis=(1, 2))
    assert distances.max() <= 5.0 / math.sqrt(200)
    assert min(t.purity[-1] for t in ensemble.trajectories) >= 0.999


def test_purity_error_shrinks_with_dt():
    """Test halving dt at least halves the purity defect, down to roundoff"""
    spec, probe, _ = _setup(5, [2], 1.0)
    initial = eigenstate_density(analytic_eigensystem(spec), 1)

    def impurity(dt):
        integ = IntegrationConfig(dt=dt, t_final=10.0, seed=5, diagnostics_stride=int(0.1 / dt), ensemble_samples=2)
        ensemble = simulate_ensemble(spec, initial, probe, integ, n_traj=40)
        assert min(t.purity[-1] for t in ensemble.trajectories) >= 0.999
        return max(np.abs(1.0 - t.purity).max() for t in ensemble.trajectories)

    coarse, fine = impurity(2e-3), impurity(1e-3)
    assert coarse < 1e-3
    assert fine <= max(coarse / 2.0, 1e-10)


def test_parity_collapse():
    """Test a centre probe sends a site-1 start onto one parity sector with even odds"""
    spec, probe, _ = _setup(5, [3], 1.0)
    n_traj = 200
    integ = IntegrationConfig(dt=5e-3, t_final=100.0, seed=7, diagnostics_stride=100, ensemble_samples=2)
    ensemble = simulate_ensemble(spec, pure_state_on_site(spec, 1), probe, integ, n_traj=n_traj)

    finals = np.array([t.parity_weights[-1] for t in ensemble.trajectories])
    collapsed = finals.max(axis=1) > 0.99
    assert collapsed.mean() >= 0.95
    odd_fraction = np.mean(finals[collapsed, 0] > 0.5)
    assert abs(odd_fraction - 0.5) <= 3.0 * 0.5 / math.sqrt(collapsed.sum())

    # the sector weights are a martingale: their mean never leaves 1/2
    odd = np.array([t.parity_weights[:, 0] for t in ensemble.trajectories])
    assert np.all(np.abs(odd.mean(axis=0) - 0.5) <= 3.0 * 0.5 / math.sqrt(n_traj))


def test_two_site_probe_purifies_into_attractors():
    """Test probing sites 2 and 4 purifies every trajectory into one of three attractors with the initial odds"""
    spec, probe, _ = _setup(5, [2, 4], 1.0)
    eig = analytic_eigensystem(spec)
    initial = thermal_state(build_hamiltonian(spec), 1.0)
    groups = [[3], [1, 5], [2, 4]]
    expected = np.array(attractor_weights(initial, eig, groups))

    n_traj = 100
    integ = IntegrationConfig(dt=5e-3, t_final=100.0, seed=11, diagnostics_stride=100, ensemble_samples=2)
    ensemble = simulate_ensemble(spec, initial, probe, integ, n_traj=n_traj)

    assert min(t.purity[-1] for t in ensemble.trajectories) > 0.99
    weights = np.array([attractor_weights(t.final_state, eig, groups) for t in ensemble.trajectories])
    assert weights.max(axis=1).min() > 0.99
    chosen = weights.argmax(axis=1)
    observed = np.bincount(chosen, minlength=3) / n_traj
    sigma = np.sqrt(expected * (1.0 - expected) / n_traj)
    assert np.all(np.abs(observed - expected) <= 3.0 * sigma + 1e-12)

    # the {w1, w5} attractor beats at e1 - e5, the {w2, w4} one at e2 - e4
    outer = eig.energies[0] - eig.energies[4]
    inner = eig.energies[1] - eig.energies[3]
    start = integ.n_steps // 2
    for group, own, other in ((1, outer, inner), (2, inner, outer)):
        members = [t for t, c in zip(ensemble.trajectories, chosen) if c == group]
        if not members:
            continue
        spectra = [periodogram(_tail(t.record, start), mean_subtract=True) for t in members]
        shows_own = [band_power(s, own, 0.4) > band_power(s, other, 0.4) for s in spectra]
        assert np.mean(shows_own) >= 0.9

        excess = subtract_floor(average_spectra(spectra), probe.strength)
        own_line, other_line = band_power(excess, own, 0.4), band_power(excess, other, 0.4)
        assert own_line > 0.0
        assert other_line < 0.3 * own_line


def test_periodogram_matches_finite_record_expectation():
    """Test averaged periodograms against the expectation built from the closed-form record correlation"""
    spec, probe, l = _setup(5, [1], 0.1)
    rho_ss = steady_state(l, rho0=maximally_mixed(5))
    dt, t_final, n_traj = 5e-3, 100.0, 200
    integ = IntegrationConfig(dt=dt, t_final=t_final, seed=3, diagnostics_stride=200, ensemble_samples=2)
    ensemble = simulate_ensemble(spec, rho_ss, probe, integ, n_traj=n_traj)
    averaged = restrict_band(
        average_spectra([periodogram(r, mean_subtract=True) for r in ensemble.records]), 0.2, 4.0
    )

    n_samples = integ.n_steps
    lags = np.arange(n_samples)
    corr = analytic_record_correlation(l, rho_ss, probe.observable, dt * lags, dt)
    connected = corr.values - corr.meta["mean"] ** 2 * dt ** 2
    weights = (n_samples - lags[1:]) * connected[1:]
    cosines = np.cos(np.outer(averaged.omegas, dt * lags[1:]))
    power = n_samples * (connected[0] + dt / (8.0 * probe.strength)) + 2.0 * cosines @ weights
    expected = power / (2.0 * math.pi * n_samples * dt)

    error = np.linalg.norm(averaged.values - expected) / np.linalg.norm(expected)
    assert error < 0.2


@pytest.mark.parametrize("n_sites", [2, 3])
def test_record_correlation_matches_closed_form(n_sites):
    """Test Monte Carlo record correlations against the closed form at every non-zero lag"""
    spec, probe, l = _setup(n_sites, [1], 1.0)
    rho_ss = steady_state(l)
    dt = 5e-3
    integ = IntegrationConfig(dt=dt, t_final=60.0, seed=13, diagnostics_stride=200, ensemble_samples=2)
    ensemble = simulate_ensemble(spec, rho_ss, probe, integ, n_traj=100)

    taus = 20 * dt * np.arange(101)
    mc = mc_record_correlation(ensemble.records, taus, coupling=1.0)
    analytic = analytic_record_correlation(l, rho_ss, probe.observable, taus, dt)
    assert np.all(np.abs(mc.values[1:] - analytic.values[1:]) <= 3.0 * mc.stderr[1:])
    # at tau = 0 the record carries the white-noise moment
    assert mc.equal_time == pytest.approx(dt / (8.0 * probe.strength), rel=0.05)


def test_zeno_regime():
    """Test 1/k escape rates, two eigenvalue clusters and Lorentzian widths for a strong centre probe"""
    strengths = [10.0, 20.0, 40.0]
    rates, widths = [], []
    for k in strengths:
        spec, probe, l = _setup(9, [5], k)
        candidates = zeno_rate_candidates(spec, 5, k)
        survival = fit_survival_decay(l, 5, 5.0 / candidates.variance_rate)
        assert candidates.printed_rate < survival.rate < candidates.variance_rate

        clusters = cluster_eigenvalues(liouvillian_spectrum(l), k, n_probed=1)
        assert clusters.gap > k / 2

        rho_ss = steady_state(l, rho0=pure_state_on_site(spec, 5))
        grid = np.linspace(0.0, 4.0 * survival.rate, 200)
        width = fit_lorentzian(steady_state_spectrum(l, probe.observable, rho_ss, grid), with_offset=True).half_width
        assert width / survival.rate == pytest.approx(1.0, abs=0.3)
        rates.append(survival.rate)
        widths.append(width)

    assert power_law_exponent(strengths, rates)[0] == pytest.approx(-1.0, abs=0.15)
    assert power_law_exponent(strengths, widths)[0] == pytest.approx(-1.0, abs=0.15)


def test_zeno_switching_statistic():
    """Test a k = 10J centre probe leaves the probed population near 0 or 1 most of the time"""
    spec, probe, _ = _setup(21, [11], 10.0)
    initial = eigenstate_density(analytic_eigensystem(spec), 1)
    integ = IntegrationConfig(dt=1e-4, t_final=20.0, seed=17, diagnostics_stride=10, ensemble_samples=2)
    ensemble = simulate_ensemble(spec, initial, probe, integ, n_traj=4)

    populations = np.concatenate([t.site_populations[:, 10] for t in ensemble.trajectories])
    undecided = np.mean((populations > 0.2) & (populations < 0.8))
    assert undecided < 0.2


def _lowest_peaks(sizes, strength):
    peaks = []
    for n_sites in sizes:
        spec, probe, l = _setup(n_sites, [LatticeSpec(n_sites=n_sites, coupling=1.0).middle_site], strength)
        rho_ss = steady_state(l, rho0=maximally_mixed(n_sites))
        spectrum = steady_state_spectrum(l, probe.observable, rho_ss, np.linspace(0.0, 2.0, 800))
        peaks.append(dominant_peak(spectrum))
    return peaks


def test_weak_probe_peaks_scale_as_inverse_square():
    """Test the lowest resolvent peak of a weak centre probe follows c / N^2"""
    sizes = [7, 13, 19, 25]
    peaks = _lowest_peaks(sizes, 0.1)

    # band-edge line e1 - e3
    for n_sites, peak in zip(sizes, peaks):
        edge = 2.0 * (math.cos(math.pi / (n_sites + 1)) - math.cos(3.0 * math.pi / (n_sites + 1)))
        assert peak == pytest.approx(edge, abs=0.01)
    points = list(zip(sizes, peaks))
    squared = scaling_fit(points, ScalingModel.INVERSE_N_SQUARED)
    inverse = scaling_fit(points, ScalingModel.INVERSE_N)
    assert squared.residual < 0.5 * inverse.residual


def test_strong_probe_peaks_scale_as_inverse_n():
    """Test the lowest resolvent peak of a k = J centre probe follows c / N with c near 8.66"""
    sizes = [7, 13, 19, 25]
    points = list(zip(sizes, _lowest_peaks(sizes, 1.0)))
    inverse = scaling_fit(points, ScalingModel.INVERSE_N)
    squared = scaling_fit(points, ScalingModel.INVERSE_N_SQUARED)
    assert inverse.residual < 0.5 * squared.residual
    assert inverse.coefficient == pytest.approx(8.66, rel=0.3)


def test_wave_packet_refocusing():
    """Test a k = J centre probe refocuses the particle about once per ballistic round trip"""
    n_sites, middle = 21, 11
    spec, probe, _ = _setup(n_sites, [middle], 1.0)
    integ = IntegrationConfig(dt=1e-3, t_final=100.0, seed=19, diagnostics_stride=10, ensemble_samples=2)
    ensemble = simulate_ensemble(spec, pure_state_on_site(spec, middle), probe, integ, n_traj=8)

    separation = n_sites / 4.0
    periods = [
        refocusing_period(t.times, t.site_populations[:, middle - 1], min_height=0.3, min_separation=separation)
        for t in ensemble.trajectories
    ]
    finite = [p for p in periods if math.isfinite(p)]
    assert len(finite) >= len(periods) // 2
    assert np.median(finite) == pytest.approx(2.0 * math.pi * n_sites / 8.66, rel=0.5)

    # halfway between refocusing events the particle sits out on the chain, not at the probe
    distance = np.abs(np.arange(1, n_sites + 1) - middle)
    at_peak, between = [], []
    for t in ensemble.trajectories:
        peaks = series_peak_times(t.times, t.site_populations[:, middle - 1], min_height=0.3,
                                  min_separation=separation)
        for first, second in zip(peaks[:-1], peaks[1:]):
            i, j = np.searchsorted(t.times, [first, 0.5 * (first + second)])
            at_peak.append(t.site_populations[i] @ distance)
            between.append(t.site_populations[j] @ distance)
    assert np.mean(between) > np.mean(at_peak)
