"""Tests for record spectra, peaks, scaling fits and correlations"""

import math

import numpy as np
import pandas as pd
import pytest

from src.lattice import LatticeSpec, build_hamiltonian
from src.liouville import build_liouvillian, steady_state
from src.signal import (
    InsufficientDataError,
    NoPeakFoundError,
    ScalingModel,
    SpectrumEstimate,
    SpectrumKind,
    analytic_record_correlation,
    average_spectra,
    band_power,
    dft_grid,
    dominant_peak,
    fit_lorentzian,
    mc_record_correlation,
    periodogram,
    power_law_exponent,
    refocusing_period,
    restrict_band,
    scaling_fit,
    series_peak_times,
    shot_noise_floor,
    subtract_floor,
    transient_time,
    write_correlation_csv,
    write_spectrum_csv,
)
from src.sme import MeasurementRecord, ProbeConfig
from src.states import pure_state_on_site


@pytest.fixture
def probe():
    return ProbeConfig.on_sites(LatticeSpec(n_sites=2, coupling=1.0), [1], strength=1.0)


def _noise_records(probe, n_records, n_samples, dt, seed=0):
    rng = np.random.default_rng(seed)
    scale = math.sqrt(dt) / math.sqrt(8.0 * probe.strength)
    return [
        MeasurementRecord(dt=dt, samples=scale * rng.normal(size=n_samples), probe=probe)
        for _ in range(n_records)
    ]


def _lorentzian_spectrum(center, width, grid):
    values = width ** 2 / ((grid - center) ** 2 + width ** 2)
    return SpectrumEstimate(omegas=grid, values=values, kind=SpectrumKind.STEADY_STATE)


def test_shot_noise_floor():
    """Test the white-noise level 1/(16 pi k)"""
    assert shot_noise_floor(2.0) == pytest.approx(1.0 / (32.0 * math.pi))
    with pytest.raises(ValueError):
        shot_noise_floor(0.0)


def test_noise_periodogram_sits_on_floor(probe):
    """Test averaged pure-noise periodograms are flat at the shot-noise floor"""
    records = _noise_records(probe, 200, 1000, 0.01)
    averaged = average_spectra([periodogram(r) for r in records])
    band = averaged.values[1:-1]
    assert band.mean() == pytest.approx(shot_noise_floor(1.0), rel=0.02)
    floored = subtract_floor(averaged, 1.0)
    assert abs(floored.values[1:-1].mean()) < 0.02 * shot_noise_floor(1.0)
    assert floored.meta["floor_subtracted"] == pytest.approx(shot_noise_floor(1.0))
    assert averaged.n_traj == 200


def test_parseval_on_full_grid(probe):
    """Test the mean over the full DFT grid equals record power / (2 pi T)"""
    record = _noise_records(probe, 1, 256, 0.05, seed=3)[0]
    grid = 2.0 * math.pi * np.arange(256) / record.duration
    spectrum = periodogram(record, omega_grid=grid)
    expected = np.sum(record.samples ** 2) / (2.0 * math.pi * record.duration)
    assert spectrum.values.mean() == pytest.approx(expected, rel=1e-8)
    assert spectrum.values.min() >= 0.0


def test_fft_and_quadrature_agree(probe):
    """Test the FFT path matches direct quadrature on the DFT grid"""
    record = _noise_records(probe, 1, 300, 0.02, seed=4)[0]
    fast = periodogram(record, mean_subtract=True)
    slow = periodogram(record, omega_grid=fast.omegas, mean_subtract=True)
    assert np.allclose(fast.omegas, dft_grid(300, 0.02))
    assert np.allclose(fast.values, slow.values, rtol=1e-8, atol=1e-14)
    assert fast.values[0] == pytest.approx(0.0, abs=1e-20)


def test_windowed_periodogram(probe):
    """Test a Hann taper keeps the noise level"""
    records = _noise_records(probe, 100, 1000, 0.01, seed=5)
    averaged = average_spectra([periodogram(r, window="hann") for r in records])
    assert averaged.values[5:-5].mean() == pytest.approx(shot_noise_floor(1.0), rel=0.05)
    assert averaged.meta["window"] == "hann"


def test_average_spectra_checks(probe):
    """Test stderr, single-spectrum passthrough and grid mismatch"""
    a, b = _noise_records(probe, 2, 100, 0.01, seed=6)
    pa, pb = periodogram(a), periodogram(b)
    averaged = average_spectra([pa, pb])
    assert np.allclose(averaged.values, 0.5 * (pa.values + pb.values))
    assert np.allclose(averaged.stderr, np.abs(pa.values - pb.values) / 2.0)
    assert average_spectra([pa]) is pa
    with pytest.raises(ValueError):
        average_spectra([pa, periodogram(b, omega_grid=[0.1, 0.2])])
    with pytest.raises(ValueError):
        average_spectra([])


def test_restrict_band(probe):
    """Test band restriction keeps only grid points inside the interval"""
    spectrum = periodogram(_noise_records(probe, 1, 200, 0.01)[0])
    band = restrict_band(spectrum, 1.0, 10.0)
    assert band.omegas.min() >= 1.0
    assert band.omegas.max() <= 10.0
    with pytest.raises(ValueError):
        restrict_band(spectrum, 1e6, 2e6)


def test_spectrum_estimate_validation():
    """Test grids must be increasing and match values"""
    with pytest.raises(ValueError):
        SpectrumEstimate(omegas=[0.0, 0.0, 1.0], values=[1, 2, 3], kind=SpectrumKind.PERIODOGRAM)
    with pytest.raises(ValueError):
        SpectrumEstimate(omegas=[0.0, 1.0], values=[1.0], kind=SpectrumKind.PERIODOGRAM)
    frame = SpectrumEstimate(omegas=[0.0, 1.0], values=[1.0, 2.0], kind=SpectrumKind.PERIODOGRAM).to_frame()
    assert list(frame.columns) == ["omega", "value"]


def test_dominant_peak_on_lorentzian():
    """Test the peak is located between grid points by interpolation"""
    grid = np.linspace(0.0, 3.0, 3001)
    spectrum = _lorentzian_spectrum(1.2344, 0.02, grid)
    assert dominant_peak(spectrum) == pytest.approx(1.2344, abs=2e-4)


def test_dominant_peak_prefers_lowest_line():
    """Test the lowest qualifying peak wins over a taller higher one"""
    grid = np.linspace(0.0, 4.0, 801)
    values = 0.5 / (1 + ((grid - 1.0) / 0.02) ** 2) + 1.0 / (1 + ((grid - 2.5) / 0.02) ** 2)
    spectrum = SpectrumEstimate(omegas=grid, values=values, kind=SpectrumKind.STEADY_STATE)
    assert dominant_peak(spectrum) == pytest.approx(1.0, abs=0.005)


def test_dominant_peak_on_broad_background():
    """Test a weak line riding on a broad background is found"""
    grid = np.linspace(0.0, 2.0, 801)
    values = 1.0 / (1.0 + (grid / 3.0) ** 2) + 0.02 / (1.0 + ((grid - 0.7) / 0.03) ** 2)
    spectrum = SpectrumEstimate(omegas=grid, values=values, kind=SpectrumKind.STEADY_STATE)
    assert dominant_peak(spectrum) == pytest.approx(0.7, abs=0.01)


def test_dominant_peak_skips_minor_ripples():
    """Test maxima far less prominent than the main line are not reported"""
    grid = np.linspace(0.0, 2.0, 801)
    values = 0.01 / (1.0 + ((grid - 0.5) / 0.02) ** 2) + 1.0 / (1.0 + ((grid - 1.5) / 0.02) ** 2)
    spectrum = SpectrumEstimate(omegas=grid, values=values, kind=SpectrumKind.STEADY_STATE)
    assert dominant_peak(spectrum) == pytest.approx(1.5, abs=0.005)


def test_dominant_peak_noise_test_on_sampled_spectra():
    """Test sampled spectra need a prominence above three local standard errors"""
    grid = np.linspace(0.0, 2.0, 401)
    values = 1.0 + 0.5 / (1.0 + ((grid - 1.0) / 0.05) ** 2)

    def averaged(stderr):
        return SpectrumEstimate(omegas=grid, values=values, stderr=np.full_like(grid, stderr),
                                kind=SpectrumKind.PERIODOGRAM)

    assert dominant_peak(averaged(0.1)) == pytest.approx(1.0, abs=0.005)
    with pytest.raises(NoPeakFoundError):
        dominant_peak(averaged(0.3))

    # a bare periodogram scatters by its own level
    bare = SpectrumEstimate(omegas=grid, values=values, kind=SpectrumKind.PERIODOGRAM)
    with pytest.raises(NoPeakFoundError):
        dominant_peak(bare)
    tall = bare.with_values(1.0 + 5.0 / (1.0 + ((grid - 1.0) / 0.05) ** 2))
    assert dominant_peak(tall) == pytest.approx(1.0, abs=0.005)


def test_no_peak_raises():
    """Test monotone spectra have no peak"""
    grid = np.linspace(0.0, 3.0, 100)
    spectrum = _lorentzian_spectrum(0.0, 0.5, grid)
    with pytest.raises(NoPeakFoundError):
        dominant_peak(spectrum)


def test_fit_lorentzian_recovers_width():
    """Test the zero-centred fit returns the generating half-width"""
    grid = np.linspace(0.0, 5.0, 400)
    fit = fit_lorentzian(_lorentzian_spectrum(0.0, 0.37, grid))
    assert fit.half_width == pytest.approx(0.37, rel=1e-4)
    assert fit.amplitude == pytest.approx(1.0, rel=1e-4)
    fit = fit_lorentzian(_lorentzian_spectrum(0.0, 0.37, grid).with_values(
        _lorentzian_spectrum(0.0, 0.37, grid).values + 0.1), with_offset=True)
    assert fit.offset == pytest.approx(0.1, rel=1e-3)


def test_band_power():
    """Test the integral of a narrow Lorentzian is close to pi * width"""
    grid = np.linspace(0.0, 20.0, 20001)
    spectrum = _lorentzian_spectrum(10.0, 0.01, grid)
    assert band_power(spectrum, 10.0, 9.0) == pytest.approx(math.pi * 0.01, rel=0.01)
    with pytest.raises(ValueError):
        band_power(spectrum, 10.0, 0.0)


def test_series_peak_times():
    """Test maxima of a cosine series"""
    times = np.linspace(0.0, 10.0, 1001)
    peaks = series_peak_times(times, np.cos(2.0 * math.pi * times / 2.5))
    assert np.allclose(peaks, [2.5, 5.0, 7.5], atol=0.011)


def test_refocusing_period():
    """Test the median spacing of tall maxima ignores small wiggles between them"""
    times = np.linspace(0.0, 20.0, 2001)
    values = 0.5 + 0.5 * np.cos(2.0 * math.pi * times / 4.0) + 0.05 * np.cos(2.0 * math.pi * times * 7.0 / 4.0)
    assert refocusing_period(times, values, min_separation=1.5) == pytest.approx(4.0, abs=0.02)
    assert math.isnan(refocusing_period(times[:200], values[:200], min_separation=1.5))


def test_scaling_fit_prefers_true_law():
    """Test 1/N data prefers the 1/N model and 1/N^2 data the 1/N^2 model"""
    sizes = [7, 13, 19, 25]
    inverse = [(n, 8.66 / n) for n in sizes]
    squared = [(n, 30.0 / n ** 2) for n in sizes]

    fit_n = scaling_fit(inverse, ScalingModel.INVERSE_N)
    assert fit_n.coefficient == pytest.approx(8.66)
    assert fit_n.residual < 1e-12
    assert scaling_fit(inverse, ScalingModel.INVERSE_N_SQUARED).residual > 0.1
    assert scaling_fit(squared, ScalingModel.INVERSE_N_SQUARED).residual < scaling_fit(
        squared, ScalingModel.INVERSE_N).residual
    with pytest.raises(InsufficientDataError):
        scaling_fit(inverse[:2], ScalingModel.INVERSE_N)


def test_power_law_exponent():
    """Test exact recovery of y = a x^p"""
    slope, prefactor = power_law_exponent([10.0, 20.0, 40.0], [0.5, 0.25, 0.125])
    assert slope == pytest.approx(-1.0)
    assert prefactor == pytest.approx(5.0)
    with pytest.raises(ValueError):
        power_law_exponent([1.0, -1.0], [1.0, 1.0])


def test_analytic_correlation_frozen_site():
    """Test H=0 with the particle on the probed site gives C = dt^2 at every lag"""
    spec = LatticeSpec(n_sites=3, coupling=0.0)
    probe = ProbeConfig.on_sites(spec, [2], 1.0)
    l = build_liouvillian(build_hamiltonian(spec), probe)
    dt = 1e-3
    corr = analytic_record_correlation(l, pure_state_on_site(spec, 2), probe.observable, [0.0, 1.0, 5.0], dt)
    assert np.allclose(corr.values, dt ** 2)


def test_analytic_correlation_long_lag_limit():
    """Test C(tau) relaxes to <O>^2 dt^2"""
    spec = LatticeSpec(n_sites=2, coupling=1.0)
    probe = ProbeConfig.on_sites(spec, [1], 1.0)
    l = build_liouvillian(build_hamiltonian(spec), probe)
    rho = steady_state(l)
    dt = 1e-2
    corr = analytic_record_correlation(l, rho, probe.observable, [0.0, 400.0], dt)
    assert corr.values[-1] == pytest.approx(0.25 * dt ** 2, rel=1e-6)
    assert corr.values[0] > corr.values[-1]
    assert corr.meta["mean"] == pytest.approx(0.5)


def test_mc_correlation_of_pure_noise(probe):
    """Test white-noise records are uncorrelated at non-zero lags"""
    dt = 0.01
    records = _noise_records(probe, 60, 2000, dt, seed=8)
    taus = dt * np.arange(0, 51)
    corr = mc_record_correlation(records, taus)
    assert corr.equal_time == pytest.approx(dt / 8.0, rel=0.05)
    within = np.abs(corr.values) <= 3.0 * corr.stderr
    assert within.mean() > 0.9
    assert corr.meta["discard_time"] == pytest.approx(transient_time(1.0, 1.0))


def test_mc_correlation_checks(probe):
    """Test record count, lag grid and record length checks"""
    dt = 0.01
    with pytest.raises(InsufficientDataError):
        mc_record_correlation(_noise_records(probe, 10, 2000, dt), [0.0])
    records = _noise_records(probe, 50, 2000, dt)
    with pytest.raises(ValueError):
        mc_record_correlation(records, [0.0, 0.015])
    with pytest.raises(InsufficientDataError):
        mc_record_correlation(records, [0.0, 15.0])


def test_csv_exports(tmp_path, probe):
    """Test spectrum and correlation CSV columns"""
    records = _noise_records(probe, 2, 100, 0.01)
    spectrum = average_spectra([periodogram(r) for r in records])
    path = write_spectrum_csv(spectrum, tmp_path / "spectra" / "record.csv")
    assert list(pd.read_csv(path).columns) == ["omega", "value", "stderr"]

    spec = LatticeSpec(n_sites=2, coupling=1.0)
    l = build_liouvillian(build_hamiltonian(spec), probe)
    corr = analytic_record_correlation(l, steady_state(l), probe.observable, [0.0, 0.5], 0.01)
    frame = pd.read_csv(write_correlation_csv(corr, tmp_path / "corr.csv"))
    assert list(frame.columns) == ["tau", "value"]
    assert len(frame) == 2
