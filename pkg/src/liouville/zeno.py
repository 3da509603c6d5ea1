"""Strong-probing diagnostics: non-Hermitian effective modes and Zeno escape rates"""

from typing import List, Optional, Sequence

import numpy as np
import scipy.linalg
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.optimize import curve_fit

from src.lattice import LatticeSpec, Operator, build_hamiltonian
from src.sme.models import ProbeConfig
from src.states import pure_state_on_site, vectorize
from src.utils.logger import get_logger
from .generator import LiouvilleOperator, lindblad_evolve

MODE_DECAY_TOL = 1e-8


class EffectiveModes(BaseModel):
    """Eigenpairs of H - i k O, sorted by decay rate |Im lambda|"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    values: np.ndarray = Field(..., description="Complex eigenvalues")
    states: np.ndarray = Field(..., description="Unit-norm right eigenvectors as columns")
    strength: float = Field(..., ge=0.0, description="Measurement strength k used to build the modes")

    @model_validator(mode="after")
    def _check_decay(self) -> "EffectiveModes":
        imag = self.values.imag
        scale = max(1.0, self.strength)
        if imag.size and (imag.max() > MODE_DECAY_TOL * scale or imag.min() < -self.strength - MODE_DECAY_TOL * scale):
            raise ValueError("effective mode decay rates must lie in [-k, 0]")
        return self

    @property
    def dim(self) -> int:
        return self.values.shape[0]

    def site_weights(self, sites: Sequence[int]) -> np.ndarray:
        """Total |<n|w_l>|^2 over the given 1-based sites, per mode"""
        idx = [n - 1 for n in sites]
        return np.sum(np.abs(self.states[idx, :]) ** 2, axis=0)


def effective_modes(h: Operator, probe: ProbeConfig) -> EffectiveModes:
    """Dense eigen-decomposition of the effective non-Hermitian Hamiltonian H - i k O"""
    if probe.dim != h.dim:
        raise ValueError(f"dimension mismatch: probe {probe.dim}, Hamiltonian {h.dim}")
    effective = h.entries - 1j * probe.strength * probe.observable.entries
    values, vectors = scipy.linalg.eig(effective)
    order = np.lexsort((values.real, np.abs(values.imag)))
    values = values[order]
    vectors = vectors[:, order]
    vectors = vectors / np.linalg.norm(vectors, axis=0, keepdims=True)
    return EffectiveModes(values=values, states=vectors, strength=probe.strength)


def zeno_subspace_dimension(modes: EffectiveModes, fraction: float = 0.5) -> int:
    """Number of modes decaying slower than fraction * k"""
    return int(np.sum(np.abs(modes.values.imag) < fraction * modes.strength))


def dyad_residuals(l: LiouvilleOperator, modes: EffectiveModes) -> np.ndarray:
    """Relative residual of |w_l><w_m| as a generator eigenmatrix with eigenvalue -i(lambda_l - conj(lambda_m))

    Entry [l, m] is |L D - lambda D|_F / |D|_F; the excess over zero comes from
    the recycling term 2k O D O.
    """
    n = modes.dim
    if l.hilbert_dim != n:
        raise ValueError(f"dimension mismatch: generator {l.hilbert_dim}, modes {n}")
    residuals = np.empty((n, n))
    for a in range(n):
        for b in range(n):
            dyad = np.outer(modes.states[:, a], modes.states[:, b].conj())
            vec = vectorize(dyad)
            value = -1j * (modes.values[a] - np.conj(modes.values[b]))
            residuals[a, b] = np.linalg.norm(l.entries @ vec - value * vec) / np.linalg.norm(vec)
    return residuals


def _site_variance(spec: LatticeSpec, site: int) -> float:
    """<H^2> - <H>^2 on the site state |n>"""
    index = spec.check_site(site)
    h = build_hamiltonian(spec).entries
    mean = h[index, index].real
    return float((h @ h)[index, index].real - mean ** 2)


def zeno_rate(spec: LatticeSpec, probe_site: int, strength: float) -> float:
    """gamma_eff = 4 / (k tau_0^2) with tau_0^-2 the energy variance of |n> (2J^2 inside, J^2 at an edge)"""
    if strength <= 0:
        raise ValueError(f"strength must be positive, got {strength}")
    return 4.0 * _site_variance(spec, probe_site) / strength


class ZenoRateCandidates(BaseModel):
    """Analytic escape-rate readings next to an optional fitted value"""
    variance_rate: float = Field(..., description="4 Var(H)_n / k")
    printed_rate: float = Field(..., description="4 J^2 / k irrespective of the site")
    fitted_rate: Optional[float] = Field(default=None, description="Rate from an exponential survival fit")


def zeno_rate_candidates(
    spec: LatticeSpec, probe_site: int, strength: float, fitted_rate: Optional[float] = None
) -> ZenoRateCandidates:
    """Both analytic readings of the effective decay rate"""
    return ZenoRateCandidates(
        variance_rate=zeno_rate(spec, probe_site, strength),
        printed_rate=4.0 * spec.coupling ** 2 / strength,
        fitted_rate=fitted_rate,
    )


class SurvivalFit(BaseModel):
    """p(t) = p_inf + (1 - p_inf) exp(-rate t) fitted to a site population"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    rate: float = Field(..., description="Fitted decay rate")
    plateau: float = Field(..., description="Fitted long-time population p_inf")
    times: np.ndarray = Field(..., description="Time grid of the fitted curve")
    survival: np.ndarray = Field(..., description="Lindblad population of the probed site")
    rms_error: float = Field(..., description="Root-mean-square fit residual")


def _survival_model(t: np.ndarray, rate: float, plateau: float) -> np.ndarray:
    return plateau + (1.0 - plateau) * np.exp(-rate * t)


def fit_survival_decay(
    l: LiouvilleOperator, site: int, t_max: float, n_points: int = 400, skip: Optional[float] = None
) -> SurvivalFit:
    """Propagate |n><n| and fit the exponential escape of p_n(t).

    Times before skip (default 2/k) are excluded from the fit, dropping the
    short quadratic transient.
    """
    logger = get_logger("Zeno")
    if t_max <= 0:
        raise ValueError(f"t_max must be positive, got {t_max}")
    n_sites = l.hilbert_dim
    spec = LatticeSpec(n_sites=n_sites, coupling=1.0)
    index = spec.check_site(site)
    times = np.linspace(0.0, t_max, n_points)
    states = lindblad_evolve(l, pure_state_on_site(spec, site), times)
    survival = states[:, index, index].real

    skip = 2.0 / l.strength if skip is None and l.strength > 0 else (skip or 0.0)
    mask = times >= skip
    if mask.sum() < 3:
        raise ValueError(f"fewer than 3 points after skipping t < {skip:g}; increase t_max")
    guess_rate = 1.0 / max(t_max / 5.0, 1e-12)
    params, _ = curve_fit(
        _survival_model,
        times[mask],
        survival[mask],
        p0=[guess_rate, 1.0 / n_sites],
        bounds=([0.0, 0.0], [np.inf, 1.0]),
        maxfev=20000,
    )
    rate, plateau = float(params[0]), float(params[1])
    rms = float(np.sqrt(np.mean((_survival_model(times[mask], rate, plateau) - survival[mask]) ** 2)))
    logger.info(f"Survival fit for site {site}: rate={rate:.6g}, plateau={plateau:.4f}, rms={rms:.2e}")
    return SurvivalFit(rate=rate, plateau=plateau, times=times, survival=survival, rms_error=rms)


def localized_modes(modes: EffectiveModes, sites: Sequence[int], threshold: float = 0.9) -> List[int]:
    """Mode indices whose weight on the probed sites exceeds threshold"""
    weights = modes.site_weights(sites)
    return [int(i) for i in np.flatnonzero(weights > threshold)]
