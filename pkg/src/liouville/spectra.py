"""Steady-state spectra from the generator resolvent and the weak-probing line-shape sum"""

import math
import time
import warnings
from typing import Iterable, Optional

import numpy as np
import scipy.linalg
from scipy.linalg import LinAlgError, LinAlgWarning

from src.config import get_settings
from src.lattice import EigenSystem, LatticeSpec, Operator, site_projector
from src.signal.models import SpectrumEstimate, SpectrumKind
from src.sme.models import ProbeConfig
from src.states import DensityMatrix, vectorize
from src.utils.logger import get_logger
from .generator import LiouvilleOperator, build_liouvillian, kernel_projector, spectral_projector

STATIONARITY_TOL = 1e-8
KERNEL_LEAK_TOL = 1e-8


class SpectrumSolveError(RuntimeError):
    """Resolvent solve failed or the reference state is not stationary"""


def default_omega_grid(
    eigensystem: EigenSystem, n_points: Optional[int] = None, span: Optional[float] = None
) -> np.ndarray:
    """Uniform grid on [0, span * largest Bohr frequency]"""
    settings = get_settings().spectrum
    n_points = n_points or settings.omega_points
    span = span or settings.omega_span
    largest = float(np.max(np.abs(eigensystem.bohr_frequencies())))
    if largest == 0.0:
        largest = 1.0
    return np.linspace(0.0, span * largest, n_points)


def _resolvent_apply(matrix: np.ndarray, stationary: np.ndarray, x: np.ndarray, omega: float) -> np.ndarray:
    """(i omega - L)^-1 x for x with no stationary part.

    Solves with (i omega - L + P0), which agrees with the resolvent off the
    kernel and is regular at omega = 0. If omega still hits an undamped
    oscillation (a dark coherence), the solve is restricted to the complement
    of that mode.
    """
    with warnings.catch_warnings():
        warnings.simplefilter("error", LinAlgWarning)
        try:
            return scipy.linalg.solve(matrix + stationary, x)
        except (LinAlgError, LinAlgWarning):
            pass

    projector = spectral_projector(matrix)
    leak = np.linalg.norm(projector @ x)
    if leak > KERNEL_LEAK_TOL * max(1.0, np.linalg.norm(x)):
        raise SpectrumSolveError(
            f"resolvent at omega={omega:.6g} is singular and the source overlaps its kernel (|P x| = {leak:.3e})"
        )
    get_logger("Spectra").warning(f"Singular resolvent at omega={omega:.6g}; solving on the kernel complement")
    complement = np.eye(matrix.shape[0]) - projector
    solution, *_ = scipy.linalg.lstsq(matrix, complement @ x)
    return complement @ solution


def steady_state_spectrum(
    l: LiouvilleOperator,
    observable: Operator,
    rho_ss: DensityMatrix,
    omega_grid: Iterable[float],
) -> SpectrumEstimate:
    """S(omega) = (1/4pi) Re tr[O (i omega - L)^-1 x], x = {O, rho_ss} minus its stationary part.

    The stationary part is removed with the kernel projector, which equals
    2<O> rho_ss when the steady state is unique. With this sign convention S
    is the one-sided Laplace transform of the fluctuation correlation and is
    non-negative.
    """
    logger = get_logger("Spectra")
    omegas = np.asarray(list(omega_grid), dtype=float)
    n = l.hilbert_dim
    if observable.dim != n or rho_ss.dim != n:
        raise ValueError(f"dimension mismatch: observable {observable.dim}, state {rho_ss.dim}, generator {n}")

    lmat = l.entries
    rho_vec = vectorize(rho_ss.entries)
    residual = float(np.linalg.norm(lmat @ rho_vec))
    if residual > STATIONARITY_TOL * max(1.0, l.strength, float(np.max(np.abs(l.h.entries)))):
        raise SpectrumSolveError(f"rho_ss is not stationary (|L rho_ss| = {residual:.3e})")

    o = observable.entries
    rho = rho_ss.entries
    source = vectorize(o @ rho + rho @ o)
    stationary = kernel_projector(l)
    x = source - stationary @ source
    complement = np.eye(n * n) - stationary
    o_dag_vec = vectorize(o.conj().T)

    started = time.perf_counter()
    identity = np.eye(n * n)
    values = np.empty(omegas.shape[0])
    for i, omega in enumerate(omegas):
        z = _resolvent_apply(1j * omega * identity - lmat, stationary, x, omega)
        # drop round-off pushed into the kernel by near-singular solves
        z = complement @ z
        values[i] = np.vdot(o_dag_vec, z).real / (4.0 * math.pi)
    logger.debug(f"Resolvent spectrum on {omegas.shape[0]} points in {time.perf_counter() - started:.2f}s")

    return SpectrumEstimate(
        omegas=omegas,
        values=values,
        kind=SpectrumKind.STEADY_STATE,
        meta={
            "n_sites": n,
            "strength": l.strength,
            "sites": l.probe.sites if l.probe is not None else None,
            "stationarity_residual": residual,
        },
    )


def perturbative_rates(eigensystem: EigenSystem, observable: Operator, strength: float) -> np.ndarray:
    """Gamma_ij = k(<O^dag O>_ii + <O^dag O>_jj - 2 O_ii O_jj) in the eigenbasis"""
    w = eigensystem.states
    o = observable.entries
    diag_o = np.einsum("ki,kl,li->i", w.conj(), o, w).real
    diag_oo = np.einsum("ki,kl,li->i", w.conj(), o.conj().T @ o, w).real
    return strength * (diag_oo[:, None] + diag_oo[None, :] - 2.0 * np.outer(diag_o, diag_o))


def _hamiltonian_from_eigensystem(eigensystem: EigenSystem) -> Operator:
    w = eigensystem.states
    h = (w * eigensystem.energies) @ w.conj().T
    return Operator(entries=0.5 * (h + h.conj().T), hermitian=True)


def perturbative_spectrum(
    eigensystem: EigenSystem,
    probe_sites: Iterable[int],
    rho_ss: DensityMatrix,
    omega_grid: Iterable[float],
    strength: float,
    reference: Optional[SpectrumEstimate] = None,
) -> SpectrumEstimate:
    """Sum of Lorentzians at the Bohr frequencies with the weak-probing widths Gamma_ij.

    Amplitudes are sum over probed n, m of <w_j|n><m|w_i> rho_ss[n, m]. The
    expression fixes the shape only; the overall scale is the least-squares
    match to the resolvent spectrum on the same grid (computed here when no
    reference is given). Intended for k much smaller than J.
    """
    omegas = np.asarray(list(omega_grid), dtype=float)
    sites = sorted(set(probe_sites))
    n_sites = eigensystem.dim
    spec = LatticeSpec(n_sites=n_sites, coupling=1.0)
    observable = site_projector(spec, sites)
    if rho_ss.dim != n_sites:
        raise ValueError(f"dimension mismatch: state {rho_ss.dim}, eigensystem {n_sites}")

    w = eigensystem.states
    idx = [spec.check_site(n) for n in sites]
    rho_block = rho_ss.entries[np.ix_(idx, idx)]
    # amplitude[i, j] = sum_{n,m} conj(w[n, j]) w[m, i] rho[n, m]
    amplitudes = np.einsum("nj,mi,nm->ij", w[idx].conj(), w[idx], rho_block)
    rates = perturbative_rates(eigensystem, observable, strength)
    bohr = eigensystem.bohr_frequencies()

    detuning = bohr[None, :, :] - omegas[:, None, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        lines = np.where(rates[None] > 0, rates[None] / (detuning ** 2 + rates[None] ** 2), 0.0)
    shape = np.real(np.sum(lines * amplitudes[None], axis=(1, 2)))

    if reference is None:
        h = _hamiltonian_from_eigensystem(eigensystem)
        probe = ProbeConfig(observable=observable, strength=strength, sites=sites)
        reference = steady_state_spectrum(build_liouvillian(h, probe), observable, rho_ss, omegas)
    elif not np.allclose(reference.omegas, omegas):
        raise ValueError("reference spectrum must share the frequency grid")

    norm = float(np.dot(shape, shape))
    scale = float(np.dot(reference.values, shape)) / norm if norm > 0 else 1.0
    return SpectrumEstimate(
        omegas=omegas,
        values=scale * shape,
        kind=SpectrumKind.PERTURBATIVE,
        meta={"n_sites": n_sites, "strength": strength, "sites": sites, "scale": scale},
    )
