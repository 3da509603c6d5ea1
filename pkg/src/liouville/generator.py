"""Lindblad generator, propagation, kernel projector and eigen-decomposition.

    L rho = -i[H, rho] + k (2 O rho O^dag - {O^dag O, rho})

built as a dense N^2 x N^2 matrix in the column-stacking convention of
src.states.superoperators.
"""

from typing import Optional, Sequence

import numpy as np
import scipy.linalg
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.lattice import Operator
from src.sme.models import ProbeConfig
from src.states import DensityMatrix, Superoperator, devectorize, spost, spre, sprepost, vectorize
from src.utils.logger import get_logger

KERNEL_RCOND = 1e-10
DISSIPATIVITY_TOL = 1e-8
CONJUGATION_TOL = 1e-8


class DegenerateSteadyStateError(ValueError):
    """The generator kernel is multi-dimensional and no reference state was given"""


class LiouvilleOperator(BaseModel):
    """Deterministic generator of the ensemble-averaged evolution"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    generator: Superoperator = Field(..., description="Trace-preserving N^2 x N^2 matrix")
    h: Operator = Field(..., description="System Hamiltonian")
    probe: Optional[ProbeConfig] = Field(default=None, description="Monitored observable and strength (None = closed system)")

    @property
    def entries(self) -> np.ndarray:
        return self.generator.entries

    @property
    def hilbert_dim(self) -> int:
        return self.h.dim

    @property
    def strength(self) -> float:
        return self.probe.strength if self.probe is not None else 0.0

    def apply(self, rho) -> np.ndarray:
        """L acting on a matrix"""
        return self.generator.apply(rho)


def build_liouvillian(h: Operator, probe: Optional[ProbeConfig]) -> LiouvilleOperator:
    """Dense Lindblad generator for Hamiltonian h monitored through probe"""
    if not h.is_hermitian():
        raise ValueError("Hamiltonian must be Hermitian")
    entries = -1j * (spre(h) - spost(h))
    if probe is not None:
        if probe.dim != h.dim:
            raise ValueError(f"dimension mismatch: probe {probe.dim}, Hamiltonian {h.dim}")
        o = probe.observable.entries
        od = o.conj().T
        odo = od @ o
        entries = entries + probe.strength * (2.0 * sprepost(o, od) - spre(odo) - spost(odo))
    return LiouvilleOperator(
        generator=Superoperator(entries=entries, trace_preserving=True),
        h=h,
        probe=probe,
    )


def propagate_vector(l: LiouvilleOperator, v: np.ndarray, times: Sequence[float]) -> np.ndarray:
    """exp(L t) v for every t in a non-decreasing, non-negative grid; rows follow times"""
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.shape[0] == 0:
        raise ValueError("times must be a non-empty one-dimensional grid")
    if times[0] < 0 or np.any(np.diff(times) < 0):
        raise ValueError("times must be non-negative and non-decreasing")

    out = np.empty((times.shape[0], v.shape[0]), dtype=complex)
    steps = np.diff(times, prepend=0.0)
    uniform = times.shape[0] > 2 and np.allclose(steps[1:], steps[1], rtol=1e-12, atol=0.0)
    step_propagator = scipy.linalg.expm(l.entries * steps[1]) if uniform else None

    current = scipy.linalg.expm(l.entries * times[0]) @ v if times[0] > 0 else np.array(v, dtype=complex)
    out[0] = current
    for i in range(1, times.shape[0]):
        propagator = step_propagator if uniform else scipy.linalg.expm(l.entries * steps[i])
        current = propagator @ current
        out[i] = current
    return out


def lindblad_propagate(l: LiouvilleOperator, rho0: DensityMatrix, t: float) -> DensityMatrix:
    """exp(L t) rho0 by scaling and squaring"""
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t}")
    if rho0.dim != l.hilbert_dim:
        raise ValueError(f"dimension mismatch: state {rho0.dim}, generator {l.hilbert_dim}")
    if t == 0:
        return rho0
    v = scipy.linalg.expm(l.entries * t) @ vectorize(rho0.entries)
    return DensityMatrix.from_array(devectorize(v).entries)


def lindblad_evolve(l: LiouvilleOperator, rho0: DensityMatrix, times: Sequence[float]) -> np.ndarray:
    """Averaged state on a time grid, shape (len(times), N, N)"""
    if rho0.dim != l.hilbert_dim:
        raise ValueError(f"dimension mismatch: state {rho0.dim}, generator {l.hilbert_dim}")
    n = l.hilbert_dim
    vectors = propagate_vector(l, vectorize(rho0.entries), times)
    states = vectors.reshape((-1, n, n), order="C").transpose(0, 2, 1)
    return 0.5 * (states + states.conj().transpose(0, 2, 1))


def _kernel_bases(matrix: np.ndarray):
    right = scipy.linalg.null_space(matrix, rcond=KERNEL_RCOND)
    left = scipy.linalg.null_space(matrix.conj().T, rcond=KERNEL_RCOND)
    return right, left


def spectral_projector(matrix: np.ndarray) -> np.ndarray:
    """Projector onto ker(matrix) along its range, R (Lk^H R)^-1 Lk^H"""
    right, left = _kernel_bases(matrix)
    if right.shape[1] == 0:
        return np.zeros_like(matrix)
    if left.shape[1] != right.shape[1]:
        raise ValueError(
            f"left and right kernels differ in dimension ({left.shape[1]} vs {right.shape[1]}); "
            "generator is not diagonalizable at zero"
        )
    overlap = left.conj().T @ right
    return right @ scipy.linalg.solve(overlap, left.conj().T)


def kernel_projector(l: LiouvilleOperator) -> np.ndarray:
    """Projector P0 onto the stationary subspace; P0 vec(rho) is the long-time average of rho"""
    return spectral_projector(l.entries)


def kernel_dimension(l: LiouvilleOperator) -> int:
    """Number of independent stationary matrices"""
    return scipy.linalg.null_space(l.entries, rcond=KERNEL_RCOND).shape[1]


def steady_state(l: LiouvilleOperator, rho0: Optional[DensityMatrix] = None) -> DensityMatrix:
    """Stationary state; for a degenerate kernel, the time-averaged limit reached from rho0"""
    logger = get_logger("Liouville")
    kernel = scipy.linalg.null_space(l.entries, rcond=KERNEL_RCOND)
    dimension = kernel.shape[1]
    if dimension == 0:
        raise ValueError("generator has no stationary state")
    if dimension == 1:
        rho = devectorize(kernel[:, 0]).entries
        return DensityMatrix.from_array(rho)

    if rho0 is None:
        raise DegenerateSteadyStateError(
            f"kernel dimension is {dimension}; the steady state depends on the initial state, pass rho0"
        )
    if rho0.dim != l.hilbert_dim:
        raise ValueError(f"dimension mismatch: state {rho0.dim}, generator {l.hilbert_dim}")
    logger.info(f"Kernel dimension {dimension}; resolving steady state through conserved quantities of rho0")
    projected = kernel_projector(l) @ vectorize(rho0.entries)
    return DensityMatrix.from_array(devectorize(projected).entries)


def stationarity_residual(l: LiouvilleOperator, rho: DensityMatrix) -> float:
    """Frobenius norm of L rho"""
    return float(np.linalg.norm(l.entries @ vectorize(rho.entries)))


class LiouvilleSpectrum(BaseModel):
    """Eigenvalues of the generator with Hilbert-Schmidt normalized right eigenmatrices"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    eigenvalues: np.ndarray = Field(..., description="Complex eigenvalues, sorted by decreasing real part")
    modes: np.ndarray = Field(..., description="Column j is vec of the eigenmatrix of eigenvalues[j]")

    @field_validator("eigenvalues", mode="before")
    @classmethod
    def _as_vector(cls, value) -> np.ndarray:
        values = np.array(value, dtype=complex)
        if values.ndim != 1:
            raise ValueError("eigenvalues must be one-dimensional")
        return values

    @model_validator(mode="after")
    def _check_spectrum(self) -> "LiouvilleSpectrum":
        values = self.eigenvalues
        scale = max(1.0, float(np.max(np.abs(values)))) if values.size else 1.0
        if values.size and values.real.max() > DISSIPATIVITY_TOL * scale:
            raise ValueError(f"eigenvalue with positive real part {values.real.max():.3e}")
        if _conjugation_mismatch(values) > CONJUGATION_TOL * scale:
            raise ValueError("eigenvalues are not closed under complex conjugation")
        return self

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def mode(self, j: int) -> np.ndarray:
        """Eigenmatrix j as an N x N array"""
        return devectorize(self.modes[:, j]).entries


def _conjugation_mismatch(values: np.ndarray, chunk: int = 512) -> float:
    """Largest distance from an eigenvalue to the nearest conjugate eigenvalue"""
    if values.size == 0:
        return 0.0
    conjugates = values.conj()
    worst = 0.0
    for start in range(0, values.shape[0], chunk):
        block = values[start:start + chunk, None]
        worst = max(worst, float(np.max(np.min(np.abs(block - conjugates[None, :]), axis=1))))
    return worst


def liouvillian_spectrum(l: LiouvilleOperator) -> LiouvilleSpectrum:
    """Full dense eigen-decomposition of the generator"""
    values, vectors = scipy.linalg.eig(l.entries)
    order = np.lexsort((values.imag, -values.real))
    values = values[order]
    vectors = vectors[:, order]
    vectors = vectors / np.linalg.norm(vectors, axis=0, keepdims=True)
    return LiouvilleSpectrum(eigenvalues=values, modes=vectors)


class EigenvalueClusters(BaseModel):
    """Grouping of generator eigenvalues around Re = 0 and Re = -k"""
    near_zero: int = Field(..., description="Eigenvalues closer to Re = 0 than to Re = -k")
    near_strength: int = Field(..., description="Eigenvalues closer to Re = -k")
    gap: Optional[float] = Field(default=None, description="min Re(zero group) - max Re(-k group)")
    vanishing: int = Field(..., description="Eigenvalues with |lambda| below tolerance")
    dyad_near_zero: int = Field(..., description="Unperturbed dyad count at Re = 0, (N-m)^2 + m^2")
    dyad_near_strength: int = Field(..., description="Unperturbed dyad count at Re = -k, 2m(N-m)")
    printed_near_zero: int = Field(..., description="Alternative count (N-1)^2")
    printed_near_strength: int = Field(..., description="Alternative count 2N-1")


def cluster_eigenvalues(
    spectrum: LiouvilleSpectrum,
    strength: float,
    n_probed: int = 1,
    zero_tol: float = 1e-8,
) -> EigenvalueClusters:
    """Count eigenvalues in the two real-part groups of the strong-probing regime"""
    if strength <= 0:
        raise ValueError(f"strength must be positive, got {strength}")
    n_sites = int(round(np.sqrt(spectrum.dim)))
    if not 1 <= n_probed <= n_sites:
        raise ValueError(f"n_probed {n_probed} out of range 1..{n_sites}")
    real = spectrum.eigenvalues.real
    zero_group = real > -0.5 * strength
    gap = None
    if zero_group.any() and (~zero_group).any():
        gap = float(real[zero_group].min() - real[~zero_group].max())
    scale = max(1.0, strength)
    return EigenvalueClusters(
        near_zero=int(zero_group.sum()),
        near_strength=int((~zero_group).sum()),
        gap=gap,
        vanishing=int(np.sum(np.abs(spectrum.eigenvalues) < zero_tol * scale)),
        dyad_near_zero=(n_sites - n_probed) ** 2 + n_probed ** 2,
        dyad_near_strength=2 * n_probed * (n_sites - n_probed),
        printed_near_zero=(n_sites - 1) ** 2,
        printed_near_strength=2 * n_sites - 1,
    )
