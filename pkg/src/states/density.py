"""Density matrices, initial-state factories and scalar diagnostics"""

from typing import List, Sequence, Tuple, Union

import numpy as np
import scipy.linalg
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.lattice import EigenSystem, LatticeSpec, Operator, Parity

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
POSITIVITY_TOL = 1e-8
EXPECTATION_IMAG_TOL = 1e-8


class DensityMatrix(BaseModel):
    """Hermitian, unit-trace, positive (to tolerance) N x N state"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    entries: np.ndarray = Field(..., description="Complex N x N density matrix")

    @field_validator("entries", mode="before")
    @classmethod
    def _as_matrix(cls, value) -> np.ndarray:
        matrix = np.array(value, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] == 0:
            raise ValueError(f"density matrix must be square, got shape {matrix.shape}")
        matrix.setflags(write=False)
        return matrix

    @model_validator(mode="after")
    def _check_state(self) -> "DensityMatrix":
        rho = self.entries
        deviation = np.max(np.abs(rho - rho.conj().T))
        if deviation > HERMITIAN_TOL:
            raise ValueError(f"density matrix is not Hermitian (deviation {deviation:.3e})")
        trace = np.trace(rho).real
        if abs(trace - 1.0) > TRACE_TOL:
            raise ValueError(f"density matrix trace is {trace:.12f}, expected 1")
        smallest = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0]
        if smallest < -POSITIVITY_TOL:
            raise ValueError(f"density matrix has negative eigenvalue {smallest:.3e}")
        return self

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def from_array(cls, matrix: np.ndarray, normalize: bool = True) -> "DensityMatrix":
        """Build from a raw array, optionally re-Hermitizing and fixing the trace first"""
        matrix = np.asarray(matrix, dtype=complex)
        if normalize:
            matrix = 0.5 * (matrix + matrix.conj().T)
            matrix = matrix / np.trace(matrix).real
        return cls(entries=matrix)

    @classmethod
    def positive_part(cls, matrix: np.ndarray) -> "DensityMatrix":
        """Hermitize, drop negative eigenvalues and renormalize.

        For states assembled numerically (trajectory ends, ensemble averages),
        where roundoff pushes zero eigenvalues slightly negative.
        """
        matrix = np.asarray(matrix, dtype=complex)
        matrix = 0.5 * (matrix + matrix.conj().T)
        values, vectors = scipy.linalg.eigh(matrix)
        kept = np.clip(values, 0.0, None)
        if kept.sum() <= 0:
            raise ValueError("matrix has no positive part")
        return cls.from_array((vectors * kept) @ vectors.conj().T)


StateLike = Union[DensityMatrix, np.ndarray]


def _entries(rho: StateLike) -> np.ndarray:
    return rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho)


def pure_state_on_site(spec: LatticeSpec, n: int) -> DensityMatrix:
    """|n><n| for a 1-based site"""
    index = spec.check_site(n)
    rho = np.zeros((spec.n_sites, spec.n_sites), dtype=complex)
    rho[index, index] = 1.0
    return DensityMatrix(entries=rho)


def eigenstate_density(eigensystem: EigenSystem, k: int) -> DensityMatrix:
    """|w_k><w_k| for a 1-based eigen-index"""
    if not 1 <= k <= eigensystem.dim:
        raise ValueError(f"eigen-index {k} out of range 1..{eigensystem.dim}")
    w = eigensystem.state(k)
    return DensityMatrix.from_array(np.outer(w, w.conj()))


def maximally_mixed(n: int) -> DensityMatrix:
    """Identity divided by the dimension"""
    return DensityMatrix(entries=np.eye(n, dtype=complex) / n)


def thermal_state(h: Operator, beta: float) -> DensityMatrix:
    """exp(-beta H)/Z built from the eigendecomposition of H"""
    if not np.isfinite(beta) or beta < 0:
        raise ValueError(f"beta must be finite and non-negative, got {beta}")
    energies, vectors = scipy.linalg.eigh(h.entries)
    # shift by the ground energy so large beta does not underflow
    weights = np.exp(-beta * (energies - energies.min()))
    weights /= weights.sum()
    rho = (vectors * weights) @ vectors.conj().T
    return DensityMatrix.from_array(rho)


def expectation(o: Operator, rho: StateLike) -> float:
    """Real part of tr[o rho]"""
    matrix = _entries(rho)
    if o.dim != matrix.shape[0]:
        raise ValueError(f"dimension mismatch: operator {o.dim}, state {matrix.shape[0]}")
    value = np.einsum("ij,ji->", o.entries, matrix)
    if abs(value.imag) > EXPECTATION_IMAG_TOL:
        raise ValueError(f"expectation has imaginary part {value.imag:.3e}; is the operator Hermitian?")
    return float(value.real)


def purity(rho: StateLike) -> float:
    """tr[rho^2]"""
    matrix = _entries(rho)
    return float(np.vdot(matrix, matrix).real)


def eigen_populations(rho: StateLike, eigensystem: EigenSystem) -> np.ndarray:
    """<w_k|rho|w_k> for k = 1..N (position k-1)"""
    matrix = _entries(rho)
    if matrix.shape[0] != eigensystem.dim:
        raise ValueError(f"dimension mismatch: eigensystem {eigensystem.dim}, state {matrix.shape[0]}")
    w = eigensystem.states
    return np.einsum("ik,ij,jk->k", w.conj(), matrix, w).real


def parity_weights(rho: StateLike, eigensystem: EigenSystem) -> Tuple[float, float]:
    """(p_od, p_ev): weight on spatially antisymmetric (even k) and symmetric (odd k) eigenstates"""
    populations = eigen_populations(rho, eigensystem)
    odd_mask = np.array([label == Parity.ODD for label in eigensystem.parity])
    return float(populations[odd_mask].sum()), float(populations[~odd_mask].sum())


def attractor_weights(
    rho: StateLike, eigensystem: EigenSystem, groups: Sequence[Sequence[int]]
) -> List[float]:
    """Total eigen-population on each group of 1-based eigen-indices"""
    populations = eigen_populations(rho, eigensystem)
    return [float(sum(populations[k - 1] for k in group)) for group in groups]
