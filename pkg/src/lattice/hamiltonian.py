"""Tight-binding chain: Hamiltonian, closed-form eigensystem, site projectors.

Sites and eigen-indices are 1-based at every public interface (n = 1..N,
k = 1..N) and 0-based inside arrays. hbar = 1, so energies and rates share
units of the hopping J.
"""

import math
from enum import Enum
from typing import Iterable, List, Set

import numpy as np
import scipy.linalg
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

HERMITIAN_TOL = 1e-12


class Parity(str, Enum):
    """Spatial symmetry of an eigenstate about the chain centre"""
    EVEN = "even"
    ODD = "odd"


class LatticeSpec(BaseModel):
    """Chain length and hopping amplitude"""
    model_config = ConfigDict(frozen=True)

    n_sites: int = Field(..., ge=1, description="Number of lattice sites N")
    coupling: float = Field(..., description="Hopping amplitude J (energy unit)")

    @field_validator("coupling")
    @classmethod
    def _finite_coupling(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError(f"coupling must be finite, got {value}")
        return value

    @property
    def middle_site(self) -> int:
        """Site N//2 + 1 (the centre for odd N)"""
        return self.n_sites // 2 + 1

    def check_site(self, n: int) -> int:
        """Validate a 1-based site index and return its 0-based position"""
        if not 1 <= n <= self.n_sites:
            raise ValueError(f"site {n} out of range 1..{self.n_sites}")
        return n - 1

    def check_level(self, k: int) -> int:
        """Validate a 1-based eigen-index and return its 0-based position"""
        if not 1 <= k <= self.n_sites:
            raise ValueError(f"eigen-index {k} out of range 1..{self.n_sites}")
        return k - 1


class Operator(BaseModel):
    """Dense complex square matrix, optionally flagged Hermitian"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    entries: np.ndarray = Field(..., description="Complex dim x dim matrix")
    hermitian: bool = Field(default=False, description="Whether entries equal their conjugate transpose")

    @field_validator("entries", mode="before")
    @classmethod
    def _as_complex_matrix(cls, value) -> np.ndarray:
        matrix = np.array(value, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] == 0:
            raise ValueError(f"operator must be a non-empty square matrix, got shape {matrix.shape}")
        if not np.all(np.isfinite(matrix)):
            raise ValueError("operator entries must be finite")
        matrix.setflags(write=False)
        return matrix

    @model_validator(mode="after")
    def _check_hermitian(self) -> "Operator":
        if self.hermitian:
            deviation = np.max(np.abs(self.entries - self.entries.conj().T))
            if deviation > HERMITIAN_TOL:
                raise ValueError(f"operator flagged Hermitian deviates by {deviation:.3e}")
        return self

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        """Check Hermiticity numerically, independent of the flag"""
        return bool(np.max(np.abs(self.entries - self.entries.conj().T)) <= tol)


class EigenSystem(BaseModel):
    """Eigen-energies and eigenstates indexed k = 1..N as in the closed form"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    energies: np.ndarray = Field(..., description="Real energies e_k, position k-1")
    states: np.ndarray = Field(..., description="Column k-1 holds |w_k> in the site basis")
    parity: List[Parity] = Field(..., description="Spatial symmetry per eigen-index")

    @model_validator(mode="after")
    def _check_shapes(self) -> "EigenSystem":
        n = self.energies.shape[0]
        if self.states.shape != (n, n) or len(self.parity) != n:
            raise ValueError("energies, states and parity labels must agree in size")
        gram = self.states.conj().T @ self.states
        if np.max(np.abs(gram - np.eye(n))) > 1e-10:
            raise ValueError("eigenstates are not orthonormal")
        return self

    @property
    def dim(self) -> int:
        return self.energies.shape[0]

    def state(self, k: int) -> np.ndarray:
        """Eigenvector |w_k> (1-based k)"""
        return self.states[:, k - 1]

    def bohr_frequencies(self) -> np.ndarray:
        """Matrix of omega_ij = e_i - e_j"""
        return self.energies[:, None] - self.energies[None, :]

    def indices_with_parity(self, parity: Parity) -> List[int]:
        """1-based eigen-indices carrying the given spatial symmetry"""
        return [k + 1 for k, label in enumerate(self.parity) if label == parity]


def parity_of_level(k: int) -> Parity:
    """Odd k are spatially symmetric, even k antisymmetric"""
    return Parity.EVEN if k % 2 == 1 else Parity.ODD


def build_hamiltonian(spec: LatticeSpec) -> Operator:
    """Nearest-neighbour hopping matrix with J on both off-diagonals"""
    hopping = np.full(spec.n_sites - 1, spec.coupling)
    entries = np.diag(hopping, k=1) + np.diag(hopping, k=-1)
    return Operator(entries=entries, hermitian=True)


def analytic_eigensystem(spec: LatticeSpec) -> EigenSystem:
    """Closed-form e_k = 2J cos(pi k/(N+1)), <n|w_k> = sqrt(2/(N+1)) sin(pi k n/(N+1))"""
    n_sites = spec.n_sites
    levels = np.arange(1, n_sites + 1)
    sites = np.arange(1, n_sites + 1)
    phase = np.pi / (n_sites + 1)
    energies = 2.0 * spec.coupling * np.cos(phase * levels)
    states = math.sqrt(2.0 / (n_sites + 1)) * np.sin(phase * np.outer(sites, levels))
    return EigenSystem(
        energies=energies,
        states=states.astype(complex),
        parity=[parity_of_level(int(k)) for k in levels],
    )


def numeric_eigensystem(h: Operator) -> EigenSystem:
    """Dense diagonalization reordered to the closed-form index convention.

    Eigenpairs are ordered by descending energy when the hopping is positive
    (ascending otherwise) and each column is phased so its first site
    amplitude is real and non-negative.
    """
    if not h.is_hermitian():
        raise ValueError("numeric_eigensystem requires a Hermitian operator")
    energies, states = scipy.linalg.eigh(h.entries)
    hopping = h.entries[0, 1].real if h.dim > 1 else 0.0
    order = np.argsort(-energies if hopping >= 0 else energies, kind="stable")
    energies = energies[order]
    states = states[:, order].astype(complex)
    for col in range(states.shape[1]):
        pivot = states[0, col]
        if abs(pivot) > 1e-14:
            states[:, col] *= abs(pivot) / pivot
    return EigenSystem(
        energies=energies,
        states=states,
        parity=[parity_of_level(k) for k in range(1, h.dim + 1)],
    )


def site_projector(spec: LatticeSpec, sites: Iterable[int]) -> Operator:
    """Diagonal 0/1 projector onto the listed 1-based sites"""
    chosen: Set[int] = set(sites)
    if not chosen:
        raise ValueError("site_projector needs at least one site")
    diagonal = np.zeros(spec.n_sites)
    for n in sorted(chosen):
        diagonal[spec.check_site(n)] = 1.0
    return Operator(entries=np.diag(diagonal), hermitian=True)
