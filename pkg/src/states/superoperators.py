"""Column-stacking vectorization and superoperator building blocks.

Convention (used by every superoperator in the package):
    vec(M)      = M stacked column by column, i.e. M.flatten(order="F")
    vec(A X B)  = (B^T kron A) vec(X)
so the Hilbert-Schmidt product tr[A^dagger B] equals vdot(vec(A), vec(B)).
"""

import math
from typing import Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.lattice import Operator

TRACE_PRESERVATION_TOL = 1e-10

MatrixLike = Union[Operator, np.ndarray]


def _matrix(m: MatrixLike) -> np.ndarray:
    return m.entries if isinstance(m, Operator) else np.asarray(m)


class Superoperator(BaseModel):
    """Linear map on vectorized N x N matrices"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    entries: np.ndarray = Field(..., description="Complex N^2 x N^2 matrix acting on vec(rho)")
    trace_preserving: bool = Field(default=False, description="Whether tr[S(rho)] = 0 for every rho (generator form)")

    @field_validator("entries", mode="before")
    @classmethod
    def _as_square(cls, value) -> np.ndarray:
        matrix = np.array(value, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError(f"superoperator must be square, got shape {matrix.shape}")
        root = math.isqrt(matrix.shape[0])
        if root * root != matrix.shape[0]:
            raise ValueError(f"superoperator size {matrix.shape[0]} is not a perfect square")
        if not np.all(np.isfinite(matrix)):
            raise ValueError("superoperator entries must be finite")
        matrix.setflags(write=False)
        return matrix

    @model_validator(mode="after")
    def _check_trace_preservation(self) -> "Superoperator":
        if self.trace_preserving:
            residual = np.max(np.abs(identity_vector(self.hilbert_dim).conj() @ self.entries))
            if residual > TRACE_PRESERVATION_TOL:
                raise ValueError(f"adjoint does not annihilate the identity (residual {residual:.3e})")
        return self

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def hilbert_dim(self) -> int:
        return math.isqrt(self.entries.shape[0])

    def apply(self, m: MatrixLike) -> np.ndarray:
        """Act on a matrix and return the resulting matrix"""
        n = self.hilbert_dim
        return (self.entries @ _matrix(m).reshape(-1, order="F")).reshape((n, n), order="F")


def vectorize(m: MatrixLike) -> np.ndarray:
    """Stack the columns of a matrix into a vector"""
    return np.asarray(_matrix(m), dtype=complex).reshape(-1, order="F")


def devectorize(v: np.ndarray) -> Operator:
    """Inverse of vectorize"""
    v = np.asarray(v)
    n = math.isqrt(v.shape[0])
    if v.ndim != 1 or n * n != v.shape[0]:
        raise ValueError(f"vector length {v.shape[0]} is not a perfect square")
    return Operator(entries=v.reshape((n, n), order="F"))


def identity_vector(n: int) -> np.ndarray:
    """vec of the n x n identity"""
    return np.eye(n, dtype=complex).reshape(-1, order="F")


def hs_inner(a: MatrixLike, b: MatrixLike) -> complex:
    """Hilbert-Schmidt product tr[a^dagger b]"""
    return complex(np.vdot(vectorize(a), vectorize(b)))


def spre(a: MatrixLike) -> np.ndarray:
    """Superoperator of X -> a X"""
    a = _matrix(a)
    return np.kron(np.eye(a.shape[0]), a)


def spost(b: MatrixLike) -> np.ndarray:
    """Superoperator of X -> X b"""
    b = _matrix(b)
    return np.kron(b.T, np.eye(b.shape[0]))


def sprepost(a: MatrixLike, b: MatrixLike) -> np.ndarray:
    """Superoperator of X -> a X b"""
    return np.kron(_matrix(b).T, _matrix(a))
