"""Tight-binding lattice model"""

from .hamiltonian import (
    LatticeSpec,
    Operator,
    EigenSystem,
    Parity,
    parity_of_level,
    build_hamiltonian,
    analytic_eigensystem,
    numeric_eigensystem,
    site_projector,
)

__all__ = [
    "LatticeSpec",
    "Operator",
    "EigenSystem",
    "Parity",
    "parity_of_level",
    "build_hamiltonian",
    "analytic_eigensystem",
    "numeric_eigensystem",
    "site_projector",
]
