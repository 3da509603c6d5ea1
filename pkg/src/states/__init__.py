"""Density matrices and superoperator vectorization"""

from .density import (
    DensityMatrix,
    pure_state_on_site,
    eigenstate_density,
    maximally_mixed,
    thermal_state,
    expectation,
    purity,
    eigen_populations,
    parity_weights,
    attractor_weights,
)
from .superoperators import (
    Superoperator,
    vectorize,
    devectorize,
    identity_vector,
    hs_inner,
    spre,
    spost,
    sprepost,
)

__all__ = [
    "DensityMatrix",
    "pure_state_on_site",
    "eigenstate_density",
    "maximally_mixed",
    "thermal_state",
    "expectation",
    "purity",
    "eigen_populations",
    "parity_weights",
    "attractor_weights",
    "Superoperator",
    "vectorize",
    "devectorize",
    "identity_vector",
    "hs_inner",
    "spre",
    "spost",
    "sprepost",
]
