"""Lindblad generator, steady states, spectra and Zeno diagnostics"""

from .generator import (
    LiouvilleOperator,
    LiouvilleSpectrum,
    EigenvalueClusters,
    DegenerateSteadyStateError,
    build_liouvillian,
    propagate_vector,
    lindblad_propagate,
    lindblad_evolve,
    spectral_projector,
    kernel_projector,
    kernel_dimension,
    steady_state,
    stationarity_residual,
    liouvillian_spectrum,
    cluster_eigenvalues,
)
from .spectra import (
    SpectrumSolveError,
    default_omega_grid,
    steady_state_spectrum,
    perturbative_rates,
    perturbative_spectrum,
)
from .zeno import (
    EffectiveModes,
    ZenoRateCandidates,
    SurvivalFit,
    effective_modes,
    zeno_subspace_dimension,
    dyad_residuals,
    zeno_rate,
    zeno_rate_candidates,
    fit_survival_decay,
    localized_modes,
)
from .export import (
    eigenvalue_frame,
    write_eigenvalues_csv,
    mode_frame,
    write_modes_csv,
)

__all__ = [
    "LiouvilleOperator",
    "LiouvilleSpectrum",
    "EigenvalueClusters",
    "DegenerateSteadyStateError",
    "build_liouvillian",
    "propagate_vector",
    "lindblad_propagate",
    "lindblad_evolve",
    "spectral_projector",
    "kernel_projector",
    "kernel_dimension",
    "steady_state",
    "stationarity_residual",
    "liouvillian_spectrum",
    "cluster_eigenvalues",
    "SpectrumSolveError",
    "default_omega_grid",
    "steady_state_spectrum",
    "perturbative_rates",
    "perturbative_spectrum",
    "EffectiveModes",
    "ZenoRateCandidates",
    "SurvivalFit",
    "effective_modes",
    "zeno_subspace_dimension",
    "dyad_residuals",
    "zeno_rate",
    "zeno_rate_candidates",
    "fit_survival_decay",
    "localized_modes",
    "eigenvalue_frame",
    "write_eigenvalues_csv",
    "mode_frame",
    "write_modes_csv",
]
