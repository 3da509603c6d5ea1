"""Kraus-form integration of the homodyne stochastic master equation.

    d rho = -i[H, rho] dt + k D[O] rho dt + sqrt(2 k mu) H[O] rho dW
    lambda = <O> dt + dW / sqrt(8k)

with D[O] rho = 2 O rho O^dag - {O^dag O, rho} and
H[O] rho = O rho + rho O - <O + O^dag> rho.

Each step applies the measurement operator

    M = 1 - i H dt - k O^2 dt + sqrt(2 k mu) O dY + k mu O^2 (dY^2 - dt)
    dY = 2 sqrt(2 k mu) <O> dt + dW

as rho -> M rho M^dag + 2 k (1 - mu) O rho O dt, then renormalizes. Expanded
to first order in dt this is the equation above, and M rho M^dag keeps rho
positive and a pure state pure.
"""

import math
from typing import Optional, Tuple, Union

import numpy as np

from src.lattice import EigenSystem, LatticeSpec, Operator, Parity, analytic_eigensystem, build_hamiltonian
from src.states import DensityMatrix
from .models import IntegrationConfig, MeasurementRecord, ProbeConfig, TrajectoryResult

MIN_TRACE = 1e-6

MatrixLike = Union[Operator, DensityMatrix, np.ndarray]


class SMEIntegrationError(RuntimeError):
    """The integrated state lost its normalization (dt too large or blow-up)"""


def _matrix(m: MatrixLike) -> np.ndarray:
    if isinstance(m, (Operator, DensityMatrix)):
        return m.entries
    return np.asarray(m, dtype=complex)


def _check_dims(o: np.ndarray, rho: np.ndarray) -> None:
    if o.shape != rho.shape:
        raise ValueError(f"dimension mismatch: operator {o.shape}, state {rho.shape}")


def dissipator(o: MatrixLike, rho: MatrixLike) -> np.ndarray:
    """2 O rho O^dag - {O^dag O, rho}"""
    o, rho = _matrix(o), _matrix(rho)
    _check_dims(o, rho)
    od = o.conj().T
    odo = od @ o
    return 2.0 * o @ rho @ od - odo @ rho - rho @ odo


def innovation(o: MatrixLike, rho: MatrixLike) -> np.ndarray:
    """O rho + rho O - <O + O^dag> rho"""
    o, rho = _matrix(o), _matrix(rho)
    _check_dims(o, rho)
    mean = np.trace((o + o.conj().T) @ rho)
    return o @ rho + rho @ o - mean * rho


class _StepKernel:
    """Precomputed matrices for repeated steps with fixed H, probe and dt"""

    def __init__(self, h: np.ndarray, probe: Optional[ProbeConfig], dt: float, renormalize: bool):
        self.dt = dt
        self.renormalize = renormalize
        self.probed = probe is not None
        identity = np.eye(h.shape[0], dtype=complex)
        if probe is None:
            self.m0 = identity - 1j * h * dt
            return
        if probe.strength <= 0.0:
            raise ValueError("probing with k=0 produces no usable record; pass probe=None for closed-system evolution")
        if probe.dim != h.shape[0]:
            raise ValueError(f"dimension mismatch: probe {probe.dim}, Hamiltonian {h.shape[0]}")
        k, mu = probe.strength, probe.efficiency
        self.o = probe.observable.entries
        self.o2 = self.o @ self.o
        self.m0 = identity - 1j * h * dt - k * self.o2 * dt
        self.kick = math.sqrt(2.0 * k * mu)
        self.ito = k * mu
        self.gain = 2.0 * math.sqrt(2.0 * k * mu)
        self.lost = 2.0 * k * (1.0 - mu) * dt
        self.record_noise = 1.0 / math.sqrt(8.0 * k)

    def step(self, rho: np.ndarray, dw: float) -> Tuple[np.ndarray, Optional[float]]:
        sample = None
        if self.probed:
            mean_o = (np.trace(self.o @ rho) / np.trace(rho)).real
            dy = self.gain * mean_o * self.dt + dw
            m = self.m0 + self.kick * dy * self.o + self.ito * (dy * dy - self.dt) * self.o2
            rho_next = m @ rho @ m.conj().T
            if self.lost > 0.0:
                rho_next = rho_next + self.lost * (self.o @ rho @ self.o)
            sample = mean_o * self.dt + self.record_noise * dw
        else:
            rho_next = self.m0 @ rho @ self.m0.conj().T

        trace = np.trace(rho_next).real
        if not np.all(np.isfinite(rho_next)) or trace < MIN_TRACE:
            raise SMEIntegrationError(f"state trace fell to {trace:.3e}; reduce dt")
        if self.renormalize:
            rho_next = 0.5 * (rho_next + rho_next.conj().T)
            rho_next /= np.trace(rho_next).real
        return rho_next, sample


def sme_step(
    rho: MatrixLike,
    h: Operator,
    probe: Optional[ProbeConfig],
    dt: float,
    dw: float,
    renormalize: bool = True,
) -> Tuple[np.ndarray, Optional[float]]:
    """One measurement step; returns (rho_next, lambda) with lambda None when unprobed"""
    if not math.isfinite(dw):
        raise ValueError(f"dW must be finite, got {dw}")
    rho = _matrix(rho)
    if rho.shape != h.entries.shape:
        raise ValueError(f"dimension mismatch: state {rho.shape}, Hamiltonian {h.entries.shape}")
    kernel = _StepKernel(h.entries, probe, dt, renormalize)
    return kernel.step(rho, dw)


def trajectory_rng(seed: int, index: int) -> np.random.Generator:
    """Counter-based Philox stream fixed by (master seed, trajectory index)"""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy=seed, spawn_key=(index,))))


def stream_seed(seed: int, index: int) -> int:
    """64-bit seed summarizing the stream of one trajectory"""
    return int(np.random.SeedSequence(entropy=seed, spawn_key=(index,)).generate_state(1, dtype=np.uint64)[0])


def sample_indices(n_steps: int, n_samples: int) -> np.ndarray:
    """Step indices of the coarse grid, always including 0 and n_steps"""
    return np.unique(np.round(np.linspace(0, n_steps, n_samples)).astype(int))


def simulate_trajectory(
    spec: LatticeSpec,
    initial: DensityMatrix,
    probe: Optional[ProbeConfig],
    integ: IntegrationConfig,
    index: int = 0,
    eigensystem: Optional[EigenSystem] = None,
) -> TrajectoryResult:
    """Integrate one conditioned trajectory and collect its diagnostics.

    probe=None runs the closed-system (unmonitored) evolution and produces no
    record. Detector efficiency below one is not supported.
    """
    if initial.dim != spec.n_sites:
        raise ValueError(f"dimension mismatch: initial state {initial.dim}, lattice {spec.n_sites}")
    strength = probe.strength if probe is not None else 0.0
    if probe is not None and probe.efficiency < 1.0:
        raise ValueError(f"trajectory integration supports efficiency 1 only, got {probe.efficiency}")
    integ.check_guard(spec.coupling, strength)

    eigensystem = eigensystem or analytic_eigensystem(spec)
    odd_mask = np.array([label == Parity.ODD for label in eigensystem.parity])
    w = eigensystem.states
    w_conj = w.conj()

    kernel = _StepKernel(build_hamiltonian(spec).entries, probe, integ.dt, integ.renormalize_every_step)
    n_steps = integ.n_steps
    rng = trajectory_rng(integ.seed, index)
    dws = rng.normal(0.0, math.sqrt(integ.dt), size=n_steps) if probe is not None else np.zeros(n_steps)

    stride = integ.diagnostics_stride
    diag_steps = np.arange(0, n_steps + 1, stride)
    coarse_steps = sample_indices(n_steps, integ.ensemble_samples)
    n_sites = spec.n_sites

    populations = np.empty((diag_steps.shape[0], n_sites))
    parities = np.empty((diag_steps.shape[0], 2))
    purities = np.empty(diag_steps.shape[0])
    states = np.empty((coarse_steps.shape[0], n_sites, n_sites), dtype=complex)
    samples = np.empty(n_steps) if probe is not None else None

    rho = np.array(initial.entries, dtype=complex)
    diag_slot = 0
    coarse_slot = 0
    for step in range(n_steps + 1):
        if diag_slot < diag_steps.shape[0] and step == diag_steps[diag_slot]:
            populations[diag_slot] = np.diag(rho).real
            eigen_pops = np.sum(w_conj * (rho @ w), axis=0).real
            parities[diag_slot] = (eigen_pops[odd_mask].sum(), eigen_pops[~odd_mask].sum())
            purities[diag_slot] = np.vdot(rho, rho).real
            diag_slot += 1
        if coarse_slot < coarse_steps.shape[0] and step == coarse_steps[coarse_slot]:
            states[coarse_slot] = rho
            coarse_slot += 1
        if step == n_steps:
            break
        rho, sample = kernel.step(rho, dws[step])
        if samples is not None:
            samples[step] = sample

    record = MeasurementRecord(dt=integ.dt, samples=samples, probe=probe) if probe is not None else None
    return TrajectoryResult(
        index=index,
        times=integ.dt * diag_steps,
        record=record,
        site_populations=populations,
        parity_weights=parities,
        purity=purities,
        final_state=DensityMatrix.positive_part(rho),
        sample_times=integ.dt * coarse_steps,
        state_samples=states,
    )
