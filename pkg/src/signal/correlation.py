"""Record correlation function: closed form from the generator and Monte Carlo estimate"""

import math
from typing import Iterable, List, Optional

import numpy as np
import scipy.signal

from src.lattice import Operator
from src.liouville.generator import LiouvilleOperator, propagate_vector
from src.sme.models import MeasurementRecord
from src.states import DensityMatrix, expectation, vectorize
from src.utils.logger import get_logger
from .models import CorrelationEstimate, CorrelationKind
from .scaling import InsufficientDataError

LAG_TOL = 1e-6


def analytic_record_correlation(
    l: LiouvilleOperator,
    rho_ss: DensityMatrix,
    observable: Operator,
    tau_grid: Iterable[float],
    dt: float,
    efficiency: float = 1.0,
) -> CorrelationEstimate:
    """C(tau) = <O>^2 dt^2 - (sqrt(mu)/2) <O><O + O^dag> dt^2 + (sqrt(mu)/2) tr[O e^{L tau} {O, rho_ss}] dt^2"""
    taus = np.asarray(list(tau_grid), dtype=float)
    o = observable.entries
    rho = rho_ss.entries
    mean = expectation(observable, rho_ss)
    mean_sym = float(np.trace((o + o.conj().T) @ rho).real)
    root_mu = math.sqrt(efficiency)

    propagated = propagate_vector(l, vectorize(o @ rho + rho @ o), taus)
    o_dag_vec = vectorize(o.conj().T)
    dynamic = (propagated @ o_dag_vec.conj()).real

    values = (mean ** 2 - 0.5 * root_mu * mean * mean_sym + 0.5 * root_mu * dynamic) * dt ** 2
    return CorrelationEstimate(
        taus=taus,
        values=values,
        kind=CorrelationKind.ANALYTIC,
        meta={"dt": dt, "strength": l.strength, "efficiency": efficiency, "mean": mean},
    )


def transient_time(coupling: float, strength: float) -> float:
    """Discarded record head 10 / min(|J|, k)"""
    rate = min(abs(coupling), strength)
    if rate <= 0:
        raise ValueError("transient time needs non-zero coupling and strength")
    return 10.0 / rate


def mc_record_correlation(
    records: List[MeasurementRecord],
    tau_grid: Iterable[float],
    coupling: float = 1.0,
    discard_time: Optional[float] = None,
    min_records: int = 50,
) -> CorrelationEstimate:
    """Mean of lambda_t lambda_{t+tau} over time origins and records, with across-record standard errors.

    Each record contributes its own time average; the spread of those
    averages gives the standard error. At tau = 0 the white-noise moment
    dt/(8k) is removed from the value and the raw moment is kept in
    equal_time. Lags must be multiples of dt.
    """
    logger = get_logger("Correlation")
    if len(records) < min_records:
        raise InsufficientDataError(f"need at least {min_records} records, got {len(records)}")
    dt = records[0].dt
    strength = records[0].probe.strength
    if any(abs(r.dt - dt) > 1e-15 or r.probe.strength != strength for r in records):
        raise ValueError("records must share dt and probe strength")

    taus = np.asarray(list(tau_grid), dtype=float)
    lags = np.rint(taus / dt).astype(int)
    if np.any(np.abs(lags * dt - taus) > LAG_TOL * dt):
        raise ValueError("lags must be integer multiples of dt")

    discard_time = transient_time(coupling, strength) if discard_time is None else discard_time
    start = int(math.ceil(discard_time / dt))
    per_record = np.empty((len(records), lags.shape[0]))
    for r, record in enumerate(records):
        x = np.asarray(record.samples[start:], dtype=float)
        n = x.shape[0]
        if n <= lags.max():
            raise InsufficientDataError(
                f"record keeps {n} samples after discarding t < {discard_time:g}, fewer than the largest lag"
            )
        full = scipy.signal.correlate(x, x, mode="full", method="fft")
        per_record[r] = full[n - 1 + lags] / (n - lags)

    values = per_record.mean(axis=0)
    stderr = per_record.std(axis=0, ddof=1) / math.sqrt(len(records))
    equal_time = None
    zero = np.flatnonzero(lags == 0)
    if zero.size:
        equal_time = float(values[zero[0]])
        values[zero[0]] -= dt / (8.0 * strength)
    logger.info(f"Monte Carlo correlation from {len(records)} records, discarded t < {discard_time:g}")
    return CorrelationEstimate(
        taus=taus,
        values=values,
        stderr=stderr,
        equal_time=equal_time,
        kind=CorrelationKind.MONTE_CARLO,
        meta={"dt": dt, "strength": strength, "n_records": len(records), "discard_time": discard_time},
    )
