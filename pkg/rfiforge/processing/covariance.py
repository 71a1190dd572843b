"""
Sample covariance estimation at arbitrary lag, model covariances and the closed-form
covariance of a drifting interferer.
"""

from __future__ import annotations

import logging
from typing import Sequence

import numpy as np
from joblib import Parallel

from rfiforge.exceptions import DomainError, InsufficientSamples
from rfiforge.models.covariance import LaggedSCM, SCMStatistics
from rfiforge.models.scenario import ArrayGeometry, CosmicSource, RfiModel, ScenarioConfig, SnapshotMatrix
from rfiforge.processing.scenario import observe, rfi_ssv, steering_vector, synthesize
from rfiforge.utils import derive_seed, hermitian_part, map_ordered

logger = logging.getLogger(__name__)

_COINCIDENT_RATE = 1e-12


def sample_covariance(snapshots: SnapshotMatrix | np.ndarray, tau: int = 0) -> LaggedSCM:
    """
    Estimate the array covariance at lag `tau`.

    The sum runs over `n = tau .. N-1` and is normalized by `N - tau`, so no sample
    before the first snapshot is needed.

    Parameters
    ----------
    snapshots : SnapshotMatrix | np.ndarray
        `M x N` snapshots
    tau : int, optional
        The lag in samples, by default 0

    Returns
    -------
    LaggedSCM
        `(1 / (N - tau)) sum_n x(n) x(n - tau)^H`. At lag 0 the result is exactly Hermitian.

    Raises
    ------
    DomainError
        If `tau` is negative
    InsufficientSamples
        If `tau >= N`
    """
    data = snapshots.data if isinstance(snapshots, SnapshotMatrix) else np.asarray(snapshots)
    n_samples = data.shape[1]
    if tau < 0:
        raise DomainError(f"lag must be non-negative, got {tau}")
    if tau >= n_samples:
        raise InsufficientSamples(f"lag {tau} needs more than {n_samples} snapshots")

    n_used = n_samples - tau
    matrix = data[:, tau:] @ data[:, :n_used].conj().T / n_used
    if tau == 0:
        matrix = hermitian_part(matrix)
    return LaggedSCM(matrix=matrix, lag=tau, n_used=n_used)


def model_covariance(
    rfi: RfiModel,
    sigma_n: float,
    tau: int = 0,
    *,
    sources: Sequence[CosmicSource] = (),
    geometry: ArrayGeometry | None = None,
) -> np.ndarray:
    """
    The true covariance of a spatially stationary scenario.

    `sigma_r**2 e^{i omega tau} a a^H + delta(tau) sigma_n**2 I`, plus
    `delta(tau) sum_k sigma_ck**2 a_ck a_ck^H` when sources are given. A drift rate shared by
    all antennas only rotates the signature as a whole and is folded into `omega`.

    Raises
    ------
    DomainError
        If the interferer is not stationary, the lag is negative, or sources are given
        without a geometry
    """
    if not rfi.is_stationary:
        raise DomainError("the model covariance is only defined for a stationary interferer")
    if tau < 0:
        raise DomainError(f"lag must be non-negative, got {tau}")

    n_antennas = rfi.n_antennas
    a = rfi_ssv(rfi, 0, n_antennas)
    drift = float(rfi.alphas[0]) if n_antennas else 0.0
    matrix = rfi.power * np.exp(1j * (rfi.omega + drift) * tau) * np.outer(a, a.conj())

    if tau == 0:
        matrix = matrix + sigma_n**2 * np.eye(n_antennas)
        if sources:
            if geometry is None:
                raise DomainError("a geometry is needed to place cosmic sources")
            for source in sources:
                a_c = steering_vector(geometry, source.direction)
                matrix = matrix + source.power * np.outer(a_c, a_c.conj())
    return matrix


def _geometric_sum(rate: np.ndarray, n_samples: int) -> np.ndarray:
    # sum_{n=0}^{N-1} e^{i rate n}, written with sines to stay accurate for small rates
    half = 0.5 * rate
    denominator = np.sin(half)
    coincident = (np.abs(rate) < _COINCIDENT_RATE) | (np.abs(denominator) < 1e-15)
    safe = np.where(coincident, 1.0, denominator)
    value = np.exp(1j * half * (n_samples - 1)) * np.sin(half * n_samples) / safe
    return np.where(coincident, float(n_samples), value)


def rfi_scm_closed_form(rfi: RfiModel, tau: int, n_samples: int) -> np.ndarray:
    """
    Closed-form sample covariance of the interferer alone over `N` samples.

    Entry `(k, l)` is
    `sigma_r**2 e^{i omega tau} e^{i(phi_k - phi_l)} / (M N) * sum_n e^{i(alpha_k - alpha_l) n}`,
    the geometric sum being `N` where the drift rates coincide. The signature is assumed
    not to move over `tau` samples.

    Raises
    ------
    DomainError
        If `n_samples < 1`
    """
    if n_samples < 1:
        raise DomainError(f"at least one sample is needed, got {n_samples}")
    n_antennas = rfi.n_antennas
    d_alpha = rfi.alphas[:, None] - rfi.alphas[None, :]
    d_phi = rfi.phis[:, None] - rfi.phis[None, :]
    scale = rfi.power * np.exp(1j * rfi.omega * tau) / (n_antennas * n_samples)
    return scale * np.exp(1j * d_phi) * _geometric_sum(d_alpha, n_samples)


def empirical_scm_statistics(
    config: ScenarioConfig,
    trials: int,
    *,
    tau: int = 0,
    with_gains: bool = False,
    workers: int = 1,
    parallel: Parallel | None = None,
) -> SCMStatistics:
    """
    Monte-Carlo mean and entrywise variance of the SCM over independent seeds.

    Trial `t` uses the seed `derive_seed(config.seed, t)`, and results are aggregated in
    trial order, so the statistics do not depend on the number of workers.

    Parameters
    ----------
    config : ScenarioConfig
        The scenario; only its seed changes between trials
    trials : int
        The number of trials, at least 2
    tau : int, optional
        The lag, by default 0
    with_gains : bool, optional
        Whether to apply the scenario's gain errors, by default False
    workers : int, optional
        Worker threads, by default 1
    parallel : Parallel | None, optional
        A running joblib `Parallel` to use instead of creating one

    Returns
    -------
    SCMStatistics
        The mean SCM and the entrywise variance
    """
    if trials < 2:
        raise DomainError(f"at least 2 trials are needed, got {trials}")

    def trial(index: int) -> np.ndarray:
        trial_config = config.with_seed(derive_seed(config.seed, index))
        snapshots = observe(trial_config)[0] if with_gains else synthesize(trial_config)
        return sample_covariance(snapshots, tau).matrix

    stack = np.stack(map_ordered(trial, range(trials), workers=workers, parallel=parallel))
    mean = stack.mean(axis=0)
    variance = np.sum(np.abs(stack - mean) ** 2, axis=0) / (trials - 1)
    logger.debug("SCM statistics over %d trials at lag %d", trials, tau)
    return SCMStatistics(mean=mean, variance=variance, trials=trials, lag=tau)
