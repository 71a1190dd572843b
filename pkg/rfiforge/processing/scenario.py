"""
Synthesis of array snapshots: signature vectors, the interferer, cosmic sources,
system noise and per-antenna gain errors.

All rates are in radians per sample. Complex Gaussian draws follow the circular
convention `CN(0, s**2)`: real and imaginary parts are independent `N(0, s**2 / 2)`.
"""

from __future__ import annotations

import logging
from enum import IntEnum

import numpy as np

from rfiforge.exceptions import DimensionMismatch, DomainError, InvalidModelError
from rfiforge.models.scenario import ArrayGeometry, RfiModel, ScenarioConfig, SnapshotMatrix
from rfiforge.utils import derive_rng

logger = logging.getLogger(__name__)


class Stream(IntEnum):
    """Independent random streams derived from one scenario seed"""

    WAVEFORMS = 0
    GAINS = 1
    GEOMETRY = 2
    RFI_PARAMETERS = 3


def scenario_rng(seed: int, stream: Stream) -> np.random.Generator:
    return derive_rng(seed, int(stream))


def rfi_ssv(rfi: RfiModel, n: int | float, n_antennas: int) -> np.ndarray:
    """
    The interferer's spatial signature vector at sample `n`.

    Parameters
    ----------
    rfi : RfiModel
        The interferer
    n : int | float
        The sample index
    n_antennas : int
        The number of antennas `M` the signature is evaluated for

    Returns
    -------
    np.ndarray
        Length-`M` unit-norm vector with entries `exp(i(alpha_k n + phi_k)) / sqrt(M)`

    Raises
    ------
    InvalidModelError
        If the model's drift rates and phases do not have `M` entries
    """
    if rfi.n_antennas != n_antennas:
        raise InvalidModelError(
            f"RFI model has {rfi.n_antennas} entries but {n_antennas} antennas were requested"
        )
    return np.exp(1j * (rfi.alphas * n + rfi.phis)) / np.sqrt(n_antennas)


def rfi_signatures(rfi: RfiModel, n_samples: int, start: int = 0) -> np.ndarray:
    """
    Signatures for samples `start .. start + n_samples - 1`, one per column.
    """
    n = np.arange(start, start + n_samples, dtype=np.float64)
    phases = np.outer(rfi.alphas, n) + rfi.phis[:, None]
    return np.exp(1j * phases) / np.sqrt(rfi.n_antennas)


def rfi_waveform(rfi: RfiModel, n_samples: int, start: int = 0) -> np.ndarray:
    n = np.arange(start, start + n_samples, dtype=np.float64)
    return rfi.sigma_r * np.exp(1j * (rfi.omega * n + rfi.phi))


def rfi_component(rfi: RfiModel, n_samples: int, start: int = 0) -> np.ndarray:
    """
    The interferer's contribution `r(n) a_r(n)` to the snapshots for samples
    `start .. start + n_samples - 1`, `M x N`.
    """
    return rfi_signatures(rfi, n_samples, start) * rfi_waveform(rfi, n_samples, start)[None, :]


def steering_vector(geometry: ArrayGeometry, direction: tuple[float, float]) -> np.ndarray:
    """
    Far-field narrowband signature of a point source.

    Parameters
    ----------
    geometry : ArrayGeometry
        The array, positions in wavelengths
    direction : tuple[float, float]
        Direction cosines `(l, m)`

    Returns
    -------
    np.ndarray
        Unit-norm vector with entries `exp(i 2 pi (x_k l + y_k m)) / sqrt(M)`

    Raises
    ------
    DomainError
        If the direction lies outside the unit disk
    """
    l, m = direction
    if not (np.isfinite(l) and np.isfinite(m)) or l * l + m * m > 1.0 + 1e-12:
        raise DomainError(f"direction ({l}, {m}) lies outside the unit disk")
    phase = 2.0 * np.pi * (geometry.positions[:, 0] * l + geometry.positions[:, 1] * m)
    return np.exp(1j * phase) / np.sqrt(geometry.n_antennas)


def steering_matrix(geometry: ArrayGeometry, directions: np.ndarray) -> np.ndarray:
    """
    Unnormalized steering vectors for `K` directions, `M x K` with unit-modulus entries.
    """
    directions = np.asarray(directions, dtype=np.float64).reshape(-1, 2)
    phase = 2.0 * np.pi * (geometry.positions @ directions.T)
    return np.exp(1j * phase)


def _circular_normal(rng: np.random.Generator, sigma: float, shape: tuple[int, ...]) -> np.ndarray:
    draws = rng.standard_normal((2, *shape))
    return (sigma / np.sqrt(2.0)) * (draws[0] + 1j * draws[1])


def synthesize(config: ScenarioConfig) -> SnapshotMatrix:
    """
    Generate `N` snapshots of the array output.

    Column `n` is `r(n) a_r(n) + sum_k c_k(n) a_ck + n(n)`. Noise and source waveforms are
    drawn from the scenario's waveform stream, noise first, so the draws do not depend on
    the interferer: zeroing the RFI amplitude yields the RFI-free twin of the same data.

    Parameters
    ----------
    config : ScenarioConfig
        The scenario

    Returns
    -------
    SnapshotMatrix
        The `M x N` snapshots, a pure function of `config`
    """
    n_antennas, n_samples = config.n_antennas, config.n_samples
    rng = scenario_rng(config.seed, Stream.WAVEFORMS)

    data = _circular_normal(rng, config.sigma_n, (n_antennas, n_samples))

    if config.sources:
        amplitudes = np.array([source.sigma_c for source in config.sources])
        waveforms = _circular_normal(rng, 1.0, (len(config.sources), n_samples))
        waveforms *= amplitudes[:, None]
        signatures = np.column_stack(
            [steering_vector(config.geometry, source.direction) for source in config.sources]
        )
        data += signatures @ waveforms

    if config.rfi is not None and config.rfi.sigma_r > 0:
        data += rfi_component(config.rfi, n_samples)

    logger.debug(
        "Synthesized %d x %d snapshots (seed=%d, INR=%.3g, %d sources)",
        n_antennas,
        n_samples,
        config.seed,
        config.inr,
        len(config.sources),
    )
    return SnapshotMatrix(data=data)


def draw_gain_vector(delta: float, n_antennas: int, rng: np.random.Generator) -> np.ndarray:
    """
    Draw per-antenna gains i.i.d. uniform on `[1 - delta, 1 + delta]`.

    Raises
    ------
    DomainError
        If `delta` is outside `[0, 1)`
    """
    if not 0.0 <= delta < 1.0:
        raise DomainError(f"gain delta must lie in [0, 1), got {delta}")
    if delta == 0.0:
        return np.ones(n_antennas)
    return rng.uniform(1.0 - delta, 1.0 + delta, n_antennas)


def apply_gain_errors(snapshots: SnapshotMatrix, u: np.ndarray) -> SnapshotMatrix:
    """
    Scale row `k` of the snapshots by `u[k]`, i.e. `diag(u) x(n)` for every column.

    Raises
    ------
    DimensionMismatch
        If `u` does not have one entry per antenna
    """
    u = np.asarray(u, dtype=np.float64)
    if u.ndim != 1 or u.size != snapshots.n_antennas:
        raise DimensionMismatch(
            f"gain vector has shape {u.shape} but the array has {snapshots.n_antennas} antennas"
        )
    return SnapshotMatrix(data=u[:, None] * snapshots.data)


def observe(config: ScenarioConfig) -> tuple[SnapshotMatrix, np.ndarray]:
    """
    Synthesize the scenario and apply its gain errors.

    Returns
    -------
    tuple[SnapshotMatrix, np.ndarray]
        The gain-affected snapshots and the gain vector `u` that was drawn
        (all ones when `gain_delta` is 0)
    """
    snapshots = synthesize(config)
    u = draw_gain_vector(
        config.gain_delta, config.n_antennas, scenario_rng(config.seed, Stream.GAINS)
    )
    if config.gain_delta > 0:
        snapshots = apply_gain_errors(snapshots, u)
    return snapshots, u
