"""
Interference subspace estimation from sample covariances, the alignment metric, rank
selection and the orthogonal projector.
"""

from __future__ import annotations

import logging

import numpy as np
import scipy.linalg

from rfiforge.exceptions import DomainError, IllConditionedBasis, NumericError
from rfiforge.models.covariance import LaggedSCM
from rfiforge.models.subspace import SubspaceEstimate
from rfiforge.utils import hermitian_part

logger = logging.getLogger(__name__)

DEFAULT_KAPPA = 3.0
MAX_BASIS_CONDITION = 1e8


def _normalize_phase(vectors: np.ndarray) -> np.ndarray:
    # Make the first non-negligible component of every column real and positive
    out = vectors.copy()
    for j in range(out.shape[1]):
        column = out[:, j]
        scale = np.max(np.abs(column)) if column.size else 0.0
        if scale == 0.0:
            continue
        first = np.flatnonzero(np.abs(column) > 1e-12 * scale)[0]
        out[:, j] = column * (np.abs(column[first]) / column[first])
    return out


def _decompose(scm: LaggedSCM) -> tuple[np.ndarray, np.ndarray]:
    matrix = scm.matrix
    if not np.all(np.isfinite(matrix)):
        raise NumericError("covariance matrix has non-finite entries")
    try:
        if scm.lag == 0:
            values, vectors = scipy.linalg.eigh(hermitian_part(matrix))
            order = np.argsort(values)[::-1]
            return values[order], vectors[:, order]
        # A lagged SCM is not Hermitian: its dominant direction is the first left singular vector
        vectors, values, _ = scipy.linalg.svd(matrix)
        return values, vectors
    except (np.linalg.LinAlgError, ValueError) as e:
        raise NumericError(f"decomposition failed: {e}") from e


def scm_spectrum(scm: LaggedSCM) -> np.ndarray:
    """
    Eigenvalues (lag 0) or singular values (lag != 0) of the SCM, in descending order.
    """
    return _decompose(scm)[0]


def estimate_rfi_subspace(scm: LaggedSCM, rank: int) -> SubspaceEstimate:
    """
    Estimate the `rank`-dimensional interference subspace from an SCM.

    At lag 0 the basis is made of the dominant eigenvectors of the Hermitian matrix; at
    other lags, of the dominant left singular vectors. Each basis vector has its first
    non-negligible component real and positive.

    Raises
    ------
    DomainError
        If `rank` is not in `[0, M]`
    NumericError
        If the matrix has non-finite entries
    """
    n_antennas = scm.n_antennas
    if not 0 <= rank <= n_antennas:
        raise DomainError(f"rank must lie in [0, {n_antennas}], got {rank}")
    values, vectors = _decompose(scm)
    return SubspaceEstimate(
        basis=_normalize_phase(vectors[:, :rank]),
        values=np.clip(values[:rank], 0.0, None),
        source_lag=scm.lag,
    )


def estimate_rfi_ssv(scm: LaggedSCM) -> SubspaceEstimate:
    """
    Estimate the interferer's signature as the dominant eigenvector (lag 0) or dominant
    left singular vector (lag != 0) of the SCM.

    Returns
    -------
    SubspaceEstimate
        A rank-1 estimate with a unit-norm basis vector
    """
    return estimate_rfi_subspace(scm, 1)


def alignment_gamma(a_true: np.ndarray, a_est: np.ndarray) -> float:
    """
    `|a_true^H a_est| / (||a_true|| ||a_est||)`, in `[0, 1]`.

    Raises
    ------
    DomainError
        If either vector is zero or the lengths differ
    """
    a_true = np.asarray(a_true).ravel()
    a_est = np.asarray(a_est).ravel()
    if a_true.size != a_est.size:
        raise DomainError(f"vectors have different lengths: {a_true.size} and {a_est.size}")
    norm = np.linalg.norm(a_true) * np.linalg.norm(a_est)
    if norm == 0.0:
        raise DomainError("the alignment of a zero vector is undefined")
    return float(min(1.0, np.abs(np.vdot(a_true, a_est)) / norm))


def noise_floor(values: np.ndarray) -> float:
    """
    Robust noise power estimate: the median eigenvalue of a lag-0 SCM.
    """
    return float(np.median(values))


def rfi_subspace_rank(
    values: np.ndarray, sigma_n_est: float | None = None, kappa: float = DEFAULT_KAPPA
) -> int:
    """
    Number of eigenvalues above `kappa * sigma_n_est**2`, capped at `M - 1`.

    Parameters
    ----------
    values : np.ndarray
        Eigenvalues in descending order
    sigma_n_est : float | None, optional
        Estimated noise amplitude. Defaults to the square root of the median eigenvalue.
    kappa : float, optional
        Threshold factor, greater than 1, by default 3

    Returns
    -------
    int
        The subspace dimension `d`, 0 when no interference is detected

    Raises
    ------
    DomainError
        If `kappa <= 1`
    """
    if kappa <= 1.0:
        raise DomainError(f"kappa must be greater than 1, got {kappa}")
    values = np.asarray(values, dtype=np.float64)
    if sigma_n_est is None:
        sigma_n_est = np.sqrt(max(noise_floor(values), 0.0))
    rank = int(np.count_nonzero(values > kappa * sigma_n_est**2))
    return min(rank, max(values.size - 1, 0))


def orthogonal_projector(basis: np.ndarray, n_antennas: int | None = None) -> np.ndarray:
    """
    `P = I - V (V^H V)^{-1} V^H`, the projector onto the orthogonal complement of the
    span of `V`.

    Parameters
    ----------
    basis : np.ndarray
        `M x d` basis `V` (a length-`M` vector is treated as `d = 1`). `d = 0` gives the identity.
    n_antennas : int | None, optional
        `M`, only needed when the basis is empty and one-dimensional

    Raises
    ------
    IllConditionedBasis
        If the condition number of `V^H V` is at least `1e8`
    """
    basis = np.asarray(basis, dtype=np.complex128)
    if basis.ndim == 1:
        basis = basis[:, None] if basis.size else np.zeros((n_antennas or 0, 0), complex)
    n_antennas = basis.shape[0]
    identity = np.eye(n_antennas, dtype=np.complex128)
    if basis.shape[1] == 0:
        return identity

    gram = basis.conj().T @ basis
    condition = np.linalg.cond(gram)
    if not np.isfinite(condition) or condition >= MAX_BASIS_CONDITION:
        raise IllConditionedBasis(f"basis is close to rank deficient (condition {condition:.3g})")

    projector = identity - basis @ scipy.linalg.solve(gram, basis.conj().T, assume_a="her")
    return hermitian_part(projector)
