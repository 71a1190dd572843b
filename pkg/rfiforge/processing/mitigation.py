"""
The two correction strategies: projecting the interference subspace out of the data,
and subtracting a gain-matched lagged covariance from the zero-lag covariance.
"""

from __future__ import annotations

import logging

import numpy as np

from rfiforge.exceptions import DegenerateLag, DimensionMismatch
from rfiforge.models.covariance import LaggedSCM
from rfiforge.models.mitigation import MitigationMethod, MitigationResult
from rfiforge.models.scenario import SnapshotMatrix
from rfiforge.processing.subspace import (
    DEFAULT_KAPPA,
    estimate_rfi_subspace,
    orthogonal_projector,
    rfi_subspace_rank,
    scm_spectrum,
)
from rfiforge.utils import hermitian_part, require_same_shape, require_square

logger = logging.getLogger(__name__)

_DEGENERATE_ENERGY = 1e-30


def _matrix(value: LaggedSCM | np.ndarray) -> np.ndarray:
    return value.matrix if isinstance(value, LaggedSCM) else np.asarray(value)


def project_covariance(R: np.ndarray, P: np.ndarray) -> np.ndarray:
    """
    `P R P^H`.

    Raises
    ------
    DimensionMismatch
        If the matrices are not square with the same size
    """
    R, P = np.asarray(R), np.asarray(P)
    require_square(R, "R")
    require_square(P, "P")
    require_same_shape(R, P, ("R", "P"))
    return P @ R @ P.conj().T


def project_snapshots(X: SnapshotMatrix, P: np.ndarray) -> SnapshotMatrix:
    """
    Apply the projector to every snapshot, `P x(n)`.

    Raises
    ------
    DimensionMismatch
        If `P` is not `M x M`
    """
    P = np.asarray(P)
    require_square(P, "P")
    if P.shape[0] != X.n_antennas:
        raise DimensionMismatch(
            f"projector is {P.shape[0]} x {P.shape[0]} but snapshots have {X.n_antennas} rows"
        )
    return SnapshotMatrix(data=P @ X.data)


def subtraction_gain(R0: LaggedSCM | np.ndarray, Rtau: LaggedSCM | np.ndarray) -> complex:
    """
    The complex gain minimizing `||R0 - xi Rtau||_F^2`.

    Returns
    -------
    complex
        `tr(Rtau^H R0) / tr(Rtau^H Rtau)`

    Raises
    ------
    DimensionMismatch
        If the matrices differ in shape
    DegenerateLag
        If `tr(Rtau^H Rtau) < 1e-30`
    """
    r0, rtau = _matrix(R0), _matrix(Rtau)
    require_same_shape(r0, rtau, ("R0", "Rtau"))
    # tr(A^H B) is the sum of conj(A) * B
    energy = float(np.real(np.vdot(rtau, rtau)))
    if energy < _DEGENERATE_ENERGY:
        raise DegenerateLag("the lagged covariance carries no structure to subtract")
    return complex(np.vdot(rtau, r0) / energy)


def subtraction_objective(R0: np.ndarray, Rtau: np.ndarray, xi: complex) -> float:
    """`||R0 - xi Rtau||_F^2`"""
    residual = _matrix(R0) - xi * _matrix(Rtau)
    return float(np.real(np.vdot(residual, residual)))


def subtract_rfi(
    R0: LaggedSCM | np.ndarray, Rtau: LaggedSCM | np.ndarray, xi: complex
) -> MitigationResult:
    """
    Subtract `xi` times the lagged covariance from the zero-lag covariance.

    Returns
    -------
    MitigationResult
        `corrected` is the Hermitian part of `R0 - xi Rtau`
    """
    r0, rtau = _matrix(R0), _matrix(Rtau)
    require_square(r0, "R0")
    require_same_shape(r0, rtau, ("R0", "Rtau"))
    return MitigationResult(
        corrected=hermitian_part(r0 - xi * rtau),
        method=MitigationMethod.SUBTRACTION,
        xi0=complex(xi),
    )


def mitigate_by_subtraction(R0: LaggedSCM, Rtau: LaggedSCM) -> MitigationResult:
    """
    Lag subtraction with the optimal gain `subtraction_gain(R0, Rtau)`.
    """
    xi0 = subtraction_gain(R0, Rtau)
    logger.debug("Subtraction gain %.4g%+.4gj (lag %d)", xi0.real, xi0.imag, _lag(Rtau))
    return subtract_rfi(R0, Rtau, xi0)


def mitigate_by_projection(
    R0: LaggedSCM, *, rank: int | None = None, kappa: float = DEFAULT_KAPPA
) -> MitigationResult:
    """
    Subspace projection of a zero-lag SCM.

    Parameters
    ----------
    R0 : LaggedSCM
        The zero-lag covariance the subspace is estimated from and projected
    rank : int | None, optional
        Dimension to project out. Chosen by `rfi_subspace_rank` with `kappa` when None.
    kappa : float, optional
        Threshold of the rank rule, by default 3
    """
    if rank is None:
        rank = rfi_subspace_rank(scm_spectrum(R0), kappa=kappa)
    if rank == 0:
        logger.debug("No interference detected above %.3g x noise floor, nothing projected", kappa)
    estimate = estimate_rfi_subspace(R0, rank)
    projector = orthogonal_projector(estimate.basis)
    return MitigationResult(
        corrected=hermitian_part(project_covariance(R0.matrix, projector)),
        method=MitigationMethod.PROJECTION,
        rank_removed=rank,
    )


def project_out(R: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """
    Remove the span of `basis` from a covariance, `P R P^H` with `P = orthogonal_projector(basis)`.
    """
    R = np.asarray(R)
    return project_covariance(R, orthogonal_projector(basis, require_square(R, "R")))


def covariance_mse(A: np.ndarray, B: np.ndarray) -> float:
    """
    `||A - B||_F^2 / M^2`.

    Raises
    ------
    DimensionMismatch
        If the matrices differ in shape
    """
    A, B = np.asarray(A), np.asarray(B)
    require_same_shape(A, B)
    size = A.shape[0]
    difference = A - B
    return float(np.real(np.vdot(difference, difference))) / size**2


def _lag(value: LaggedSCM | np.ndarray) -> int:
    return value.lag if isinstance(value, LaggedSCM) else -1
