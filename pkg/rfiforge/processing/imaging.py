"""
Beamformed dirty maps of covariance matrices and residual maps between them.
"""

from __future__ import annotations

import logging

import numpy as np

from rfiforge.exceptions import DimensionMismatch, DomainError
from rfiforge.models.imaging import SkyGrid, SkyMap
from rfiforge.models.scenario import ArrayGeometry
from rfiforge.processing.scenario import steering_matrix
from rfiforge.utils import require_square

logger = logging.getLogger(__name__)

HERMITIAN_TOLERANCE = 1e-8

# Grid points evaluated per matrix product, bounds memory at M x chunk complex values
_CHUNK = 4096


def dirty_map(
    R: np.ndarray, geometry: ArrayGeometry, grid: SkyGrid | None = None, *, description: str = ""
) -> SkyMap:
    """
    Beamform a covariance matrix over a direction grid.

    The value at `(l, m)` is `real(v^H R v) / M` with `v_k = exp(i 2 pi (x_k l + y_k m))`.

    Parameters
    ----------
    R : np.ndarray
        `M x M` Hermitian covariance
    geometry : ArrayGeometry
        The array the covariance was measured with
    grid : SkyGrid | None, optional
        The direction grid, by default `SkyGrid.default()`
    description : str, optional
        Stored in the map

    Returns
    -------
    SkyMap
        The map, NaN outside the unit disk

    Raises
    ------
    DimensionMismatch
        If `R` does not match the array size
    DomainError
        If `R` deviates from Hermitian symmetry by more than `1e-8` (relative to its largest entry)
    """
    grid = grid or SkyGrid.default()
    R = np.asarray(R, dtype=np.complex128)
    n_antennas = require_square(R, "R")
    if n_antennas != geometry.n_antennas:
        raise DimensionMismatch(
            f"covariance is {n_antennas} x {n_antennas} but the array has {geometry.n_antennas} antennas"
        )
    scale = max(1.0, float(np.max(np.abs(R)))) if R.size else 1.0
    if np.max(np.abs(R - R.conj().T), initial=0.0) > HERMITIAN_TOLERANCE * scale:
        raise DomainError("dirty maps need a Hermitian covariance; symmetrize it first")

    l, m = grid.mesh()
    mask = grid.mask
    directions = np.column_stack([l[mask], m[mask]])

    values = np.empty(directions.shape[0])
    for start in range(0, directions.shape[0], _CHUNK):
        v = steering_matrix(geometry, directions[start : start + _CHUNK])
        values[start : start + _CHUNK] = np.real(np.sum(v.conj() * (R @ v), axis=0))
    values /= n_antennas

    image = np.full(grid.shape, np.nan)
    image[mask] = values
    return SkyMap(values=image, grid=grid, description=description)


def residual_map(map_a: SkyMap, map_b: SkyMap, *, description: str = "") -> SkyMap:
    """
    Pointwise squared difference of two maps on the same grid.

    Raises
    ------
    DimensionMismatch
        If the grids differ
    """
    if not map_a.grid.same_as(map_b.grid):
        raise DimensionMismatch("residual maps need both maps on the same grid")
    return SkyMap(
        values=(map_a.values - map_b.values) ** 2,
        grid=map_a.grid,
        description=description or f"residual({map_a.description}, {map_b.description})",
    )
