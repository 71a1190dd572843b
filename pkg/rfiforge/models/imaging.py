from __future__ import annotations

import numpy as np
from pydantic import Field, field_validator, model_validator

from rfiforge.models.model import Model, ResultModel
from rfiforge.types.arrays import RealMatrix, RealVector


class SkyGrid(Model):
    """
    A regular grid of direction cosines.

    Map values are stored with shape `(len(m_axis), len(l_axis))`: rows follow `m`,
    columns follow `l`. Points with `l**2 + m**2 > 1` are outside the visible sky and
    are masked.

    Parameters
    ----------
    l_axis : RealVector
        Strictly increasing `l` samples within `[-1, 1]`
    m_axis : RealVector
        Strictly increasing `m` samples within `[-1, 1]`
    """

    l_axis: RealVector
    m_axis: RealVector

    @field_validator("l_axis", "m_axis")
    @classmethod
    def _check_axis(cls, value: np.ndarray) -> np.ndarray:
        if value.size < 1:
            raise ValueError("an axis needs at least one sample")
        if np.any(np.diff(value) <= 0):
            raise ValueError("axis samples must be strictly increasing")
        if np.any(np.abs(value) > 1.0):
            raise ValueError("direction cosines must lie within [-1, 1]")
        return value

    @property
    def shape(self) -> tuple[int, int]:
        return (self.m_axis.size, self.l_axis.size)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """`(l, m)` coordinate arrays of the grid's shape"""
        return np.meshgrid(self.l_axis, self.m_axis, indexing="xy")

    @property
    def mask(self) -> np.ndarray:
        """Boolean array, True where the point is inside the unit disk"""
        l, m = self.mesh()
        return l**2 + m**2 <= 1.0

    def nearest_index(self, direction: tuple[float, float]) -> tuple[int, int]:
        """
        Returns the `(row, column)` of the grid point nearest to `direction`.
        """
        l, m = direction
        return (
            int(np.argmin(np.abs(self.m_axis - m))),
            int(np.argmin(np.abs(self.l_axis - l))),
        )

    def same_as(self, other: SkyGrid) -> bool:
        return (
            self.l_axis.shape == other.l_axis.shape
            and self.m_axis.shape == other.m_axis.shape
            and np.array_equal(self.l_axis, other.l_axis)
            and np.array_equal(self.m_axis, other.m_axis)
        )

    @classmethod
    def square(cls, n_points: int = 129, half_width: float = 0.5) -> SkyGrid:
        axis = np.linspace(-half_width, half_width, n_points)
        return cls(l_axis=axis, m_axis=axis.copy())

    @classmethod
    def default(cls) -> SkyGrid:
        """129 x 129 points over `[-0.5, 0.5]^2`"""
        return cls.square(129, 0.5)


class SkyMap(ResultModel):
    """
    A real-valued image over a `SkyGrid`. Masked points hold NaN.

    Parameters
    ----------
    values : RealMatrix
        The map values, shaped like the grid
    grid : SkyGrid
        The grid the map was evaluated on
    description : str
        What the map was made from
    """

    values: RealMatrix
    grid: SkyGrid
    description: str = Field("", max_length=256)

    @model_validator(mode="after")
    def _check_shape(self) -> SkyMap:
        if self.values.shape != self.grid.shape:
            raise ValueError(
                f"map shape {self.values.shape} does not match grid shape {self.grid.shape}"
            )
        return self

    def peak(self) -> tuple[float, float]:
        """The `(l, m)` of the largest unmasked value"""
        row, col = np.unravel_index(np.nanargmax(self.values), self.values.shape)
        return (float(self.grid.l_axis[col]), float(self.grid.m_axis[row]))

    def peak_index(self) -> tuple[int, int]:
        row, col = np.unravel_index(np.nanargmax(self.values), self.values.shape)
        return (int(row), int(col))

    def mean(self) -> float:
        """Mean over the unmasked points"""
        return float(np.nanmean(self.values))
