from __future__ import annotations

import numpy as np
from pydantic import Field, model_validator

from rfiforge.models.model import ResultModel
from rfiforge.types.arrays import ComplexMatrix, RealVector


class SubspaceEstimate(ResultModel):
    """
    An estimate of the subspace spanned by the interferer.

    Parameters
    ----------
    basis : ComplexMatrix
        `M x d` matrix with orthonormal columns
    values : RealVector
        The `d` eigenvalues (lag 0) or singular values (lag != 0) belonging to the
        basis vectors, in descending order
    source_lag : int
        The lag of the covariance the estimate was taken from

    Properties
    ----------
    rank : int
        `d`
    dominant : np.ndarray
        The first basis vector
    """

    basis: ComplexMatrix
    values: RealVector
    source_lag: int = Field(ge=0)

    @model_validator(mode="after")
    def _check_shapes(self) -> SubspaceEstimate:
        if self.basis.shape[1] != self.values.size:
            raise ValueError(
                f"basis has {self.basis.shape[1]} columns but {self.values.size} values were given"
            )
        if self.values.size > 1 and np.any(np.diff(self.values) > 0):
            raise ValueError("values must be sorted in descending order")
        return self

    @property
    def rank(self) -> int:
        return self.basis.shape[1]

    @property
    def dominant(self) -> np.ndarray:
        return self.basis[:, 0]
