from __future__ import annotations

import numpy as np
from pydantic import Field, model_validator

from rfiforge.models.model import ResultModel
from rfiforge.types.arrays import ComplexMatrix, RealMatrix


class LaggedSCM(ResultModel):
    """
    A sample covariance matrix tagged with the lag it was evaluated at.

    Parameters
    ----------
    matrix : ComplexMatrix
        The `M x M` estimate
    lag : int
        The lag `tau` in samples
    n_used : int
        The number of outer products averaged, `N - tau` for `N` snapshots

    Properties
    ----------
    n_antennas : int
        `M`
    """

    matrix: ComplexMatrix
    lag: int = Field(ge=0)
    n_used: int = Field(ge=1)

    @model_validator(mode="after")
    def _check_square(self) -> LaggedSCM:
        rows, cols = self.matrix.shape
        if rows != cols:
            raise ValueError(f"a covariance matrix must be square, got {self.matrix.shape}")
        return self

    @property
    def n_antennas(self) -> int:
        return self.matrix.shape[0]

    @property
    def is_zero_lag(self) -> bool:
        return self.lag == 0


class SCMStatistics(ResultModel):
    """
    Monte-Carlo statistics of a sample covariance matrix.

    Parameters
    ----------
    mean : ComplexMatrix
        Entrywise mean of the SCM over the trials
    variance : RealMatrix
        Entrywise variance `E|R_kl - mean_kl|^2` (unbiased, `trials - 1` normalization)
    trials : int
        The number of independent trials
    lag : int
        The lag the SCMs were evaluated at
    """

    mean: ComplexMatrix
    variance: RealMatrix
    trials: int = Field(ge=2)
    lag: int = Field(ge=0)

    @property
    def mean_variance(self) -> float:
        """The variance averaged over all entries"""
        return float(np.mean(self.variance))

    @property
    def standard_error(self) -> np.ndarray:
        """Entrywise standard error of the mean"""
        return np.sqrt(self.variance / self.trials)
