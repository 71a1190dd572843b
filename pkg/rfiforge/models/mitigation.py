from __future__ import annotations

from enum import StrEnum

from pydantic import Field

from rfiforge.models.model import ResultModel
from rfiforge.types.arrays import ComplexMatrix


class MitigationMethod(StrEnum):
    PROJECTION = "projection"
    SUBTRACTION = "subtraction"


class MitigationResult(ResultModel):
    """
    A corrected covariance matrix and the diagnostics of the correction.

    Parameters
    ----------
    corrected : ComplexMatrix
        The Hermitian corrected `M x M` covariance
    method : MitigationMethod
        Which strategy produced it
    xi0 : complex | None
        The subtraction gain, subtraction only
    rank_removed : int | None
        The dimension of the projected-out subspace, projection only
    mse_vs_reference : float | None
        `covariance_mse` against an RFI-free reference, when one was supplied
    """

    corrected: ComplexMatrix
    method: MitigationMethod
    xi0: complex | None = None
    rank_removed: int | None = Field(None, ge=0)
    mse_vs_reference: float | None = Field(None, ge=0)

    def with_reference_mse(self, mse: float) -> MitigationResult:
        return self.model_copy(update={"mse_vs_reference": float(mse)})
