from __future__ import annotations

import numpy as np
from pydantic import Field, model_validator

from rfiforge.models.imaging import SkyMap
from rfiforge.models.model import Model, ResultModel
from rfiforge.types.arrays import RealVector
from rfiforge.types.studies import (
    ComparisonRowDict,
    ComparisonSummaryDict,
    GammaRowDict,
    SmearingRowDict,
)


class StudyVariant(Model):
    """
    One estimator configuration of the gamma study.

    Parameters
    ----------
    tau : int
        The lag of the SCM the signature is estimated from
    gain_delta : float
        Half-width of the gain error distribution, 0 for a calibrated array
    """

    tau: int = Field(ge=0)
    gain_delta: float = Field(ge=0, lt=1)

    @property
    def label(self) -> str:
        return f"tau{self.tau}_delta{self.gain_delta:g}"


class GammaCell(ResultModel):
    """
    Alignment statistics of one `(variant, INR, N)` cell.

    Parameters
    ----------
    tau : int
        The SCM lag
    gain_delta : float
        The gain error half-width
    inr_db : float
        Interference-to-noise ratio, dB
    n_samples : int
        Number of snapshots per trial
    mean_gamma : float
        Mean alignment over the trials, in `[0, 1]`
    var_gamma : float
        Population variance of the alignment over the trials, in `[0, 0.25]`
    trials : int
        The number of trials
    """

    tau: int
    gain_delta: float
    inr_db: float
    n_samples: int
    mean_gamma: float = Field(ge=0, le=1)
    var_gamma: float = Field(ge=0, le=0.25)
    trials: int = Field(ge=1)

    def to_row(self) -> GammaRowDict:
        return GammaRowDict(
            tau=self.tau,
            gain_delta=self.gain_delta,
            inr_db=self.inr_db,
            n_samples=self.n_samples,
            mean_gamma=self.mean_gamma,
            var_gamma=self.var_gamma,
            trials=self.trials,
        )


class StudyTable(ResultModel):
    """
    Gridded results of the gamma study.

    Parameters
    ----------
    inr_grid : list[float]
        INR axis, dB
    n_grid : list[int]
        Sample count axis
    variants : list[StudyVariant]
        The estimator configurations
    trials : int
        Trials per cell
    cells : list[GammaCell]
        One cell per `(variant, inr, n)`, in that nesting order
    metadata : dict[str, str]
        How signatures were estimated at each lag
    """

    inr_grid: list[float]
    n_grid: list[int]
    variants: list[StudyVariant]
    trials: int = Field(ge=2)
    cells: list[GammaCell]
    metadata: dict[str, str] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check_cells(self) -> StudyTable:
        if any(cell.trials != self.trials for cell in self.cells):
            raise ValueError("every cell must aggregate the same number of trials")
        expected = len(self.variants) * len(self.inr_grid) * len(self.n_grid)
        if len(self.cells) != expected:
            raise ValueError(f"expected {expected} cells, got {len(self.cells)}")
        return self

    def cell(self, variant: StudyVariant, inr_db: float, n_samples: int) -> GammaCell:
        for cell in self.cells:
            if (
                cell.tau == variant.tau
                and cell.gain_delta == variant.gain_delta
                and cell.inr_db == inr_db
                and cell.n_samples == n_samples
            ):
                return cell
        raise KeyError((variant.label, inr_db, n_samples))

    def surface(self, variant: StudyVariant, field: str = "mean_gamma") -> np.ndarray:
        """
        The `len(inr_grid) x len(n_grid)` array of `field` for one variant.
        """
        return np.array(
            [
                [getattr(self.cell(variant, inr, n), field) for n in self.n_grid]
                for inr in self.inr_grid
            ]
        )

    def rows(self) -> list[GammaRowDict]:
        return [cell.to_row() for cell in self.cells]


class SmearingRow(ResultModel):
    """
    Spectrum of the interferer-only SCM for one drift draw and one `N`.

    Parameters
    ----------
    trial : int
        Index of the drift-rate draw
    n_samples : int
        `N`
    spectrum : RealVector
        Eigenvalues of the closed-form SCM, descending
    empirical_spectrum : RealVector | None
        Eigenvalues of the SCM of synthesized interferer-only snapshots, when computed
    dominant_fraction : float
        Largest eigenvalue over the trace
    detected_rank : int
        What the rank rule reports once the noise floor is added
    """

    trial: int
    n_samples: int
    spectrum: RealVector
    empirical_spectrum: RealVector | None = None
    dominant_fraction: float = Field(ge=0, le=1 + 1e-9)
    detected_rank: int = Field(ge=0)

    @property
    def empirical_dominant_fraction(self) -> float | None:
        if self.empirical_spectrum is None:
            return None
        trace = float(np.sum(self.empirical_spectrum))
        return float(self.empirical_spectrum[0] / trace) if trace > 0 else None

    @property
    def spectrum_mismatch(self) -> float | None:
        if self.empirical_spectrum is None:
            return None
        return float(np.max(np.abs(self.spectrum - self.empirical_spectrum)))

    def to_row(self) -> SmearingRowDict:
        return SmearingRowDict(
            trial=self.trial,
            n_samples=self.n_samples,
            dominant_fraction=self.dominant_fraction,
            empirical_dominant_fraction=self.empirical_dominant_fraction,
            spectrum_mismatch=self.spectrum_mismatch,
            detected_rank=self.detected_rank,
        )


class SmearingTable(ResultModel):
    """
    Results of the smearing study.

    Parameters
    ----------
    alpha_sigma : float
        Standard deviation of the drift rates, rad/sample
    n_antennas : int
        `M`
    trials : int
        Number of drift-rate draws
    rows : list[SmearingRow]
        One row per `(trial, N)`
    """

    alpha_sigma: float
    n_antennas: int
    trials: int
    rows: list[SmearingRow]

    def mean_dominant_fraction(self, n_samples: int) -> float:
        fractions = [row.dominant_fraction for row in self.rows if row.n_samples == n_samples]
        return float(np.mean(fractions))


class ComparisonRecord(ResultModel):
    """
    Projection against subtraction for one seed.

    Parameters
    ----------
    seed_index : int
        Position of the seed in the run
    seed : int
        The scenario seed used
    mse_projection : float
        Covariance-domain MSE of the projected SCM against the RFI-free SCM
    mse_subtraction : float
        Covariance-domain MSE of the subtracted SCM against the RFI-free SCM
    map_residual_projection : float
        Mean of the residual map between the RFI-free and projected dirty maps
    map_residual_subtraction : float
        Mean of the residual map between the RFI-free and subtracted dirty maps
    xi0 : complex
        The subtraction gain
    rank_removed : int
        The projected-out dimension
    """

    seed_index: int
    seed: int
    mse_projection: float = Field(ge=0)
    mse_subtraction: float = Field(ge=0)
    map_residual_projection: float = Field(ge=0)
    map_residual_subtraction: float = Field(ge=0)
    xi0: complex
    rank_removed: int = Field(ge=0)

    def to_row(self) -> ComparisonRowDict:
        return ComparisonRowDict(
            seed_index=self.seed_index,
            seed=self.seed,
            mse_projection=self.mse_projection,
            mse_subtraction=self.mse_subtraction,
            map_residual_projection=self.map_residual_projection,
            map_residual_subtraction=self.map_residual_subtraction,
            xi0_real=self.xi0.real,
            xi0_imag=self.xi0.imag,
            rank_removed=self.rank_removed,
        )


class ComparisonSummary(ResultModel):
    """
    Aggregates over all seeds of a comparison.

    Parameters
    ----------
    win_fraction_subtraction : float
        Fraction of seeds where subtraction has the lower covariance-domain MSE
    win_fraction_subtraction_image : float
        Fraction of seeds where subtraction has the lower mean map residual
    median_mse_projection, median_mse_subtraction : float
        Median covariance-domain MSEs
    median_map_residual_projection, median_map_residual_subtraction : float
        Median mean map residuals
    """

    win_fraction_subtraction: float = Field(ge=0, le=1)
    win_fraction_subtraction_image: float = Field(ge=0, le=1)
    median_mse_projection: float
    median_mse_subtraction: float
    median_map_residual_projection: float
    median_map_residual_subtraction: float

    @classmethod
    def from_records(cls, records: list[ComparisonRecord]) -> ComparisonSummary:
        mse_p = np.array([record.mse_projection for record in records])
        mse_s = np.array([record.mse_subtraction for record in records])
        map_p = np.array([record.map_residual_projection for record in records])
        map_s = np.array([record.map_residual_subtraction for record in records])
        return cls(
            win_fraction_subtraction=float(np.mean(mse_s < mse_p)),
            win_fraction_subtraction_image=float(np.mean(map_s < map_p)),
            median_mse_projection=float(np.median(mse_p)),
            median_mse_subtraction=float(np.median(mse_s)),
            median_map_residual_projection=float(np.median(map_p)),
            median_map_residual_subtraction=float(np.median(map_s)),
        )


class ComparisonReport(ResultModel):
    """
    Results of the projection versus subtraction comparison.

    Parameters
    ----------
    records : list[ComparisonRecord]
        One record per seed
    summary : ComparisonSummary
        Aggregates over the records
    metadata : dict[str, str]
        Lag, rank rule and estimator choices
    panels : dict[str, SkyMap]
        Dirty and residual maps of the first seed, when requested
    """

    records: list[ComparisonRecord]
    summary: ComparisonSummary
    metadata: dict[str, str] = Field(default_factory=dict)
    panels: dict[str, SkyMap] = Field(default_factory=dict)

    def rows(self) -> list[ComparisonRowDict]:
        return [record.to_row() for record in self.records]

    def summary_row(self) -> ComparisonSummaryDict:
        return ComparisonSummaryDict(seeds=len(self.records), **self.summary.model_dump())
