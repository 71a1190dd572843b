from typing_extensions import TypedDict


class GammaRowDict(TypedDict):
    """
    One row of the gamma study table
    """

    tau: int
    gain_delta: float
    inr_db: float
    n_samples: int
    mean_gamma: float
    var_gamma: float
    trials: int


class SmearingRowDict(TypedDict):
    """
    One row of the smearing study table, eigenvalue columns excluded
    """

    trial: int
    n_samples: int
    dominant_fraction: float
    empirical_dominant_fraction: float | None
    spectrum_mismatch: float | None
    detected_rank: int


class ComparisonRowDict(TypedDict):
    """
    One row of the mitigation comparison table
    """

    seed_index: int
    seed: int
    mse_projection: float
    mse_subtraction: float
    map_residual_projection: float
    map_residual_subtraction: float
    xi0_real: float
    xi0_imag: float
    rank_removed: int


class ComparisonSummaryDict(TypedDict):
    """
    Aggregates of the mitigation comparison
    """

    seeds: int
    win_fraction_subtraction: float
    win_fraction_subtraction_image: float
    median_mse_projection: float
    median_mse_subtraction: float
    median_map_residual_projection: float
    median_map_residual_subtraction: float
