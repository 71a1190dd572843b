"""
Subspace projection against lag subtraction, scored against the RFI-free twin of every
scenario realization in the covariance and image domains.
"""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

from rfiforge.exceptions import DomainError, InvalidModelError
from rfiforge.models.imaging import SkyGrid, SkyMap
from rfiforge.models.scenario import RfiModel, ScenarioConfig
from rfiforge.models.studies import ComparisonRecord, ComparisonReport, ComparisonSummary
from rfiforge.processing.covariance import sample_covariance
from rfiforge.processing.imaging import dirty_map, residual_map
from rfiforge.processing.mitigation import (
    covariance_mse,
    mitigate_by_projection,
    mitigate_by_subtraction,
)
from rfiforge.processing.scenario import Stream, observe, scenario_rng
from rfiforge.processing.subspace import DEFAULT_KAPPA
from rfiforge.utils import MISSING, hermitian_part

if TYPE_CHECKING:
    from rfiforge.simulator import Simulator

logger = logging.getLogger(__name__)

DEFAULT_SEEDS = 16


class MitigationComparison:
    """
    Interface for the projection versus subtraction comparison.

    Seed `i` of a run uses the scenario seed `trial_seed(i)`. The reference of every seed
    is the same scenario with the interferer amplitude set to zero, so noise, sources and
    gains are shared with the contaminated data.
    """

    def __init__(self, simulator: Simulator):
        self._simulator = simulator

    def run(
        self,
        scenario: ScenarioConfig,
        seeds: int = DEFAULT_SEEDS,
        *,
        alpha_sigma: float | None = None,
        tau: int = 1,
        kappa: float = DEFAULT_KAPPA,
        grid: SkyGrid | None = None,
        panels: bool = False,
    ) -> ComparisonReport:
        """
        Run the comparison.

        Parameters
        ----------
        scenario : ScenarioConfig
            The scenario; its seed is replaced for every run
        seeds : int
            Number of realizations
        alpha_sigma : float | None, optional
            When given, the interferer's drift rates and phases are redrawn for every seed
            with this standard deviation, rad/sample. Otherwise the scenario's are used.
        tau : int, optional
            Lag of the covariance that is subtracted, by default 1
        kappa : float, optional
            Threshold of the rank rule choosing the projected dimension, by default 3
        grid : SkyGrid | None, optional
            Grid of the dirty maps, by default `SkyGrid.default()`
        panels : bool, optional
            Whether to keep the maps of the first seed, by default False

        Returns
        -------
        ComparisonReport
            One record per seed and their summary

        Raises
        ------
        DomainError
            If `seeds < 1` or `tau < 1`
        InvalidModelError
            If the scenario has no interferer
        """
        if seeds < 1:
            raise DomainError(f"at least one seed is needed, got {seeds}")
        if tau < 1:
            raise DomainError(f"the subtracted covariance needs a lag of at least 1, got {tau}")
        if scenario.rfi is None:
            raise InvalidModelError("the comparison needs a scenario with an interferer")
        if not scenario.sources:
            logger.warning("Comparing without cosmic sources, the maps only contain noise")

        simulator = self._simulator
        grid = grid or SkyGrid.default()
        geometry = scenario.geometry

        def realization(seed: int) -> ScenarioConfig:
            config = scenario.with_seed(seed)
            if alpha_sigma is None:
                return config
            rfi = RfiModel.drifting(
                scenario.n_antennas,
                scenario.rfi.sigma_r,
                alpha_sigma,
                scenario_rng(seed, Stream.RFI_PARAMETERS),
                omega=scenario.rfi.omega,
                phi=scenario.rfi.phi,
            )
            return config.model_copy(update={"rfi": rfi})

        def trial(index: int) -> tuple[ComparisonRecord, dict[str, SkyMap]]:
            seed = simulator.trial_seed(index)
            config = realization(seed)

            snapshots, _ = observe(config)
            reference, _ = observe(config.without_rfi())
            R0 = sample_covariance(snapshots, 0)
            Rtau = sample_covariance(snapshots, tau)
            Rref = sample_covariance(reference, 0)

            projected = mitigate_by_projection(R0, kappa=kappa)
            subtracted = mitigate_by_subtraction(R0, Rtau)

            reference_map = dirty_map(Rref.matrix, geometry, grid, description="RFI-free")
            projected_map = dirty_map(projected.corrected, geometry, grid, description="projection")
            subtracted_map = dirty_map(subtracted.corrected, geometry, grid, description="subtraction")
            residual_p = residual_map(reference_map, projected_map, description="residual projection")
            residual_s = residual_map(reference_map, subtracted_map, description="residual subtraction")

            record = ComparisonRecord(
                seed_index=index,
                seed=seed,
                mse_projection=covariance_mse(projected.corrected, Rref.matrix),
                mse_subtraction=covariance_mse(subtracted.corrected, Rref.matrix),
                map_residual_projection=residual_p.mean(),
                map_residual_subtraction=residual_s.mean(),
                xi0=subtracted.xi0,
                rank_removed=projected.rank_removed,
            )
            logger.debug(
                "Seed %d: MSE projection %.4g, subtraction %.4g (rank %d)",
                index,
                record.mse_projection,
                record.mse_subtraction,
                record.rank_removed,
            )

            maps: dict[str, SkyMap] = {}
            if panels and index == 0:
                maps = {
                    "reference": reference_map,
                    "raw": dirty_map(R0.matrix, geometry, grid, description="raw"),
                    "lagged": dirty_map(
                        hermitian_part(Rtau.matrix), geometry, grid, description=f"lag {tau}"
                    ),
                    "residual_subtraction": residual_s,
                    "residual_projection": residual_p,
                }
            return record, maps

        results = simulator.map(trial, range(seeds))
        records = [record for record, _ in results]
        summary = ComparisonSummary.from_records(records)
        logger.info(
            "Subtraction wins %.0f%% of %d seeds in covariance, %.0f%% in image",
            100 * summary.win_fraction_subtraction,
            seeds,
            100 * summary.win_fraction_subtraction_image,
        )
        return ComparisonReport(
            records=records,
            summary=summary,
            metadata={
                "tau": str(tau),
                "kappa": f"{kappa:g}",
                "rank_rule": "eigenvalues above kappa x median eigenvalue, at most M - 1",
                "estimator_tau_nonzero": "svd",
                "alpha_sigma": "scenario" if alpha_sigma is None else f"{alpha_sigma:g}",
                "reference": "same seed with the interferer amplitude set to zero",
            },
            panels=results[0][1],
        )


def run_mitigation_comparison(
    scenario: ScenarioConfig,
    seeds: int = DEFAULT_SEEDS,
    base_seed: int = 0,
    *,
    workers: int = 1,
    simulator: Simulator = MISSING,
    **kwargs,
) -> ComparisonReport:
    """
    Run the comparison on a fresh `Simulator`, or on `simulator` when one is given.
    """
    if simulator is not MISSING:
        return simulator.comparison.run(scenario, seeds, **kwargs)

    from rfiforge.simulator import Simulator

    with Simulator(base_seed, workers=workers) as simulator:
        return simulator.comparison.run(scenario, seeds, **kwargs)
