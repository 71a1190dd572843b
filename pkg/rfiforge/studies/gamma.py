"""
Accuracy of the interferer signature estimate as a function of INR and sample count,
with and without gain errors, from lag-0 and lagged SCMs.
"""

from __future__ import annotations

import logging
from itertools import product
from typing import TYPE_CHECKING, Sequence

import numpy as np

from rfiforge.exceptions import DomainError
from rfiforge.models.scenario import ArrayGeometry, RfiModel, ScenarioConfig
from rfiforge.models.studies import GammaCell, StudyTable, StudyVariant
from rfiforge.processing.covariance import sample_covariance
from rfiforge.processing.scenario import (
    Stream,
    apply_gain_errors,
    rfi_ssv,
    scenario_rng,
    synthesize,
)
from rfiforge.processing.subspace import alignment_gamma, estimate_rfi_ssv
from rfiforge.utils import MISSING, db_to_power

if TYPE_CHECKING:
    from rfiforge.simulator import Simulator

logger = logging.getLogger(__name__)

DEFAULT_INR_GRID: tuple[float, ...] = (-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0)
DEFAULT_N_GRID: tuple[int, ...] = (64, 128, 256, 512, 1024, 2048, 4096, 8192)
DEFAULT_VARIANTS: tuple[StudyVariant, ...] = (
    StudyVariant(tau=0, gain_delta=0.0),
    StudyVariant(tau=0, gain_delta=0.1),
    StudyVariant(tau=1, gain_delta=0.0),
    StudyVariant(tau=1, gain_delta=0.1),
)
DEFAULT_TRIALS = 512

ESTIMATOR_METADATA = {
    "estimator_tau0": "dominant eigenvector (eigh)",
    "estimator_tau_nonzero": "dominant left singular vector (svd)",
}


class GammaStudy:
    """
    Interface for the signature estimation accuracy study.

    Every `(INR, N)` cell is identified by its position in the grid, and trial `t` of cell
    `c` uses the scenario seed `trial_seed(c, t)`. All variants of a cell see the same
    snapshots; variants with gain errors also share the gain vector drawn for the trial.
    """

    def __init__(self, simulator: Simulator):
        self._simulator = simulator

    def run(
        self,
        inr_grid: Sequence[float] = DEFAULT_INR_GRID,
        n_grid: Sequence[int] = DEFAULT_N_GRID,
        variants: Sequence[StudyVariant] = DEFAULT_VARIANTS,
        trials: int = DEFAULT_TRIALS,
        *,
        n_antennas: int = 8,
        sigma_n: float = 1.0,
        omega: float = 0.3,
    ) -> StudyTable:
        """
        Run the study.

        Parameters
        ----------
        inr_grid : Sequence[float]
            Interference-to-noise ratios, dB
        n_grid : Sequence[int]
            Sample counts
        variants : Sequence[StudyVariant]
            Lag and gain-error configurations
        trials : int
            Trials per cell, at least 2
        n_antennas : int, optional
            `M`, by default 8
        sigma_n : float, optional
            Noise amplitude, by default 1
        omega : float, optional
            Interferer frequency, rad/sample, by default 0.3

        Returns
        -------
        StudyTable
            Mean and variance of the alignment for every `(variant, INR, N)`
        """
        if trials < 2:
            raise DomainError(f"at least 2 trials are needed, got {trials}")
        if not variants:
            raise DomainError("at least one variant is needed")
        for n_samples in n_grid:
            for variant in variants:
                if variant.tau >= n_samples:
                    raise DomainError(f"lag {variant.tau} needs more than {n_samples} samples")

        simulator = self._simulator
        geometry = ArrayGeometry.random(n_antennas, 15.0, simulator.rng(int(Stream.GEOMETRY)))
        grid = list(product(inr_grid, n_grid))
        deltas = sorted({variant.gain_delta for variant in variants})
        taus = sorted({variant.tau for variant in variants})

        def trial(item: tuple[int, int]) -> dict[tuple[int, float], float]:
            cell_id, index = item
            inr_db, n_samples = grid[cell_id]
            seed = simulator.trial_seed(cell_id, index)
            rfi = RfiModel.stationary(
                n_antennas,
                sigma_n * np.sqrt(db_to_power(inr_db)),
                omega=omega,
                rng=scenario_rng(seed, Stream.RFI_PARAMETERS),
            )
            config = ScenarioConfig(
                geometry=geometry, rfi=rfi, sigma_n=sigma_n, n_samples=n_samples, seed=seed
            )
            a_true = rfi_ssv(rfi, 0, n_antennas)
            clean = synthesize(config)
            gains_rng = scenario_rng(seed, Stream.GAINS)
            unit = gains_rng.uniform(-1.0, 1.0, n_antennas)

            gammas = {}
            for delta in deltas:
                snapshots = clean
                if delta > 0:
                    # one draw per trial, rescaled to each half-width
                    snapshots = apply_gain_errors(clean, 1.0 + delta * unit)
                for tau in taus:
                    estimate = estimate_rfi_ssv(sample_covariance(snapshots, tau))
                    gammas[(tau, delta)] = alignment_gamma(a_true, estimate.dominant)
            return gammas

        items = [(cell_id, index) for cell_id in range(len(grid)) for index in range(trials)]
        results = simulator.map(trial, items)

        cells = []
        for variant in variants:
            for cell_id, (inr_db, n_samples) in enumerate(grid):
                values = np.array(
                    [
                        results[cell_id * trials + index][(variant.tau, variant.gain_delta)]
                        for index in range(trials)
                    ]
                )
                cells.append(
                    GammaCell(
                        tau=variant.tau,
                        gain_delta=variant.gain_delta,
                        inr_db=float(inr_db),
                        n_samples=int(n_samples),
                        mean_gamma=float(np.clip(np.mean(values), 0.0, 1.0)),
                        var_gamma=float(np.clip(np.var(values), 0.0, 0.25)),
                        trials=trials,
                    )
                )
            logger.info("Gamma study variant %s done", variant.label)

        return StudyTable(
            inr_grid=[float(value) for value in inr_grid],
            n_grid=[int(value) for value in n_grid],
            variants=list(variants),
            trials=trials,
            cells=cells,
            metadata=dict(ESTIMATOR_METADATA),
        )


def run_gamma_study(
    inr_grid: Sequence[float] = DEFAULT_INR_GRID,
    n_grid: Sequence[int] = DEFAULT_N_GRID,
    variants: Sequence[StudyVariant] = DEFAULT_VARIANTS,
    trials: int = DEFAULT_TRIALS,
    base_seed: int = 0,
    *,
    workers: int = 1,
    simulator: Simulator = MISSING,
    **kwargs,
) -> StudyTable:
    """
    Run the gamma study on a fresh `Simulator`, or on `simulator` when one is given.
    """
    if simulator is not MISSING:
        return simulator.gamma.run(inr_grid, n_grid, variants, trials, **kwargs)

    from rfiforge.simulator import Simulator

    with Simulator(base_seed, workers=workers) as simulator:
        return simulator.gamma.run(inr_grid, n_grid, variants, trials, **kwargs)
