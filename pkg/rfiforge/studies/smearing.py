"""
Spreading of a moving interferer's power over the eigenvectors of its covariance as the
averaging time grows.
"""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING, Sequence

import numpy as np
import scipy.linalg

from rfiforge.exceptions import DomainError
from rfiforge.models.scenario import RfiModel
from rfiforge.models.studies import SmearingRow, SmearingTable
from rfiforge.processing.covariance import rfi_scm_closed_form, sample_covariance
from rfiforge.processing.scenario import Stream, rfi_component
from rfiforge.processing.subspace import DEFAULT_KAPPA, rfi_subspace_rank
from rfiforge.utils import MISSING

if TYPE_CHECKING:
    from rfiforge.simulator import Simulator

logger = logging.getLogger(__name__)

DEFAULT_SMEAR_N_GRID: tuple[int, ...] = (1, 16, 256, 4096, 65536, 1 << 20)
DEFAULT_ALPHA_SIGMA = 0.1
DEFAULT_SMEAR_TRIALS = 32
EMPIRICAL_LIMIT = 4096


def _descending_eigenvalues(matrix: np.ndarray) -> np.ndarray:
    values = scipy.linalg.eigvalsh(0.5 * (matrix + matrix.conj().T))
    return np.clip(values[::-1], 0.0, None)


class SmearingStudy:
    """
    Interface for the subspace smearing study.

    Drift draw `t` uses the generator `rng(RFI_PARAMETERS, t)`, so every `N` of a draw sees
    the same interferer.
    """

    def __init__(self, simulator: Simulator):
        self._simulator = simulator

    def run(
        self,
        alpha_sigma: float = DEFAULT_ALPHA_SIGMA,
        n_grid: Sequence[int] = DEFAULT_SMEAR_N_GRID,
        rfi: RfiModel | None = None,
        trials: int = DEFAULT_SMEAR_TRIALS,
        *,
        n_antennas: int = 8,
        sigma_n: float = 1.0,
        kappa: float = DEFAULT_KAPPA,
        empirical_limit: int = EMPIRICAL_LIMIT,
    ) -> SmearingTable:
        """
        Run the study.

        Parameters
        ----------
        alpha_sigma : float
            Standard deviation of the drift rates, rad/sample
        n_grid : Sequence[int]
            Sample counts
        rfi : RfiModel | None, optional
            Template giving the amplitude, frequency and array size. Its drift rates and
            phases are redrawn for every trial. By default a unit-amplitude interferer on
            `n_antennas` antennas.
        trials : int
            Number of drift-rate draws
        n_antennas : int, optional
            `M` when no template is given, by default 8
        sigma_n : float, optional
            Noise amplitude used for the detected rank, by default 1
        kappa : float, optional
            Threshold of the rank rule, by default 3
        empirical_limit : int, optional
            Largest `N` for which the SCM of synthesized interferer-only snapshots is
            also computed, by default 4096

        Returns
        -------
        SmearingTable
            One row per `(trial, N)`
        """
        if alpha_sigma < 0:
            raise DomainError(f"alpha_sigma must be non-negative, got {alpha_sigma}")
        if trials < 1:
            raise DomainError(f"at least one trial is needed, got {trials}")
        if any(n < 1 for n in n_grid):
            raise DomainError("every sample count must be at least 1")
        if rfi is None:
            rfi = RfiModel.stationary(n_antennas, 1.0)
        if rfi.sigma_r == 0:
            raise DomainError("the smearing of a zero-amplitude interferer is undefined")

        simulator = self._simulator
        size = rfi.n_antennas

        def trial(index: int) -> list[SmearingRow]:
            drawn = RfiModel.drifting(
                size,
                rfi.sigma_r,
                alpha_sigma,
                simulator.rng(int(Stream.RFI_PARAMETERS), index),
                omega=rfi.omega,
                phi=rfi.phi,
            )
            rows = []
            for n_samples in n_grid:
                spectrum = _descending_eigenvalues(rfi_scm_closed_form(drawn, 0, n_samples))
                empirical = None
                if n_samples <= empirical_limit:
                    scm = sample_covariance(rfi_component(drawn, n_samples), 0)
                    empirical = _descending_eigenvalues(scm.matrix)
                # the noise floor adds sigma_n**2 to every eigenvalue
                detected = rfi_subspace_rank(spectrum + sigma_n**2, sigma_n, kappa)
                rows.append(
                    SmearingRow(
                        trial=index,
                        n_samples=int(n_samples),
                        spectrum=spectrum,
                        empirical_spectrum=empirical,
                        dominant_fraction=float(min(1.0, spectrum[0] / np.sum(spectrum))),
                        detected_rank=detected,
                    )
                )
            return rows

        rows = [row for rows in simulator.map(trial, range(trials)) for row in rows]
        table = SmearingTable(alpha_sigma=alpha_sigma, n_antennas=size, trials=trials, rows=rows)
        for n_samples in n_grid:
            logger.info(
                "N=%d: mean dominant fraction %.4f (1/M = %.4f)",
                n_samples,
                table.mean_dominant_fraction(n_samples),
                1.0 / size,
            )
        return table


def run_smearing_study(
    alpha_sigma: float = DEFAULT_ALPHA_SIGMA,
    n_grid: Sequence[int] = DEFAULT_SMEAR_N_GRID,
    rfi: RfiModel | None = None,
    trials: int = DEFAULT_SMEAR_TRIALS,
    base_seed: int = 0,
    *,
    workers: int = 1,
    simulator: Simulator = MISSING,
    **kwargs,
) -> SmearingTable:
    """
    Run the smearing study on a fresh `Simulator`, or on `simulator` when one is given.
    """
    if simulator is not MISSING:
        return simulator.smearing.run(alpha_sigma, n_grid, rfi, trials, **kwargs)

    from rfiforge.simulator import Simulator

    with Simulator(base_seed, workers=workers) as simulator:
        return simulator.smearing.run(alpha_sigma, n_grid, rfi, trials, **kwargs)
