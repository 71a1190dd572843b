from __future__ import annotations

import math

import numpy as np
from pydantic import AliasChoices, Field, field_validator, model_validator
from scipy.spatial.distance import pdist

from rfiforge.models.model import Model, ResultModel
from rfiforge.types.arrays import ComplexMatrix, RealMatrix, RealVector

SEED_UPPER_BOUND = 1 << 64


class ArrayGeometry(Model):
    """
    Represents the layout of an antenna array.

    Parameters
    ----------
    positions : RealMatrix
        `M x 2` antenna coordinates, in wavelengths
    nominal_max_baseline : float | None
        The maximum baseline the geometry was built for, in wavelengths. When set, the
        actual maximum pairwise distance must agree with it within 1%.

    Attributes
    ----------
    positions : RealMatrix
        `M x 2` antenna coordinates, in wavelengths
    nominal_max_baseline : float | None
        The configured maximum baseline, if any

    Properties
    ----------
    n_antennas : int
        The number of antennas `M`
    max_baseline : float
        The largest pairwise distance between antennas, in wavelengths
    """

    positions: RealMatrix
    nominal_max_baseline: float | None = Field(None, gt=0)

    @field_validator("positions")
    @classmethod
    def _check_positions(cls, value: np.ndarray) -> np.ndarray:
        if value.shape[1] != 2:
            raise ValueError(f"positions must be M x 2, got shape {value.shape}")
        if value.shape[0] < 2:
            raise ValueError("an array needs at least 2 antennas")
        if not np.all(np.isfinite(value)):
            raise ValueError("positions must be finite")
        return value

    @model_validator(mode="after")
    def _check_baseline(self) -> ArrayGeometry:
        if self.nominal_max_baseline is not None:
            actual = self.max_baseline
            if abs(actual - self.nominal_max_baseline) > 0.01 * self.nominal_max_baseline:
                raise ValueError(
                    f"maximum baseline {actual:.4g} differs from the configured "
                    f"{self.nominal_max_baseline:.4g} by more than 1%"
                )
        return self

    @property
    def n_antennas(self) -> int:
        return self.positions.shape[0]

    @property
    def max_baseline(self) -> float:
        return float(pdist(self.positions).max())

    @classmethod
    def random(
        cls, n_antennas: int, max_baseline: float, rng: np.random.Generator
    ) -> ArrayGeometry:
        """
        Draw antennas uniformly in a disk, then rescale so that the maximum
        baseline is exactly `max_baseline`.

        Parameters
        ----------
        n_antennas : int
            The number of antennas, at least 2
        max_baseline : float
            The maximum baseline, in wavelengths
        rng : np.random.Generator
            The generator the positions are drawn from

        Returns
        -------
        ArrayGeometry
            The drawn geometry
        """
        radius = 0.5 * max_baseline
        r = radius * np.sqrt(rng.uniform(0.0, 1.0, n_antennas))
        theta = rng.uniform(0.0, 2.0 * np.pi, n_antennas)
        positions = np.column_stack([r * np.cos(theta), r * np.sin(theta)])
        if n_antennas >= 2:
            extent = pdist(positions).max()
            if extent > 0:
                positions *= max_baseline / extent
        return cls(positions=positions, nominal_max_baseline=max_baseline)


class RfiModel(Model):
    """
    A continuous-wave interferer with a linearly drifting spatial signature.

    The waveform is `sigma_r * exp(i(omega n + phi))` and entry `k` of the signature at
    sample `n` is `exp(i(alphas[k] n + phis[k])) / sqrt(M)`. Rates are in radians per sample.

    Parameters
    ----------
    sigma_r : float
        The waveform amplitude, so the power is `sigma_r ** 2`
    omega : float
        The angular frequency, rad/sample
    phi : float
        The initial waveform phase, rad
    alphas : RealVector
        Per-antenna phase drift rates, rad/sample
    phis : RealVector
        Per-antenna initial phases, rad

    Properties
    ----------
    n_antennas : int
        The length of the signature
    power : float
        `sigma_r ** 2`
    is_stationary : bool
        Whether all drift rates are equal, in which case the signature direction is fixed
    """

    sigma_r: float = Field(ge=0)
    omega: float = 0.0
    phi: float = 0.0
    alphas: RealVector
    phis: RealVector

    @model_validator(mode="after")
    def _check_lengths(self) -> RfiModel:
        if self.alphas.shape != self.phis.shape:
            raise ValueError(
                f"alphas and phis must have the same length, got {self.alphas.size} and {self.phis.size}"
            )
        if not (np.all(np.isfinite(self.alphas)) and np.all(np.isfinite(self.phis))):
            raise ValueError("alphas and phis must be finite")
        return self

    @property
    def n_antennas(self) -> int:
        return self.alphas.size

    @property
    def power(self) -> float:
        return self.sigma_r**2

    @property
    def is_stationary(self) -> bool:
        return bool(np.ptp(self.alphas) < 1e-12) if self.alphas.size else True

    def with_amplitude(self, sigma_r: float) -> RfiModel:
        """
        Returns a copy of the model with a different amplitude and the same signature.
        """
        return self.model_copy(update={"sigma_r": float(sigma_r)})

    @classmethod
    def stationary(
        cls,
        n_antennas: int,
        sigma_r: float,
        *,
        omega: float = 0.0,
        phi: float = 0.0,
        rng: np.random.Generator | None = None,
    ) -> RfiModel:
        """
        A spatially stationary interferer. Initial phases are uniform on `[0, 2 pi)` when
        a generator is given, zero otherwise.
        """
        phis = (
            rng.uniform(0.0, 2.0 * np.pi, n_antennas)
            if rng is not None
            else np.zeros(n_antennas)
        )
        return cls(
            sigma_r=sigma_r, omega=omega, phi=phi, alphas=np.zeros(n_antennas), phis=phis
        )

    @classmethod
    def drifting(
        cls,
        n_antennas: int,
        sigma_r: float,
        alpha_sigma: float,
        rng: np.random.Generator,
        *,
        omega: float = 0.0,
        phi: float = 0.0,
    ) -> RfiModel:
        """
        A moving interferer: drift rates are i.i.d. normal with standard deviation
        `alpha_sigma` rad/sample, initial phases uniform on `[0, 2 pi)`.
        """
        alphas = rng.normal(0.0, alpha_sigma, n_antennas)
        phis = rng.uniform(0.0, 2.0 * np.pi, n_antennas)
        return cls(sigma_r=sigma_r, omega=omega, phi=phi, alphas=alphas, phis=phis)


class CosmicSource(Model):
    """
    A temporally white astronomical point source.

    Parameters
    ----------
    sigma_c : float
        The amplitude of the source waveform, so its power is `sigma_c ** 2`
    direction : tuple[float, float]
        Direction cosines `(l, m)` with `l**2 + m**2 <= 1`
    """

    sigma_c: float = Field(ge=0)
    direction: tuple[float, float]

    @field_validator("direction")
    @classmethod
    def _check_direction(cls, value: tuple[float, float]) -> tuple[float, float]:
        l, m = value
        if not (math.isfinite(l) and math.isfinite(m)) or l * l + m * m > 1.0 + 1e-12:
            raise ValueError(f"direction {value} lies outside the unit disk")
        return value

    @property
    def power(self) -> float:
        return self.sigma_c**2


class ScenarioConfig(Model):
    """
    Full generative description of one simulation.

    Parameters
    ----------
    geometry : ArrayGeometry
        The array layout
    rfi : RfiModel | None
        The interferer, if any
    sources : list[CosmicSource]
        The astronomical sources
    sigma_n : float
        The noise amplitude, so the noise power per antenna is `sigma_n ** 2`
    n_samples : int
        The number of snapshots `N`. `N` is accepted as an alias.
    gain_delta : float
        Half-width `delta` of the uniform gain error distribution, in `[0, 1)`
    seed : int
        The 64-bit seed all random draws of the scenario derive from

    Properties
    ----------
    n_antennas : int
        The number of antennas `M`
    inr : float
        Interference-to-noise ratio `sigma_r**2 / sigma_n**2` (0 without RFI)
    source_snrs : list[float]
        Per-source `sigma_c**2 / sigma_n**2`
    """

    geometry: ArrayGeometry
    rfi: RfiModel | None = None
    sources: list[CosmicSource] = Field(default_factory=list)
    sigma_n: float = Field(gt=0)
    n_samples: int = Field(ge=1, validation_alias=AliasChoices("n_samples", "N"))
    gain_delta: float = Field(0.0, ge=0, lt=1)
    seed: int = Field(0, ge=0, lt=SEED_UPPER_BOUND)

    @model_validator(mode="after")
    def _check_rfi_length(self) -> ScenarioConfig:
        if self.rfi is not None and self.rfi.n_antennas != self.geometry.n_antennas:
            raise ValueError(
                f"the RFI signature has {self.rfi.n_antennas} entries but the array has "
                f"{self.geometry.n_antennas} antennas"
            )
        return self

    @property
    def n_antennas(self) -> int:
        return self.geometry.n_antennas

    @property
    def inr(self) -> float:
        if self.rfi is None:
            return 0.0
        return self.rfi.power / self.sigma_n**2

    @property
    def source_snrs(self) -> list[float]:
        return [source.power / self.sigma_n**2 for source in self.sources]

    def with_seed(self, seed: int) -> ScenarioConfig:
        return self.model_copy(update={"seed": int(seed)})

    def without_rfi(self) -> ScenarioConfig:
        """
        The RFI-free twin of this scenario: same seed, RFI amplitude zeroed.
        """
        if self.rfi is None:
            return self
        return self.model_copy(update={"rfi": self.rfi.with_amplitude(0.0)})


class SnapshotMatrix(ResultModel):
    """
    Array output over `N` samples; column `n` is the snapshot `x(n)`.

    Parameters
    ----------
    data : ComplexMatrix
        The `M x N` snapshots
    """

    data: ComplexMatrix

    @property
    def n_antennas(self) -> int:
        return self.data.shape[0]

    @property
    def n_samples(self) -> int:
        return self.data.shape[1]
