from __future__ import annotations

import hashlib
import json
import math
from enum import StrEnum
from typing import Annotated, Any

from annotated_types import Len
from pydantic import AliasChoices, Field, ValidationError, model_validator

from rfiforge.exceptions import ConfigurationError, ModelValidationError
from rfiforge.models.imaging import SkyGrid
from rfiforge.models.model import DocumentModel
from rfiforge.models.scenario import (
    SEED_UPPER_BOUND,
    ArrayGeometry,
    CosmicSource,
    RfiModel,
    ScenarioConfig,
)
from rfiforge.models.studies import StudyVariant
from rfiforge.processing.scenario import Stream, scenario_rng
from rfiforge.studies.comparison import DEFAULT_SEEDS
from rfiforge.studies.gamma import DEFAULT_INR_GRID, DEFAULT_N_GRID, DEFAULT_TRIALS
from rfiforge.studies.smearing import (
    DEFAULT_ALPHA_SIGMA,
    DEFAULT_SMEAR_N_GRID,
    DEFAULT_SMEAR_TRIALS,
    EMPIRICAL_LIMIT,
)
from rfiforge.utils import db_to_power

Direction = Annotated[list[float], Len(min_length=2, max_length=2)]


class MapFormat(StrEnum):
    CSV = "csv"
    PGM = "pgm"
    BOTH = "both"


class GeometryDocument(DocumentModel):
    """
    Array layout section of a scenario document.

    Either `positions` is given explicitly, or `n_antennas` antennas are drawn uniformly in
    a disk and scaled to `max_baseline`.

    Parameters
    ----------
    positions : list[list[float]] | None
        `M x 2` coordinates in wavelengths
    n_antennas : int | None
        Number of antennas to draw
    max_baseline : float
        Maximum baseline of a drawn layout, in wavelengths, by default 15
    """

    positions: list[Direction] | None = None
    n_antennas: int | None = Field(None, ge=2)
    max_baseline: float = Field(15.0, gt=0)

    @model_validator(mode="after")
    def _check_layout(self) -> GeometryDocument:
        if (self.positions is None) == (self.n_antennas is None):
            raise ValueError("exactly one of positions and n_antennas must be given")
        return self

    def build(self, seed: int) -> ArrayGeometry:
        if self.positions is not None:
            return ArrayGeometry(positions=self.positions)
        return ArrayGeometry.random(
            self.n_antennas, self.max_baseline, scenario_rng(seed, Stream.GEOMETRY)
        )


class RfiDocument(DocumentModel):
    """
    Interferer section of a scenario document.

    Parameters
    ----------
    sigma_r : float | None
        Linear amplitude
    inr_db : float | None
        Array-level interference-to-noise ratio in dB, `sigma_r**2 = sigma_n**2 10**(inr_db / 10)`
    omega : float
        Angular frequency, rad/sample, by default 0.3
    phi : float
        Initial waveform phase, rad, by default 0
    alphas : list[float] | None
        Per-antenna drift rates, rad/sample
    phis : list[float] | None
        Per-antenna initial phases, rad. Drawn uniformly when omitted.
    alpha_sigma : float | None
        Standard deviation of drift rates drawn per antenna, rad/sample. A stationary
        interferer is used when neither this nor `alphas` is given.
    """

    sigma_r: float | None = Field(None, ge=0)
    inr_db: float | None = None
    omega: float = 0.3
    phi: float = 0.0
    alphas: list[float] | None = None
    phis: list[float] | None = None
    alpha_sigma: float | None = Field(None, ge=0)

    @model_validator(mode="after")
    def _check_amplitude(self) -> RfiDocument:
        if (self.sigma_r is None) == (self.inr_db is None):
            raise ValueError("exactly one of sigma_r and inr_db must be given")
        if self.alphas is not None and self.alpha_sigma is not None:
            raise ValueError("alphas and alpha_sigma are mutually exclusive")
        return self

    def amplitude(self, sigma_n: float) -> float:
        if self.sigma_r is not None:
            return self.sigma_r
        return sigma_n * math.sqrt(db_to_power(self.inr_db))

    def build(self, n_antennas: int, sigma_n: float, seed: int) -> RfiModel:
        rng = scenario_rng(seed, Stream.RFI_PARAMETERS)
        sigma_r = self.amplitude(sigma_n)
        if self.alpha_sigma is not None:
            return RfiModel.drifting(
                n_antennas, sigma_r, self.alpha_sigma, rng, omega=self.omega, phi=self.phi
            )
        alphas = self.alphas if self.alphas is not None else [0.0] * n_antennas
        phis = self.phis if self.phis is not None else rng.uniform(0.0, 2.0 * math.pi, n_antennas)
        return RfiModel(sigma_r=sigma_r, omega=self.omega, phi=self.phi, alphas=alphas, phis=phis)


class SourceDocument(DocumentModel):
    """
    Cosmic source entry of a scenario document.

    Parameters
    ----------
    direction : list[float]
        Direction cosines `[l, m]`
    sigma_c : float | None
        Linear amplitude
    snr_db : float | None
        Signal-to-noise ratio in dB, `sigma_c**2 = sigma_n**2 10**(snr_db / 10)`
    """

    direction: Direction
    sigma_c: float | None = Field(None, ge=0)
    snr_db: float | None = None

    @model_validator(mode="after")
    def _check_amplitude(self) -> SourceDocument:
        if (self.sigma_c is None) == (self.snr_db is None):
            raise ValueError("exactly one of sigma_c and snr_db must be given")
        return self

    def build(self, sigma_n: float) -> CosmicSource:
        sigma_c = self.sigma_c
        if sigma_c is None:
            sigma_c = sigma_n * math.sqrt(db_to_power(self.snr_db))
        return CosmicSource(sigma_c=sigma_c, direction=tuple(self.direction))


class ScenarioDocument(DocumentModel):
    """
    Scenario section of a run configuration. Amplitudes are linear, ratios in dB.

    Parameters
    ----------
    geometry : GeometryDocument
        The array layout
    rfi : RfiDocument | None
        The interferer, if any
    sources : list[SourceDocument]
        Cosmic point sources
    sigma_n : float
        Noise amplitude, required
    n_samples : int
        Number of snapshots `N`, also accepted as `N`
    gain_delta : float
        Gain error half-width, in `[0, 1)`, by default 0
    """

    geometry: GeometryDocument
    rfi: RfiDocument | None = None
    sources: list[SourceDocument] = Field(default_factory=list)
    sigma_n: float = Field(gt=0)
    n_samples: int = Field(ge=1, validation_alias=AliasChoices("n_samples", "N"))
    gain_delta: float = Field(0.0, ge=0, lt=1)

    def build(self, seed: int) -> ScenarioConfig:
        """
        Build the scenario. Random layouts and interferer parameters are drawn from
        streams of `seed`, so the same seed always gives the same scenario.
        """
        try:
            geometry = self.geometry.build(seed)
            rfi = None
            if self.rfi is not None:
                rfi = self.rfi.build(geometry.n_antennas, self.sigma_n, seed)
            return ScenarioConfig(
                geometry=geometry,
                rfi=rfi,
                sources=[source.build(self.sigma_n) for source in self.sources],
                sigma_n=self.sigma_n,
                n_samples=self.n_samples,
                gain_delta=self.gain_delta,
                seed=seed,
            )
        except ValidationError as e:
            raise ModelValidationError(
                [{**error, "loc": ("scenario", *error["loc"])} for error in e.errors()]
            ) from e


class GammaStudyDocument(DocumentModel):
    inr_grid: list[float] = Field(default_factory=lambda: list(DEFAULT_INR_GRID))
    n_grid: list[Annotated[int, Field(ge=1)]] = Field(default_factory=lambda: list(DEFAULT_N_GRID))
    variants: list[StudyVariant] = Field(
        default_factory=lambda: [
            StudyVariant(tau=tau, gain_delta=delta) for tau in (0, 1) for delta in (0.0, 0.1)
        ]
    )
    trials: int = Field(DEFAULT_TRIALS, ge=2)
    n_antennas: int = Field(8, ge=2)
    sigma_n: float = Field(1.0, gt=0)
    omega: float = 0.3


class SmearingStudyDocument(DocumentModel):
    alpha_sigma: float = Field(DEFAULT_ALPHA_SIGMA, ge=0)
    n_grid: list[Annotated[int, Field(ge=1)]] = Field(
        default_factory=lambda: list(DEFAULT_SMEAR_N_GRID)
    )
    trials: int = Field(DEFAULT_SMEAR_TRIALS, ge=1)
    n_antennas: int = Field(8, ge=2)
    sigma_r: float = Field(1.0, gt=0)
    sigma_n: float = Field(1.0, gt=0)
    kappa: float = Field(3.0, gt=1)
    empirical_limit: int = Field(EMPIRICAL_LIMIT, ge=1)

    def template(self) -> RfiModel:
        return RfiModel.stationary(self.n_antennas, self.sigma_r)


class ComparisonDocument(DocumentModel):
    seeds: int = Field(DEFAULT_SEEDS, ge=1)
    alpha_sigma: float | None = Field(None, ge=0)
    tau: int = Field(1, ge=1)
    kappa: float = Field(3.0, gt=1)
    panels: bool = True


class ImagingDocument(DocumentModel):
    n_points: int = Field(129, ge=2)
    half_width: float = Field(0.5, gt=0, le=1)
    format: MapFormat = MapFormat.BOTH

    def grid(self) -> SkyGrid:
        return SkyGrid.square(self.n_points, self.half_width)


class RunConfig(DocumentModel):
    """
    A run configuration document.

    Parameters
    ----------
    seed : int
        Base seed, overridden by `RFI_FORGE_SEED` and `--seed`
    workers : int
        Worker threads used by the studies
    scenario : ScenarioDocument | None
        The scenario used by `simulate`, `compare` and `image`
    gamma_study : GammaStudyDocument
        Settings of `gamma-study`
    smear_study : SmearingStudyDocument
        Settings of `smear-study`
    compare : ComparisonDocument
        Settings of `compare`
    imaging : ImagingDocument
        Map grid and file format
    """

    seed: int = Field(0, ge=0, lt=SEED_UPPER_BOUND)
    workers: int = Field(1, ge=1)
    scenario: ScenarioDocument | None = None
    gamma_study: GammaStudyDocument = Field(default_factory=GammaStudyDocument)
    smear_study: SmearingStudyDocument = Field(default_factory=SmearingStudyDocument)
    compare: ComparisonDocument = Field(default_factory=ComparisonDocument)
    imaging: ImagingDocument = Field(default_factory=ImagingDocument)

    @classmethod
    def from_json(cls, text: str) -> RunConfig:
        """
        Parse and validate a JSON document.

        Raises
        ------
        ConfigurationError
            If the text is not valid JSON, with the offending line
        ModelValidationError
            If the document does not match the schema, with the offending field and,
            when it can be found, its line
        """
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"invalid JSON: {e.msg}", line=e.lineno) from e
        try:
            return cls.model_validate(data)
        except ValidationError as e:
            errors = e.errors()
            raise ModelValidationError(errors, line=_locate(text, errors[0]["loc"])) from e

    def require_scenario(self) -> ScenarioDocument:
        if self.scenario is None:
            raise ConfigurationError("this command needs a scenario section", field="scenario")
        return self.scenario

    def digest(self) -> str:
        """SHA-256 of the canonical JSON form of the document"""
        canonical = json.dumps(self.dump_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()


def _locate(text: str, loc: tuple[Any, ...]) -> int | None:
    # Line of the last named key on the error path, or of its parent when the key is missing
    keys = [part for part in loc if isinstance(part, str)]
    lines = text.splitlines()
    for key in reversed(keys):
        for number, line in enumerate(lines, start=1):
            if f'"{key}"' in line:
                return number
    return None
