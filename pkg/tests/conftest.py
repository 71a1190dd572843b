from __future__ import annotations

import numpy as np
import pytest

from rfiforge.models.imaging import SkyGrid
from rfiforge.models.scenario import ArrayGeometry, CosmicSource, RfiModel, ScenarioConfig


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def geometry() -> ArrayGeometry:
    return ArrayGeometry.random(8, 15.0, np.random.default_rng(7))


@pytest.fixture
def stationary_rfi() -> RfiModel:
    return RfiModel.stationary(8, np.sqrt(10.0), omega=0.3, rng=np.random.default_rng(3))


@pytest.fixture
def scenario(geometry: ArrayGeometry, stationary_rfi: RfiModel) -> ScenarioConfig:
    return ScenarioConfig(
        geometry=geometry,
        rfi=stationary_rfi,
        sources=[CosmicSource(sigma_c=0.5, direction=(-0.3, -0.1))],
        sigma_n=1.0,
        n_samples=512,
        seed=11,
    )


@pytest.fixture
def small_grid() -> SkyGrid:
    return SkyGrid.square(17, 0.5)


def large_array_scenario(
    *,
    inr_db: float = 10.0,
    n_antennas: int = 100,
    alpha_sigma: float | None = 0.1,
    seed: int = 2,
) -> ScenarioConfig:
    rng = np.random.default_rng(seed)
    geometry = ArrayGeometry.random(n_antennas, 15.0, rng)
    sigma_r = np.sqrt(10 ** (inr_db / 10))
    if alpha_sigma is None:
        rfi = RfiModel.stationary(n_antennas, sigma_r, omega=0.3, rng=rng)
    else:
        rfi = RfiModel.drifting(n_antennas, sigma_r, alpha_sigma, rng, omega=0.3)
    return ScenarioConfig(
        geometry=geometry,
        rfi=rfi,
        sources=[CosmicSource(sigma_c=np.sqrt(10 ** (-0.5)), direction=(-0.3, -0.1))],
        sigma_n=1.0,
        n_samples=1024,
        seed=seed,
    )


@pytest.fixture
def make_large_array():
    return large_array_scenario
