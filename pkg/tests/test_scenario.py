import numpy as np
import pytest
from pydantic import ValidationError

from rfiforge.exceptions import DimensionMismatch, DomainError, InvalidModelError
from rfiforge.models.scenario import ArrayGeometry, CosmicSource, RfiModel, ScenarioConfig
from rfiforge.processing.scenario import (
    apply_gain_errors,
    draw_gain_vector,
    observe,
    rfi_component,
    rfi_ssv,
    steering_vector,
    synthesize,
)


def test_random_geometry_has_requested_baseline(rng):
    geometry = ArrayGeometry.random(100, 15.0, rng)
    assert geometry.n_antennas == 100
    assert geometry.max_baseline == pytest.approx(15.0, rel=1e-9)


def test_geometry_rejects_single_antenna():
    with pytest.raises(ValidationError):
        ArrayGeometry(positions=[[0.0, 0.0]])


def test_geometry_rejects_wrong_nominal_baseline():
    with pytest.raises(ValidationError):
        ArrayGeometry(positions=[[0.0, 0.0], [1.0, 0.0]], nominal_max_baseline=2.0)


def test_scenario_accepts_n_alias(geometry):
    config = ScenarioConfig.model_validate({"geometry": geometry, "sigma_n": 1.0, "N": 32})
    assert config.n_samples == 32


def test_scenario_rejects_rfi_of_wrong_length(geometry):
    with pytest.raises(ValidationError):
        ScenarioConfig(
            geometry=geometry, rfi=RfiModel.stationary(4, 1.0), sigma_n=1.0, n_samples=16
        )


def test_cosmic_source_outside_unit_disk():
    with pytest.raises(ValidationError):
        CosmicSource(sigma_c=1.0, direction=(0.9, 0.9))


def test_steering_vector_is_unit_norm(geometry):
    a = steering_vector(geometry, (0.2, -0.4))
    assert a.shape == (8,)
    assert np.linalg.norm(a) == pytest.approx(1.0)
    assert np.allclose(np.abs(a), 1 / np.sqrt(8))


def test_steering_vector_outside_disk(geometry):
    with pytest.raises(DomainError):
        steering_vector(geometry, (1.0, 0.5))


def test_rfi_ssv_unit_norm_and_drift():
    rfi = RfiModel(sigma_r=1.0, alphas=[0.0, 0.1, 0.2], phis=[0.0, 0.0, 0.0])
    a0 = rfi_ssv(rfi, 0, 3)
    a10 = rfi_ssv(rfi, 10, 3)
    assert np.linalg.norm(a10) == pytest.approx(1.0)
    assert np.allclose(a0, 1 / np.sqrt(3))
    assert np.allclose(np.angle(a10 / a0), [0.0, 1.0, 2.0])


def test_rfi_ssv_length_mismatch():
    with pytest.raises(InvalidModelError):
        rfi_ssv(RfiModel.stationary(4, 1.0), 0, 8)


def test_synthesize_is_deterministic(scenario):
    first = synthesize(scenario).data
    second = synthesize(scenario).data
    assert first.shape == (8, 512)
    assert np.array_equal(first, second)
    assert not np.array_equal(first, synthesize(scenario.with_seed(12)).data)


def test_rfi_free_twin_shares_noise_and_sources(scenario):
    contaminated = synthesize(scenario).data
    reference = synthesize(scenario.without_rfi()).data
    assert np.allclose(contaminated - reference, rfi_component(scenario.rfi, 512), atol=1e-12)


def test_noise_power(geometry):
    config = ScenarioConfig(geometry=geometry, sigma_n=2.0, n_samples=20000, seed=5)
    data = synthesize(config).data
    assert np.mean(np.abs(data) ** 2) == pytest.approx(4.0, rel=0.05)
    # circular: real and imaginary parts carry half the power each
    assert np.mean(data.real**2) == pytest.approx(2.0, rel=0.05)


def test_gain_vector_range(rng):
    assert np.array_equal(draw_gain_vector(0.0, 5, rng), np.ones(5))
    u = draw_gain_vector(0.1, 1000, rng)
    assert np.all((u >= 0.9) & (u <= 1.1))
    with pytest.raises(DomainError):
        draw_gain_vector(1.0, 5, rng)


def test_apply_gain_errors_scales_rows(scenario):
    snapshots = synthesize(scenario)
    u = np.linspace(0.9, 1.1, 8)
    scaled = apply_gain_errors(snapshots, u)
    assert np.allclose(scaled.data, u[:, None] * snapshots.data)
    with pytest.raises(DimensionMismatch):
        apply_gain_errors(snapshots, np.ones(3))


def test_observe_without_gain_errors(scenario):
    snapshots, u = observe(scenario)
    assert np.array_equal(u, np.ones(8))
    assert np.array_equal(snapshots.data, synthesize(scenario).data)


def test_observe_with_gain_errors_is_reproducible(scenario):
    config = scenario.model_copy(update={"gain_delta": 0.1})
    first, u1 = observe(config)
    second, u2 = observe(config)
    assert np.array_equal(u1, u2)
    assert np.array_equal(first.data, second.data)
    assert not np.array_equal(u1, np.ones(8))


def test_drifting_rfi_is_not_stationary(rng):
    assert not RfiModel.drifting(8, 1.0, 0.1, rng).is_stationary
    assert RfiModel.stationary(8, 1.0).is_stationary


def test_noise_is_circular(geometry):
    n_samples, sigma_n = 4096, 1.5
    config = ScenarioConfig(geometry=geometry, sigma_n=sigma_n, n_samples=n_samples, seed=9)
    data = synthesize(config).data
    # the non-conjugated second moment of a circular variable vanishes
    assert np.all(np.abs(np.mean(data**2, axis=1)) <= 4 * sigma_n**2 / np.sqrt(n_samples))


def test_rfi_component_offset(rng):
    rfi = RfiModel.drifting(6, 2.0, 0.1, rng)
    full = rfi_component(rfi, 40)
    np.testing.assert_allclose(rfi_component(rfi, 30, start=10), full[:, 10:], atol=1e-12)
    np.testing.assert_allclose(rfi_component(rfi, 40, start=0), full)
