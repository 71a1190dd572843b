import numpy as np
import pytest
from scipy.optimize import minimize

from rfiforge.exceptions import DegenerateLag, DimensionMismatch
from rfiforge.models.covariance import LaggedSCM
from rfiforge.models.mitigation import MitigationMethod
from rfiforge.models.scenario import RfiModel
from rfiforge.processing.covariance import rfi_scm_closed_form, sample_covariance
from rfiforge.processing.mitigation import (
    covariance_mse,
    mitigate_by_projection,
    mitigate_by_subtraction,
    project_covariance,
    project_out,
    project_snapshots,
    subtract_rfi,
    subtraction_gain,
    subtraction_objective,
)
from rfiforge.processing.scenario import rfi_component, rfi_ssv, synthesize
from rfiforge.processing.subspace import orthogonal_projector


def _random_matrix(rng, size):
    return rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))


def _gradient(R0, Rtau, point):
    residual = R0 - complex(*point) * Rtau
    inner = np.vdot(Rtau, residual)
    return np.array([-2 * inner.real, -2 * inner.imag])


def test_subtraction_gain_is_optimal(rng):
    for _ in range(100):
        size = int(rng.integers(2, 9))
        R0, Rtau = _random_matrix(rng, size), _random_matrix(rng, size)
        xi0 = subtraction_gain(R0, Rtau)

        result = minimize(
            lambda p: subtraction_objective(R0, Rtau, complex(*p)),
            x0=np.zeros(2),
            jac=lambda p: _gradient(R0, Rtau, p),
            method="BFGS",
            options={"gtol": 1e-12},
        )
        numeric = complex(*result.x)
        assert abs(numeric - xi0) <= 1e-6 * max(1.0, abs(xi0))

        best = subtraction_objective(R0, Rtau, xi0)
        for step in (1e-4, -1e-4, 1e-4j, -1e-4j):
            assert subtraction_objective(R0, Rtau, xi0 + step) >= best


def test_subtraction_removes_stationary_rfi(stationary_rfi):
    X = rfi_component(stationary_rfi, 256)
    R0, R1 = sample_covariance(X, 0), sample_covariance(X, 1)
    result = mitigate_by_subtraction(R0, R1)
    assert result.method == MitigationMethod.SUBTRACTION
    assert result.xi0 == pytest.approx(np.exp(-0.3j))
    assert np.allclose(result.corrected, 0.0, atol=1e-9)


def test_subtraction_result_is_hermitian(rng):
    R0, Rtau = _random_matrix(rng, 4), _random_matrix(rng, 4)
    corrected = subtract_rfi(R0, Rtau, 0.5 + 0.2j).corrected
    assert np.allclose(corrected, corrected.conj().T)


def test_degenerate_lag():
    with pytest.raises(DegenerateLag):
        subtraction_gain(np.eye(3), np.zeros((3, 3)))


def test_subtraction_shape_mismatch():
    with pytest.raises(DimensionMismatch):
        subtraction_gain(np.eye(3), np.eye(4))


def test_projection_removes_stationary_rfi(scenario):
    R0 = sample_covariance(synthesize(scenario), 0)
    result = mitigate_by_projection(R0)
    assert result.method == MitigationMethod.PROJECTION
    assert result.rank_removed == 1
    a = rfi_ssv(scenario.rfi, 0, scenario.n_antennas)
    # the remaining power along the interferer direction is below the noise floor
    assert np.real(a.conj() @ result.corrected @ a) < 0.1
    assert np.allclose(result.corrected, result.corrected.conj().T)


def test_projection_with_rank_zero_is_identity(scenario):
    R0 = sample_covariance(synthesize(scenario.without_rfi()), 0)
    result = mitigate_by_projection(R0, rank=0)
    assert result.rank_removed == 0
    assert np.allclose(result.corrected, R0.matrix)


def test_project_out_matches_projector(rng):
    R = _random_matrix(rng, 5)
    V = rng.standard_normal((5, 2)) + 0j
    P = orthogonal_projector(V)
    assert np.allclose(project_out(R, V), project_covariance(R, P))
    with pytest.raises(DimensionMismatch):
        project_covariance(R, np.eye(4))


def test_projected_snapshots_give_projected_covariance(scenario):
    snapshots = synthesize(scenario)
    P = orthogonal_projector(rfi_ssv(scenario.rfi, 0, 8))
    direct = sample_covariance(project_snapshots(snapshots, P), 0).matrix
    via_covariance = project_covariance(sample_covariance(snapshots, 0).matrix, P)
    assert np.allclose(direct, via_covariance)


def test_covariance_mse():
    assert covariance_mse(np.eye(4), np.zeros((4, 4))) == pytest.approx(0.25)
    with pytest.raises(DimensionMismatch):
        covariance_mse(np.eye(3), np.eye(4))


def test_reference_mse_is_recorded(stationary_rfi):
    X = rfi_component(stationary_rfi, 64)
    result = mitigate_by_subtraction(sample_covariance(X, 0), sample_covariance(X, 1))
    assert result.with_reference_mse(0.5).mse_vs_reference == 0.5
    assert result.mse_vs_reference is None


def test_drifting_rfi_leaves_residual_after_rank_one_projection():
    rfi = RfiModel.drifting(8, 2.0, 0.1, np.random.default_rng(2024))
    R0 = LaggedSCM(matrix=rfi_scm_closed_form(rfi, 0, 1 << 20), lag=0, n_used=1 << 20)
    corrected = mitigate_by_projection(R0, rank=1).corrected
    # at most about 1/M of the interferer power is removed once it is smeared
    assert np.trace(corrected).real >= (1 - 2 / 8) * np.trace(R0.matrix).real


def test_projection_keeps_covariance_positive_semidefinite(scenario, rng):
    R = sample_covariance(synthesize(scenario), 0).matrix
    for rank in (1, 3):
        basis = rng.standard_normal((8, rank)) + 1j * rng.standard_normal((8, rank))
        corrected = project_covariance(R, orthogonal_projector(basis))
        assert np.linalg.eigvalsh(corrected).min() >= -1e-10 * np.trace(R).real
