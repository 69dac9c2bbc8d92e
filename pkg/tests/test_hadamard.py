import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from feynman_index.constants import DENSITY_PHASE
from feynman_index.errors import ErrorCode, OperationError
from feynman_index.hadamard import (
    ConstantField,
    FlatOperatorSpec,
    PolynomialField,
    calibrate_density_phase,
    diagonal_coefficients,
    index_density,
    integrated_index_density,
    solve_transport,
    transport_residual,
)
from feynman_index.operators import CylinderModel
from feynman_index.polynomials import MatrixJet
from feynman_index.suite import twisted_cylinder_residuals


@pytest.mark.parametrize("n", [2, 3, 4])
def test_constant_potential_gives_powers_of_minus_b(n):
    B = np.array([[0.7, 0.2], [-0.1, 0.4]])
    diag = diagonal_coefficients(FlatOperatorSpec(n, ConstantField(B)), np.zeros(n), k_max=4)
    for k, value in enumerate(diag.values):
        assert np.abs(value - np.linalg.matrix_power(-B, k)).max() < 1e-13


def test_constant_connection_gives_a_plane_wave_parallel_transport():
    # nabla e^{i A.z} = 0, so V_0 = e^{i A.(x - y)} and every higher coefficient vanishes
    A = (0.3, -0.5)
    spec = FlatOperatorSpec(2, ConstantField(np.zeros((1, 1))), tuple(ConstantField([[a]]) for a in A))
    y = np.array([0.2, -0.1])
    sol = solve_transport(spec, y, k_max=2, order=20)
    for x in ([0.25, -0.05], [0.1, 0.0], [0.3, -0.3]):
        z = np.asarray(x) - y
        assert abs(sol(0, x)[0, 0] - np.exp(1j * np.dot(A, z))) < 1e-13
        assert abs(sol(1, x)[0, 0]) < 1e-13 and abs(sol(2, x)[0, 0]) < 1e-13


def test_first_coefficient_on_the_diagonal_is_minus_the_potential():
    # B(x) = 0.5 + x_1 x_2^2 with no connection
    spec = FlatOperatorSpec(2, PolynomialField({(0, 0): [[0.5]], (1, 2): [[1.0]]}))
    for x in ([0.0, 0.0], [0.4, -0.3], [1.2, 0.7]):
        v1 = diagonal_coefficients(spec, x, k_max=1).values[1][0, 0]
        assert abs(v1 + 0.5 + x[0] * x[1] ** 2) < 1e-13


@pytest.mark.parametrize("n", [2, 3])
def test_transport_residual_is_small_for_polynomial_data(n):
    rng = np.random.default_rng(n)
    terms = {(0,) * n: rng.standard_normal((2, 2)), (1,) + (0,) * (n - 1): rng.standard_normal((2, 2))}
    conn = [PolynomialField({(0,) * n: 0.3 * rng.standard_normal((2, 2))}) for _ in range(n)]
    spec = FlatOperatorSpec(n, PolynomialField(terms), conn)
    y = np.zeros(n)
    sol = solve_transport(spec, y, k_max=3, order=16 if n == 2 else 12)
    points = y + 0.05 * rng.standard_normal((3, n))
    for k in range(4):
        assert transport_residual(sol, k, points).max() < 1e-8


def test_twisted_cylinder_transport_residuals():
    checks = twisted_cylinder_residuals(1e-8)
    assert len(checks) == 6 and all(c.passed for c in checks)


def test_point_dimension_mismatch_is_rejected():
    with pytest.raises(OperationError) as info:
        solve_transport(FlatOperatorSpec(2, ConstantField(np.eye(1))), np.zeros(3))
    assert info.value.code is ErrorCode.DIMENSION_UNSUPPORTED


def test_index_density_vanishes_in_product_region_and_rejects_other_dimensions():
    model = CylinderModel.from_fluxes(0.3, 1.3, 8)
    assert abs(index_density(model, (0.05, 0.4))) < 1e-14
    with pytest.raises(OperationError) as info:
        index_density(model, (0.5, 0.0), n=3)
    assert info.value.code is ErrorCode.DIMENSION_UNSUPPORTED


def test_density_phase_calibration_matches_constant():
    assert calibrate_density_phase() == DENSITY_PHASE


@pytest.mark.parametrize("start,end", [(0.3, 1.3), (0.25, -1.75), (0.3, 0.9)])
def test_integrated_density_is_the_total_flux_change(start, end):
    total = integrated_index_density(CylinderModel.from_fluxes(start, end, 8))
    assert abs(total - DENSITY_PHASE * (end - start)) < 1e-4


# --- jets --------------------------------------------------------------------


def _random_jet(rng, nvars, order, rank):
    return MatrixJet(rng.standard_normal((order + 1,) * nvars + (rank, rank)), order)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_jet_product_matches_pointwise_product(seed):
    rng = np.random.default_rng(seed)
    # degrees 3 + 3 <= 6, so nothing is truncated
    a = _random_jet(rng, 2, 3, 2)
    b = _random_jet(rng, 2, 3, 2)
    a6 = MatrixJet.from_terms({idx: a.coeffs[idx] for idx in np.ndindex(a.coeffs.shape[:2])}, 2, 6, 2)
    b6 = MatrixJet.from_terms({idx: b.coeffs[idx] for idx in np.ndindex(b.coeffs.shape[:2])}, 2, 6, 2)
    z = rng.standard_normal(2)
    assert np.abs((a6 @ b6)(z) - a(z) @ b(z)).max() < 1e-10


def test_jet_derivative_and_coordinate_multiplication():
    rng = np.random.default_rng(3)
    jet = _random_jet(rng, 2, 5, 1)
    z, h = np.array([0.3, -0.2]), 1e-6
    numeric = (jet(z + [h, 0]) - jet(z - [h, 0])) / (2 * h)
    assert np.abs(jet.derivative(0)(z) - numeric).max() < 1e-7
    grown = jet.truncate(4).times_coordinate(1)
    assert np.abs(grown(z) - z[1] * jet.truncate(4)(z)).max() < 1e-13
