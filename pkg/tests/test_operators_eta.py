import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.base import clone

from feynman_index.errors import ErrorCode, OperationError
from feynman_index.estimators import EtaEstimator, FrequencySplitter
from feynman_index.eta import default_time_grid, eta_heat, eta_smeared, eta_zeta, fit_small_time
from feynman_index.operators import (
    CircleOperatorSpec,
    CylinderModel,
    GaugePath,
    build_circle_dirac,
    build_jordan_model,
    smootherstep,
)

from oracles import hurwitz_eta


# --- operators ---------------------------------------------------------------


def test_circle_matrix_is_diagonal_without_potential():
    D = build_circle_dirac(CircleOperatorSpec(flux=0.3, K=4))
    assert np.allclose(D.entries, np.diag(np.arange(-4, 5) + 0.3))
    assert D.mode_labels == tuple(range(-4, 5))


def test_potential_couples_modes_by_its_frequency():
    D = build_circle_dirac(CircleOperatorSpec(flux=0.0, potential_coeffs=((2, 0.5),), K=3))
    # multiplication by e^{2 i theta} sends mode k to k + 2
    labels = D.mode_labels
    for j, k in enumerate(labels):
        for i, m in enumerate(labels):
            expected = (m == k) * k + (m == k + 2) * 0.5
            assert D.entries[i, j] == pytest.approx(expected)


def test_potential_shape_mismatch_is_rejected():
    with pytest.raises(OperationError) as info:
        CircleOperatorSpec(potential_coeffs=((1, np.eye(2)),), rank=1)
    assert info.value.code is ErrorCode.INVALID_OPERATOR


def test_jordan_model_has_nilpotent_zero_block():
    D = build_jordan_model(3).entries
    zero = 2 * 3
    block = D[zero : zero + 2, zero : zero + 2]
    assert np.allclose(block, [[0, 1], [0, 0]])


def test_gauge_path_is_constant_near_the_ends_and_smooth():
    path = GaugePath(0.3, 1.3)
    assert path(0.0) == path(0.05) == 0.3
    assert path(1.0) == path(0.95) == pytest.approx(1.3)
    for order in (1, 2, 3):
        assert abs(path.derivative(0.1, order)) < 1e-12
        assert abs(path.derivative(0.9, order)) < 1e-12
    # the Taylor expansion reproduces the path within a polynomial piece
    t0, dt = 0.4, 0.07
    coeffs = path.taylor(t0, 7)
    assert abs(np.polyval(coeffs[::-1], dt) - path(t0 + dt)) < 1e-13


def test_smootherstep_is_monotone():
    s = np.linspace(-0.2, 1.2, 1001)
    assert np.all(np.diff(smootherstep(s)) >= 0)
    assert smootherstep(0.0) == 0 and smootherstep(1.0) == 1


@pytest.mark.parametrize("kwargs", [dict(t_minus=1.0, t_plus=0.0), dict(margin=0.6), dict(margin=0.0)])
def test_bad_gauge_paths_are_rejected(kwargs):
    with pytest.raises(OperationError):
        GaugePath(0.0, 1.0, **kwargs)


def test_cylinder_model_reports_product_structure():
    model = CylinderModel.from_fluxes(0.3, 1.3, 8)
    assert model.in_product_region(0.05) and not model.in_product_region(0.5)
    assert model.flux_is_real and not model.is_autonomous
    assert np.allclose(model.dirac_at(1.0).entries, np.diag(np.arange(-8, 9) + 1.3))


# --- eta ---------------------------------------------------------------------


@settings(max_examples=40, deadline=None)
@given(st.floats(0.02, 0.98))
def test_zeta_route_matches_mpmath_hurwitz(a):
    res = eta_zeta(CircleOperatorSpec(flux=a, K=50))
    assert abs(res.eta - hurwitz_eta(a)) < 1e-12
    assert res.h == 0 and res.xi == pytest.approx(res.eta / 2)


@pytest.mark.parametrize("a", [0.0, 1.0, -2.0])
def test_integer_flux_has_one_dimensional_kernel(a):
    res = eta_zeta(CircleOperatorSpec(flux=a, K=20))
    assert res.h == 1 and abs(res.eta) < 1e-12 and res.xi == pytest.approx(0.5)


def test_eta_is_odd_and_periodic_in_the_flux():
    for a in (0.1, 0.37):
        plus = eta_zeta(CircleOperatorSpec(flux=a, K=30)).eta
        minus = eta_zeta(CircleOperatorSpec(flux=-a, K=30)).eta
        shifted = eta_zeta(CircleOperatorSpec(flux=a + 2, K=30)).eta
        assert abs(plus + minus) < 1e-12 and abs(plus - shifted) < 1e-12


@pytest.mark.parametrize("a", [0.15, 0.7])
def test_heat_and_smeared_routes_agree_with_zeta(a):
    D = build_circle_dirac(CircleOperatorSpec(flux=a, K=100))
    zeta = eta_zeta(D).eta
    for res in (eta_heat(D), eta_smeared(D)):
        assert abs(res.eta - zeta) < 1e-3
        assert res.error_estimate < 1e-3


def test_complex_flux_continues_the_closed_form():
    a = 0.3 + 0.2j
    res = eta_zeta(CircleOperatorSpec(flux=a, K=60))
    assert abs(res.eta - (1 - 2 * a)) < 1e-12
    heat = eta_heat(build_circle_dirac(CircleOperatorSpec(flux=a, K=60)))
    assert abs(heat.eta - (1 - 2 * a)) < 1e-3


def test_scalar_potential_shifts_eta_by_its_mean():
    # V = 0.1 + 0.2 cos(theta): gauge equivalent to the flux a + 0.1
    spec = CircleOperatorSpec(flux=0.2, potential_coeffs=((0, 0.1), (1, 0.1), (-1, 0.1)), K=100)
    res = eta_heat(build_circle_dirac(spec))
    assert abs(res.eta - hurwitz_eta(0.3)) < 1e-3


def test_zeta_route_refuses_potentials():
    with pytest.raises(OperationError) as info:
        eta_zeta(CircleOperatorSpec(flux=0.2, potential_coeffs=((1, 0.1),), K=10))
    assert info.value.code is ErrorCode.NO_CLOSED_FORM_TAIL


def test_time_grid_below_truncation_window_is_rejected():
    D = build_circle_dirac(CircleOperatorSpec(flux=0.25, K=20))
    with pytest.raises(OperationError) as info:
        eta_heat(D, t_grid=np.geomspace(1e-4, 1e-2, 8))
    assert info.value.code is ErrorCode.TRUNCATION_WINDOW_VIOLATED


def test_small_time_fit_recovers_synthetic_coefficients():
    t = default_time_grid(100)
    values = 0.7 * t**-0.5 + 0.25 - 0.1 * np.log(t) + 0.3 * t**0.5 + 0.05 * t
    fit = fit_small_time(t, values, "extended")
    assert abs(fit["constant"] - 0.25) < 1e-8


def test_default_grid_scales_with_truncation():
    grid = default_time_grid(200)
    assert grid[0] == pytest.approx(20 / 200**2) and grid[-1] == pytest.approx(200 / 200**2)


# --- estimators --------------------------------------------------------------


def test_eta_estimator_follows_the_estimator_protocol():
    est = EtaEstimator(method="heat_fit")
    assert clone(est).get_params() == est.get_params()
    est.fit(CircleOperatorSpec(flux=0.25, K=100))
    assert abs(est.predict() - 0.5) < 1e-3
    with pytest.raises(ValueError):
        EtaEstimator(method="nope").fit(CircleOperatorSpec(flux=0.25, K=10))


def test_frequency_splitter_parts_sum_to_input():
    D = build_jordan_model(3)
    x = np.random.default_rng(0).standard_normal((4, D.dim))
    parts = FrequencySplitter().fit(D).transform(x)
    assert parts.shape == (4, D.dim, 3)
    assert np.abs(parts.sum(axis=-1) - x).max() < 1e-12
    assert math.isclose(np.trace(FrequencySplitter().fit(D).p_0_).real, 2, abs_tol=1e-12)
