import numpy as np
import pytest
import scipy.integrate
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from feynman_index.constants import CURVATURE_SIGN
from feynman_index.errors import ErrorCode, OperationError
from feynman_index.index_engine import (
    calibrate_curvature_sign,
    dirac_current,
    duality_check,
    evolve,
    fredholm_pair_index,
    index_report,
    spectral_flow,
)
from feynman_index.operators import (
    CircleOperatorSpec,
    CylinderModel,
    build_circle_dirac,
    build_jordan_model,
    laplace_from_dirac,
)
from feynman_index.propagator import (
    KernelFamily,
    RegularizedTrace,
    SpacetimeGrid,
    apply_propagator,
    clifford_normal,
    doubled_dirac,
    fundamental_solution_errors,
)
from feynman_index.spectral import frequency_projectors

from oracles import spectral_sign_projectors


# --- propagator --------------------------------------------------------------


def test_doubled_operator_anticommutes_with_normal():
    D = build_circle_dirac(CircleOperatorSpec(flux=0.3, K=3))
    big = doubled_dirac(D).entries
    n = clifford_normal(D.dim)
    assert np.abs(n @ n + np.eye(2 * D.dim)).max() == 0
    assert np.abs(n @ big + big @ n).max() < 1e-14


def test_feynman_wave_kernel_matches_mode_formula():
    # for a positive eigenvalue mu of A the kernel is (i / 2 sqrt(mu)) e^{-i sqrt(mu) |t|}
    mu = np.array([0.25, 1.0, 6.25])
    fam = KernelFamily("feynman_wave", np.diag(mu))
    for t in (-0.7, 0.3, 1.1):
        expected = np.diag(0.5j / np.sqrt(mu) * np.exp(-1j * np.sqrt(mu) * abs(t)))
        assert np.abs(fam.evaluate(t) - expected).max() < 1e-14


def test_retarded_minus_advanced_is_the_full_propagator():
    D = build_circle_dirac(CircleOperatorSpec(flux=0.25, K=2))
    ret = KernelFamily.from_chiral("retarded", D)
    adv = KernelFamily.from_chiral("advanced", D)
    for t in (0.4, -0.4):
        difference = ret.evaluate(t) - adv.evaluate(t)
        full = 1j * scipy.linalg.expm(-1j * t * ret.matrix) @ ret.clifford_normal
        assert np.abs(difference - full).max() < 1e-13


@pytest.mark.parametrize("jordan", [False, True])
def test_dirac_kernel_jump_and_frequency_support(jordan):
    D = build_jordan_model(2) if jordan else build_circle_dirac(CircleOperatorSpec(flux=0.25, K=3))
    fam = KernelFamily.from_chiral("feynman_dirac", D)
    jump = fam.evaluate(0.0, "+") - fam.evaluate(0.0, "-")
    assert np.abs(jump - 1j * fam.clifford_normal).max() < 1e-12
    p = frequency_projectors(fam.matrix)
    for t in (0.2, 1.3):
        assert np.abs(p.p_lt @ fam.evaluate(t)).max() < 1e-12
        assert np.abs(p.p_ge @ fam.evaluate(-t)).max() < 1e-12


def test_dirac_kernel_projectors_agree_with_contour_oracle():
    D = build_circle_dirac(CircleOperatorSpec(flux=0.3, K=2))
    fam = KernelFamily.from_chiral("feynman_dirac", D)
    pos, neg, _ = spectral_sign_projectors(fam.matrix)
    t = 0.6
    evolution = scipy.linalg.expm(-1j * t * fam.matrix)
    expected = 1j * pos @ evolution @ fam.clifford_normal
    assert np.abs(fam.evaluate(t) - expected).max() < 1e-10


@pytest.mark.parametrize("kind", ["wave", "dirac"])
def test_fundamental_solution_converges_at_second_order(kind):
    D = build_circle_dirac(CircleOperatorSpec(flux=0.25, K=3))
    fam = (KernelFamily("feynman_wave", laplace_from_dirac(D)) if kind == "wave"
           else KernelFamily.from_chiral("feynman_dirac", D))
    errors = fundamental_solution_errors(fam, (100, 200, 400))
    orders = np.log2(errors[:-1] / errors[1:])
    assert np.all(np.abs(orders - 2) < 0.1)


def test_source_touching_the_boundary_is_rejected():
    fam = KernelFamily("feynman_wave", np.eye(2))
    u = SpacetimeGrid(np.linspace(0, 1, 20), np.ones((20, 2)))
    with pytest.raises(OperationError) as info:
        apply_propagator(fam, u)
    assert info.value.code is ErrorCode.SUPPORT_VIOLATION


def test_nonuniform_grid_is_rejected():
    with pytest.raises(OperationError):
        SpacetimeGrid(np.array([0, 1, 2, 3, 4, 5, 6, 8.0]), np.zeros((8, 1)))


def test_regularized_trace_at_small_time_matches_direct_sum():
    D = build_circle_dirac(CircleOperatorSpec(flux=0.25, K=4))
    phi = RegularizedTrace(D)
    lam = np.arange(-4, 5) + 0.25
    t = 0.37
    expected = -0.5j * np.sum(np.sign(lam) * np.exp(-1j * t * lam))
    assert abs(phi(t) - expected) < 1e-13


# --- index engine ------------------------------------------------------------


def test_flux_only_evolution_is_a_diagonal_phase():
    model = CylinderModel.from_fluxes(0.3, 1.3, 6)
    U = evolve(model).U.entries
    integral, _ = scipy.integrate.quad(lambda t: complex(model.flux(t)).real, 0, 1, points=[0.1, 0.9],
                                       epsabs=1e-14, epsrel=1e-14)
    k = np.arange(-6, 7)
    assert np.abs(U - np.diag(np.exp(-1j * (k + integral)))).max() < 1e-10


@pytest.mark.parametrize("start,end,index", [(0.3, 1.3, 1), (0.25, -1.75, -2), (0.3, 0.9, 0)])
def test_index_routes_agree_at_small_truncation(start, end, index):
    rep = index_report(CylinderModel.from_fluxes(start, end, 16))
    assert rep.rounded_index == index == rep.spectral_flow
    assert abs(rep.trace_index - index) < 1e-3
    assert abs(rep.trace_index - rep.rhs) < 2e-3


@settings(max_examples=8, deadline=None)
@given(st.floats(-2.0, 2.0), st.floats(-2.0, 2.0))
def test_index_equals_spectral_flow_for_random_paths(start, end):
    # keep the endpoints away from integers so the crossing count is unambiguous
    if min(abs(start - round(start)), abs(end - round(end))) < 0.05:
        return
    model = CylinderModel.from_fluxes(start, end, 10)
    rep = fredholm_pair_index(model)
    assert rep.rounded_index == spectral_flow(model)


def test_curvature_sign_calibrates_to_constant():
    assert calibrate_curvature_sign(16) == CURVATURE_SIGN


def test_duality_residual_is_small_for_complex_flux():
    model = CylinderModel.from_fluxes(0.3 + 0.2j, 1.1 - 0.1j, 8)
    assert duality_check(model) < 1e-8


def test_dirac_current_is_constant_outside_the_ramp():
    model = CylinderModel.from_fluxes(0.3, 1.3, 10)
    early, late = dirac_current(model, t=0.05), dirac_current(model, t=0.95)
    assert abs(early - late) < 1e-8 and abs(early - 1) < 1e-3
    with pytest.raises(OperationError) as info:
        dirac_current(model, t=0.5)
    assert info.value.code is ErrorCode.OUTSIDE_PRODUCT_REGION


def test_spectral_flow_rejects_ambiguous_endpoints_and_complex_paths():
    with pytest.raises(OperationError) as info:
        spectral_flow(CylinderModel.from_fluxes(1.0 + 1e-11, 2.3, 4))
    assert info.value.code is ErrorCode.ENDPOINT_ZERO_AMBIGUOUS
    with pytest.raises(OperationError):
        spectral_flow(CylinderModel.from_fluxes(0.3 + 0.1j, 1.3, 4))
