import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from feynman_index.distributions import (
    DistributionQuery,
    coeff_C,
    coeff_Ctilde,
    dcoeff_C,
    identity_suite,
    pair,
    richardson_limit,
)
from feynman_index.errors import ErrorCode, OperationError
from feynman_index.schwartz import Bump, GaussianPoly, lorentz_boost

from oracles import gauss_hermite_pairing, structure_constant


def _phi2():
    return GaussianPoly.isotropic([0.3, -0.2], 0.8, np.array([[1.0, 0.5], [0.2, 0.0]]))


# --- structure constants -----------------------------------------------------


@settings(max_examples=40, deadline=None)
@given(st.floats(-3.5, 3.5), st.sampled_from([1, 2, 3, 4]))
def test_structure_constant_matches_mpmath(beta, n):
    assert abs(coeff_C(beta, n) - structure_constant(beta, n)) < 1e-13 * max(1, abs(structure_constant(beta, n)))
    d = structure_constant(beta, n, 1)
    assert abs(dcoeff_C(beta, n) - d) < 1e-11 * max(1, abs(d))


@pytest.mark.parametrize("beta,n,expected", [(0, 2, 0.25), (1, 2, 1 / 16), (-1, 3, 0.0), (-2, 2, 0.0)])
def test_structure_constant_values(beta, n, expected):
    assert abs(coeff_C(beta, n) - expected) < 1e-15


def test_structure_constant_derivatives_at_integers_match_mpmath():
    # d/dbeta C at beta = 0, n = 2 is (2 gamma_E - log 4) / 4
    assert abs(dcoeff_C(0, 2) - (2 * np.euler_gamma - math.log(4)) / 4) < 1e-13
    # at beta = -1, n = 2 the product of reciprocal Gammas has a double zero
    assert abs(dcoeff_C(-1, 2)) < 1e-13
    assert abs(coeff_Ctilde(-1, 2, 1.0)) < 1e-13
    assert abs(dcoeff_C(-1, 2) - structure_constant(-1, 2, 1)) < 1e-13


# --- pairings against independent quadrature ---------------------------------


@pytest.mark.parametrize("beta", [0, 1, 2])
@pytest.mark.parametrize("n", [2, 3])
def test_integer_beta_pairing_is_a_polynomial_weight(beta, n):
    # F_b = C(b, n) gamma^b for b = 0, 1, 2, ... with no i0 ambiguity
    if n == 2:
        center, width, poly = [0.3, -0.2], 0.8, np.array([[1.0, 0.5], [0.2, 0.0]])
    else:
        center, width, poly = [0.2, -0.1, 0.1], 0.9, np.array([1.0, 0.4]).reshape(2, 1, 1)
    phi = GaussianPoly.isotropic(center, width, poly)

    def gamma_power(*x):
        return (x[0] ** 2 - sum(xi**2 for xi in x[1:])) ** beta

    expected = structure_constant(beta, n) * gauss_hermite_pairing(gamma_power, center, width, poly, n)
    for sign in (1, -1):
        got = pair(DistributionQuery("F", beta, sign, n), phi).value
        assert abs(got - expected) < 1e-8 * max(1, abs(expected))


@pytest.mark.parametrize("beta", [0.5, -0.4, 1.3 + 0.2j])
def test_half_line_power_matches_mpmath_quad(beta):
    phi = GaussianPoly.isotropic([0.2], 0.7, np.array([1.0, -0.3]))
    f = lambda x: complex(phi.value_at([float(x)]))  # noqa: E731
    plus = complex(mpmath.quad(lambda x: mpmath.power(x, beta) * f(x), [0, 1, mpmath.inf]))
    minus = complex(mpmath.quad(lambda x: mpmath.power(x, beta) * f(-x), [0, 1, mpmath.inf]))
    assert abs(pair(DistributionQuery("t_pm", beta, 1, 1), phi).value - plus) < 1e-9
    assert abs(pair(DistributionQuery("t_pm", beta, -1, 1), phi).value - minus) < 1e-9


def test_line_boundary_value_matches_half_line_powers():
    phi = GaussianPoly.isotropic([0.2], 0.7, np.array([1.0, -0.3]))
    beta = -0.4
    tp = pair(DistributionQuery("t_pm", beta, 1, 1), phi).value
    tm = pair(DistributionQuery("t_pm", beta, -1, 1), phi).value
    for sign in (1, -1):
        f = pair(DistributionQuery("f", beta, sign, 1), phi).value
        assert abs(f - (tp + np.exp(sign * 1j * np.pi * beta) * tm)) < 1e-9


def test_half_line_power_has_poles_at_negative_integers():
    phi = GaussianPoly.isotropic([0.0], 1.0)
    with pytest.raises(OperationError) as info:
        pair(DistributionQuery("t_pm", -1, 1, 1), phi)
    assert info.value.code is ErrorCode.POLE_AT_BETA


@pytest.mark.parametrize("family", ["F", "G"])
def test_boundary_value_and_epsilon_ladder_routes_agree(family):
    phi = _phi2()
    q = DistributionQuery(family, -0.3, 1, 2)
    boundary = pair(q, phi).value
    ladder = pair(q, phi, strategy="epsilon_ladder").value
    assert abs(boundary - ladder) < 1e-6 * max(1, abs(boundary))


def test_pairing_is_holomorphic_in_beta():
    # Cauchy-Riemann: the real and imaginary directional derivatives agree
    phi, beta, h = _phi2(), 0.4 + 0.1j, 1e-4

    def F(b):
        return pair(DistributionQuery("F", b, 1, 2), phi).value

    along_real = (F(beta + h) - F(beta - h)) / (2 * h)
    along_imag = (F(beta + 1j * h) - F(beta - 1j * h)) / (2j * h)
    assert abs(along_real - along_imag) < 1e-6


def test_log_family_is_the_beta_derivative():
    phi, beta, h, Lam = _phi2(), 0.6, 1e-4, 0.7
    for sign in (1, -1):
        dF = (pair(DistributionQuery("F", beta + h, sign, 2), phi).value
              - pair(DistributionQuery("F", beta - h, sign, 2), phi).value) / (2 * h)
        F = pair(DistributionQuery("F", beta, sign, 2), phi).value
        G = pair(DistributionQuery("G", beta, sign, 2, Lambda=Lam), phi).value
        assert abs(G - (sign * 1j / np.pi * dF + Lam * F)) < 1e-7


def test_family_is_lorentz_invariant():
    phi = _phi2()
    q = DistributionQuery("F", 0.35, 1, 2)
    boosted = pair(q, phi.compose_linear(lorentz_boost(0.5, 2))).value
    assert abs(boosted - pair(q, phi).value) < 1e-8


def test_dimension_mismatch_is_rejected():
    with pytest.raises(OperationError) as info:
        pair(DistributionQuery("F", 0.5, 1, 3), _phi2())
    assert info.value.code is ErrorCode.DIMENSION_UNSUPPORTED


@pytest.mark.parametrize("kwargs", [dict(family="nope", beta=0), dict(family="F", beta=0, sign=0),
                                    dict(family="f", beta=0, n=2), dict(family="F", beta=0, epsilon_ladder=(1e-3, 1e-2))])
def test_invalid_queries_are_rejected(kwargs):
    with pytest.raises(ValueError):
        DistributionQuery(**kwargs)


def test_log_sum_identity_needs_the_lambda_correction():
    phi = GaussianPoly.isotropic([0.0, 0.0], 1.0)
    records = identity_suite([0.0], 2, 0.7, [phi], tol=1e-6)
    by_name = {r.identity: r for r in records}
    assert not by_name["G_sum"].passed
    assert by_name["G_sum_lambda"].passed
    assert all(r.passed for r in records if r.identity != "G_sum")


# --- extrapolation and test functions ----------------------------------------


def test_richardson_fit_recovers_limit_with_fractional_powers():
    eps = np.geomspace(1e-2, 1e-6, 17)
    values = 2.0 + 0.3 * eps**0.7 * np.log(eps) - 0.5 * eps + eps**1.7
    limit, err = richardson_limit(eps, values, [(0.7, 0), (0.7, 1), (1, 0), (1.7, 0), (2, 0)])
    assert abs(limit - 2.0) < 1e-10 and err < 1e-8


def test_box_and_gamma_act_exactly_on_gaussians():
    phi = _phi2()
    x, h = np.array([0.1, 0.4]), 1e-3

    def second(axis):
        e = np.eye(2)[axis] * h
        return (phi.value_at(x + e) - 2 * phi.value_at(x) + phi.value_at(x - e)) / h**2

    assert abs(phi.box().value_at(x) - (second(0) - second(1))) < 1e-5
    assert abs(phi.times_gamma().value_at(x) - (x[0] ** 2 - x[1] ** 2) * phi.value_at(x)) < 1e-14


def test_bump_is_compactly_supported_and_differentiable():
    phi = Bump.standard([0.0, 0.0], 1.0)
    assert phi.value_at([0.99, 0.2]) == 0
    x, h = np.array([0.2, -0.3]), 1e-5
    numeric = (phi.value_at(x + [h, 0]) - phi.value_at(x - [h, 0])) / (2 * h)
    assert abs(phi.derivative(0).value_at(x) - numeric) < 1e-8
