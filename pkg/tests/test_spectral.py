import math
import warnings

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from feynman_index.errors import ErrorCode, LowerHalfPlaneWarning, OperationError
from feynman_index.operators import CircleOperatorSpec, build_circle_dirac, build_jordan_model
from feynman_index.spectral import (
    OperatorMatrix,
    RaySpec,
    WeightedExpTrace,
    complex_power,
    frequency_projectors,
    generalized_kernel_projector,
    log_on_cut,
    schur_clusters,
    semigroup,
    strip_bound,
)

from oracles import contour_projector, spectral_sign_projectors


def random_matrix(seed, size=6):
    rng = np.random.default_rng(seed)
    return (rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))) / math.sqrt(2 * size)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_cluster_projectors_match_contour_integrals(seed):
    M = random_matrix(seed)
    decomp = schur_clusters(M)
    eigs = np.array([c.center for c in decomp.clusters])
    gaps = np.abs(eigs[:, None] - eigs[None, :]) + 1e9 * np.eye(len(eigs))
    radius = 0.4 * gaps.min()
    for cl in decomp.clusters:
        oracle = contour_projector(M, cl.center, radius, nodes=128)
        scale = max(1.0, np.linalg.norm(oracle))
        assert np.abs(cl.projector - oracle).max() < 1e-8 * scale


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_frequency_projectors_match_contour_sign_split(seed):
    D = random_matrix(seed)
    p = frequency_projectors(D)
    pos, neg, zero = spectral_sign_projectors(D, nodes=128)
    scale = max(1.0, np.linalg.norm(pos))
    assert np.abs(p.p_gt - pos).max() < 1e-7 * scale
    assert np.abs(p.p_lt - neg).max() < 1e-7 * scale
    assert np.abs(p.p_0).max() == 0


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.3, 3.0))
def test_complex_square_root_squares_back(seed, scale):
    M = scale * random_matrix(seed, 5)
    root = complex_power(M, 0.5)
    assert np.abs(root @ root - M).max() < 1e-9 * max(1.0, np.abs(M).max())


def test_complex_power_is_multiplicative_on_jordan_blocks():
    # 2x2 Jordan block at 2 plus a simple eigenvalue
    M = np.array([[2.0, 1.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, -1.0 + 0.5j]])
    s, t = 0.3 + 0.1j, -0.7
    lhs = complex_power(M, s) @ complex_power(M, t)
    assert np.abs(lhs - complex_power(M, s + t)).max() < 1e-12
    # the power of a Jordan block has the derivative on its superdiagonal
    block = complex_power(M, s)[:2, :2]
    expected = np.array([[2**s, s * 2 ** (s - 1)], [0, 2**s]])
    assert np.abs(block - expected).max() < 1e-13


def test_jordan_model_has_two_dimensional_generalized_kernel():
    D = build_jordan_model(4)
    p0 = generalized_kernel_projector(D.entries @ D.entries)
    assert round(np.trace(p0).real) == 2
    decomp = schur_clusters(D)
    zero = decomp.clusters[decomp.zero_cluster_index()]
    assert zero.multiplicity == 2 and zero.nilpotency_degree == 2
    assert np.abs(p0 @ p0 - p0).max() < 1e-12


def test_circle_spectrum_is_shifted_integers():
    D = build_circle_dirac(CircleOperatorSpec(flux=0.25, K=5))
    centers = sorted(c.center.real for c in schur_clusters(D).clusters)
    assert np.allclose(centers, np.arange(-5, 6) + 0.25, atol=1e-12)


def test_weighted_exp_trace_matches_expm():
    M = build_jordan_model(3).entries
    W = frequency_projectors(M).p_gt
    trace = WeightedExpTrace(schur_clusters(M), W)
    for z in (0.3, -0.2j, 0.1 + 0.4j):
        assert abs(trace(z) - np.trace(W @ scipy.linalg.expm(z * M))) < 1e-11


@pytest.mark.parametrize("theta", [math.pi, math.pi / 2, 3 * math.pi / 2, 0.1])
def test_log_branch_argument_window(theta):
    rng = np.random.default_rng(1)
    z = rng.standard_normal(200) + 1j * rng.standard_normal(200)
    arg = log_on_cut(z, theta).imag
    assert np.all(arg <= theta + 1e-15) and np.all(arg > theta - 2 * math.pi)
    assert np.allclose(np.exp(log_on_cut(z, theta)), z)
    on_ray = 2.0 * np.exp(1j * theta)
    assert abs(log_on_cut(on_ray, theta).imag - theta) < 1e-12


def test_eigenvalue_on_ray_is_rejected():
    with pytest.raises(OperationError) as info:
        complex_power(np.diag([1.0, -4.0]), 0.5)
    assert info.value.code is ErrorCode.EIGENVALUE_ON_RAY
    # rotating the cut resolves it
    root = complex_power(np.diag([1.0, -4.0]), 0.5, RaySpec(math.pi / 2))
    assert np.allclose(root @ root, np.diag([1.0, -4.0]))


def test_ambiguous_clustering_is_reported():
    with pytest.raises(OperationError) as info:
        schur_clusters(np.diag([0.0, 1.5e-6]), cluster_tol=1e-6)
    assert info.value.code is ErrorCode.AMBIGUOUS_CLUSTERING


def test_zero_not_isolated_is_reported():
    with pytest.raises(OperationError) as info:
        # the clusters are 2.4e-6 apart (separated) but the second sits within 2e-6 of zero
        generalized_kernel_projector(np.diag([-0.9e-6, 1.5e-6, 1.0]), cluster_tol=1e-6)
    assert info.value.code is ErrorCode.ZERO_NOT_ISOLATED


@pytest.mark.parametrize("bad", [np.zeros((2, 3)), np.array([[np.nan]]), np.zeros((0, 0))])
def test_invalid_matrices_are_rejected(bad):
    with pytest.raises(OperationError) as info:
        OperatorMatrix(bad)
    assert info.value.code is ErrorCode.INVALID_OPERATOR


@pytest.mark.parametrize("theta", [0.0, 2 * math.pi, -1.0])
def test_ray_angle_must_be_inside_the_open_interval(theta):
    with pytest.raises(OperationError):
        RaySpec(theta)


def test_semigroup_warns_in_lower_half_plane_and_bounds_strip():
    M = np.diag([1.0 + 0.5j, 2.0 - 0.25j])
    assert strip_bound(M) == 0.5
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        U = semigroup(M, -0.1j)
    assert any(issubclass(w.category, LowerHalfPlaneWarning) for w in caught)
    assert np.allclose(U, scipy.linalg.expm(1j * (-0.1j) * M))
