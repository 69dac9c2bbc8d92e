"""Cauchy evolution through the cylinder and the index computations built on it.

Three routes to the index of the twisted cylinder are provided: the trace
``Tr(P_+ - P_-)`` of a Fredholm pair of projectors, the spectral flow of the
path of circle operators, and the boundary formula
``Xi_+ - Xi_- + curvature``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg

from .constants import CURVATURE_SIGN
from .errors import ErrorCode, OperationError
from .eta import eta_zeta
from .operators import CylinderModel, GaugePath
from .propagator import KernelFamily, clifford_normal
from .spectral import DEFAULT_CLUSTER_TOL, OperatorMatrix, RaySpec, frequency_projectors

__all__ = [
    "EvolutionOperator",
    "IndexReport",
    "calibrate_curvature_sign",
    "dirac_current",
    "duality_check",
    "evolve",
    "evolve_between",
    "fredholm_pair_index",
    "index_report",
    "spectral_flow",
    "xi_index_rhs",
]

SOLVER_TOL = 1e-12
NONINTEGER_TOL = 1e-3
_MAX_STEPS = 20000
# Gauss nodes of the two-point rule on [0, 1]
_GAUSS_NODES = (0.5 - math.sqrt(3) / 6, 0.5 + math.sqrt(3) / 6)


@dataclass(frozen=True)
class EvolutionOperator:
    """Solution operator of ``du/dt = -i D(t) u`` from ``t_start`` to ``t_end``.

    Attributes
    ----------
    U : OperatorMatrix
    steps : int
        Accepted adaptive steps (exact exponential segments count once).
    error_estimate : float
        Sum of accepted local error estimates.
    condition : float
        2-norm condition number of ``U``.
    """

    U: OperatorMatrix
    steps: int
    error_estimate: float
    condition: float
    t_start: float
    t_end: float


@dataclass(frozen=True)
class IndexReport:
    trace_index: complex
    rounded_index: int
    spectral_flow: int | None = None
    xi_plus: complex | None = None
    xi_minus: complex | None = None
    curvature_integral: float | None = None
    rhs: complex | None = None
    residuals: dict = field(default_factory=dict)


def _generator(model: CylinderModel, chirality: int, transpose: bool) -> Callable[[float], np.ndarray]:
    """``-i chirality * D(t)`` (transposed on request).

    ``D(t) = D(t_minus) + (a(t) - a(t_minus)) * 1``, so only the scalar shift
    is re-evaluated per call.
    """
    base_gen = -1j * chirality * model.dirac_at(model.t_minus).entries
    if transpose:
        base_gen = base_gen.T
    eye = np.eye(base_gen.shape[0])
    start = model.flux(model.t_minus)

    def gen(t: float) -> np.ndarray:
        return base_gen - 1j * chirality * (model.flux(t) - start) * eye

    return gen


def _commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``[a, b]``; exact O(n^2) shortcut when ``a - b`` is diagonal."""
    diff = a - b
    diag = np.diag(diff)
    if not np.any(diff - np.diag(diag)):
        # [a, b] = [a - b, b] and [diag(d), b]_ij = (d_i - d_j) b_ij
        return (diag[:, None] - diag[None, :]) * b
    return a @ b - b @ a


def _magnus_step(gen, t: float, h: float) -> np.ndarray:
    """Fourth-order Magnus propagator over ``[t, t + h]``."""
    a1 = gen(t + _GAUSS_NODES[0] * h)
    a2 = gen(t + _GAUSS_NODES[1] * h)
    omega = 0.5 * h * (a1 + a2) + (math.sqrt(3) / 12) * h * h * _commutator(a2, a1)
    return scipy.linalg.expm(omega)


def _adaptive_magnus(gen, t0: float, t1: float, tol: float) -> tuple[np.ndarray, int, float]:
    """Step-doubling adaptive Magnus integration; returns ``(U, steps, error)``."""
    dim = gen(t0).shape[0]
    U = np.eye(dim, dtype=complex)
    t, h = t0, (t1 - t0) / 8
    steps, total_err = 0, 0.0
    while t < t1 - 1e-15 * max(1.0, abs(t1)):
        h = min(h, t1 - t)
        big = _magnus_step(gen, t, h)
        small = _magnus_step(gen, t + h / 2, h / 2) @ _magnus_step(gen, t, h / 2)
        # Frobenius norm bounds the operator norm and avoids an SVD per step
        err = float(np.linalg.norm(big - small)) / 15.0
        if err <= tol or h < 1e-10 * (t1 - t0):
            if err > tol:
                raise OperationError(
                    ErrorCode.SOLVER_TOLERANCE_NOT_MET, f"local error {err:.3g} above {tol:.3g} at minimal step"
                )
            U = small @ U
            t += h
            steps += 1
            total_err += err
            if steps > _MAX_STEPS:
                raise OperationError(ErrorCode.SOLVER_TOLERANCE_NOT_MET, "step budget exhausted")
        # fourth-order local error scales like h^5
        factor = 0.9 * (tol / max(err, 1e-300)) ** 0.2
        h *= min(4.0, max(0.2, factor))
    return U, steps, total_err


def _evolve(model: CylinderModel, t_start: float, t_end: float, doubled=False, transpose=False, tol=SOLVER_TOL):
    if doubled:
        # diag(D, -D) evolves block by block
        upper, n1, e1 = _evolve(model, t_start, t_end, False, transpose, tol)
        lower, n2, e2 = _evolve_chiral(model, t_start, t_end, -1, transpose, tol)
        return scipy.linalg.block_diag(upper, lower), n1 + n2, e1 + e2
    return _evolve_chiral(model, t_start, t_end, 1, transpose, tol)


def _evolve_chiral(model: CylinderModel, t_start: float, t_end: float, chirality: int, transpose: bool, tol: float):
    gen = _generator(model, chirality, transpose)
    dim = gen(t_start).shape[0]
    U = np.eye(dim, dtype=complex)
    steps, err = 0, 0.0
    if t_end == t_start:
        return U, 0, 0.0
    lo, hi = model.gauge_path.ramp
    cuts = sorted({t_start, t_end, *[c for c in (lo, hi) if min(t_start, t_end) < c < max(t_start, t_end)]})
    if t_end < t_start:
        cuts = cuts[::-1]
    for a, b in zip(cuts[:-1], cuts[1:]):
        mid = 0.5 * (a + b)
        if model.is_autonomous or mid <= lo or mid >= hi:
            # product region: the generator is constant
            U = scipy.linalg.expm((b - a) * gen(mid)) @ U
            steps += 1
        else:
            seg, n, e = _adaptive_magnus(gen, a, b, tol)
            U = seg @ U
            steps += n
            err += e
    return U, steps, err


def evolve_between(model: CylinderModel, t_start: float, t_end: float, tol: float = SOLVER_TOL) -> EvolutionOperator:
    """Evolution of Cauchy data on the chirality block between two times."""
    U, steps, err = _evolve(model, t_start, t_end, tol=tol)
    return EvolutionOperator(OperatorMatrix(U), steps, err, float(np.linalg.cond(U)), t_start, t_end)


def evolve(model: CylinderModel, tol: float = SOLVER_TOL) -> EvolutionOperator:
    """Evolution from ``t_minus`` to ``t_plus`` with local tolerance ``tol``.

    Raises
    ------
    OperationError
        ``SOLVER_TOLERANCE_NOT_MET`` if the adaptive scheme cannot reach ``tol``.
    """
    return evolve_between(model, model.t_minus, model.t_plus, tol)


def _nonnegative_projector(D, ray, cluster_tol) -> np.ndarray:
    return frequency_projectors(D, ray, cluster_tol).p_ge


def _outer_partial_trace(diff: np.ndarray, labels) -> complex:
    labels = np.abs(np.asarray(labels))
    K = labels.max()
    outer = labels > 0.9 * K
    return complex(np.sum(np.diag(diff)[outer]))


def fredholm_pair_index(
    model: CylinderModel,
    ray: RaySpec | None = None,
    t_start: float | None = None,
    t_end: float | None = None,
    cluster_tol: float = DEFAULT_CLUSTER_TOL,
    evolution: EvolutionOperator | None = None,
) -> IndexReport:
    """``Tr(P_+ - P_-)`` with ``P_+ = p_>=(D_+)`` and ``P_- = U p_>=(D_-) U^{-1}``.

    Parameters
    ----------
    model : CylinderModel
    ray : RaySpec, optional
    t_start, t_end : float, optional
        Sub-interval; defaults to the whole cylinder.

    Raises
    ------
    OperationError
        ``NONINTEGER_INDEX`` when the trace is more than 1e-3 from an integer.
    """
    t_start = model.t_minus if t_start is None else t_start
    t_end = model.t_plus if t_end is None else t_end
    if evolution is None:
        evolution = evolve_between(model, t_start, t_end)
    U = evolution.U.entries
    d_minus, d_plus = model.dirac_at(t_start), model.dirac_at(t_end)
    p_plus = _nonnegative_projector(d_plus, ray, cluster_tol)
    p_minus = U @ _nonnegative_projector(d_minus, ray, cluster_tol) @ np.linalg.inv(U)
    diff = p_plus - p_minus
    trace = complex(np.trace(diff))
    rounded = int(round(trace.real))
    residual = abs(trace - rounded)
    if residual > NONINTEGER_TOL:
        raise OperationError(
            ErrorCode.NONINTEGER_INDEX, f"trace {trace:.6g} is {residual:.3g} away from the nearest integer"
        )
    return IndexReport(
        trace_index=trace,
        rounded_index=rounded,
        residuals={
            "integer_residual": residual,
            "outer_mode_trace": _outer_partial_trace(diff, d_plus.mode_labels),
            "solver_error": evolution.error_estimate,
            "evolution_condition": evolution.condition,
        },
    )


def _near_integer(x: float) -> bool:
    return 0 < abs(x - round(x)) < 1e-9


def spectral_flow(model: CylinderModel, samples: int = 4001) -> int:
    """Signed count of zero crossings along the path of circle operators.

    An eigenvalue counts as nonnegative when its real part is ``>= 0``, so a
    branch entering 0 from below counts as an upward crossing. Flux-only
    models use the explicit branches ``k + a(t)`` for every integer ``k``;
    models with a potential track the count of nonnegative eigenvalues of the
    truncated operator on a coarser grid.

    Raises
    ------
    OperationError
        ``ENDPOINT_ZERO_AMBIGUOUS`` if an endpoint flux is within 1e-9 of an
        integer without being one; ``INVALID_OPERATOR`` for complex flux.
    """
    if not model.flux_is_real:
        raise OperationError(ErrorCode.INVALID_OPERATOR, "spectral flow needs a real gauge path")
    path = model.gauge_path
    start, end = complex(path.start).real, complex(path.end).real
    if _near_integer(start) or _near_integer(end):
        raise OperationError(ErrorCode.ENDPOINT_ZERO_AMBIGUOUS, "endpoint flux is numerically indistinct from an integer")
    lo, hi = path.ramp
    times = np.unique(np.concatenate([np.linspace(model.t_minus, model.t_plus, samples), [lo, hi]]))
    if not model.base.has_potential:
        flux = np.real(path(times))
        ks = np.arange(math.floor(-flux.max()) - 1, math.ceil(-flux.min()) + 2)
        nonneg = (ks[:, None] + flux[None, :]) >= 0
        return int(np.sum(np.diff(nonneg.astype(int), axis=1)))
    coarse = times[:: max(1, samples // 200)]
    counts = [
        int(np.sum(np.linalg.eigvals(model.dirac_at(t).entries).real >= 0)) for t in np.append(coarse, model.t_plus)
    ]
    return int(np.sum(np.diff(counts)))


def curvature_integral(path: GaugePath, t_start: float | None = None, t_end: float | None = None) -> float:
    """``int int a'(t) / 2pi dt dtheta`` over the cylinder by Gauss-Legendre.

    Each polynomial piece of the path is integrated exactly.
    """
    t_start = path.t_minus if t_start is None else t_start
    t_end = path.t_plus if t_end is None else t_end
    nodes, weights = np.polynomial.legendre.leggauss(8)
    pieces = sorted({t_start, t_end, *[c for c in path.ramp if t_start < c < t_end]})
    total = 0j
    for a, b in zip(pieces[:-1], pieces[1:]):
        t = 0.5 * (b - a) * nodes + 0.5 * (a + b)
        # theta integral of 1/2pi over [0, 2pi] is one
        total += 0.5 * (b - a) * np.sum(weights * path.derivative(t))
    return total.real if total.imag == 0 else total


def xi_index_rhs(model: CylinderModel, ray: RaySpec | None = None) -> tuple[complex, complex, float, complex]:
    """Boundary formula ``(Xi_+, Xi_-, curvature, Xi_+ - Xi_- + sign * curvature)``.

    Endpoint invariants come from the closed-form zeta route, so the endpoint
    operators must be flux-only.
    """
    xi_minus = eta_zeta(model.dirac_at(model.t_minus), ray).xi
    xi_plus = eta_zeta(model.dirac_at(model.t_plus), ray).xi
    curvature = curvature_integral(model.gauge_path)
    return xi_plus, xi_minus, curvature, xi_plus - xi_minus + CURVATURE_SIGN * curvature


def calibrate_curvature_sign(K: int = 32) -> int:
    """Recover the curvature sign from the path 0.3 -> 1.3 and the spectral-flow oracle."""
    model = CylinderModel.from_fluxes(0.3, 1.3, K=K)
    flow = spectral_flow(model)
    xi_plus, xi_minus, curvature, _ = xi_index_rhs(model)
    sign = (flow - (xi_plus - xi_minus).real) / curvature
    return int(round(sign))


def _chiral_nonnegative_from_kernel(D, ray) -> np.ndarray:
    """``p_>=(D)`` read off the regularized Dirac kernel at ``0+``.

    On the doubled space ``-i k_reg(0+) n^{-1} = p_>= - 1/2``; the first
    chirality block returns the projector of ``D``.
    """
    fam = KernelFamily.from_chiral("regularized_diff", D, ray)
    dim = np.asarray(D.entries).shape[0]
    normal_inv = -fam.clifford_normal
    half_sign = -1j * fam.evaluate(0.0, "+") @ normal_inv
    return (half_sign + 0.5 * np.eye(2 * dim))[:dim, :dim]


def dirac_current(model: CylinderModel, ray: RaySpec | None = None, t: float | None = None) -> complex:
    """Integrated Dirac current ``Tr(P_+(t) - P_-(t))`` on the slice at time ``t``.

    ``P_+(t)`` and ``P_-(t)`` are the nonnegative-frequency projectors of the
    future and past endpoint operators, read off their regularized Feynman
    kernels and carried to the slice by the solved evolution.

    Raises
    ------
    OperationError
        ``OUTSIDE_PRODUCT_REGION`` for a non-autonomous model with ``t``
        inside the gauge ramp.
    """
    t = model.t_plus if t is None else float(t)
    if not model.t_minus <= t <= model.t_plus:
        raise OperationError(ErrorCode.OUTSIDE_PRODUCT_REGION, "slice lies outside the cylinder")
    if not model.is_autonomous and not model.in_product_region(t):
        raise OperationError(ErrorCode.OUTSIDE_PRODUCT_REGION, f"t = {t} lies inside the gauge ramp")
    future = _chiral_nonnegative_from_kernel(model.dirac_at(model.t_plus), ray)
    past = _chiral_nonnegative_from_kernel(model.dirac_at(model.t_minus), ray)
    to_future = evolve_between(model, t, model.t_plus).U.entries
    from_past = evolve_between(model, model.t_minus, t).U.entries
    p_future = np.linalg.solve(to_future, future @ to_future)
    p_past = from_past @ past @ np.linalg.inv(from_past)
    return complex(np.trace(p_future - p_past))


def duality_check(model: CylinderModel, t_end: float | None = None) -> float:
    """``|| U_dual^T n U - n ||_2`` for the doubled evolution and its transpose system.

    The bilinear pairing ``(u, v) -> v^T n u`` is conserved because the
    doubled generator anticommutes with ``n``; this holds for complex flux.
    """
    t_end = model.t_plus if t_end is None else t_end
    U, *_ = _evolve(model, model.t_minus, t_end, doubled=True)
    dual, *_ = _evolve(model, model.t_minus, t_end, doubled=True, transpose=True)
    normal = clifford_normal(U.shape[0] // 2)
    return float(np.linalg.norm(dual.T @ normal @ U - normal, 2))


def index_report(model: CylinderModel, ray: RaySpec | None = None) -> IndexReport:
    """All three index routes for one model."""
    pair = fredholm_pair_index(model, ray)
    flow = spectral_flow(model)
    xi_plus, xi_minus, curvature, rhs = xi_index_rhs(model, ray)
    residuals = dict(pair.residuals)
    residuals["flow_mismatch"] = abs(pair.rounded_index - flow)
    residuals["boundary_formula"] = abs(pair.trace_index - rhs)
    return IndexReport(
        trace_index=pair.trace_index,
        rounded_index=pair.rounded_index,
        spectral_flow=flow,
        xi_plus=xi_plus,
        xi_minus=xi_minus,
        curvature_integral=curvature,
        rhs=rhs,
        residuals=residuals,
    )
