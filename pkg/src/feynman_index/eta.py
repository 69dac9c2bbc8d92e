"""Eta and xi invariants of Dirac-type matrices by three independent routes.

``eta_zeta`` continues the sign-weighted zeta function of a lattice spectrum
in closed form, ``eta_heat`` fits the small-time expansion of the weighted heat
trace, and ``eta_smeared`` fits the Gaussian smearing of the regularized
propagator trace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ErrorCode, OperationError
from .operators import CircleOperatorSpec, build_circle_dirac
from .propagator import RegularizedTrace
from .spectral import (
    DEFAULT_CLUSTER_TOL,
    RaySpec,
    WeightedExpTrace,
    frequency_split,
    log_on_cut,
)
from .validation import as_operator_matrix

__all__ = [
    "EtaResult",
    "default_time_grid",
    "eta_heat",
    "eta_smeared",
    "eta_zeta",
    "fit_small_time",
    "heat_trace",
    "smeared_trace",
]

# condition-number ceiling for the small-time design matrix
MAX_FIT_CONDITION = 1e10
# half-width of the Gaussian smearing window in units of sqrt(4 s)
_SMEAR_HALF_WIDTH = 8.0
# spectral margin that keeps the trapezoid aliasing term below e^{-225}
_SMEAR_ALIAS_MARGIN = 30.0


@dataclass(frozen=True)
class EtaResult:
    """Eta invariant, kernel dimension and their half-sum for one operator.

    Attributes
    ----------
    eta : complex
    h : int
        Dimension of the generalized kernel.
    xi : complex
        Always ``(eta + h) / 2``.
    method : str
        One of ``"zeta"``, ``"heat_fit"``, ``"smeared"``.
    error_estimate : float
    fit_diagnostics : dict, optional
    """

    eta: complex
    h: int
    xi: complex
    method: str
    error_estimate: float
    fit_diagnostics: dict | None = field(default=None, compare=False)

    @classmethod
    def from_eta(cls, eta: complex, h: int, method: str, error_estimate: float, diagnostics=None) -> "EtaResult":
        eta = complex(eta)
        return cls(eta, int(h), (eta + h) / 2, method, float(error_estimate), diagnostics)

    @classmethod
    def from_xi(cls, xi: complex, h: int, method: str, error_estimate: float, diagnostics=None) -> "EtaResult":
        xi = complex(xi)
        return cls(2 * xi - h, int(h), xi, method, float(error_estimate), diagnostics)


def _truncation_order(D) -> int:
    labels = getattr(D, "mode_labels", None)
    if labels:
        return max(abs(int(k)) for k in labels)
    mat = as_operator_matrix(D)
    return max(1, int(np.max(np.abs(np.linalg.eigvals(mat)))))


def default_time_grid(K: int, points: int = 10) -> np.ndarray:
    """Geometric grid on ``[20/K^2, 200/K^2]``.

    The lower end keeps the discarded modes below ``e^{-20}``; the upper end
    keeps the quadratic remainder of the expansion small.
    """
    return np.geomspace(20.0 / K**2, 200.0 / K**2, points)


def _check_grid(grid, K: int) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 6:
        raise OperationError(ErrorCode.CONFIG_INVALID, "small-time grid needs at least 6 points")
    if np.any(grid <= 0):
        raise OperationError(ErrorCode.CONFIG_INVALID, "small-time grid must be positive")
    if grid.min() < 1.0 / K**2:
        raise OperationError(
            ErrorCode.TRUNCATION_WINDOW_VIOLATED,
            f"grid reaches {grid.min():.3g} below 1/K^2 = {1.0 / K**2:.3g}",
        )
    return np.sort(grid)


def _design(grid: np.ndarray, ansatz: str, extra: bool = False) -> np.ndarray:
    cols = [grid**-0.5, np.ones_like(grid), np.log(grid), grid**0.5]
    if ansatz == "extended":
        cols.append(grid)
    elif ansatz != "minimal":
        raise OperationError(ErrorCode.CONFIG_INVALID, f"unknown ansatz {ansatz!r}")
    if extra:
        cols.append(grid**2 if ansatz == "extended" else grid)
    return np.stack(cols, axis=1)


def fit_small_time(grid, values, ansatz: str = "extended") -> dict:
    """Least-squares fit of ``a0 t^{-1/2} + b + c log t + d t^{1/2} [+ e t]``.

    Parameters
    ----------
    grid : array_like
        Sample times.
    values : array_like
        Real or complex samples.
    ansatz : {"extended", "minimal"}
        ``"minimal"`` drops the linear term.

    Returns
    -------
    dict
        ``coefficients``, ``constant``, ``log_coefficient``, ``residual``,
        ``condition`` and ``error_estimate``. The error estimate is twice the
        shift of the constant when one more power of ``t`` joins the basis,
        plus the largest residual.

    Raises
    ------
    OperationError
        ``FIT_ILL_CONDITIONED`` when the design matrix condition exceeds 1e10.
    """
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(values, dtype=complex)
    design = _design(grid, ansatz)
    cond = float(np.linalg.cond(design))
    if not cond <= MAX_FIT_CONDITION:
        raise OperationError(ErrorCode.FIT_ILL_CONDITIONED, f"design matrix condition {cond:.3g} exceeds 1e10")
    coeffs, *_ = np.linalg.lstsq(design, values, rcond=None)
    residual = float(np.max(np.abs(values - design @ coeffs)))
    augmented = _design(grid, ansatz, extra=True)
    if augmented.shape[1] < grid.size:
        aug_coeffs, *_ = np.linalg.lstsq(augmented, values, rcond=None)
        model_shift = abs(aug_coeffs[1] - coeffs[1])
    else:
        model_shift = 0.0
    return {
        "coefficients": coeffs,
        "constant": complex(coeffs[1]),
        "log_coefficient": complex(coeffs[2]),
        "residual": residual,
        "condition": cond,
        "error_estimate": 2.0 * float(model_shift) + residual,
    }


def _diagnostics(fit: dict) -> dict:
    return {
        "coefficients": [complex(c) for c in fit["coefficients"]],
        "log_coefficient": fit["log_coefficient"],
        "residual": fit["residual"],
        "condition": fit["condition"],
    }


def _lattice_from_matrix(D) -> list[tuple[int, complex]]:
    """Per-component ``(K, flux)`` for a diagonal matrix ``diag(k + a_r)``."""
    labels = getattr(D, "mode_labels", None)
    mat = as_operator_matrix(D)
    if labels is None:
        raise OperationError(ErrorCode.NO_CLOSED_FORM_TAIL, "matrix carries no Fourier mode labels")
    if np.any(np.abs(mat - np.diag(np.diag(mat))) > 0):
        raise OperationError(ErrorCode.NO_CLOSED_FORM_TAIL, "operator has a potential; use eta_heat")
    labels = np.asarray(labels)
    K = int(np.max(np.abs(labels)))
    nmodes = 2 * K + 1
    if labels.size % nmodes:
        raise OperationError(ErrorCode.NO_CLOSED_FORM_TAIL, "mode labels do not cover -K..K uniformly")
    rank = labels.size // nmodes
    expected = np.repeat(np.arange(-K, K + 1), rank)
    if not np.array_equal(labels, expected):
        raise OperationError(ErrorCode.NO_CLOSED_FORM_TAIL, "mode labels are not in mode-major order")
    offsets = np.diag(mat) - labels
    components = []
    for r in range(rank):
        comp = offsets[r::rank]
        if np.max(np.abs(comp - comp[0])) > 1e-12 * max(1.0, K):
            raise OperationError(ErrorCode.NO_CLOSED_FORM_TAIL, "diagonal is not a shifted integer lattice")
        components.append((K, complex(comp[0])))
    return components


def _sqrt_sign(lam: complex, theta: float) -> int:
    """+1 when the cut square root of ``lam^2`` returns ``lam``, -1 when it returns ``-lam``."""
    root = np.exp(0.5 * log_on_cut(lam * lam, theta))
    return 1 if abs(root - lam) <= abs(root + lam) else -1


def eta_zeta(D, ray: RaySpec | None = None, cluster_tol: float = DEFAULT_CLUSTER_TOL) -> EtaResult:
    """Eta invariant of ``-i d/dtheta + a`` by closed-form zeta continuation.

    The kept modes ``|k| <= K`` are counted explicitly with the cut square
    root deciding their sign. The two tails are Hurwitz zeta functions whose
    values at 0 are ``1/2 - (K + 1 +- a)``, which gives ``-2a`` per component.

    Parameters
    ----------
    D : CircleOperatorSpec or OperatorMatrix
        Flux-only operator; a matrix must be diagonal with Fourier labels.
    ray : RaySpec, optional

    Raises
    ------
    OperationError
        ``NO_CLOSED_FORM_TAIL`` for operators with a potential.
    """
    ray = ray or RaySpec()
    if isinstance(D, CircleOperatorSpec):
        if D.has_potential:
            raise OperationError(ErrorCode.NO_CLOSED_FORM_TAIL, "operator has a potential; use eta_heat")
        components = [(D.K, D.flux)] * D.rank
    else:
        components = _lattice_from_matrix(D)
    eta = 0j
    h = 0
    for K, flux in components:
        for k in range(-K, K + 1):
            lam = k + flux
            if abs(lam) <= cluster_tol:
                h += 1
                continue
            w = lam * lam * np.exp(-1j * ray.theta)
            if w.real > 0 and abs(w.imag) <= cluster_tol:
                raise OperationError(ErrorCode.EIGENVALUE_ON_RAY, f"square of eigenvalue {lam} lies on the cut")
            eta += _sqrt_sign(lam, ray.theta)
        # first discarded modes must already follow the large-|k| branch
        if _sqrt_sign(K + 1 + flux, ray.theta) != 1 or _sqrt_sign(-K - 1 + flux, ray.theta) != -1:
            raise OperationError(ErrorCode.NO_CLOSED_FORM_TAIL, "truncation too small for the tail continuation")
        # zeta_H(0, K+1+a) - zeta_H(0, K+1-a), combined without cancellation
        eta += -2.0 * flux
    return EtaResult.from_eta(eta, h, "zeta", 64 * np.finfo(float).eps * max(1, sum(2 * K + 1 for K, _ in components)))


def heat_trace(D, ray: RaySpec | None = None, cluster_tol: float = DEFAULT_CLUSTER_TOL):
    """Return ``(t -> Tr((p_> - p_<) e^{-t Delta}), h)`` for ``Delta = D^2``."""
    mat = as_operator_matrix(D)
    proj, laplace = frequency_split(mat, ray, cluster_tol)
    weighted = WeightedExpTrace(laplace, proj.p_gt - proj.p_lt)
    h = int(round(np.trace(proj.p_0).real))
    return (lambda t: weighted(-np.asarray(t, dtype=float))), h


def eta_heat(
    D,
    ray: RaySpec | None = None,
    t_grid: Sequence[float] | None = None,
    ansatz: str = "extended",
    cluster_tol: float = DEFAULT_CLUSTER_TOL,
) -> EtaResult:
    """Eta invariant as the constant term of the weighted heat trace.

    Parameters
    ----------
    D : OperatorMatrix or CircleOperatorSpec
    ray : RaySpec, optional
    t_grid : sequence of float, optional
        At least six times, none below ``1/K^2``; defaults to
        :func:`default_time_grid`.
    ansatz : {"extended", "minimal"}

    Raises
    ------
    OperationError
        ``TRUNCATION_WINDOW_VIOLATED`` or ``FIT_ILL_CONDITIONED``.
    """
    if isinstance(D, CircleOperatorSpec):
        D = build_circle_dirac(D)
    K = _truncation_order(D)
    grid = _check_grid(default_time_grid(K) if t_grid is None else t_grid, K)
    trace, h = heat_trace(D, ray, cluster_tol)
    fit = fit_small_time(grid, trace(grid), ansatz)
    return EtaResult.from_eta(fit["constant"], h, "heat_fit", fit["error_estimate"], _diagnostics(fit))


def smeared_trace(D, ray: RaySpec | None = None, cluster_tol: float = DEFAULT_CLUSTER_TOL):
    """Return ``(s -> psi(s), h)`` where ``psi`` smears the regularized trace.

    ``psi(s)`` pairs the regularized propagator trace ``phi(t)`` with the
    Gaussian ``exp(-t^2 / 4s) / sqrt(4 pi s)``. After ``t = 2 sqrt(s) x`` the
    integral is a trapezoid sum over ``|x| <= 8`` with a step fine enough for
    the largest eigenvalue.
    """
    phi = RegularizedTrace(D, ray, cluster_tol)
    spread = phi.spectral_radius

    def psi(s):
        out = []
        for value in np.atleast_1d(np.asarray(s, dtype=float)):
            scale = 2.0 * math.sqrt(value)
            step = 2.0 * math.pi / (scale * spread + _SMEAR_ALIAS_MARGIN)
            count = int(math.ceil(_SMEAR_HALF_WIDTH / step))
            x = np.linspace(-_SMEAR_HALF_WIDTH, _SMEAR_HALF_WIDTH, 2 * count + 1)
            weights = np.exp(-x * x) / math.sqrt(math.pi) * (x[1] - x[0])
            out.append(np.sum(weights * phi(scale * x)))
        return np.asarray(out)

    return psi, phi.h


def eta_smeared(
    D,
    ray: RaySpec | None = None,
    s_grid: Sequence[float] | None = None,
    ansatz: str = "extended",
    cluster_tol: float = DEFAULT_CLUSTER_TOL,
) -> EtaResult:
    """Xi invariant as ``i`` times the constant term of the smeared trace.

    The constant term of ``psi(s)`` is ``-i (eta + h) / 2``; eta is recovered
    as ``2 xi - h``.

    Raises
    ------
    OperationError
        As :func:`eta_heat`.
    """
    if isinstance(D, CircleOperatorSpec):
        D = build_circle_dirac(D)
    K = _truncation_order(D)
    grid = _check_grid(default_time_grid(K) if s_grid is None else s_grid, K)
    psi, h = smeared_trace(D, ray, cluster_tol)
    fit = fit_small_time(grid, psi(grid), ansatz)
    return EtaResult.from_xi(1j * fit["constant"], h, "smeared", fit["error_estimate"], _diagnostics(fit))
