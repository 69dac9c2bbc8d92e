"""Hadamard coefficients of ``P = box^nabla + B`` on flat Minkowski space.

Coordinates are ``x = (x_1, ..., x_n)`` with ``x_1`` timelike, ``nabla = d - iA``
and ``box^nabla = nabla_1**2 - sum_j nabla_j**2``.  With ``z = x - y`` the
coefficients ``V_k(x, y)`` satisfy

    z . nabla V_k + k V_k = -k P V_{k-1},   V_0(y, y) = 1,

which is solved degree by degree in the Taylor expansion in ``z``: the
Euler operator ``z . d`` acts on degree-``d`` terms as multiplication by ``d``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .constants import DENSITY_PHASE
from .distributions import dcoeff_Ctilde
from .errors import ErrorCode, OperationError
from .operators import CylinderModel, GaugePath
from .polynomials import MatrixJet, binomial_shift

__all__ = [
    "ConstantField",
    "PolynomialField",
    "TimeProfileField",
    "FourierField",
    "SumField",
    "FlatOperatorSpec",
    "HadamardDiagonal",
    "TransportSolution",
    "solve_transport",
    "diagonal_coefficients",
    "transport_residual",
    "cylinder_operator_specs",
    "index_density",
    "integrated_index_density",
    "calibrate_density_phase",
    "density_matches_calibration",
    "singularity_coefficients",
]


# --------------------------------------------------------------------------
# coefficient fields: matrix-valued functions with exact local Taylor jets
# --------------------------------------------------------------------------


class _Field:
    rank: int

    def jet(self, center, nvars: int, order: int) -> MatrixJet:  # pragma: no cover - interface
        raise NotImplementedError

    def value(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.jet(x, x.size, 0).value_at_origin

    def __add__(self, other: "_Field") -> "SumField":
        return SumField((self, other))


@dataclass(frozen=True)
class ConstantField(_Field):
    """Constant matrix."""

    matrix: np.ndarray

    @property
    def rank(self) -> int:
        return np.atleast_2d(self.matrix).shape[0]

    def jet(self, center, nvars, order):
        return MatrixJet.constant(self.matrix, nvars, order)


@dataclass(frozen=True)
class PolynomialField(_Field):
    """``sum_alpha c_alpha x^alpha`` with matrix coefficients given as ``{alpha: matrix}``."""

    terms: dict

    @property
    def rank(self) -> int:
        return np.atleast_2d(next(iter(self.terms.values()))).shape[0]

    def jet(self, center, nvars, order):
        shifted = binomial_shift(self.terms, center, order)
        return MatrixJet.from_terms(shifted, nvars, order, self.rank)


@dataclass(frozen=True)
class TimeProfileField(_Field):
    """``f(x_var) * matrix`` for a scalar profile with exact Taylor data.

    Parameters
    ----------
    taylor : callable
        ``taylor(x0, degree)`` returns the Taylor coefficients of ``f`` at ``x0``.
    matrix : ndarray
    var : int
        Coordinate the profile depends on.
    """

    taylor: object
    matrix: np.ndarray
    var: int = 0

    @property
    def rank(self) -> int:
        return np.atleast_2d(self.matrix).shape[0]

    def jet(self, center, nvars, order):
        coeffs = self.taylor(float(center[self.var]), order)
        terms = {}
        for j, c in enumerate(coeffs):
            alpha = [0] * nvars
            alpha[self.var] = j
            terms[tuple(alpha)] = c * np.atleast_2d(self.matrix)
        return MatrixJet.from_terms(terms, nvars, order, self.rank)


@dataclass(frozen=True)
class FourierField(_Field):
    """``sum_m V_m exp(i m x_var)`` for a finite set of matrix modes ``{m: V_m}``."""

    modes: dict
    var: int = 1

    @property
    def rank(self) -> int:
        return np.atleast_2d(next(iter(self.modes.values()))).shape[0]

    def jet(self, center, nvars, order):
        x0 = float(center[self.var])
        terms = {}
        for j in range(order + 1):
            alpha = [0] * nvars
            alpha[self.var] = j
            total = sum(
                np.atleast_2d(np.asarray(v, dtype=complex)) * (1j * m) ** j * np.exp(1j * m * x0)
                for m, v in self.modes.items()
            )
            terms[tuple(alpha)] = total / math.factorial(j)
        return MatrixJet.from_terms(terms, nvars, order, self.rank)


@dataclass(frozen=True)
class SumField(_Field):
    parts: tuple

    @property
    def rank(self) -> int:
        return self.parts[0].rank

    def jet(self, center, nvars, order):
        out = self.parts[0].jet(center, nvars, order)
        for p in self.parts[1:]:
            out = out + p.jet(center, nvars, order)
        return out


# --------------------------------------------------------------------------
# operator data and solver
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class FlatOperatorSpec:
    """``P = box^nabla + B`` on flat ``R^n`` with ``nabla = d - iA``.

    Parameters
    ----------
    n : int
        Spacetime dimension.
    potential : field
        Zero-order term ``B``.
    connection : sequence of fields, optional
        Components ``A_1..A_n``; ``None`` entries (or no connection) mean zero.
    """

    n: int
    potential: _Field
    connection: Optional[Sequence[Optional[_Field]]] = None

    @property
    def rank(self) -> int:
        return self.potential.rank

    @property
    def metric(self) -> np.ndarray:
        return np.array([1.0] + [-1.0] * (self.n - 1))

    def connection_jets(self, center, order) -> list[Optional[MatrixJet]]:
        if self.connection is None:
            return [None] * self.n
        return [None if a is None else a.jet(center, self.n, order) for a in self.connection]


@dataclass
class HadamardDiagonal:
    """On-diagonal values ``V_0(x, x), ..., V_kmax(x, x)``."""

    x: np.ndarray
    values: list


@dataclass
class TransportSolution:
    """Taylor jets of ``V_k(y + z, y)`` in ``z`` about the base point ``y``.

    ``valid_degree[k]`` is the highest degree that is exact for ``V_k``.
    """

    spec: FlatOperatorSpec
    y: np.ndarray
    jets: list
    valid_degree: list

    def __call__(self, k: int, x) -> np.ndarray:
        return self.jets[k](np.asarray(x, dtype=float) - self.y)


def _covariant(jet: MatrixJet, a: Optional[MatrixJet], var: int) -> MatrixJet:
    """``(d_var - i A_var) jet``."""
    out = jet.derivative(var)
    if a is not None:
        out = out - (a @ jet).scale(1j)
    return out


def _apply_operator(spec: FlatOperatorSpec, jet: MatrixJet, A: list, B: MatrixJet) -> MatrixJet:
    out = B @ jet
    for var, sign in enumerate(spec.metric):
        first = _covariant(jet, A[var], var)
        out = out + _covariant(first, A[var], var).scale(sign)
    return out


def _z_dot_A(A: list) -> Optional[MatrixJet]:
    total = None
    for var, a in enumerate(A):
        if a is None:
            continue
        term = a.times_coordinate(var)
        total = term if total is None else total + term
    return total


def solve_transport(spec: FlatOperatorSpec, y, k_max: int = 3, order: int = 16) -> TransportSolution:
    """Taylor jets of ``V_0 .. V_kmax`` about ``y``.

    ``V_k`` is exact through total degree ``order - 2k``; evaluate the
    result at ``x`` to get ``V_k(x, y)``.
    """
    y = np.asarray(y, dtype=float)
    if y.size != spec.n:
        raise OperationError(ErrorCode.DIMENSION_UNSUPPORTED, f"point has {y.size} coordinates, operator has {spec.n}")
    if order < 2 * k_max:
        raise ValueError("order must be at least 2 * k_max")
    n, r = spec.n, spec.rank
    A = spec.connection_jets(y, order)
    B = spec.potential.jet(y, n, order)
    zA = _z_dot_A(A)
    degrees = MatrixJet._degree_grid(n, order)

    jets: list[MatrixJet] = []
    valid: list[int] = []
    for k in range(k_max + 1):
        top = order - 2 * k
        if k == 0:
            source = None
        else:
            source = _apply_operator(spec, jets[k - 1], A, B).scale(-k)
        vk = MatrixJet.zeros(n, order, r)
        if k == 0:
            vk.coeffs[(0,) * n] = np.eye(r)
        for d in range(0 if k else 1, top + 1):
            rhs = np.zeros_like(vk.coeffs)
            if source is not None:
                rhs = rhs + source.coeffs
            if zA is not None:
                rhs = rhs + (zA @ vk).coeffs * 1j
            mask = (degrees == d)[..., None, None]
            vk.coeffs[...] = np.where(mask, rhs / (d + k), vk.coeffs)
        jets.append(vk)
        valid.append(top)
    return TransportSolution(spec, y, jets, valid)


def diagonal_coefficients(spec: FlatOperatorSpec, x, k_max: int = 3) -> HadamardDiagonal:
    """``V_k(x, x)`` for ``k <= k_max`` from the lowest-order jets only."""
    sol = solve_transport(spec, x, k_max, order=2 * k_max)
    return HadamardDiagonal(np.asarray(x, dtype=float), [j.value_at_origin.copy() for j in sol.jets])


# --------------------------------------------------------------------------
# independent residual of the transport equation by finite differences
# --------------------------------------------------------------------------

_D1 = np.array([1 / 280, -4 / 105, 1 / 5, -4 / 5, 0.0, 4 / 5, -1 / 5, 4 / 105, -1 / 280])
_D2 = np.array([-1 / 560, 8 / 315, -1 / 5, 8 / 5, -205 / 72, 8 / 5, -1 / 5, 8 / 315, -1 / 560])
_OFFSETS = np.arange(-4, 5)


def _fd(func, x, var, step, stencil, power):
    out = 0
    for c, o in zip(stencil, _OFFSETS):
        if c == 0:
            continue
        xs = np.array(x, dtype=float)
        xs[var] += o * step
        out = out + c * func(xs)
    return out / step**power


def transport_residual(sol: TransportSolution, k: int, points, step: float = 1e-2) -> np.ndarray:
    """Relative residual of the transport equation in its geometric form.

    Evaluates ``nabla_{grad Gamma} V_k - (box Gamma / 2 - n + 2k) V_k - 2k P V_{k-1}``
    at each point, with ``Gamma(x) = gamma(x - y)`` and every derivative
    taken by eighth-order central differences of the evaluated solution.
    The scale is ``max(|V_k|, |2k P V_{k-1}|)``.
    """
    spec = sol.spec
    n, metric = spec.n, spec.metric
    y = sol.y

    def gamma(x):
        z = x - y
        return float(np.sum(metric * z * z))

    def conn(var, x):
        if spec.connection is None or spec.connection[var] is None:
            return np.zeros((spec.rank, spec.rank))
        return spec.connection[var].value(x)

    def vk(j):
        return lambda x: sol(j, x)

    out = []
    for x in np.atleast_2d(points):
        x = np.asarray(x, dtype=float)
        dgamma = np.array([_fd(gamma, x, v, step, _D1, 1) for v in range(n)])
        # signature (-,+,...,+): the inverse metric is -diag(metric)
        grad = -metric * dgamma
        box_gamma = sum(metric[v] * _fd(gamma, x, v, step, _D2, 2) for v in range(n))
        V = sol(k, x)
        lhs = -(box_gamma / 2 - n + 2 * k) * V
        for v in range(n):
            cov = _fd(vk(k), x, v, step, _D1, 1) - 1j * conn(v, x) @ V
            lhs = lhs + grad[v] * cov
        rhs = np.zeros_like(V)
        if k > 0:
            W = sol(k - 1, x)
            pw = spec.potential.value(x) @ W
            for v in range(n):
                a = conn(v, x)
                da = _fd(lambda s: conn(v, s), x, v, step, _D1, 1)
                dW = _fd(vk(k - 1), x, v, step, _D1, 1)
                ddW = _fd(vk(k - 1), x, v, step, _D2, 2)
                second = ddW - 1j * da @ W - 2j * a @ dW - a @ a @ W
                pw = pw + metric[v] * second
            rhs = 2 * k * pw
        scale = max(np.linalg.norm(V), np.linalg.norm(rhs), 1e-300)
        out.append(np.linalg.norm(lhs - rhs) / scale)
    return np.array(out)


# --------------------------------------------------------------------------
# twisted cylinder
# --------------------------------------------------------------------------


def _potential_modes(model: CylinderModel) -> dict:
    modes: dict = {}
    for m, v in model.base.potential_coeffs:
        modes[int(m)] = modes.get(int(m), 0) + np.atleast_2d(np.asarray(v, dtype=complex))
    return modes


def cylinder_operator_specs(model: CylinderModel) -> tuple[FlatOperatorSpec, FlatOperatorSpec]:
    """Second-order operators ``(D_R D_L, D_L D_R)`` of the cylinder as flat specs.

    With ``D(t) = -i d_theta + a(t) + V(theta)`` the chiral Lorentzian operators
    are ``D_L = -(d_t + iD)`` and ``D_R = -(d_t - iD)``. Expanding,

        D_R D_L = d_t**2 + D**2 + i a'(t),   D_L D_R = d_t**2 + D**2 - i a'(t),

    and ``D**2 = -(d_theta - iA_theta)**2`` with ``A_theta = -(a(t) + V(theta))``.
    Hence both share the connection and ``B_L = i a'``, ``B_R = -i a'``.
    Coordinates are ``(t, theta)``.
    """
    path: GaugePath = model.gauge_path
    r = model.base.rank
    eye = np.eye(r)

    def a_taylor(t0, degree):
        return path.taylor(t0, degree)

    def adot_taylor(t0, degree):
        full = path.taylor(t0, degree + 1)
        return np.array([(j + 1) * full[j + 1] for j in range(degree + 1)])

    a_theta: _Field = TimeProfileField(a_taylor, -eye, var=0)
    modes = _potential_modes(model)
    if modes:
        a_theta = a_theta + FourierField({m: -v for m, v in modes.items()}, var=1)
    left = FlatOperatorSpec(2, TimeProfileField(adot_taylor, 1j * eye, var=0), (None, a_theta))
    right = FlatOperatorSpec(2, TimeProfileField(adot_taylor, -1j * eye, var=0), (None, a_theta))
    return left, right


def index_density(model: CylinderModel, x, n: int = 2) -> complex:
    """``(tr V_{R,1}(x,x) - tr V_{L,1}(x,x)) / (4 pi)`` at ``x = (t, theta)``.

    The value is complex in general; for real flux paths it is purely
    imaginary (see ``constants.DENSITY_PHASE``).
    """
    if n != 2:
        raise OperationError(ErrorCode.DIMENSION_UNSUPPORTED, "the index density is implemented for n = 2 only")
    left, right = cylinder_operator_specs(model)
    v_left = diagonal_coefficients(left, x, 1).values[1]
    v_right = diagonal_coefficients(right, x, 1).values[1]
    return complex(np.trace(v_right) - np.trace(v_left)) / (4 * np.pi)


def integrated_index_density(model: CylinderModel, nodes: int = 8, theta_nodes: int = 4) -> complex:
    """``int_M deltaJ^- dt dtheta`` by Gauss-Legendre on each polynomial piece of the path."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    thetas = 2 * np.pi * np.arange(theta_nodes) / theta_nodes
    edges = model.gauge_path.breakpoints()
    total = 0j
    for lo, hi in zip(edges[:-1], edges[1:]):
        ts = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
        for t, wt in zip(ts, w):
            row = np.mean([index_density(model, (t, th)) for th in thetas]) * 2 * np.pi
            total += 0.5 * (hi - lo) * wt * row
    return total


def calibrate_density_phase(K: int = 8) -> complex:
    """Phase of ``int deltaJ^- / flux`` on the path ``0.3 -> 1.3``; compare with ``DENSITY_PHASE``."""
    model = CylinderModel.from_fluxes(0.3, 1.3, K)
    phase = integrated_index_density(model) / (1.3 - 0.3)
    return complex(np.round(phase.real), np.round(phase.imag))


def density_matches_calibration(value: complex, index: float, tol: float = 1e-4) -> bool:
    """Whether ``value`` equals ``DENSITY_PHASE * index`` within ``tol``."""
    return abs(value - DENSITY_PHASE * index) <= tol


def singularity_coefficients(model: CylinderModel, y, Lambda: float = 1.0) -> dict:
    """Coefficients of the logarithmic and constant terms of the local Feynman parametrix at ``y``.

    For ``n = 2``:
    ``c_tilde = tr(D_L V_0 nslash) / (2 pi)`` at the diagonal,
    ``a_tilde_0 = (euler_gamma - log 2 - i pi (Lambda - 1)/2) c_tilde`` and
    ``a_tilde_1 = tr V_0(y, y) * dCtilde/dbeta(-1, 2, 2 Lambda) / (4 pi)``.
    Here ``nslash`` acts between the chiral halves as multiplication by ``i``.
    """
    left, _ = cylinder_operator_specs(model)
    sol = solve_transport(left, y, k_max=0, order=2)
    v0 = sol.jets[0]
    A = left.connection_jets(np.asarray(y, dtype=float), 2)
    d_t = _covariant(v0, A[0], 0).value_at_origin
    # D_L = -(d_t + i D) and i D = d_theta - i A_theta acting on the first slot
    d_theta = _covariant(v0, A[1], 1).value_at_origin
    dl_v0 = -(d_t + d_theta)
    c_tilde = complex(np.trace(dl_v0 * 1j)) / (2 * np.pi)
    a0 = (np.euler_gamma - np.log(2) - 1j * np.pi * (Lambda - 1) / 2) * c_tilde
    a1 = complex(np.trace(v0.value_at_origin)) * dcoeff_Ctilde(-1, 2, 2 * Lambda) / (4 * np.pi)
    return {"c_tilde": c_tilde, "a_tilde_0": a0, "a_tilde_1": a1}
