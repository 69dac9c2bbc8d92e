"""Explicit propagators of product spacetimes ``R x S^1`` in the mode basis.

The Dirac kernels use the convention ``Dirac = i n (d/dt + i D)`` where ``n``
is the Clifford action of the unit normal, ``n @ n = -1``. For a single
chirality block ``D`` the doubled spinor space carries ``diag(D, -D)`` and
``n = [[0, i], [i, 0]] (x) 1``, which anticommutes with the doubled operator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
import scipy.linalg

from .errors import ErrorCode, OperationError
from .spectral import (
    DEFAULT_CLUSTER_TOL,
    OperatorMatrix,
    RaySpec,
    WeightedExpTrace,
    complex_power,
    frequency_split,
    generalized_kernel_projector,
    schur_clusters,
)
from .validation import as_operator_matrix

__all__ = [
    "KERNEL_KINDS",
    "KernelFamily",
    "RegularizedTrace",
    "SpacetimeGrid",
    "apply_propagator",
    "clifford_normal",
    "doubled_dirac",
    "eval_kernel",
    "fundamental_solution_errors",
    "regularized_diagonal",
]

KERNEL_KINDS = ("feynman_wave", "feynman_dirac", "retarded", "advanced", "regularized_diff")

Side = Literal["+", "-"] | None


def clifford_normal(dim: int) -> np.ndarray:
    """``[[0, i], [i, 0]] (x) 1_dim`` on the doubled spinor space."""
    return np.kron(np.array([[0, 1j], [1j, 0]]), np.eye(dim))


def doubled_dirac(D) -> OperatorMatrix:
    """``diag(D, -D)``: both chirality blocks of a circle Dirac operator."""
    mat = as_operator_matrix(D)
    zero = np.zeros_like(mat)
    labels = getattr(D, "mode_labels", None)
    return OperatorMatrix(np.block([[mat, zero], [zero, -mat]]), mode_labels=None if labels is None else labels * 2)


def _indicators(t: float, side: Side) -> tuple[float, float]:
    """Values of the closed indicators of ``[0, inf)`` and ``(-inf, 0]``."""
    if t > 0:
        return 1.0, 0.0
    if t < 0:
        return 0.0, 1.0
    if side == "+":
        return 1.0, 0.0
    if side == "-":
        return 0.0, 1.0
    return 1.0, 1.0


@dataclass
class KernelFamily:
    """A propagator kernel ``t -> k(t)`` on the product spacetime.

    Parameters
    ----------
    kind : str
        One of :data:`KERNEL_KINDS`.
    base_operator : OperatorMatrix
        The Laplace-type matrix for ``feynman_wave`` (and for retarded or
        advanced kernels with ``equation="wave"``), the Dirac-type matrix
        otherwise.
    ray : RaySpec, optional
    clifford_normal : ndarray, optional
        Unit-normal symbol ``n`` with ``n @ n = -1``; defaults to ``i * 1``,
        which is the action of the doubled symbol on one chirality block.
    equation : {"dirac", "wave"}, optional
        Selects the equation for retarded and advanced kernels.
    """

    kind: str
    base_operator: object
    ray: RaySpec | None = None
    clifford_normal: np.ndarray | None = None
    equation: str | None = None
    cluster_tol: float = DEFAULT_CLUSTER_TOL
    _cache: dict = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise OperationError(ErrorCode.CONFIG_INVALID, f"unknown kernel kind {self.kind!r}")
        self.ray = self.ray or RaySpec()
        self.matrix = as_operator_matrix(self.base_operator)
        if self.equation is None:
            self.equation = "wave" if self.kind == "feynman_wave" else "dirac"
        if self.kind == "feynman_wave" and self.equation != "wave":
            raise OperationError(ErrorCode.CONFIG_INVALID, "feynman_wave kernels solve the wave equation")
        if self.kind in ("feynman_dirac", "regularized_diff") and self.equation != "dirac":
            raise OperationError(ErrorCode.CONFIG_INVALID, f"{self.kind} kernels solve the Dirac equation")
        if self.clifford_normal is None:
            self.clifford_normal = 1j * np.eye(self.dim)
        self.clifford_normal = np.asarray(self.clifford_normal, dtype=complex)

    @classmethod
    def from_chiral(cls, kind: str, D, ray: RaySpec | None = None, **kwargs) -> "KernelFamily":
        """Family on the doubled spinor space of a single chirality block ``D``."""
        doubled = doubled_dirac(D)
        return cls(kind, doubled, ray, clifford_normal(as_operator_matrix(D).shape[0]), **kwargs)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def _spectral(self) -> dict:
        if self._cache:
            return self._cache
        if self.equation == "dirac":
            proj, _ = frequency_split(self.matrix, self.ray, self.cluster_tol)
            self._cache.update(p_ge=proj.p_ge, p_lt=proj.p_lt)
        else:
            decomp = schur_clusters(self.matrix, self.cluster_tol)
            p0 = generalized_kernel_projector(decomp)
            self._cache.update(
                sqrt=complex_power(decomp, 0.5, self.ray),
                inv_sqrt=complex_power(decomp, -0.5, self.ray),
                p0=p0,
                nil=self.matrix @ p0,
            )
        return self._cache

    def _zero_block_sine(self, t: float) -> np.ndarray:
        """``sum_k (-1)^k t^{2k+1} A^k / (2k+1)!`` on the generalized kernel."""
        cache = self._spectral()
        out = np.zeros((self.dim, self.dim), dtype=complex)
        term = cache["p0"].copy()
        for k in range(self.dim + 1):
            if not np.any(term):
                break
            out += (-1) ** k * t ** (2 * k + 1) / math.factorial(2 * k + 1) * term
            term = cache["nil"] @ term
        return out

    def _wave_sine(self, t: float) -> np.ndarray:
        """``sin(t A^{1/2}) A^{-1/2}`` including the generalized kernel."""
        cache = self._spectral()
        rot = scipy.linalg.expm(1j * t * cache["sqrt"])
        inv_rot = scipy.linalg.expm(-1j * t * cache["sqrt"])
        return (rot - inv_rot) / 2j @ cache["inv_sqrt"] + self._zero_block_sine(t)

    def evaluate(self, t: float, side: Side = None) -> np.ndarray:
        t = float(t)
        future, past = _indicators(t, side)
        if self.equation == "wave":
            if self.kind == "feynman_wave":
                cache = self._spectral()
                out = 0.5j * scipy.linalg.expm(-1j * abs(t) * cache["sqrt"]) @ cache["inv_sqrt"]
                if future:
                    out = out + self._zero_block_sine(t)
                return out
            if self.kind == "retarded":
                return future * self._wave_sine(t)
            return -past * self._wave_sine(t)
        evolution = scipy.linalg.expm(-1j * t * self.matrix)
        n = self.clifford_normal
        if self.kind == "retarded":
            return 1j * future * evolution @ n
        if self.kind == "advanced":
            return -1j * past * evolution @ n
        cache = self._spectral()
        if self.kind == "feynman_dirac":
            return 1j * (future * cache["p_ge"] - past * cache["p_lt"]) @ evolution @ n
        # feynman minus the half sum of retarded and advanced kernels
        half_sum = 0.5j * (future - past) * evolution
        return (1j * (future * cache["p_ge"] - past * cache["p_lt"]) @ evolution - half_sum) @ n


def eval_kernel(fam: KernelFamily, t: float, side: Side = None) -> OperatorMatrix:
    """Kernel of ``fam`` at time separation ``t``.

    Parameters
    ----------
    fam : KernelFamily
    t : float
    side : {"+", "-"}, optional
        One-sided limit at ``t = 0``. Without it both closed indicators equal
        one at the origin.
    """
    return OperatorMatrix(fam.evaluate(t, side))


@dataclass(frozen=True)
class SpacetimeGrid:
    """Section sampled on a uniform time grid.

    Attributes
    ----------
    t_nodes : ndarray
        At least 8 uniformly spaced times.
    values : ndarray
        ``(len(t_nodes), dim)`` mode coefficients per node.
    """

    t_nodes: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.t_nodes, dtype=float)
        values = np.asarray(self.values, dtype=complex)
        if nodes.ndim != 1 or nodes.size < 8:
            raise OperationError(ErrorCode.CONFIG_INVALID, "a spacetime grid needs at least 8 nodes")
        steps = np.diff(nodes)
        if np.any(steps <= 0) or np.ptp(steps) > 1e-9 * steps[0]:
            raise OperationError(ErrorCode.CONFIG_INVALID, "grid nodes must be uniform and increasing")
        if values.ndim != 2 or values.shape[0] != nodes.size:
            raise OperationError(ErrorCode.CONFIG_INVALID, "values must have one row per node")
        object.__setattr__(self, "t_nodes", nodes)
        object.__setattr__(self, "values", values)

    @property
    def h_t(self) -> float:
        return float(self.t_nodes[1] - self.t_nodes[0])

    def with_values(self, values) -> "SpacetimeGrid":
        return SpacetimeGrid(self.t_nodes, values)


def apply_propagator(fam: KernelFamily, u: SpacetimeGrid) -> SpacetimeGrid:
    """Time convolution ``(G u)(t) = int k(t - s) u(s) ds``.

    The integral is split at ``s = t`` and each half is integrated with the
    trapezoid rule, so the node on the kink contributes the two one-sided
    limits of the kernel with half weight each.

    Raises
    ------
    OperationError
        ``SUPPORT_VIOLATION`` if ``u`` is nonzero on the outer 10% of nodes.
    """
    count = u.t_nodes.size
    margin = max(1, int(math.ceil(0.1 * count)))
    if np.any(u.values[:margin] != 0) or np.any(u.values[-margin:] != 0):
        raise OperationError(ErrorCode.SUPPORT_VIOLATION, "source must vanish on the outer 10% of nodes")
    if u.values.shape[1] != fam.dim:
        raise OperationError(ErrorCode.CONFIG_INVALID, "section dimension does not match the kernel")
    h = u.h_t
    out = np.zeros_like(u.values)
    for lag in range(-(count - 1), count):
        if lag == 0:
            kernel = 0.5 * (fam.evaluate(0.0, "+") + fam.evaluate(0.0, "-"))
        else:
            kernel = fam.evaluate(lag * h)
        # out[i] += k((i - j) h) u[j] with i - j = lag
        if lag >= 0:
            out[lag:] += u.values[: count - lag] @ kernel.T
        else:
            out[:lag] += u.values[-lag:] @ kernel.T
    return u.with_values(h * out)


class RegularizedTrace:
    """``phi(t) = -(i/2) Tr((p_>= - p_<) e^{-itD})`` for arrays of times.

    For ``t != 0`` this is the trace of the regularized Dirac kernel composed
    with the normal symbol.

    Attributes
    ----------
    h : int
        Dimension of the generalized kernel of ``D``.
    spectral_radius : float
    """

    def __init__(self, D, ray: RaySpec | None = None, cluster_tol: float = DEFAULT_CLUSTER_TOL):
        mat = as_operator_matrix(D)
        proj, _ = frequency_split(mat, ray, cluster_tol)
        decomp = schur_clusters(mat, cluster_tol)
        self._trace = WeightedExpTrace(decomp, proj.p_ge - proj.p_lt)
        self.h = int(round(np.trace(proj.p_0).real))
        self.spectral_radius = float(max(abs(cl.center) for cl in decomp.clusters))

    def __call__(self, t):
        return -0.5j * self._trace(-1j * np.asarray(t, dtype=float))


def regularized_diagonal(D, ray: RaySpec | None = None, t=0.0, cluster_tol: float = DEFAULT_CLUSTER_TOL):
    """Traced regularized Feynman kernel ``-(i/2) Tr((p_>= - p_<) e^{-itD})``.

    ``t`` may be a scalar or an array.
    """
    value = RegularizedTrace(D, ray, cluster_tol)(t)
    return complex(value) if np.ndim(value) == 0 else value


def _smooth_bump(t: np.ndarray, center: float, half_width: float) -> np.ndarray:
    r = (t - center) / half_width
    out = np.zeros_like(t)
    inside = np.abs(r) < 1
    out[inside] = np.exp(-1.0 / (1.0 - r[inside] ** 2))
    return out


def fundamental_solution_errors(
    fam: KernelFamily, refinements=(100, 200, 400), t_span: float = 4.0, seed: int = 0
) -> np.ndarray:
    """Relative L2 residual of ``P (G u) - u`` for a bump source on refined grids.

    ``P`` is ``d^2/dt^2 + A`` for wave kernels and ``i n (d/dt + i D)`` for
    Dirac kernels, both discretised with centred differences. The source is a
    smooth bump in time times a fixed random mode vector.

    Parameters
    ----------
    fam : KernelFamily
    refinements : sequence of int
        Numbers of time steps; consecutive entries should double.
    t_span : float
    seed : int

    Returns
    -------
    ndarray
        One error per refinement.
    """
    rng = np.random.default_rng(seed)
    direction = rng.normal(size=fam.dim) + 1j * rng.normal(size=fam.dim)
    errors = []
    for steps in refinements:
        nodes = np.linspace(0.0, t_span, int(steps) + 1)
        u = SpacetimeGrid(nodes, np.outer(_smooth_bump(nodes, t_span / 2, t_span / 4), direction))
        w = apply_propagator(fam, u).values
        h = u.h_t
        if fam.equation == "wave":
            applied = (w[2:] - 2 * w[1:-1] + w[:-2]) / h**2 + w[1:-1] @ fam.matrix.T
        else:
            applied = 1j * ((w[2:] - w[:-2]) / (2 * h) + 1j * w[1:-1] @ fam.matrix.T) @ fam.clifford_normal.T
        residual = np.sum(np.abs(applied - u.values[1:-1]) ** 2)
        errors.append(math.sqrt(residual / np.sum(np.abs(u.values) ** 2)))
    return np.asarray(errors)
