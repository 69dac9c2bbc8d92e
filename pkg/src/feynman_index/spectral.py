"""Functional calculus for finite complex matrices.

Spectral clustering through the Schur form, the projector onto the generalized
kernel, complex powers along a spectral cut, frequency projectors of a
Dirac-type matrix and the semigroup generated by a square root.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np
import scipy.linalg
from scipy.linalg import lapack

from .errors import ErrorCode, LowerHalfPlaneWarning, OperationError
from .validation import as_operator_matrix, check_positive, check_square_finite

__all__ = [
    "DEFAULT_CLUSTER_TOL",
    "Cluster",
    "FrequencyProjectors",
    "OperatorMatrix",
    "RaySpec",
    "SpectralDecomposition",
    "WeightedExpTrace",
    "complex_power",
    "frequency_projectors",
    "frequency_split",
    "generalized_kernel_projector",
    "log_on_cut",
    "schur_clusters",
    "semigroup",
    "strip_bound",
]

DEFAULT_CLUSTER_TOL = 1e-6
# relative threshold for the rank tests that fix nilpotency degrees
NILPOTENCY_RTOL = 1e-8


@dataclass(frozen=True)
class OperatorMatrix:
    """Square complex matrix with optional Fourier labels per basis vector.

    Parameters
    ----------
    entries : array_like, shape (dim, dim)
        Matrix entries; must be finite.
    mode_labels : sequence of int, optional
        Fourier index attached to each basis vector.
    """

    entries: np.ndarray
    mode_labels: tuple[int, ...] | None = None

    def __post_init__(self):
        arr = check_square_finite(self.entries, "entries")
        object.__setattr__(self, "entries", arr)
        if self.mode_labels is not None:
            labels = tuple(int(k) for k in self.mode_labels)
            if len(labels) != arr.shape[0]:
                raise OperationError(
                    ErrorCode.INVALID_OPERATOR,
                    f"mode_labels has length {len(labels)}, expected {arr.shape[0]}",
                )
            object.__setattr__(self, "mode_labels", labels)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)


@dataclass(frozen=True)
class RaySpec:
    """Direction ``arg z = theta`` of the spectral cut, ``0 < theta < 2*pi``."""

    theta: float = math.pi

    def __post_init__(self):
        theta = float(self.theta)
        if not 0.0 < theta < 2.0 * math.pi:
            raise OperationError(ErrorCode.INVALID_OPERATOR, f"ray angle must lie in (0, 2pi), got {theta}")
        object.__setattr__(self, "theta", theta)


@dataclass(frozen=True)
class Cluster:
    """One group of numerically coincident eigenvalues.

    ``basis`` spans the invariant subspace, ``dual_basis`` holds the matching
    rows of the inverse basis so that ``basis @ dual_basis`` is the spectral
    projector, and ``block`` is the restriction of the matrix to the subspace.
    """

    center: complex
    multiplicity: int
    basis: np.ndarray
    nilpotency_degree: int
    dual_basis: np.ndarray = field(repr=False)
    block: np.ndarray = field(repr=False)
    eigenvalues: np.ndarray = field(repr=False)

    @property
    def projector(self) -> np.ndarray:
        return self.basis @ self.dual_basis


@dataclass(frozen=True)
class SpectralDecomposition:
    clusters: tuple[Cluster, ...]
    cluster_tol: float
    dim: int

    def zero_cluster_index(self) -> int | None:
        """Index of the cluster at 0, or ``None`` when 0 is in the resolvent set."""
        for idx, cl in enumerate(self.clusters):
            if abs(cl.center) <= self.cluster_tol:
                return idx
        return None

    def projector(self, indices: Sequence[int]) -> np.ndarray:
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for idx in indices:
            cl = self.clusters[idx]
            out += cl.basis @ cl.dual_basis
        return out

    def apply_function(
        self, derivatives: Callable[[complex, int], Sequence[complex]], indices: Sequence[int] | None = None
    ) -> np.ndarray:
        """Evaluate a holomorphic function on the selected clusters.

        Parameters
        ----------
        derivatives : callable
            ``derivatives(center, m)`` returns ``f(center), f'(center), ...``
            up to order ``m - 1``; the block is expanded in its Taylor series
            about the cluster center, which is exact on nilpotent parts.
        indices : sequence of int, optional
            Clusters to include; the remaining ones are mapped to zero.
        """
        if indices is None:
            indices = range(len(self.clusters))
        out = np.zeros((self.dim, self.dim), dtype=complex)
        simple = [i for i in indices if self.clusters[i].multiplicity == 1]
        if simple:
            vals = np.array([derivatives(self.clusters[i].center, 1)[0] for i in simple])
            left = np.hstack([self.clusters[i].basis for i in simple])
            right = np.vstack([self.clusters[i].dual_basis for i in simple])
            out += (left * vals) @ right
        for i in indices:
            cl = self.clusters[i]
            if cl.multiplicity == 1:
                continue
            m = cl.multiplicity
            nil = cl.block - cl.center * np.eye(m)
            coeffs = derivatives(cl.center, m)
            fblock = np.zeros((m, m), dtype=complex)
            power = np.eye(m, dtype=complex)
            for k in range(m):
                fblock += coeffs[k] / math.factorial(k) * power
                power = power @ nil
            out += cl.basis @ fblock @ cl.dual_basis
        return out


class WeightedExpTrace:
    """Evaluate ``Tr(W exp(z M))`` for many complex scalars ``z`` at once.

    ``W`` must commute with ``M``; the trace is then assembled cluster by
    cluster from the compressions ``dual @ W @ basis``.

    Parameters
    ----------
    decomp : SpectralDecomposition
        Decomposition of ``M``.
    weight : ndarray
        The matrix ``W``.
    """

    def __init__(self, decomp: SpectralDecomposition, weight: np.ndarray):
        simple = [cl for cl in decomp.clusters if cl.multiplicity == 1]
        self._centers = np.array([cl.center for cl in simple], dtype=complex)
        self._weights = np.array(
            [(cl.dual_basis @ weight @ cl.basis)[0, 0] for cl in simple], dtype=complex
        )
        # multi-eigenvalue clusters: Tr(W_c N^k) / k! for the nilpotent part N
        self._blocks = []
        for cl in decomp.clusters:
            if cl.multiplicity == 1:
                continue
            compressed = cl.dual_basis @ weight @ cl.basis
            nil = cl.block - cl.center * np.eye(cl.multiplicity)
            moments, power = [], np.eye(cl.multiplicity, dtype=complex)
            for k in range(cl.multiplicity):
                moments.append(np.trace(compressed @ power) / math.factorial(k))
                power = power @ nil
            self._blocks.append((cl.center, np.array(moments)))

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        flat = z.reshape(-1)
        out = np.exp(np.outer(flat, self._centers)) @ self._weights
        for center, moments in self._blocks:
            series = np.polynomial.polynomial.polyval(flat, moments)
            out = out + np.exp(flat * center) * series
        return out.reshape(z.shape)


class FrequencyProjectors(NamedTuple):
    p_gt: np.ndarray
    p_lt: np.ndarray
    p_0: np.ndarray

    @property
    def p_ge(self) -> np.ndarray:
        return self.p_gt + self.p_0

    @property
    def p_le(self) -> np.ndarray:
        return self.p_lt + self.p_0


def _link_clusters(eigs: np.ndarray, tol: float) -> list[list[int]]:
    """Single-linkage grouping of eigenvalues closer than ``tol``."""
    n = len(eigs)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    order = np.lexsort((eigs.imag, eigs.real))
    # candidates are neighbours in a sweep over the real part
    for a_pos in range(n):
        a = order[a_pos]
        for b_pos in range(a_pos + 1, n):
            b = order[b_pos]
            if eigs[b].real - eigs[a].real > tol:
                break
            if abs(eigs[a] - eigs[b]) <= tol:
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[rb] = ra
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values(), key=lambda g: (np.mean(eigs[g]).real, np.mean(eigs[g]).imag))


def _check_separation(points: np.ndarray, groups: list[list[int]], tol: float) -> None:
    """Reject distinct groups that come closer than ``2 * tol``."""
    label = np.empty(len(points), dtype=int)
    for j, g in enumerate(groups):
        label[g] = j
    order = np.argsort(points.real, kind="stable")
    for a_pos in range(len(order)):
        a = order[a_pos]
        for b_pos in range(a_pos + 1, len(order)):
            b = order[b_pos]
            if points[b].real - points[a].real >= 2 * tol:
                break
            if label[a] != label[b] and abs(points[a] - points[b]) < 2 * tol:
                raise OperationError(
                    ErrorCode.AMBIGUOUS_CLUSTERING,
                    f"clusters near {points[a]:.3g} and {points[b]:.3g} are closer than 2*cluster_tol",
                )


def schur_clusters(M, cluster_tol: float = DEFAULT_CLUSTER_TOL) -> SpectralDecomposition:
    """Group the spectrum into clusters and compute their invariant subspaces.

    Parameters
    ----------
    M : OperatorMatrix or array_like
        Square complex matrix.
    cluster_tol : float
        Eigenvalues within this distance are merged into one cluster.

    Returns
    -------
    SpectralDecomposition

    Raises
    ------
    OperationError
        ``FAILS_TO_CONVERGE`` when the Schur iteration fails,
        ``AMBIGUOUS_CLUSTERING`` when two clusters are closer than
        ``2 * cluster_tol``.
    """
    mat = as_operator_matrix(M)
    tol = check_positive(cluster_tol, "cluster_tol")
    dim = mat.shape[0]
    try:
        T, Z = scipy.linalg.schur(mat, output="complex")
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise OperationError(ErrorCode.FAILS_TO_CONVERGE, str(exc)) from exc
    eigs = np.diag(T).copy()
    groups = _link_clusters(eigs, tol)
    centers = np.array([np.mean(eigs[g]) for g in groups])
    _check_separation(eigs, groups, tol)
    _check_separation(centers, [[i] for i in range(len(groups))], tol)

    bases = []
    for g in groups:
        if len(g) == 1:
            i = g[0]
            x = np.zeros(dim, dtype=complex)
            x[i] = 1.0
            if i > 0:
                shifted = T[:i, :i] - eigs[i] * np.eye(i)
                x[:i] = scipy.linalg.solve_triangular(shifted, -T[:i, i])
            v = Z @ x
            bases.append((v / np.linalg.norm(v))[:, None])
        else:
            select = np.zeros(dim, dtype=np.int32)
            select[g] = 1
            _, qs, _, m, _, _, info = lapack.ztrsen(select, T, Z, job="N")
            if info != 0 or m != len(g):
                raise OperationError(ErrorCode.FAILS_TO_CONVERGE, f"Schur reordering failed (info={info})")
            bases.append(qs[:, : len(g)].copy())

    V = np.hstack(bases)
    try:
        W = np.linalg.solve(V, np.eye(dim, dtype=complex))
    except np.linalg.LinAlgError as exc:
        raise OperationError(ErrorCode.FAILS_TO_CONVERGE, "invariant subspaces are not complementary") from exc

    norm = max(np.linalg.norm(mat), np.finfo(float).tiny)
    threshold = NILPOTENCY_RTOL * norm
    clusters = []
    col = 0
    for g, basis, center in zip(groups, bases, centers):
        m = len(g)
        dual = W[col : col + m, :]
        col += m
        block = dual @ (mat @ basis)
        nil = block - center * np.eye(m)
        degree = 1
        power = nil
        while degree < m and np.linalg.norm(power, 2) > threshold:
            power = power @ nil
            degree += 1
        clusters.append(
            Cluster(
                center=complex(center),
                multiplicity=m,
                basis=basis,
                nilpotency_degree=degree,
                dual_basis=dual,
                block=block,
                eigenvalues=eigs[g],
            )
        )
    return SpectralDecomposition(clusters=tuple(clusters), cluster_tol=tol, dim=dim)


def _zero_cluster(decomp: SpectralDecomposition) -> int | None:
    idx = decomp.zero_cluster_index()
    tol = decomp.cluster_tol
    for j, cl in enumerate(decomp.clusters):
        if j != idx and abs(cl.center) <= 2 * tol:
            raise OperationError(
                ErrorCode.ZERO_NOT_ISOLATED, f"eigenvalue cluster at {cl.center:.3g} is not separated from 0"
            )
    return idx


def generalized_kernel_projector(M, cluster_tol: float = DEFAULT_CLUSTER_TOL) -> np.ndarray:
    """Spectral projector onto the generalized kernel of ``M``.

    Returns the zero matrix when 0 is in the resolvent set.
    """
    decomp = M if isinstance(M, SpectralDecomposition) else schur_clusters(M, cluster_tol)
    idx = _zero_cluster(decomp)
    if idx is None:
        return np.zeros((decomp.dim, decomp.dim), dtype=complex)
    return decomp.projector([idx])


def log_on_cut(z, theta: float = math.pi):
    """Logarithm with its branch cut along the ray ``arg z = theta``.

    The argument is taken in ``(theta - 2*pi, theta)``; for ``theta = pi`` this
    is the principal branch.
    """
    z = np.asarray(z, dtype=complex)
    arg = theta - np.mod(theta - np.angle(z), 2.0 * math.pi)
    return np.log(np.abs(z)) + 1j * arg


def _power_derivatives(s: complex, theta: float):
    def derivs(center: complex, m: int):
        logc = complex(log_on_cut(center, theta))
        out = []
        falling = 1.0 + 0j
        for k in range(m):
            out.append(falling * np.exp((s - k) * logc))
            falling *= s - k
        return out

    return derivs


def _check_ray(decomp: SpectralDecomposition, indices: Sequence[int], theta: float) -> None:
    tol = decomp.cluster_tol
    direction = np.exp(-1j * theta)
    for i in indices:
        for lam in decomp.clusters[i].eigenvalues:
            w = lam * direction
            if w.real > 0 and abs(w.imag) <= tol:
                raise OperationError(
                    ErrorCode.EIGENVALUE_ON_RAY, f"eigenvalue {lam:.6g} lies on the cut ray arg z = {theta:.6g}"
                )


def _nonzero_indices(decomp: SpectralDecomposition) -> list[int]:
    zero = _zero_cluster(decomp)
    return [i for i in range(len(decomp.clusters)) if i != zero]


def complex_power(
    M, s: complex, ray: RaySpec | None = None, cluster_tol: float = DEFAULT_CLUSTER_TOL
) -> np.ndarray:
    """Complex power ``(M + p0)^s (1 - p0)`` with the cut along ``ray``.

    Parameters
    ----------
    M : OperatorMatrix, array_like or SpectralDecomposition
    s : complex
        Exponent.
    ray : RaySpec, optional
        Spectral cut; defaults to the negative real axis.
    cluster_tol : float

    Raises
    ------
    OperationError
        ``EIGENVALUE_ON_RAY`` or ``ZERO_NOT_ISOLATED``.
    """
    ray = ray or RaySpec()
    decomp = M if isinstance(M, SpectralDecomposition) else schur_clusters(M, cluster_tol)
    indices = _nonzero_indices(decomp)
    _check_ray(decomp, indices, ray.theta)
    return decomp.apply_function(_power_derivatives(complex(s), ray.theta), indices)


def frequency_projectors(
    D, ray: RaySpec | None = None, cluster_tol: float = DEFAULT_CLUSTER_TOL
) -> FrequencyProjectors:
    """Positive, negative and generalized-kernel projectors of a Dirac-type matrix.

    ``p_gt = (1 - p0 + Delta^{-1/2} D) / 2`` and
    ``p_lt = (1 - p0 - Delta^{-1/2} D) / 2`` with ``Delta = D @ D``.
    """
    return frequency_split(D, ray, cluster_tol)[0]


def frequency_split(
    D, ray: RaySpec | None = None, cluster_tol: float = DEFAULT_CLUSTER_TOL
) -> tuple[FrequencyProjectors, SpectralDecomposition]:
    """:func:`frequency_projectors` together with the decomposition of ``D @ D``."""
    mat = as_operator_matrix(D)
    laplace = schur_clusters(mat @ mat, cluster_tol)
    p0 = generalized_kernel_projector(laplace)
    inv_sqrt = complex_power(laplace, -0.5, ray)
    sign = inv_sqrt @ mat
    eye = np.eye(mat.shape[0], dtype=complex)
    return FrequencyProjectors(0.5 * (eye - p0 + sign), 0.5 * (eye - p0 - sign), p0), laplace


def semigroup(M_sqrt, t: complex) -> np.ndarray:
    """``exp(i t M_sqrt)`` for ``Im t >= 0``.

    A time in the lower half plane only triggers a
    :class:`LowerHalfPlaneWarning`, because every finite matrix generates a
    group.
    """
    mat = as_operator_matrix(M_sqrt, "M_sqrt")
    t = complex(t)
    if t.imag < 0:
        warnings.warn(
            "semigroup evaluated with Im(t) < 0; finite spectra are bounded so the group is used",
            LowerHalfPlaneWarning,
            stacklevel=2,
        )
    return scipy.linalg.expm(1j * t * mat)


def strip_bound(M_sqrt) -> float:
    """Smallest ``C`` with ``Re mu >= -C`` and ``|Im mu| <= C`` over the spectrum."""
    eigs = np.linalg.eigvals(as_operator_matrix(M_sqrt, "M_sqrt"))
    return float(max(0.0, np.max(-eigs.real), np.max(np.abs(eigs.imag))))
