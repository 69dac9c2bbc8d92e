"""Fourier-truncated Dirac-type operators on the circle and cylinder models."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ErrorCode, OperationError
from .spectral import OperatorMatrix
from .validation import as_operator_matrix

__all__ = [
    "CircleOperatorSpec",
    "CylinderModel",
    "GaugePath",
    "build_circle_dirac",
    "build_jordan_model",
    "laplace_from_dirac",
    "smootherstep",
]


@dataclass(frozen=True)
class CircleOperatorSpec:
    """Data of ``-i d/dtheta + flux + V(theta)`` on a rank-``rank`` bundle over the circle.

    Parameters
    ----------
    flux : complex
        Constant gauge shift.
    potential_coeffs : sequence of (int, array_like)
        Fourier coefficients ``V_m`` of the potential, each ``rank x rank``.
    rank : int
    K : int
        Modes ``-K..K`` are kept.
    """

    flux: complex = 0.0
    potential_coeffs: tuple = ()
    rank: int = 1
    K: int = 8

    def __post_init__(self):
        if int(self.K) < 1 or int(self.rank) < 1:
            raise OperationError(ErrorCode.INVALID_OPERATOR, "K and rank must be at least 1")
        object.__setattr__(self, "K", int(self.K))
        object.__setattr__(self, "rank", int(self.rank))
        object.__setattr__(self, "flux", complex(self.flux))
        coeffs = []
        for freq, value in self.potential_coeffs:
            mat = np.atleast_2d(np.asarray(value, dtype=complex))
            if mat.shape != (self.rank, self.rank):
                raise OperationError(
                    ErrorCode.INVALID_OPERATOR, f"potential coefficient at frequency {freq} has shape {mat.shape}"
                )
            coeffs.append((int(freq), mat))
        object.__setattr__(self, "potential_coeffs", tuple(coeffs))

    @property
    def has_potential(self) -> bool:
        return any(np.any(v != 0) for _, v in self.potential_coeffs)

    def with_flux(self, flux: complex) -> "CircleOperatorSpec":
        return CircleOperatorSpec(flux=flux, potential_coeffs=self.potential_coeffs, rank=self.rank, K=self.K)


def _mode_labels(K: int, rank: int) -> list[int]:
    return [k for k in range(-K, K + 1) for _ in range(rank)]


def build_circle_dirac(spec: CircleOperatorSpec) -> OperatorMatrix:
    """Galerkin matrix of ``-i d/dtheta + a + V`` in the basis ``e^{ik theta}``.

    Basis vectors are ordered mode-major: index ``(k + K) * rank + r``.

    Raises
    ------
    OperationError
        ``FREQUENCY_OVERFLOW`` for potential frequencies above ``2K``.
    """
    K, rank = spec.K, spec.rank
    nmodes = 2 * K + 1
    dim = nmodes * rank
    mat = np.zeros((dim, dim), dtype=complex)
    for j, k in enumerate(range(-K, K + 1)):
        block = slice(j * rank, (j + 1) * rank)
        mat[block, block] += (k + spec.flux) * np.eye(rank)
    for freq, value in spec.potential_coeffs:
        if abs(freq) > 2 * K:
            raise OperationError(
                ErrorCode.FREQUENCY_OVERFLOW, f"potential frequency {freq} exceeds 2K = {2 * K}"
            )
        # V_m maps e^{ik theta} to e^{i(k+m) theta}
        for j in range(nmodes):
            target = j + freq
            if 0 <= target < nmodes:
                mat[target * rank : (target + 1) * rank, j * rank : (j + 1) * rank] += value
    return OperatorMatrix(mat, mode_labels=_mode_labels(K, rank))


def build_jordan_model(K: int, coupling: complex = 1.0) -> OperatorMatrix:
    """Rank-2 operator ``[[-i d/dtheta, chi], [0, -i d/dtheta]]``.

    ``chi`` couples the two ``k = 0`` basis vectors only, so the zero cluster
    carries a 2x2 Jordan block.
    """
    spec = CircleOperatorSpec(flux=0.0, rank=2, K=K)
    base = build_circle_dirac(spec)
    mat = base.entries.copy()
    zero = K * 2
    mat[zero, zero + 1] += coupling
    return OperatorMatrix(mat, mode_labels=base.mode_labels)


def laplace_from_dirac(D) -> OperatorMatrix:
    """Square of a Dirac-type matrix."""
    mat = as_operator_matrix(D)
    return OperatorMatrix(mat @ mat, mode_labels=getattr(D, "mode_labels", None))


# septic smoothstep: C^3 at both ends, monotone on [0, 1]
_SMOOTHERSTEP = np.polynomial.Polynomial([0, 0, 0, 0, 35, -84, 70, -20])


def smootherstep(s):
    """Septic smoothstep, clipped to 0 below 0 and 1 above 1."""
    s = np.clip(np.asarray(s, dtype=float), 0.0, 1.0)
    return _SMOOTHERSTEP(s)


@dataclass(frozen=True)
class GaugePath:
    """Flux path ``a(t)`` that is constant within ``margin`` of both endpoints.

    Between ``t_minus + margin`` and ``t_plus - margin`` the flux follows a
    septic smoothstep from ``start`` to ``end``.
    """

    start: complex
    end: complex
    t_minus: float = 0.0
    t_plus: float = 1.0
    margin: float = 0.1

    def __post_init__(self):
        if not self.t_minus < self.t_plus:
            raise OperationError(ErrorCode.INVALID_OPERATOR, "t_minus must be smaller than t_plus")
        if not 0 < self.margin < 0.5 * (self.t_plus - self.t_minus):
            raise OperationError(ErrorCode.INVALID_OPERATOR, "margin must be positive and below half the duration")

    @property
    def ramp(self) -> tuple[float, float]:
        return self.t_minus + self.margin, self.t_plus - self.margin

    def _s(self, t):
        lo, hi = self.ramp
        return (np.asarray(t, dtype=float) - lo) / (hi - lo)

    def __call__(self, t):
        return self.start + (self.end - self.start) * smootherstep(self._s(t))

    def derivative(self, t, order: int = 1):
        """``order``-th time derivative of the flux."""
        lo, hi = self.ramp
        s = self._s(t)
        inside = (s > 0) & (s < 1)
        poly = _SMOOTHERSTEP.deriv(order)
        vals = np.where(inside, poly(np.clip(s, 0, 1)), 0.0)
        return (self.end - self.start) * vals / (hi - lo) ** order

    def taylor(self, t0: float, degree: int) -> np.ndarray:
        """Taylor coefficients of ``a`` about ``t0`` (exact: the path is piecewise polynomial)."""
        coeffs = np.zeros(degree + 1, dtype=complex)
        coeffs[0] = self(t0)
        for j in range(1, degree + 1):
            coeffs[j] = self.derivative(t0, j) / math.factorial(j)
        return coeffs

    def breakpoints(self) -> tuple[float, float, float, float]:
        lo, hi = self.ramp
        return self.t_minus, lo, hi, self.t_plus


@dataclass(frozen=True)
class CylinderModel:
    """Spacetime ``[t_minus, t_plus] x S^1`` carrying a time-dependent flux.

    Parameters
    ----------
    base : CircleOperatorSpec
        Operator data; its ``flux`` is replaced by the path value at each time.
    gauge_path : GaugePath
    """

    base: CircleOperatorSpec
    gauge_path: GaugePath

    @classmethod
    def from_fluxes(
        cls,
        start: complex,
        end: complex,
        K: int,
        t_minus: float = 0.0,
        t_plus: float = 1.0,
        margin: float = 0.1,
        potential_coeffs: Sequence = (),
        rank: int = 1,
    ) -> "CylinderModel":
        base = CircleOperatorSpec(flux=start, potential_coeffs=tuple(potential_coeffs), rank=rank, K=K)
        return cls(base, GaugePath(start, end, t_minus, t_plus, margin))

    @property
    def t_minus(self) -> float:
        return self.gauge_path.t_minus

    @property
    def t_plus(self) -> float:
        return self.gauge_path.t_plus

    @property
    def product_margin(self) -> float:
        return self.gauge_path.margin

    @property
    def is_autonomous(self) -> bool:
        return self.gauge_path.start == self.gauge_path.end

    @property
    def flux_is_real(self) -> bool:
        return complex(self.gauge_path.start).imag == 0 and complex(self.gauge_path.end).imag == 0

    def flux(self, t) -> complex:
        return complex(self.gauge_path(t))

    def dirac_at(self, t: float) -> OperatorMatrix:
        return build_circle_dirac(self.base.with_flux(self.flux(t)))

    def in_product_region(self, t: float) -> bool:
        lo, hi = self.gauge_path.ramp
        return t <= lo or t >= hi
