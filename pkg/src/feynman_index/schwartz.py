"""Closed-form rapidly decaying test functions on ``R^n`` with exact derivatives.

Two families are provided:

* ``GaussianPoly``: ``P(z) exp(-z^T Q z / 2)`` with ``z = x - center``;
* ``Bump``: ``sum_j P_j(z) f^(j)(|z|^2 / w^2)`` where ``f(q) = exp(-1/(1-q))`` on ``q < 1``.

Both are closed under partial derivatives and under multiplication by
polynomials, so the d'Alembertian ``box = d_1^2 - sum_j d_j^2`` and the
multiplication by ``gamma(x) = x_1^2 - |x'|^2`` are exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy import signal

__all__ = ["GaussianPoly", "Bump", "minkowski_square_poly", "lorentz_boost"]


# dense n-variate polynomials: coefficient array c[a_1, ..., a_n] of z^a


def _poly_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return signal.convolve(a, b, method="direct")


def _poly_add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    shape = tuple(max(p, q) for p, q in zip(a.shape, b.shape))
    out = np.zeros(shape, dtype=np.result_type(a, b))
    out[tuple(slice(0, s) for s in a.shape)] += a
    out[tuple(slice(0, s) for s in b.shape)] += b
    return out


def _poly_der(a: np.ndarray, axis: int) -> np.ndarray:
    if a.shape[axis] == 1:
        shape = list(a.shape)
        return np.zeros(shape, dtype=a.dtype)
    return npoly.polyder(a, axis=axis)


def _poly_times_var(a: np.ndarray, axis: int) -> np.ndarray:
    pad = [(0, 0)] * a.ndim
    pad[axis] = (1, 0)
    return np.pad(a, pad)


def _poly_eval(a: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Evaluate at points ``z`` of shape ``(..., n)``."""
    n = a.ndim
    cols = [z[..., i] for i in range(n)]
    if n == 1:
        return npoly.polyval(cols[0], a)
    if n == 2:
        return npoly.polyval2d(cols[0], cols[1], a)
    if n == 3:
        return npoly.polyval3d(cols[0], cols[1], cols[2], a)
    out = np.zeros(z.shape[:-1], dtype=complex)
    for idx in zip(*np.nonzero(a)):
        term = a[idx]
        for i, p in enumerate(idx):
            term = term * cols[i] ** p
        out = out + term
    return out


def _linear_poly(coeffs, const: float, n: int) -> np.ndarray:
    """``const + sum_i coeffs[i] z_i``."""
    out = np.zeros((2,) * n)
    out[(0,) * n] = const
    for i, c in enumerate(coeffs):
        idx = [0] * n
        idx[i] = 1
        out[tuple(idx)] = c
    return out


def _poly_compose_linear(a: np.ndarray, A: np.ndarray) -> np.ndarray:
    """Coefficients of ``z -> P(A z)``."""
    n = a.ndim
    rows = [_linear_poly(A[i], 0.0, n) for i in range(n)]
    out = np.zeros((1,) * n, dtype=complex)
    for idx in zip(*np.nonzero(a)):
        term = np.full((1,) * n, a[idx], dtype=complex)
        for i, p in enumerate(idx):
            for _ in range(p):
                term = _poly_mul(term, rows[i])
        out = _poly_add(out, term)
    return out


def minkowski_square_poly(center, n: int) -> np.ndarray:
    """``gamma(center + z)`` as a polynomial in ``z``."""
    center = np.asarray(center, dtype=float)
    out = np.zeros((3,) * n)
    sign = np.array([1.0] + [-1.0] * (n - 1))
    out[(0,) * n] = float(np.sum(sign * center**2))
    for i in range(n):
        idx1 = [0] * n
        idx1[i] = 1
        out[tuple(idx1)] = 2 * sign[i] * center[i]
        idx2 = [0] * n
        idx2[i] = 2
        out[tuple(idx2)] = sign[i]
    return out


def lorentz_boost(rapidity: float, n: int, axis: int = 1) -> np.ndarray:
    """Boost mixing ``x_1`` with ``x_{axis+1}``."""
    A = np.eye(n)
    ch, sh = np.cosh(rapidity), np.sinh(rapidity)
    A[0, 0] = A[axis, axis] = ch
    A[0, axis] = A[axis, 0] = sh
    return A


class _TestFunctionBase:
    center: np.ndarray

    @property
    def n(self) -> int:
        return self.center.size

    def box(self, times: int = 1):
        out = self
        for _ in range(times):
            terms = [out.derivative(0).derivative(0)]
            for i in range(1, self.n):
                terms.append(out.derivative(i).derivative(i).scale(-1.0))
            acc = terms[0]
            for t in terms[1:]:
                acc = acc + t
            out = acc
        return out

    def times_gamma(self):
        return self.times_poly(minkowski_square_poly(self.center, self.n))

    def times_x(self, axis: int):
        """Multiply by the coordinate ``x_axis``."""
        return self.times_poly(_linear_poly(np.eye(self.n)[axis], self.center[axis], self.n))

    def value_at(self, x) -> complex:
        return complex(self(np.atleast_2d(np.asarray(x, dtype=float)))[0])


@dataclass(frozen=True, eq=False)
class GaussianPoly(_TestFunctionBase):
    """``P(x - c) exp(-(x - c)^T Q (x - c) / 2)``.

    Parameters
    ----------
    center : ndarray, shape (n,)
    Q : ndarray, shape (n, n)
        Positive definite.
    poly : ndarray
        Dense coefficient array of ``P`` in ``z = x - c``.
    """

    center: np.ndarray
    Q: np.ndarray
    poly: np.ndarray

    @classmethod
    def isotropic(cls, center, width: float = 1.0, poly=None) -> "GaussianPoly":
        center = np.atleast_1d(np.asarray(center, dtype=float))
        n = center.size
        if poly is None:
            poly = np.ones((1,) * n)
        return cls(center, np.eye(n) / width**2, np.asarray(poly, dtype=complex))

    def __call__(self, x) -> np.ndarray:
        z = np.asarray(x, dtype=float) - self.center
        quad = np.einsum("...i,ij,...j->...", z, self.Q, z)
        return _poly_eval(self.poly, z) * np.exp(-0.5 * quad)

    def derivative(self, axis: int) -> "GaussianPoly":
        # d_i (P e^{-q}) = (d_i P - P (Q z)_i) e^{-q}
        qz = _linear_poly(self.Q[axis], 0.0, self.n)
        poly = _poly_add(_poly_der(self.poly, axis), -_poly_mul(self.poly, qz))
        return GaussianPoly(self.center, self.Q, poly)

    def times_poly(self, coeffs) -> "GaussianPoly":
        return GaussianPoly(self.center, self.Q, _poly_mul(self.poly, np.asarray(coeffs)))

    def scale(self, factor: complex) -> "GaussianPoly":
        return GaussianPoly(self.center, self.Q, self.poly * factor)

    def __add__(self, other: "GaussianPoly") -> "GaussianPoly":
        if not (np.array_equal(self.center, other.center) and np.array_equal(self.Q, other.Q)):
            raise ValueError("sums need a shared center and quadratic form")
        return GaussianPoly(self.center, self.Q, _poly_add(self.poly, other.poly))

    def compose_linear(self, A) -> "GaussianPoly":
        """``x -> phi(A x)``."""
        A = np.asarray(A, dtype=float)
        new_center = np.linalg.solve(A, self.center)
        return GaussianPoly(new_center, A.T @ self.Q @ A, _poly_compose_linear(self.poly, A))

    def support_radius(self, decay: float = 50.0) -> float:
        lam = np.linalg.eigvalsh(self.Q).min()
        degree = sum(s - 1 for s in self.poly.shape)
        return float(np.linalg.norm(self.center) + np.sqrt(2 * (decay + degree) / lam))


def _bump_profile_polys(order: int) -> list:
    """``Q_j`` with ``f^(j)(q) = Q_j(u) e^{-u}``, ``u = 1/(1-q)``, ``f(q) = e^{-u}``."""
    polys = [npoly.Polynomial([1.0])]
    u2 = npoly.Polynomial([0.0, 0.0, 1.0])
    for _ in range(order):
        q = polys[-1]
        polys.append(u2 * (q.deriv() - q))
    return polys


@dataclass(frozen=True, eq=False)
class Bump(_TestFunctionBase):
    """Compactly supported ``sum_j P_j(x - c) f^(j)(|x - c|^2 / w^2)``.

    ``terms[j]`` is the coefficient array of ``P_j``; the plain bump has
    ``terms = [1]``.
    """

    center: np.ndarray
    width: float
    terms: tuple

    @classmethod
    def standard(cls, center, width: float = 1.0) -> "Bump":
        center = np.atleast_1d(np.asarray(center, dtype=float))
        return cls(center, float(width), (np.ones((1,) * center.size, dtype=complex),))

    def __call__(self, x) -> np.ndarray:
        z = np.asarray(x, dtype=float) - self.center
        q = np.sum(z * z, axis=-1) / self.width**2
        inside = q < 1 - 1e-3
        u = 1.0 / (1.0 - np.where(inside, q, 0.0))
        base = np.where(inside, np.exp(-u), 0.0)
        polys = _bump_profile_polys(len(self.terms) - 1)
        out = np.zeros(q.shape, dtype=complex)
        for j, p in enumerate(self.terms):
            if not np.any(p):
                continue
            out = out + _poly_eval(p, z) * polys[j](u) * base
        return out

    def derivative(self, axis: int) -> "Bump":
        # d_i [P_j f^(j)(q)] = d_i P_j f^(j) + P_j (2 z_i / w^2) f^(j+1)
        n = self.n
        dq = _linear_poly(2 * np.eye(n)[axis] / self.width**2, 0.0, n)
        new = [np.zeros((1,) * n, dtype=complex) for _ in range(len(self.terms) + 1)]
        for j, p in enumerate(self.terms):
            new[j] = _poly_add(new[j], _poly_der(p, axis))
            new[j + 1] = _poly_add(new[j + 1], _poly_mul(p, dq))
        return Bump(self.center, self.width, tuple(new))

    def times_poly(self, coeffs) -> "Bump":
        return Bump(self.center, self.width, tuple(_poly_mul(p, np.asarray(coeffs)) for p in self.terms))

    def scale(self, factor: complex) -> "Bump":
        return Bump(self.center, self.width, tuple(p * factor for p in self.terms))

    def __add__(self, other: "Bump") -> "Bump":
        if not (np.array_equal(self.center, other.center) and self.width == other.width):
            raise ValueError("sums need a shared center and width")
        size = max(len(self.terms), len(other.terms))
        zero = np.zeros((1,) * self.n, dtype=complex)
        a = list(self.terms) + [zero] * (size - len(self.terms))
        b = list(other.terms) + [zero] * (size - len(other.terms))
        return Bump(self.center, self.width, tuple(_poly_add(p, q) for p, q in zip(a, b)))

    def support_radius(self, decay: float = 50.0) -> float:
        return float(np.linalg.norm(self.center) + self.width)
