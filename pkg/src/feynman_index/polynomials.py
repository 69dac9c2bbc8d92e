"""Truncated multivariate Taylor polynomials with square-matrix coefficients."""

from __future__ import annotations

import itertools
import math
from typing import Iterable

import numpy as np

__all__ = ["MatrixJet"]


class MatrixJet:
    """Polynomial ``sum_alpha c_alpha z^alpha`` truncated at total degree ``order``.

    Coefficients are stored densely in an array of shape
    ``(order + 1,) * nvars + (rank, rank)``; entries with total degree above
    ``order`` are kept at zero.

    Parameters
    ----------
    coeffs : ndarray
    order : int
    """

    def __init__(self, coeffs: np.ndarray, order: int):
        self.coeffs = np.asarray(coeffs, dtype=complex)
        self.order = int(order)
        self.nvars = self.coeffs.ndim - 2
        self.rank = self.coeffs.shape[-1]
        self.coeffs[~self._mask(self.nvars, self.order)] = 0

    _MASKS: dict = {}

    @classmethod
    def _mask(cls, nvars: int, order: int) -> np.ndarray:
        key = (nvars, order)
        if key not in cls._MASKS:
            grids = np.indices((order + 1,) * nvars).sum(axis=0)
            cls._MASKS[key] = grids <= order
        return cls._MASKS[key]

    @classmethod
    def _degree_grid(cls, nvars: int, order: int) -> np.ndarray:
        return np.indices((order + 1,) * nvars).sum(axis=0)

    # constructors -----------------------------------------------------------

    @classmethod
    def zeros(cls, nvars: int, order: int, rank: int) -> "MatrixJet":
        return cls(np.zeros((order + 1,) * nvars + (rank, rank), dtype=complex), order)

    @classmethod
    def constant(cls, matrix, nvars: int, order: int) -> "MatrixJet":
        matrix = np.atleast_2d(np.asarray(matrix, dtype=complex))
        jet = cls.zeros(nvars, order, matrix.shape[0])
        jet.coeffs[(0,) * nvars] = matrix
        return jet

    @classmethod
    def from_terms(cls, terms: dict, nvars: int, order: int, rank: int) -> "MatrixJet":
        """Build from ``{multi_index: matrix}``; terms above ``order`` are dropped."""
        jet = cls.zeros(nvars, order, rank)
        for alpha, value in terms.items():
            if sum(alpha) <= order:
                jet.coeffs[tuple(alpha)] += np.atleast_2d(np.asarray(value, dtype=complex))
        return jet

    # algebra ----------------------------------------------------------------

    def copy(self) -> "MatrixJet":
        return MatrixJet(self.coeffs.copy(), self.order)

    def __add__(self, other: "MatrixJet") -> "MatrixJet":
        return MatrixJet(self.coeffs + other.coeffs, self.order)

    def __sub__(self, other: "MatrixJet") -> "MatrixJet":
        return MatrixJet(self.coeffs - other.coeffs, self.order)

    def __neg__(self) -> "MatrixJet":
        return MatrixJet(-self.coeffs, self.order)

    def scale(self, factor: complex) -> "MatrixJet":
        return MatrixJet(factor * self.coeffs, self.order)

    def _nonzero_indices(self) -> Iterable[tuple[int, ...]]:
        nonzero = np.any(self.coeffs != 0, axis=(-2, -1))
        return [tuple(idx) for idx in np.argwhere(nonzero)]

    def __matmul__(self, other: "MatrixJet") -> "MatrixJet":
        """Truncated product with matrix multiplication of coefficients."""
        order = min(self.order, other.order)
        out = np.zeros((order + 1,) * self.nvars + (self.rank, other.rank), dtype=complex)
        for alpha in self._nonzero_indices():
            if sum(alpha) > order:
                continue
            target = tuple(slice(a, order + 1) for a in alpha)
            source = tuple(slice(0, order + 1 - a) for a in alpha)
            out[target] += np.einsum("ij,...jk->...ik", self.coeffs[alpha], other.coeffs[source])
        return MatrixJet(out, order)

    def times_coordinate(self, var: int) -> "MatrixJet":
        """Multiply by ``z_var``."""
        out = np.zeros_like(self.coeffs)
        src = [slice(None)] * self.nvars
        dst = [slice(None)] * self.nvars
        src[var] = slice(0, self.order)
        dst[var] = slice(1, self.order + 1)
        out[tuple(dst)] = self.coeffs[tuple(src)]
        return MatrixJet(out, self.order)

    def derivative(self, var: int) -> "MatrixJet":
        """Partial derivative in ``z_var``; the result keeps the same storage order."""
        out = np.zeros_like(self.coeffs)
        src = [slice(None)] * self.nvars
        dst = [slice(None)] * self.nvars
        src[var] = slice(1, self.order + 1)
        dst[var] = slice(0, self.order)
        shape = [1] * self.coeffs.ndim
        shape[var] = self.order
        factors = np.arange(1, self.order + 1).reshape(shape)
        out[tuple(dst)] = self.coeffs[tuple(src)] * factors
        return MatrixJet(out, self.order)

    def homogeneous(self, degree: int) -> "MatrixJet":
        """Part of total degree ``degree``."""
        keep = self._degree_grid(self.nvars, self.order) == degree
        out = np.where(keep[..., None, None], self.coeffs, 0)
        return MatrixJet(out, self.order)

    def truncate(self, order: int) -> "MatrixJet":
        keep = self._degree_grid(self.nvars, self.order) <= order
        return MatrixJet(np.where(keep[..., None, None], self.coeffs, 0), self.order)

    # evaluation -------------------------------------------------------------

    def __call__(self, z) -> np.ndarray:
        """Value at the displacement ``z``."""
        z = np.asarray(z, dtype=float)
        powers = [z[v] ** np.arange(self.order + 1) for v in range(self.nvars)]
        weights = powers[0]
        for v in range(1, self.nvars):
            weights = np.multiply.outer(weights, powers[v])
        return np.tensordot(weights, self.coeffs, axes=self.nvars)

    @property
    def value_at_origin(self) -> np.ndarray:
        return self.coeffs[(0,) * self.nvars]

    def gradient_at_origin(self) -> list[np.ndarray]:
        out = []
        for v in range(self.nvars):
            idx = [0] * self.nvars
            idx[v] = 1
            out.append(self.coeffs[tuple(idx)])
        return out

    def __repr__(self) -> str:
        return f"MatrixJet(nvars={self.nvars}, order={self.order}, rank={self.rank})"


def taylor_of_product(*jets: MatrixJet) -> MatrixJet:
    """Left-to-right truncated product of several jets."""
    out = jets[0]
    for jet in jets[1:]:
        out = out @ jet
    return out


def multi_indices(nvars: int, degree: int) -> list[tuple[int, ...]]:
    """Multi-indices of total degree ``degree``."""
    return [a for a in itertools.product(range(degree + 1), repeat=nvars) if sum(a) == degree]


def binomial_shift(coeffs: dict, center, order: int) -> dict:
    """Re-expand ``sum c_alpha x^alpha`` about ``center`` as a polynomial in ``z = x - center``."""
    center = np.asarray(center, dtype=float)
    out: dict = {}
    for alpha, value in coeffs.items():
        ranges = [range(a + 1) for a in alpha]
        for beta in itertools.product(*ranges):
            if sum(beta) > order:
                continue
            factor = 1.0
            for a, b, c in zip(alpha, beta, center):
                factor *= math.comb(a, b) * c ** (a - b)
            out[beta] = out.get(beta, 0) + factor * np.asarray(value, dtype=complex)
    return out
