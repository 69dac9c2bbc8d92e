"""Independent reference computations used only by the tests.

None of these share code paths with the package: projectors come from
resolvent contour integrals, eta values from mpmath's Hurwitz zeta,
structure constants from mpmath's Gamma function and numerical
differentiation, and pairings with polynomial distributions from
Gauss-Hermite quadrature in Cartesian coordinates.
"""

from __future__ import annotations

import mpmath
import numpy as np


def contour_projector(M, center: complex, radius: float, nodes: int = 64) -> np.ndarray:
    """Riesz projector ``(1/2 pi i) oint (z - M)^-1 dz`` over a circle, trapezoid rule."""
    M = np.asarray(M, dtype=complex)
    eye = np.eye(M.shape[0])
    out = np.zeros_like(M)
    for k in range(nodes):
        w = np.exp(2j * np.pi * k / nodes)
        z = center + radius * w
        out += np.linalg.solve(z * eye - M, eye) * radius * w
    return out / nodes


def spectral_sign_projectors(D, nodes: int = 64):
    """Positive and negative real-part projectors of a diagonalisable ``D`` from contour integrals.

    Each eigenvalue gets its own small circle, so the result does not use
    Schur forms or complex powers.
    """
    D = np.asarray(D, dtype=complex)
    eigs = np.linalg.eigvals(D)
    gaps = np.abs(eigs[:, None] - eigs[None, :]) + np.eye(len(eigs)) * 1e9
    radius = 0.4 * min(gaps.min(), np.abs(eigs).min() if np.abs(eigs).min() > 0 else 1.0)
    pos = np.zeros_like(D)
    neg = np.zeros_like(D)
    zero = np.zeros_like(D)
    for lam in eigs:
        p = contour_projector(D, lam, radius, nodes)
        if abs(lam) < 1e-9:
            zero += p
        elif lam.real > 0:
            pos += p
        else:
            neg += p
    return pos, neg, zero


def hurwitz_eta(a: float, dps: int = 30) -> float:
    """Eta invariant of ``-i d/dtheta + a`` via mpmath: ``zeta(0, a) - zeta(0, 1 - a)`` for ``0 < a < 1``."""
    with mpmath.workdps(dps):
        return float(mpmath.zeta(0, a) - mpmath.zeta(0, 1 - a))


def hurwitz_eta_at(a: float, s: float, dps: int = 30) -> float:
    """Eta function ``sum sign(k + a) |k + a|^-s`` of the same operator at ``s``."""
    with mpmath.workdps(dps):
        return float(mpmath.zeta(s, a) - mpmath.zeta(s, 1 - a))


def structure_constant(beta, n: int, derivative: int = 0, dps: int = 40) -> complex:
    """``2^(-n-2b) pi^((2-n)/2) / (Gamma(b+n/2) Gamma(b+1))`` or its derivative, with mpmath."""
    with mpmath.workdps(dps):
        def c(b):
            return (mpmath.mpf(2) ** (-n - 2 * b) * mpmath.pi ** (mpmath.mpf(2 - n) / 2)
                    * mpmath.rgamma(b + mpmath.mpf(n) / 2) * mpmath.rgamma(b + 1))

        value = c(mpmath.mpf(beta)) if derivative == 0 else mpmath.diff(c, mpmath.mpf(beta), derivative)
        return complex(value)


def gauss_hermite_pairing(weight, center, width, poly=None, n: int = 2, nodes: int = 40) -> complex:
    """``int weight(x) exp(-|x - center|^2 / (2 width^2)) p(x - center) dx`` in Cartesian coordinates.

    ``weight`` must be a polynomial so the rule is exact up to rounding.
    ``poly`` is a dense coefficient array in the displacement (``None`` is 1).
    """
    t, w = np.polynomial.hermite.hermgauss(nodes)
    grids = np.meshgrid(*([t] * n), indexing="ij")
    weights = np.ones_like(grids[0])
    for g in np.meshgrid(*([w] * n), indexing="ij"):
        weights = weights * g
    scale = width * np.sqrt(2.0)
    disp = [scale * g for g in grids]
    x = [np.asarray(center[i]) + disp[i] for i in range(n)]
    pvals = np.ones_like(disp[0]) if poly is None else _polyval_nd(np.asarray(poly, dtype=float), disp)
    return complex(np.sum(weights * weight(*x) * pvals) * scale**n)


def _polyval_nd(coeffs, disp):
    out = np.zeros_like(disp[0], dtype=float)
    for idx in np.ndindex(coeffs.shape):
        term = coeffs[idx] * np.ones_like(disp[0])
        for axis, power in enumerate(idx):
            term = term * disp[axis] ** power
        out += term
    return out
