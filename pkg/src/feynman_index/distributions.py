"""Lorentz-invariant homogeneous distribution families on Minkowski space.

Signature convention: ``gamma(x) = x_1**2 - x_2**2 - ... - x_n**2`` and the
d'Alembertian ``box = d_1**2 - d_2**2 - ... - d_n**2``, so that
``box gamma**(b+1) = 2(b+1)(2b+n) gamma**b`` away from the light cone.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .errors import ErrorCode, OperationError

__all__ = [
    "FAMILIES",
    "DistributionQuery",
    "PairingResult",
    "IdentityRecord",
    "coeff_C",
    "dcoeff_C",
    "coeff_Ctilde",
    "dcoeff_Ctilde",
    "beta_taylor",
    "pair",
    "identity_suite",
    "richardson_limit",
    "ladder_exponents",
    "DEFAULT_LADDER",
    "relative_deviation",
]

FAMILIES = ("f", "h", "t_pm", "F", "G", "R", "R_tilde")

# geometric, 1e-2 down to 1e-6; enough points to fit every term of ladder_exponents
DEFAULT_LADDER = tuple(float(e) for e in np.geomspace(1e-2, 1e-6, 17))


def beta_taylor(func, beta: complex, order: int, radius: float = 0.25, nodes: int = 64) -> np.ndarray:
    """Taylor coefficients ``f^(j)(beta)/j!`` for ``j <= order`` of an entire function.

    Trapezoid rule for the Cauchy integral on a circle of ``radius``; for
    entire integrands the error decays geometrically in ``nodes``.
    """
    theta = 2 * np.pi * np.arange(nodes) / nodes
    w = radius * np.exp(1j * theta)
    vals = np.asarray(func(beta + w), dtype=complex)
    fft = np.fft.fft(vals) / nodes
    return np.array([fft[j] / radius**j for j in range(order + 1)])


def _c_entire(beta, n):
    beta = np.asarray(beta, dtype=complex)
    return (
        2.0 ** (-n - 2 * beta)
        * np.pi ** ((2 - n) / 2)
        * special.rgamma(beta + n / 2)
        * special.rgamma(beta + 1)
    )


def coeff_C(beta: complex, n: int) -> complex:
    """Normalisation ``C(beta, n) = 2**(-n-2 beta) pi**((2-n)/2) / (Gamma(beta+n/2) Gamma(beta+1))``.

    Entire in ``beta``; evaluated with the reciprocal Gamma function so the
    zeros at negative integers and at ``-n/2 - j`` are exact.
    """
    if n < 1:
        raise ValueError("dimension must be positive")
    value = complex(_c_entire(beta, n))
    return value.real + 0j if np.isreal(beta) else value


def dcoeff_C(beta: complex, n: int, order: int = 1) -> complex:
    """``order``-th derivative of ``coeff_C`` in ``beta``."""
    coeffs = beta_taylor(lambda b: _c_entire(b, n), beta, order)
    return complex(coeffs[order] * special.factorial(order, exact=True))


def coeff_Ctilde(beta: complex, n: int, Lambda: float) -> complex:
    """``(i/pi) dC/dbeta + (Lambda - 1) C`` (the log-family normalisation)."""
    return 1j / np.pi * dcoeff_C(beta, n) + (Lambda - 1) * coeff_C(beta, n)


def dcoeff_Ctilde(beta: complex, n: int, Lambda: float) -> complex:
    """Derivative of ``coeff_Ctilde`` in ``beta``."""
    return 1j / np.pi * dcoeff_C(beta, n, 2) + (Lambda - 1) * dcoeff_C(beta, n, 1)


# --------------------------------------------------------------------------
# queries and results
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class DistributionQuery:
    """Which distribution to pair with a test function.

    Parameters
    ----------
    family : {"f", "h", "t_pm", "F", "G", "R", "R_tilde"}
        ``f``, ``h`` and ``t_pm`` live on the line (``n = 1``); the others on
        Minkowski space of dimension ``n``.
    beta : complex
    sign : {+1, -1}
        Selects ``+ i0`` versus ``- i0`` (``F``, ``G``, ``f``, ``h``), the
        future versus past cone (``R``) or ``t_+`` versus ``t_-``.
    n : int
    Lambda : float
        Constant in ``G = +-(i/pi) dF/dbeta + Lambda F``.
    epsilon_ladder : tuple of float
        Decreasing regularisation parameters for the ``epsilon_ladder`` strategy.
    box_transfers : int, optional
        Number of d'Alembertians moved onto the test function; chosen
        automatically when ``None``.
    """

    family: str
    beta: complex
    sign: int = 1
    n: int = 2
    Lambda: float = 1.0
    epsilon_ladder: tuple = DEFAULT_LADDER
    box_transfers: int | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if self.family in ("f", "h", "t_pm") and self.n != 1:
            raise ValueError(f"family {self.family} lives on the line; use n = 1")
        if self.family not in ("f", "h", "t_pm") and self.n < 2:
            raise ValueError(f"family {self.family} needs n >= 2")
        if list(self.epsilon_ladder) != sorted(self.epsilon_ladder, reverse=True) or min(self.epsilon_ladder) <= 0:
            raise ValueError("epsilon_ladder must be positive and decreasing")


@dataclass
class PairingResult:
    """Value of a pairing with the quadrature or extrapolation error estimate."""

    value: complex
    error_estimate: float
    strategy: str
    transfers: int


# --------------------------------------------------------------------------
# quadrature primitives
# --------------------------------------------------------------------------

_DE_SPAN = 4.0


def _tanh_sinh(steps: int):
    """Tanh-sinh rule on ``[0, 1]`` returning nodes, complements ``1 - x`` and weights.

    Uses ``2 * steps + 1`` nodes; the even-indexed nodes with doubled
    weights form the rule of half the resolution.
    """
    h = _DE_SPAN / steps
    t = h * np.arange(-steps, steps + 1)
    u = np.pi * np.sinh(t)
    x = 1.0 / (1.0 + np.exp(-u))
    xc = 1.0 / (1.0 + np.exp(u))
    w = h * np.pi * np.cosh(t) * x * xc
    coarse = np.zeros_like(w)
    coarse[::2] = 2 * w[::2]
    return x, xc, w, coarse


@dataclass
class _RegionGrid:
    """Flattened quadrature over one region with ``|gamma|``, ``x`` and weights."""

    points: np.ndarray
    abs_gamma: np.ndarray
    log_abs_gamma: np.ndarray
    gamma_sign: int
    weights: np.ndarray
    coarse: np.ndarray


def _directions(n: int, angles: int) -> tuple[np.ndarray, np.ndarray]:
    """Unit vectors on ``S^{n-2}`` and their quadrature weights."""
    if n == 2:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    if n == 3:
        psi = 2 * np.pi * np.arange(angles) / angles
        return np.stack([np.cos(psi), np.sin(psi)], axis=-1), np.full(angles, 2 * np.pi / angles)
    raise OperationError(ErrorCode.DIMENSION_UNSUPPORTED, "Minkowski pairings support n = 2 and n = 3")


@functools.lru_cache(maxsize=8)
def _region_grids(n: int, radius: float, steps: int, angles: int) -> list[_RegionGrid]:
    """Future cone, past cone and spacelike region in cone-adapted coordinates.

    Timelike: ``x = (+-r, r s w)`` with ``|gamma| = r^2 (1 - s^2)``.
    Spacelike: ``x = (+-rho s, rho w)`` with ``|gamma| = rho^2 (1 - s^2)``.
    """
    x, xc, w, wc = _tanh_sinh(steps)
    r, rw, rwc = radius * x, radius * w, radius * wc
    log_r = np.log(radius) + np.log(x)
    log_one_minus_s2 = np.log(xc) + np.log1p(x)
    dirs, dir_w = _directions(n, angles)

    R, S, D = np.meshgrid(np.arange(r.size), np.arange(x.size), np.arange(len(dirs)), indexing="ij")
    R, S, D = R.ravel(), S.ravel(), D.ravel()
    log_abs = 2 * log_r[R] + log_one_minus_s2[S]
    grids = []
    for time_sign in (1.0, -1.0):
        jac = r[R] ** (n - 1) * x[S] ** (n - 2)
        pts = np.empty((R.size, n))
        pts[:, 0] = time_sign * r[R]
        pts[:, 1:] = (r[R] * x[S])[:, None] * dirs[D]
        wt = rw[R] * w[S] * dir_w[D] * jac
        wtc = rwc[R] * wc[S] * dir_w[D] * jac
        grids.append(_RegionGrid(pts, np.exp(log_abs), log_abs, 1, wt, wtc))
    # spacelike, with the time component on both sides of zero
    for time_sign in (1.0, -1.0):
        jac = r[R] ** (n - 1)
        pts = np.empty((R.size, n))
        pts[:, 0] = time_sign * r[R] * x[S]
        pts[:, 1:] = r[R][:, None] * dirs[D]
        wt = rw[R] * w[S] * dir_w[D] * jac
        wtc = rwc[R] * wc[S] * dir_w[D] * jac
        grids.append(_RegionGrid(pts, np.exp(log_abs), log_abs, -1, wt, wtc))
    return grids


def _line_grids(radius: float, steps: int) -> list[_RegionGrid]:
    x, xc, w, wc = _tanh_sinh(steps)
    t = radius * x
    log_t = np.log(radius) + np.log(x)
    return [
        _RegionGrid(t[:, None], t, log_t, 1, radius * w, radius * wc),
        _RegionGrid(-t[:, None], t, log_t, -1, radius * w, radius * wc),
    ]


@dataclass
class _Moments:
    """Power and log moments ``int |gamma|^beta phi`` (and with ``log |gamma|``) per region."""

    power: np.ndarray
    log: np.ndarray
    error: float


def _nested_error(weights, coarse, vals) -> float:
    """Error of the fine tanh-sinh sum from its half-resolution companion.

    The rule roughly doubles its correct digits when the step halves, so
    the fine error is about the squared gap relative to the integrand mass.
    """
    gap = abs(np.sum(weights * vals) - np.sum(coarse * vals))
    mass = float(np.sum(np.abs(weights * vals))) or 1.0
    return min(gap, gap * gap / mass)


def _moments(grids, phi, beta: complex) -> _Moments:
    power, logs, err = [], [], 0.0
    for g in grids:
        vals = phi(g.points) * np.exp(beta * g.log_abs_gamma)
        lvals = vals * g.log_abs_gamma
        power.append(np.sum(g.weights * vals))
        logs.append(np.sum(g.weights * lvals))
        err = max(err, _nested_error(g.weights, g.coarse, vals), _nested_error(g.weights, g.coarse, lvals))
    return _Moments(np.array(power), np.array(logs), err)


def _regularised(grids, phi_values, beta: complex, sign: int, eps: float) -> tuple[complex, complex, float]:
    """``int (gamma + i sign eps)^beta phi`` and its log companion.

    ``phi_values`` holds the test function evaluated on each grid.
    """
    total, total_log, err = 0j, 0j, 0.0
    for g, phi_vals in zip(grids, phi_values):
        gam = g.gamma_sign * g.abs_gamma + 1j * sign * eps
        lg = np.log(gam)
        vals = phi_vals * np.exp(beta * lg)
        total += np.sum(g.weights * vals)
        total_log += np.sum(g.weights * vals * lg)
        err = max(err, _nested_error(g.weights, g.coarse, vals))
    return total, total_log, err


def ladder_exponents(beta: complex, n: int, log_order: int = 1) -> list[tuple[complex, int]]:
    """Terms ``(p, k)`` meaning ``eps**p * log(eps)**k`` in the small-``eps`` expansion.

    Besides integer powers the ``i0`` regularisation produces powers
    ``beta + 1 + j`` from the light cone and ``beta + n/2 + j`` from the
    vertex, each possibly multiplied by logarithms.
    """
    terms: list[tuple[complex, int]] = [(1, 0), (2, 0), (3, 0)]
    singular: list[complex] = []
    for base in ([beta + 1] + ([beta + n / 2] if n >= 2 else [])):
        for j in range(2):
            p = complex(base + j)
            if all(abs(p - q) > 1e-12 for q in singular):
                singular.append(p)
    for p in singular:
        for k in range(log_order + 1):
            if k == 0 and abs(p.imag) < 1e-12 and abs(p.real - round(p.real)) < 1e-12 and 1 <= round(p.real) <= 3:
                continue
            terms.append((p, k))
    return terms


def richardson_limit(eps, values, terms=None) -> tuple[complex, float]:
    """Extrapolate ``values(eps)`` to ``eps = 0``.

    Without ``terms`` this is Neville's polynomial extrapolation. With
    ``terms`` (see ``ladder_exponents``) the expansion
    ``v(0) + sum c_(p,k) eps**p log(eps)**k`` is fitted by least squares.
    The error indicator is the change when the largest two ``eps`` are dropped.
    """
    eps = np.asarray(eps, dtype=float)
    values = np.asarray(values, dtype=complex)
    if terms is None:
        table = [values]
        for level in range(1, eps.size):
            prev = table[-1]
            table.append((eps[level:] * prev[:-1] - eps[:-level] * prev[1:]) / (eps[level:] - eps[:-level]))
        best = table[-1][0]
        second = table[-2][-1] if len(table) > 1 else best
        return complex(best), float(abs(best - second))

    def fit(e, v):
        cols = [np.ones_like(e, dtype=complex)] + [e**p * np.log(e) ** k for p, k in terms]
        A = np.array(cols).T
        scale = np.linalg.norm(A, axis=0)
        sol = np.linalg.lstsq(A / scale, v, rcond=None)[0]
        return sol[0] / scale[0]

    best = fit(eps, values)
    check = fit(eps[2:], values[2:]) if eps.size - 2 > len(terms) + 1 else best
    return complex(best), float(abs(best - check))


# --------------------------------------------------------------------------
# pairing
# --------------------------------------------------------------------------

_QUAD_FAIL = 1e-6


def _default_transfers(query: DistributionQuery) -> int:
    re = complex(query.beta).real
    if query.family in ("f", "h"):
        return 0
    return max(0, math.floor(-re - 0.5) + 1) if re <= -0.5 else 0


def _is_nonpositive_integer(beta: complex) -> bool:
    beta = complex(beta)
    return beta.imag == 0 and beta.real <= 0 and float(beta.real).is_integer()


def _line_derivative(phi, order: int):
    out = phi
    for _ in range(order):
        out = out.derivative(0)
    return out


def _grid_params(phi, steps: int | None, n: int) -> tuple[float, int]:
    radius = math.ceil(2 * phi.support_radius()) / 2  # coarse radii let grids be reused
    if steps is None:
        steps = {1: 160, 2: 96, 3: 64}[n]
    return radius, steps


def pair(query: DistributionQuery, phi, strategy: str = "boundary_value", steps: int | None = None,
         angles: int = 24) -> PairingResult:
    """Pair a distribution from one of the homogeneous families with ``phi``.

    Parameters
    ----------
    query : DistributionQuery
    phi : GaussianPoly or Bump
        Test function on ``R^n``.
    strategy : {"boundary_value", "epsilon_ladder"}
        ``boundary_value`` integrates the ``i0`` limit directly: in
        cone-adapted coordinates the only singularities are end-point powers
        and logarithms, handled by tanh-sinh quadrature.
        ``epsilon_ladder`` integrates ``(gamma +- i eps)^beta`` for each
        ``eps`` and extrapolates to ``eps = 0``.  Families without an
        ``i0`` prescription ignore the strategy.
    steps : int, optional
        Half the number of tanh-sinh nodes per coordinate.
    angles : int
        Angular nodes for ``n = 3``.

    Raises
    ------
    OperationError
        ``POLE_AT_BETA`` for ``t_pm`` at negative integers,
        ``QUADRATURE_NOT_CONVERGED`` when the nested quadrature estimate is large.
    """
    if strategy not in ("boundary_value", "epsilon_ladder"):
        raise ValueError(f"unknown strategy {strategy!r}")
    if phi.n != query.n:
        raise OperationError(ErrorCode.DIMENSION_UNSUPPORTED, f"test function lives on R^{phi.n}, query on R^{query.n}")
    beta = complex(query.beta)
    fam = query.family

    if fam == "t_pm":
        return _pair_t(query, phi, steps)
    if fam in ("f", "h"):
        if strategy == "epsilon_ladder" or beta.real <= -1:
            return _pair_line_ladder(query, phi, steps)
        return _pair_line_boundary(query, phi, steps)

    m = _default_transfers(query) if query.box_transfers is None else int(query.box_transfers)
    if (beta + m).real <= -1:
        raise OperationError(ErrorCode.QUADRATURE_NOT_CONVERGED, f"Re(beta) + {m} transfers must exceed -1")
    psi = phi.box(m) if m else phi
    b = beta + m
    radius, steps = _grid_params(psi, steps, query.n)
    grids = _region_grids(query.n, radius, steps, angles)

    if fam in ("R", "R_tilde"):
        mom = _moments(grids, psi, b)
        if fam == "R":
            idx = 0 if query.sign == 1 else 1
            value = 2 * coeff_C(b, query.n) * mom.power[idx]
        else:
            value = 2 * coeff_C(b, query.n) * (mom.power[2] + mom.power[3]) * (-1) ** m
        err = 2 * abs(coeff_C(b, query.n)) * mom.error
        _check_quadrature(value, err)
        return PairingResult(complex(value), err, "boundary_value", m)

    if strategy == "boundary_value":
        mom = _moments(grids, psi, b)
        F, dF = _f_from_moments(mom, b, query.sign, query.n)
        err = (abs(coeff_C(b, query.n)) + abs(dcoeff_C(b, query.n))) * mom.error
        value = F if fam == "F" else query.sign * 1j / np.pi * dF + query.Lambda * F
        _check_quadrature(value, err)
        return PairingResult(complex(value), err, strategy, m)

    values, quad_err = [], 0.0
    c, dc = coeff_C(b, query.n), dcoeff_C(b, query.n)
    psi_values = [psi(g.points) for g in grids]
    for eps in query.epsilon_ladder:
        total, total_log, e = _regularised(grids, psi_values, b, query.sign, eps)
        F = c * total
        if fam == "F":
            values.append(F)
        else:
            dF = dc * total + c * total_log
            values.append(query.sign * 1j / np.pi * dF + query.Lambda * F)
        quad_err = max(quad_err, abs(c) * e)
    terms = ladder_exponents(b, query.n, 1 if fam == "F" else 2)
    value, extrap = richardson_limit(query.epsilon_ladder, values, terms)
    return PairingResult(value, extrap + quad_err, strategy, m)


def _check_quadrature(value, err):
    if err > _QUAD_FAIL * max(1.0, abs(value)):
        raise OperationError(ErrorCode.QUADRATURE_NOT_CONVERGED, f"nested quadrature estimate {err:.3e}")


def _f_from_moments(mom: _Moments, b: complex, sign: int, n: int) -> tuple[complex, complex]:
    """``F^sign_b`` and ``dF^sign/dbeta`` from region moments (timelike, timelike, spacelike, spacelike)."""
    phase = np.exp(sign * 1j * np.pi * b)
    I_t = mom.power[0] + mom.power[1]
    I_s = mom.power[2] + mom.power[3]
    L_t = mom.log[0] + mom.log[1]
    L_s = mom.log[2] + mom.log[3]
    c, dc = coeff_C(b, n), dcoeff_C(b, n)
    plain = I_t + phase * I_s
    F = c * plain
    dF = dc * plain + c * (L_t + phase * (L_s + sign * 1j * np.pi * I_s))
    return F, dF


def _pair_line_boundary(query, phi, steps) -> PairingResult:
    beta = complex(query.beta)
    radius, steps = _grid_params(phi, steps, 1)
    mom = _moments(_line_grids(radius, steps), phi, beta)
    phase = np.exp(query.sign * 1j * np.pi * beta)
    if query.family == "f":
        value = mom.power[0] + phase * mom.power[1]
    else:
        value = mom.log[0] + phase * (mom.log[1] + query.sign * 1j * np.pi * mom.power[1])
    _check_quadrature(value, mom.error)
    return PairingResult(complex(value), mom.error, "boundary_value", 0)


def _pair_line_ladder(query, phi, steps) -> PairingResult:
    beta = complex(query.beta)
    radius, steps = _grid_params(phi, steps, 1)
    grids = _line_grids(radius, steps)
    phi_values = [phi(g.points) for g in grids]
    values, quad_err = [], 0.0
    for eps in query.epsilon_ladder:
        total, total_log, e = _regularised(grids, phi_values, beta, query.sign, eps)
        values.append(total if query.family == "f" else total_log)
        quad_err = max(quad_err, e)
    terms = ladder_exponents(beta, 1, 1 if query.family == "f" else 2)
    value, extrap = richardson_limit(query.epsilon_ladder, values, terms)
    return PairingResult(value, extrap + quad_err, "epsilon_ladder", 0)


def _pair_t(query, phi, steps) -> PairingResult:
    """``t_+-^beta``; below ``Re(beta) = -1`` by ``t^(b-1) = +-(1/b) d/dt t^b`` moved onto ``phi``."""
    beta = complex(query.beta)
    m = 0 if beta.real > -1 else math.floor(-beta.real)
    if query.box_transfers is not None:
        m = int(query.box_transfers)
    factor = 1.0 + 0j
    for j in range(1, m + 1):
        b = beta + j
        if b == 0:
            raise OperationError(ErrorCode.POLE_AT_BETA, f"t_pm^beta has a pole at beta = {beta}")
        # pairing with t^(b-1) = -(sign / b) * pairing of t^b with phi'
        factor *= -query.sign / b
    if _is_nonpositive_integer(beta) and beta.real < 0:
        raise OperationError(ErrorCode.POLE_AT_BETA, f"t_pm^beta has a pole at beta = {beta}")
    psi = _line_derivative(phi, m)
    radius, steps = _grid_params(psi, steps, 1)
    mom = _moments(_line_grids(radius, steps), psi, beta + m)
    idx = 0 if query.sign == 1 else 1
    value = factor * mom.power[idx]
    _check_quadrature(value, mom.error)
    return PairingResult(complex(value), abs(factor) * mom.error, "boundary_value", m)


# --------------------------------------------------------------------------
# identity harness
# --------------------------------------------------------------------------


@dataclass
class IdentityRecord:
    """One identity evaluated on one test function."""

    identity: str
    beta: complex
    sign: int
    phi_index: int
    lhs: complex
    rhs: complex
    deviation: float
    tolerance: float
    passed: bool = field(init=False)

    def __post_init__(self):
        self.passed = bool(self.deviation <= self.tolerance)


def relative_deviation(lhs: complex, rhs: complex, floor: float = 1e-12) -> float:
    """``|lhs - rhs| / max(|lhs|, |rhs|)``, or the absolute gap when both are below ``floor``."""
    scale = max(abs(lhs), abs(rhs))
    gap = abs(lhs - rhs)
    return float(gap if scale < floor else gap / scale)


def _line_probe(phi):
    """One-dimensional Gaussian sharing the first center coordinate and width of ``phi``."""
    from .schwartz import GaussianPoly

    width = 1.0 / np.sqrt(phi.Q[0, 0]) if hasattr(phi, "Q") else getattr(phi, "width", 1.0)
    return GaussianPoly.isotropic([phi.center[0]], width, np.array([1.0, 0.5, 0.25]))


def identity_suite(beta_list, n: int, Lambda: float, phi_list, tol: float = 1e-6,
                   boost_rapidity: float = 0.7, steps: int | None = None) -> list[IdentityRecord]:
    """Evaluate the algebraic identities of the ``F``, ``G``, ``R`` families.

    Both sides of every identity are computed by independent pairings;
    multiplication by ``gamma`` and the d'Alembertian act exactly on the
    test function. The ``box`` identities pair ``F_{b+1}`` (or ``G_{b+1}``)
    with ``box phi`` directly, without automatic transfers.

    Identities (``s = +-1`` labels the ``i0`` side):

    * ``F_mult``: ``gamma F_b = (2b+2)(2b+n) F_{b+1}``
    * ``F_real_part``: ``F^+_b + F^-_b = R^+_b + R^-_b + cos(pi b) Rtilde_b``
    * ``F_imag_part``: ``-i (F^+_b - F^-_b) = sin(pi b) Rtilde_b``
    * ``F_box``: ``box F_{b+1} = F_b``
    * ``F_lorentz``: ``F_b`` is invariant under a boost
    * ``G_mult``: ``gamma G_b = (2b+2)(2b+n) G_{b+1} + s (i/pi)(8b+4+2n) F_{b+1}``
    * ``G_box``: ``box G_{b+1} = G_b``
    * ``G_sum`` (integer ``b``): ``G^+_b + G^-_b = R^+_b + R^-_b``; exact only
      when ``Lambda = 1`` or ``F_b = 0``
    * ``G_sum_lambda`` (integer ``b``): ``G^+_b + G^-_b = R^+_b + R^-_b + (Lambda - 1)(F^+_b + F^-_b)``
    * ``line_sum``: ``f^+_b + f^-_b = 2 t_+^b + 2 cos(pi b) t_-^b``
    * ``line_difference``: ``-i (f^+_b - f^-_b) = 2 sin(pi b) t_-^b``
    """
    from .schwartz import lorentz_boost

    records: list[IdentityRecord] = []

    def q(fam, b, s=1, dim=n, m=0):
        return DistributionQuery(fam, b, s, dim, Lambda=Lambda, box_transfers=m)

    def P(fam, b, phi, s=1, dim=n, strategy="boundary_value"):
        return pair(q(fam, b, s, dim), phi, strategy=strategy, steps=steps).value

    def add(name, b, s, i, lhs, rhs):
        records.append(IdentityRecord(name, complex(b), s, i, complex(lhs), complex(rhs),
                                      relative_deviation(lhs, rhs), tol))

    for i, phi in enumerate(phi_list):
        gphi, bphi = phi.times_gamma(), phi.box()
        for b in beta_list:
            b = complex(b)
            F, G = {}, {}
            for s in (1, -1):
                F[s] = P("F", b, phi, s)
                G[s] = P("G", b, phi, s)
                F1 = P("F", b + 1, phi, s)
                G1 = P("G", b + 1, phi, s)
                add("F_mult", b, s, i, P("F", b, gphi, s), (2 * b + 2) * (2 * b + n) * F1)
                add("F_box", b, s, i, P("F", b + 1, bphi, s), F[s])
                add("G_mult", b, s, i, P("G", b, gphi, s),
                    (2 * b + 2) * (2 * b + n) * G1 + s * 1j / np.pi * (8 * b + 4 + 2 * n) * F1)
                add("G_box", b, s, i, P("G", b + 1, bphi, s), G[s])
            # the region integrals behind R and Rtilde also build the boundary-value F,
            # so the i0 side of these identities comes from the epsilon ladder instead
            FL = {s: P("F", b, phi, s, strategy="epsilon_ladder") for s in (1, -1)}
            Rp, Rm = P("R", b, phi, 1), P("R", b, phi, -1)
            Rt = P("R_tilde", b, phi)
            add("F_real_part", b, 0, i, FL[1] + FL[-1], Rp + Rm + np.cos(np.pi * b) * Rt)
            add("F_imag_part", b, 0, i, -1j * (FL[1] - FL[-1]), np.sin(np.pi * b) * Rt)
            if b.imag == 0 and float(b.real).is_integer():
                GL = {s: P("G", b, phi, s, strategy="epsilon_ladder") for s in (1, -1)}
                add("G_sum", b, 0, i, GL[1] + GL[-1], Rp + Rm)
                add("G_sum_lambda", b, 0, i, GL[1] + GL[-1], Rp + Rm + (Lambda - 1) * (FL[1] + FL[-1]))
            if hasattr(phi, "compose_linear"):
                boosted = phi.compose_linear(lorentz_boost(boost_rapidity, n))
                add("F_lorentz", b, 1, i, P("F", b, boosted, 1), F[1])
            line = _line_probe(phi)
            fp = P("f", b, line, 1, 1, strategy="epsilon_ladder")
            fm = P("f", b, line, -1, 1, strategy="epsilon_ladder")
            tp, tm = P("t_pm", b, line, 1, 1), P("t_pm", b, line, -1, 1)
            add("line_sum", b, 0, i, fp + fm, 2 * tp + 2 * np.cos(np.pi * b) * tm)
            add("line_difference", b, 0, i, -1j * (fp - fm), 2 * np.sin(np.pi * b) * tm)
    return records
