"""Command runners: turn a validated configuration into a :class:`Report`.

Every runner returns ordered :class:`Check` objects. Errors raised by a
computation become failed checks carrying the error code, so one bad
model does not hide the others.
"""

from __future__ import annotations

import math
import time
from typing import Callable

import numpy as np

from .config import (
    DeltaCheckConfig,
    DistConfig,
    EtaConfig,
    ExperimentConfig,
    FullSuiteConfig,
    HadamardConfig,
    IndexConfig,
    PropagatorConfig,
    TestFunctionConfig,
)
from .constants import DENSITY_PHASE
from .distributions import (
    DistributionQuery,
    coeff_C,
    coeff_Ctilde,
    dcoeff_C,
    identity_suite,
    pair,
    relative_deviation,
)
from .errors import OperationError
from .eta import eta_heat, eta_smeared, eta_zeta
from .hadamard import (
    ConstantField,
    FlatOperatorSpec,
    calibrate_density_phase,
    cylinder_operator_specs,
    diagonal_coefficients,
    integrated_index_density,
    solve_transport,
    transport_residual,
)
from .index_engine import duality_check, index_report
from .operators import (
    CircleOperatorSpec,
    CylinderModel,
    build_circle_dirac,
    build_jordan_model,
    laplace_from_dirac,
)
from .propagator import KernelFamily, fundamental_solution_errors
from .report import Check, Report
from .schwartz import GaussianPoly
from .spectral import RaySpec, complex_power, frequency_projectors

__all__ = [
    "run",
    "run_eta",
    "run_index",
    "run_propagator",
    "run_dist",
    "run_hadamard",
    "run_full_suite",
    "default_test_functions",
    "twisted_cylinder_residuals",
    "hadamard_checks",
    "identity_checks",
    "delta_checks",
    "constant_checks",
    "projector_residual",
    "closed_form_eta",
    "CRITERIA",
    "circle_models",
    "INDEX_PATHS",
    "ETA_FLUXES",
]

# gauge paths with their integer index
INDEX_PATHS = ((0.3, 1.3, 1), (0.25, -1.75, -2), (0.3, 0.9, 0))
ETA_FLUXES = (0.1, 0.25, 0.4, 0.6, 0.9)
_ETA_ROUTES = {"zeta": eta_zeta, "heat_fit": eta_heat, "smeared": eta_smeared}


def _guard(checks: list, name: str, fn: Callable[[], list], tolerance: float = 0.0, criterion=None) -> None:
    """Append the checks produced by ``fn``; on an error append one failed check instead."""
    try:
        checks.extend(fn())
    except (OperationError, ValueError, np.linalg.LinAlgError) as exc:
        checks.append(Check.failure(name, exc, tolerance, criterion=criterion))


# --------------------------------------------------------------------------
# eta / xi
# --------------------------------------------------------------------------


def closed_form_eta(flux: complex) -> tuple[complex, int] | None:
    """Eta and kernel dimension of ``-i d/dtheta + flux`` on the circle, or ``None`` on the cut."""
    flux = complex(flux)
    frac = flux - math.floor(flux.real)
    if frac.real == 0:
        return (0j, 1) if frac.imag == 0 else None
    return 1 - 2 * frac, 0


def _eta_reference(cfg: EtaConfig, zeta_value: complex | None):
    if cfg.reference is not None:
        return cfg.reference, None, "config"
    coeffs = cfg.potential_coeffs()
    if cfg.rank == 1:
        # a scalar potential is gauge equivalent to its mean added to the flux
        mean = sum(complex(np.asarray(v).ravel()[0]) for f, v in coeffs if f == 0)
        closed = closed_form_eta(cfg.flux + mean)
        if closed is not None:
            source = "hurwitz_closed_form" if not coeffs else "gauge_equivalent_closed_form"
            return closed[0], closed[1], source
    return zeta_value, None, "zeta_route"


def run_eta(cfg: EtaConfig) -> list[Check]:
    spec = CircleOperatorSpec(flux=cfg.flux, potential_coeffs=cfg.potential_coeffs(), rank=cfg.rank, K=cfg.K)
    D = build_circle_dirac(spec)
    ray = RaySpec(cfg.ray_angle)
    results, checks = {}, []
    for method in cfg.methods:
        try:
            results[method] = _ETA_ROUTES[method](D, ray)
        except OperationError as exc:
            results[method] = exc
    zeta = results.get("zeta")
    if zeta is None or isinstance(zeta, Exception):
        try:
            zeta = eta_zeta(D, ray)
        except OperationError:
            zeta = None
    ref_eta, ref_h, source = _eta_reference(cfg, None if zeta is None else zeta.eta)
    quantity = cfg.command
    for method in cfg.methods:
        res = results[method]
        name = f"{quantity}.{method}"
        if isinstance(res, Exception):
            checks.append(Check.failure(name, res, cfg.tolerance, reference_source=source))
            continue
        if source == "zeta_route" and method == "zeta":
            continue
        h = ref_h if ref_h is not None else res.h
        if quantity == "eta":
            value, reference = res.eta, ref_eta
        else:
            value = res.xi
            reference = None if ref_eta is None else (ref_eta + h) / 2
        checks.append(Check(name, value, reference, cfg.tolerance, source,
                            details={"h": res.h, "error_estimate": res.error_estimate}))
        if ref_h is not None:
            checks.append(Check(f"kernel_dimension.{method}", res.h, ref_h, 0.0, source))
    return checks


# --------------------------------------------------------------------------
# index
# --------------------------------------------------------------------------


def _index_checks(model: CylinderModel, expected: int | None, tol_index: float, tol_boundary: float,
                  tol_dual: float, criterion=None) -> list[Check]:
    rep = index_report(model)
    label = f"{complex(model.gauge_path.start).real:g}->{complex(model.gauge_path.end).real:g}"
    reference = expected if expected is not None else rep.spectral_flow
    source = "stated_index" if expected is not None else "spectral_flow"
    out = [
        Check(f"index.trace[{label}]", rep.trace_index, reference, tol_index, source, criterion=criterion,
              details={"solver_error": rep.residuals.get("solver_error")}),
        Check(f"index.spectral_flow[{label}]", rep.spectral_flow, rep.rounded_index, 0.0, "rounded_trace",
              criterion=criterion),
        Check(f"index.boundary_formula[{label}]", rep.trace_index, rep.rhs, tol_boundary, "xi_difference_plus_flux",
              criterion=criterion,
              details={"xi_plus": rep.xi_plus, "xi_minus": rep.xi_minus, "flux": rep.curvature_integral}),
    ]
    residual = duality_check(model)
    out.append(Check(f"index.duality_residual[{label}]", residual, 0.0, tol_dual, "exact_pairing",
                     criterion=criterion))
    return out


def _density_checks(model: CylinderModel, tol: float, criterion=None) -> list[Check]:
    start, end = complex(model.gauge_path.start), complex(model.gauge_path.end)
    label = f"{start.real:g}->{end.real:g}"
    value = integrated_index_density(model)
    flux = end - start
    return [
        Check(f"density.modulus[{label}]", abs(value), abs(flux), tol, "flux", criterion=criterion),
        Check(f"density.signed[{label}]", value, DENSITY_PHASE * flux, tol, "calibrated_phase_times_flux",
              criterion=criterion),
    ]


def run_index(cfg: IndexConfig) -> list[Check]:
    model = CylinderModel.from_fluxes(cfg.start, cfg.end, cfg.K, cfg.t_minus, cfg.t_plus, cfg.margin,
                                      cfg.potential_coeffs(), cfg.rank)
    checks: list[Check] = []
    _guard(checks, "index", lambda: _index_checks(model, cfg.expected_index, cfg.index_tolerance,
                                                  cfg.boundary_tolerance, cfg.duality_tolerance))
    if cfg.density:
        _guard(checks, "density", lambda: _density_checks(model, cfg.density_tolerance))
    return checks


# --------------------------------------------------------------------------
# propagator
# --------------------------------------------------------------------------


def _order_checks(name: str, fam: KernelFamily, refinements, t_span, tol, criterion=None) -> list[Check]:
    errors = fundamental_solution_errors(fam, refinements, t_span)
    orders = np.log2(errors[:-1] / errors[1:])
    worst = orders[np.argmax(np.abs(orders - 2))]
    return [Check(f"propagator.order[{name}]", float(worst), 2.0, tol, "second_order_differences",
                  criterion=criterion, details={"errors": errors, "orders": orders})]


def _splitting_checks(name: str, D, times, tol, criterion=None) -> list[Check]:
    fam = KernelFamily.from_chiral("feynman_dirac", D)
    proj = frequency_projectors(fam.matrix)
    future = max(float(np.abs(proj.p_lt @ fam.evaluate(t)).max()) for t in times)
    past = max(float(np.abs(proj.p_ge @ fam.evaluate(-t)).max()) for t in times)
    jump = fam.evaluate(0.0, "+") - fam.evaluate(0.0, "-")
    jump_dev = float(np.abs(jump - 1j * fam.clifford_normal).max())
    return [
        Check(f"splitting.future_negative[{name}]", future, 0.0, tol, "exact_zero", criterion=criterion),
        Check(f"splitting.past_nonnegative[{name}]", past, 0.0, tol, "exact_zero", criterion=criterion),
        Check(f"splitting.jump[{name}]", jump_dev, 0.0, tol, "normal_symbol", criterion=criterion,
              deviation=jump_dev),
    ]


def run_propagator(cfg: PropagatorConfig) -> list[Check]:
    spec = CircleOperatorSpec(flux=cfg.flux, potential_coeffs=cfg.potential_coeffs(), rank=cfg.rank, K=cfg.K)
    models = {"circle": build_circle_dirac(spec)}
    if cfg.jordan:
        models["jordan"] = build_jordan_model(cfg.jordan_K)
    checks: list[Check] = []
    for name, D in models.items():
        _guard(checks, f"propagator.order[{name}.wave]", lambda: _order_checks(
            f"{name}.wave", KernelFamily("feynman_wave", laplace_from_dirac(D)), cfg.refinements, cfg.t_span,
            cfg.order_tolerance))
        _guard(checks, f"propagator.order[{name}.dirac]", lambda: _order_checks(
            f"{name}.dirac", KernelFamily.from_chiral("feynman_dirac", D), cfg.refinements, cfg.t_span,
            cfg.order_tolerance))
        _guard(checks, f"splitting[{name}]",
               lambda: _splitting_checks(name, D, cfg.sample_times, cfg.splitting_tolerance))
    return checks


# --------------------------------------------------------------------------
# distributions
# --------------------------------------------------------------------------


def default_test_functions(n: int) -> list[GaussianPoly]:
    """Three fixed Gaussian-polynomial test functions on ``R^n`` (``n`` in 1, 2, 3)."""
    if n == 1:
        return [GaussianPoly.isotropic([0.0], 1.0), GaussianPoly.isotropic([0.3], 0.8, np.array([1.0, 0.5])),
                GaussianPoly.isotropic([-0.2], 1.2, np.array([1.0, 0.0, 0.3]))]
    if n == 2:
        return [
            GaussianPoly.isotropic([0.0, 0.0], 1.0),
            GaussianPoly.isotropic([0.3, -0.2], 0.8, np.array([[1.0, 0.5], [0.2, 0.0]])),
            GaussianPoly.isotropic([-0.1, 0.25], 1.2, np.array([[1.0, 0.0, 0.3]])),
        ]
    if n == 3:
        return [
            GaussianPoly.isotropic([0.0, 0.0, 0.0], 1.0),
            GaussianPoly.isotropic([0.2, -0.1, 0.1], 0.9, np.array([1.0, 0.4]).reshape(2, 1, 1)),
            GaussianPoly.isotropic([0.1, 0.2, -0.2], 1.1),
        ]
    raise ValueError(f"no default test functions for n = {n}")


def _test_functions(configs: list[TestFunctionConfig] | None, n: int) -> list[GaussianPoly]:
    if configs is None:
        return default_test_functions(n)
    out = []
    for tf in configs:
        poly = None if tf.poly is None else np.asarray(tf.poly, dtype=float)
        if poly is not None and poly.ndim != n:
            raise ValueError(f"test function polynomial must have {n} axes")
        out.append(GaussianPoly.isotropic(tf.center, tf.width, poly))
    return out


def constant_checks(Lambda: float, tol: float, criterion=None) -> list[Check]:
    """The four stated structure-constant values."""
    return [
        Check("constant.C(0,2)", coeff_C(0, 2), 0.25, tol, "stated_value", criterion=criterion),
        Check("constant.C(1,2)", coeff_C(1, 2), 1 / 16, tol, "stated_value", criterion=criterion),
        Check("constant.dC/dbeta(-1,2)", dcoeff_C(-1, 2), 1.0, tol, "stated_value", criterion=criterion),
        Check("constant.Ctilde(-1,2)", coeff_Ctilde(-1, 2, Lambda), 1j / math.pi, tol, "stated_value",
              criterion=criterion),
    ]


def delta_checks(dc: DeltaCheckConfig, criterion=None) -> list[Check]:
    """Pair ``F_beta`` or ``G_beta`` with test functions after epsilon extrapolation and compare with ``phi(0)``."""
    checks = []
    for i, phi in enumerate(_test_functions(dc.test_functions, dc.n)):
        target = phi.value_at(np.zeros(dc.n))
        for sign in (1, -1):
            name = f"delta.{dc.family}[beta={dc.beta:g},n={dc.n},s={sign:+d},phi={i}]"
            try:
                res = pair(DistributionQuery(dc.family, dc.beta, sign, dc.n, Lambda=dc.Lambda), phi,
                           strategy="epsilon_ladder")
            except OperationError as exc:
                checks.append(Check.failure(name, exc, dc.tolerance, target, "phi_at_origin", criterion))
                continue
            checks.append(Check(name, res.value, target, dc.tolerance, "phi_at_origin", criterion=criterion,
                                deviation=relative_deviation(res.value, target),
                                details={"extrapolation_error": res.error_estimate, "transfers": res.transfers}))
    return checks


def identity_checks(n: int, betas, Lambda: float, phis, tol: float, identities=None, criterion=None) -> list[Check]:
    records = identity_suite(betas, n, Lambda, phis, tol)
    out = []
    for r in records:
        if identities is not None and r.identity not in identities:
            continue
        b = r.beta.real if r.beta.imag == 0 else r.beta
        name = f"identity.{r.identity}[beta={b:g},s={r.sign:+d},phi={r.phi_index}]"
        out.append(Check(name, r.lhs, r.rhs, tol, "independent_pairing", criterion=criterion,
                         deviation=r.deviation, details={"Lambda": Lambda}))
    return out


def run_dist(cfg: DistConfig) -> list[Check]:
    checks: list[Check] = []
    if cfg.constants:
        checks.extend(constant_checks(cfg.Lambda, cfg.constant_tolerance))
    phis = _test_functions(cfg.test_functions, cfg.n)
    _guard(checks, "identity", lambda: identity_checks(cfg.n, cfg.betas, cfg.Lambda, phis, cfg.tolerance,
                                                       cfg.identities), cfg.tolerance)
    for dc in cfg.delta_checks:
        _guard(checks, f"delta.{dc.family}", lambda: delta_checks(dc), dc.tolerance)
    return checks


# --------------------------------------------------------------------------
# Hadamard
# --------------------------------------------------------------------------

_SEGMENT_FRACTIONS = (0.25, 0.5, 1.0)


def _segment(y: np.ndarray, length: float = 0.5) -> list[np.ndarray]:
    direction = np.linspace(1.0, 0.3, y.size)
    direction /= np.linalg.norm(direction)
    return [y + s * length * direction for s in _SEGMENT_FRACTIONS]


def hadamard_checks(n: int, B, points, k_max: int, tol: float, residual_tol: float, criterion=None) -> list[Check]:
    B = np.asarray(B, dtype=complex)
    spec = FlatOperatorSpec(n, ConstantField(B))
    checks = []
    for i, x in enumerate(points):
        x = np.asarray(x, dtype=float)
        diag = diagonal_coefficients(spec, x, k_max)
        for k in range(k_max + 1):
            expected = np.linalg.matrix_power(-B, k)
            dev = float(np.abs(diag.values[k] - expected).max())
            checks.append(Check(f"hadamard.diagonal[k={k},x={i}]", dev, 0.0, tol, "power_of_minus_B",
                                criterion=criterion, deviation=dev))
        sol = solve_transport(spec, x, k_max)
        for k in range(k_max + 1):
            res = float(np.max(transport_residual(sol, k, _segment(x))))
            checks.append(Check(f"hadamard.transport_residual[k={k},x={i}]", res, 0.0, residual_tol,
                                "exact_zero", criterion=criterion))
    return checks


def twisted_cylinder_residuals(tol: float, k_max: int = 2, criterion=None) -> list[Check]:
    """Transport residuals for both squared Dirac operators of a gauge ramp, inside the ramp."""
    model = CylinderModel.from_fluxes(0.3, 1.3, 8)
    y = np.array([0.45, 1.0])
    checks = []
    for side, spec in zip(("left", "right"), cylinder_operator_specs(model)):
        # the jets are local: a longer segment needs a higher order
        sol = solve_transport(spec, y, k_max, order=24)
        for k in range(k_max + 1):
            res = float(np.max(transport_residual(sol, k, _segment(y, 0.1))))
            checks.append(Check(f"hadamard.cylinder_residual[{side},k={k}]", res, 0.0, tol, "exact_zero",
                                criterion=criterion))
    return checks


def run_hadamard(cfg: HadamardConfig) -> list[Check]:
    checks: list[Check] = []
    _guard(checks, "hadamard", lambda: hadamard_checks(cfg.n, cfg.B, cfg.points, cfg.k_max, cfg.tolerance,
                                                       cfg.residual_tolerance))
    if cfg.n == 2:
        _guard(checks, "hadamard.cylinder", lambda: twisted_cylinder_residuals(cfg.residual_tolerance))
    return checks


# --------------------------------------------------------------------------
# full suite
# --------------------------------------------------------------------------


def circle_models() -> dict:
    """Named circle operators covering kernels, complex flux, matrix potentials and a Jordan block."""
    pot = ((1, [[0.3, 0.1], [0.0, 0.2]]), (-1, [[0.1, 0.0], [0.2, 0.3]]), (0, [[0.15, 0.05], [0.05, -0.1]]))
    return {
        "flux_0.25": build_circle_dirac(CircleOperatorSpec(flux=0.25, K=8)),
        "flux_0": build_circle_dirac(CircleOperatorSpec(flux=0.0, K=8)),
        "flux_complex": build_circle_dirac(CircleOperatorSpec(flux=0.3 + 0.2j, K=8)),
        "matrix_potential": build_circle_dirac(CircleOperatorSpec(flux=0.4, potential_coeffs=pot, rank=2, K=6)),
        "jordan": build_jordan_model(4),
    }


def projector_residual(D) -> float:
    """Largest residual of the frequency-projector algebra for ``D``."""
    D = np.asarray(getattr(D, "entries", D), dtype=complex)
    p = frequency_projectors(D)
    eye = np.eye(D.shape[0])
    root = complex_power(D @ D, 0.5)
    parts = (p.p_gt, p.p_lt, p.p_0)
    residuals = [np.abs(sum(parts) - eye).max()]
    for i, a in enumerate(parts):
        residuals.append(np.abs(a @ a - a).max())
        residuals.append(np.abs(a @ D - D @ a).max())
        for j, b in enumerate(parts):
            if i != j:
                residuals.append(np.abs(a @ b).max())
    residuals.append(np.abs((p.p_gt - p.p_lt) @ D - root).max())
    return float(max(residuals))


def _criterion_1(cfg: FullSuiteConfig, seed: int) -> list[Check]:
    rng = np.random.default_rng(seed)
    size = cfg.matrix_size
    worst, failures = 0.0, []
    for i in range(cfg.random_matrices):
        D = (rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))) / math.sqrt(2 * size)
        try:
            worst = max(worst, projector_residual(D))
        except OperationError as exc:
            failures.append(f"matrix {i}: {exc}")
    checks = [Check("projectors.random_matrices", worst, 0.0, 1e-10, "exact_identity", criterion=1,
                    passed=worst <= 1e-10 and not failures, details={"count": cfg.random_matrices, "size": size,
                                                                      "errors": failures})]
    for name, D in circle_models().items():
        _guard(checks, f"projectors.circle[{name}]", lambda: [Check(
            f"projectors.circle[{name}]", projector_residual(D), 0.0, 1e-10, "exact_identity", criterion=1)],
            1e-10, 1)
    return checks


def _criterion_2(cfg, seed) -> list[Check]:
    checks: list[Check] = []
    for dc in (DeltaCheckConfig(family="F", beta=-1.5, n=3), DeltaCheckConfig(family="G", beta=-1.0, n=2)):
        _guard(checks, f"delta.{dc.family}", lambda: delta_checks(dc, criterion=2), 1e-3, 2)
    return checks


def _criterion_3(cfg, seed) -> list[Check]:
    checks: list[Check] = []
    _guard(checks, "identity", lambda: identity_checks(2, [0.5, 1.0, 1.5], 1.0, default_test_functions(2), 1e-6,
                                                       criterion=3), 1e-6, 3)
    return checks


def _criterion_4(cfg, seed) -> list[Check]:
    return constant_checks(1.0, 1e-12, criterion=4)


def _criterion_5(cfg, seed) -> list[Check]:
    checks: list[Check] = []
    for a in ETA_FLUXES:
        D = build_circle_dirac(CircleOperatorSpec(flux=a, K=200))
        reference = 1 - 2 * a
        for method, route in _ETA_ROUTES.items():
            name = f"eta.{method}[a={a:g}]"
            try:
                res = route(D)
            except OperationError as exc:
                checks.append(Check.failure(name, exc, 1e-3, reference, "hurwitz_closed_form", 5))
                continue
            checks.append(Check(name, res.eta, reference, 1e-3, "hurwitz_closed_form", criterion=5,
                                details={"error_estimate": res.error_estimate}))
    return checks


def _criterion_6(cfg, seed) -> list[Check]:
    checks: list[Check] = []
    D = build_circle_dirac(CircleOperatorSpec(flux=0.25, K=3))
    for name, fam in (("circle.wave", KernelFamily("feynman_wave", laplace_from_dirac(D))),
                      ("circle.dirac", KernelFamily.from_chiral("feynman_dirac", D))):
        _guard(checks, f"propagator.order[{name}]",
               lambda: _order_checks(name, fam, (100, 200, 400), 4.0, 0.1, criterion=6), 0.1, 6)
    return checks


def _criterion_7(cfg, seed) -> list[Check]:
    checks: list[Check] = []
    for name, D in circle_models().items():
        _guard(checks, f"splitting[{name}]", lambda: _splitting_checks(name, D, (0.35, 0.7, 1.9), 1e-12, 7),
               1e-12, 7)
    return checks


def _criterion_8(cfg, seed) -> list[Check]:
    checks: list[Check] = []
    for start, end, index in INDEX_PATHS:
        model = CylinderModel.from_fluxes(start, end, 128)
        _guard(checks, f"index[{start:g}->{end:g}]",
               lambda: _index_checks(model, index, 1e-3, 2e-3, 1e-8, criterion=8), 1e-3, 8)
    return checks


def _criterion_9(cfg, seed) -> list[Check]:
    checks: list[Check] = []
    _guard(checks, "hadamard", lambda: hadamard_checks(2, [[0.7, 0.2], [-0.1, 0.4]], [[0.1, -0.2], [0.4, 0.3]],
                                                       3, 1e-8, 1e-8, criterion=9), 1e-8, 9)
    _guard(checks, "hadamard", lambda: hadamard_checks(3, [[0.5]], [[0.2, 0.1, -0.3]], 3, 1e-8, 1e-8,
                                                       criterion=9), 1e-8, 9)
    _guard(checks, "hadamard.cylinder", lambda: twisted_cylinder_residuals(1e-8, criterion=9), 1e-8, 9)
    return checks


def _criterion_10(cfg, seed) -> list[Check]:
    checks: list[Check] = []
    phase = calibrate_density_phase()
    checks.append(Check("density.calibration", phase, DENSITY_PHASE, 0.0, "fixed_constant", criterion=10))
    for start, end, _ in INDEX_PATHS:
        model = CylinderModel.from_fluxes(start, end, 8)
        _guard(checks, f"density[{start:g}->{end:g}]", lambda: _density_checks(model, 1e-4, 10), 1e-4, 10)
    return checks


def _criterion_11(cfg, seed) -> list[Check]:
    """Re-run two cheap sections in-process and compare their serialised bytes."""
    small = FullSuiteConfig(random_matrices=5, criteria=[1, 4])
    first = Report("full-suite", {}, seed, _criterion_1(small, seed) + _criterion_4(small, seed)).to_json()
    second = Report("full-suite", {}, seed, _criterion_1(small, seed) + _criterion_4(small, seed)).to_json()
    return [Check("determinism.in_process_rerun", first == second, True, 0.0, "byte_equality", criterion=11,
                  passed=first == second, deviation=0.0 if first == second else 1.0)]


CRITERIA: dict[int, Callable] = {
    1: _criterion_1,
    2: _criterion_2,
    3: _criterion_3,
    4: _criterion_4,
    5: _criterion_5,
    6: _criterion_6,
    7: _criterion_7,
    8: _criterion_8,
    9: _criterion_9,
    10: _criterion_10,
    11: _criterion_11,
}


def run_full_suite(cfg: FullSuiteConfig, seed: int, timings: dict | None = None) -> list[Check]:
    """Checks of every selected acceptance criterion, in criterion order.

    ``timings`` (if given) receives wall-clock seconds per criterion.
    """
    checks: list[Check] = []
    for number in cfg.criteria:
        start = time.perf_counter()
        checks.extend(CRITERIA[number](cfg, seed))
        if timings is not None:
            timings[f"criterion_{number}"] = time.perf_counter() - start
    return checks


def run(config: ExperimentConfig, timings: dict | None = None) -> Report:
    """Dispatch ``config`` to its runner and assemble the report."""
    payload = config.payload
    start = time.perf_counter()
    if isinstance(payload, EtaConfig):
        checks = run_eta(payload)
    elif isinstance(payload, IndexConfig):
        checks = run_index(payload)
    elif isinstance(payload, PropagatorConfig):
        checks = run_propagator(payload)
    elif isinstance(payload, DistConfig):
        checks = run_dist(payload)
    elif isinstance(payload, HadamardConfig):
        checks = run_hadamard(payload)
    else:
        checks = run_full_suite(payload, config.seed, timings)
    if timings is not None:
        timings["total"] = time.perf_counter() - start
    return Report(payload.command, payload.model_dump(mode="python"), config.seed, checks)
