"""Residual checks of the differential equations and cross-representation reports.

The Laplacian on Hermitian matrices is taken for the metric ``tr(dX^2)``:
unit weight on diagonal coordinates and weight 1/2 on the real and imaginary
parts of off-diagonal entries. On conjugation-invariant functions it acts as

    Delta f = sum_j d_j^2 f + 2 sum_{j != k} d_j f / (x_j - x_k).

The unit-weight flat Laplacian has 4 in place of 2; both are reported by the
PDE check. Every report is a plain dataclass with a ``to_dict`` suitable for
JSON, and contains no timing or environment data so reruns are byte-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import hciz
from .errors import ConfluentSpectrum, DomainError, InvalidGrid
from .matrix_airy import (
    CalibrationTable,
    audit_scale,
    calibrate,
    evaluate,
    resolve_tag,
)
from .oscillatory_quad import DEFAULT_CONFIG, Evaluation, QuadratureConfig
from .scalar_airy import DOMAIN_LIMIT, ai_std, ai_paper
from .spectra import MatrixArgument, Spectrum, min_gap, split

SUITES = ("ode", "pde", "cross", "theorem2", "all")
REL_FLOOR = 1e-8
METRIC_WEIGHT = 2.0
FLAT_WEIGHT = 4.0


def _c(z: complex) -> dict:
    return {"re": float(z.real), "im": float(z.imag)}


@dataclass(frozen=True)
class ResidualReport:
    check_id: str
    grid: list
    residual_max: float
    residual_rel: float
    tolerance: float
    passed: bool
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"kind": "residual", "check_id": self.check_id, "grid": self.grid,
                "residual_max": self.residual_max, "residual_rel": self.residual_rel,
                "tolerance": self.tolerance, "passed": self.passed, "details": self.details}


@dataclass(frozen=True)
class ComparisonReport:
    check_id: str
    rep_pair: tuple[str, str]
    grid: list
    max_rel_disagreement: float
    kappa_used: tuple[complex, complex]
    tolerance: float
    passed: bool
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"kind": "comparison", "check_id": self.check_id, "rep_pair": list(self.rep_pair),
                "grid": self.grid, "max_rel_disagreement": self.max_rel_disagreement,
                "kappa_used": [_c(k) for k in self.kappa_used], "tolerance": self.tolerance,
                "passed": self.passed, "details": self.details}


@dataclass(frozen=True)
class StatisticalReport:
    """Agreement of two estimates measured in units of their combined error."""

    check_id: str
    grid: list
    z_max: float
    tolerance: float
    passed: bool
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"kind": "statistical", "check_id": self.check_id, "grid": self.grid,
                "z_max": self.z_max, "tolerance": self.tolerance, "passed": self.passed,
                "details": self.details}


# ---------------------------------------------------------------------------
# scalar ODE


def second_difference(fn: Callable[[float], float], x: float, h: float, stencil: str = "fourth"):
    if stencil == "second":
        return (fn(x + h) - 2 * fn(x) + fn(x - h)) / h**2
    if stencil == "fourth":
        return (-fn(x + 2 * h) + 16 * fn(x + h) - 30 * fn(x) + 16 * fn(x - h)
                - fn(x - 2 * h)) / (12 * h**2)
    raise DomainError(f"unknown stencil {stencil!r}")


def ode_residual_check(grid: Sequence[float], h: float = 1e-3, tolerance: float = 1e-6,
                       convention: str = "fourier", stencil: str = "fourth") -> ResidualReport:
    """Finite-difference residual of the Airy equation on ``grid``.

    ``convention='fourier'`` checks ``F'' + x F = 0`` for the Fourier-normalized
    ``F = ai_paper``; ``'standard'`` checks ``Ai'' - x Ai = 0``. The default
    stencil is the fourth-order central difference (the three-point stencil
    at this ``h`` leaves an ``h^2`` error near 1e-6).
    """
    grid = [float(x) for x in grid]
    if not grid:
        raise InvalidGrid("empty grid")
    if any(abs(x) + 2 * h > DOMAIN_LIMIT for x in grid):
        raise InvalidGrid("grid leaves the scalar Airy domain")
    if convention == "fourier":
        fn, sgn = ai_paper, 1.0
    elif convention == "standard":
        fn, sgn = ai_std, -1.0
    else:
        raise DomainError(f"unknown convention {convention!r}")
    res, mags = [], []
    for x in grid:
        val = fn(x)
        res.append(abs(second_difference(fn, x, h, stencil) + sgn * x * val))
        mags.append(abs(val))
    rmax = max(res)
    rel = rmax / max(max(mags), REL_FLOOR)
    return ResidualReport(f"ode_{convention}", grid, rmax, rel, tolerance, rel <= tolerance,
                          {"h": h, "stencil": stencil})


# ---------------------------------------------------------------------------
# radial Laplacian


def radial_laplacian(fn: Callable[[np.ndarray], complex], x: Sequence[float], h: float,
                     off_weight: float = METRIC_WEIGHT) -> complex:
    """``sum d_j^2 f + off_weight * sum_{j != k} d_j f / (x_j - x_k)`` by central differences."""
    x = np.asarray(x, dtype=float)
    n = x.size
    f0 = fn(x)
    total = 0.0j
    for j in range(n):
        e = np.zeros(n)
        e[j] = h
        fp, fm = fn(x + e), fn(x - e)
        total += (fp - 2 * f0 + fm) / h**2
        d1 = (fp - fm) / (2 * h)
        total += off_weight * d1 * sum(1.0 / (x[j] - x[k]) for k in range(n) if k != j)
    return total


def richardson_laplacian(fn, x, h, off_weight=METRIC_WEIGHT) -> complex:
    """One h-halving Richardson step on :func:`radial_laplacian` (error ``O(h^4)``)."""
    coarse = radial_laplacian(fn, x, h, off_weight)
    fine = radial_laplacian(fn, x, h / 2, off_weight)
    return (4 * fine - coarse) / 3


def matrix_laplacian(g: Callable[[np.ndarray], complex], X: np.ndarray, h: float,
                     off_diagonal_weight: float = 0.5) -> complex:
    """Laplacian of ``g`` in the N**2 real coordinates of a Hermitian matrix.

    ``off_diagonal_weight=0.5`` is the ``tr(dX^2)`` metric, ``1.0`` the
    unit-weight flat Laplacian.
    """
    X = np.asarray(X, dtype=complex)
    n = X.shape[0]
    g0 = g(X)
    total = 0.0j
    directions = []
    for i in range(n):
        E = np.zeros((n, n), dtype=complex)
        E[i, i] = 1.0
        directions.append((E, 1.0))
    for i in range(n):
        for j in range(i + 1, n):
            E = np.zeros((n, n), dtype=complex)
            E[i, j] = E[j, i] = 1.0
            directions.append((E, off_diagonal_weight))
            E = np.zeros((n, n), dtype=complex)
            E[i, j], E[j, i] = 1j, -1j
            directions.append((E, off_diagonal_weight))
    for E, weight in directions:
        total += weight * (g(X + h * E) - 2 * g0 + g(X - h * E)) / h**2
    return total


POLYNOMIAL_TESTS = {
    "one": (lambda x: 1.0, lambda N: 0.0),
    "trace": (lambda x: float(np.sum(x)), lambda N: 0.0),
    "trace_sq": (lambda x: float(np.sum(x**2)), lambda N: 2.0 * N * N),
}


def laplacian_self_test(Ns: Sequence[int] = (2, 3), seed: int = 0, h: float = 1e-3,
                        tolerance: float = 1e-6) -> ResidualReport:
    """Radial formula against closed forms and against the full matrix-coordinate Laplacian."""
    rng = np.random.default_rng(seed)
    rows, worst = [], 0.0
    extra = {"trace_cube": lambda x: float(np.sum(x**3)), "trace_quartic": lambda x: float(np.sum(x**4))}
    for N in Ns:
        x = np.sort(rng.uniform(-2, 2, N))[::-1] + np.arange(N)[::-1] * 0.5
        for name, (fn, expected) in POLYNOMIAL_TESTS.items():
            got = richardson_laplacian(fn, x, h).real
            err = abs(got - expected(N))
            worst = max(worst, err)
            rows.append({"N": N, "function": name, "radial": got, "expected": expected(N), "error": err})
        for name, fn in {**{k: v[0] for k, v in POLYNOMIAL_TESTS.items()}, **extra}.items():
            radial = richardson_laplacian(fn, x, h).real
            full = matrix_laplacian(lambda Y: fn(np.linalg.eigvalsh(Y)), np.diag(x), h).real
            err = abs(radial - full) / max(1.0, abs(full))
            worst = max(worst, err)
            rows.append({"N": N, "function": name, "radial": radial, "matrix_coordinates": full,
                         "error": err})
    return ResidualReport("laplacian_self_test", [list(Ns)], worst, worst, tolerance,
                          worst <= tolerance, {"cases": rows})


# ---------------------------------------------------------------------------
# PDE


def _rep_value(tag: str, cfg: QuadratureConfig):
    def fn(eigs: np.ndarray) -> complex:
        return evaluate(tag, split(eigs), cfg).value
    return fn


def pde_residual_check(
    N: int,
    eigen_grid: Sequence,
    representation: str,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
    h: float = 1e-2,
    tolerance: float = 5e-3,
) -> ResidualReport:
    """Residual of ``Delta A + (tr X) A = 0`` with the radial Laplacian.

    ``eigen_grid`` holds eigenvalue lists (or Spectra) of ``X``. The residual
    under the unit-weight flat Laplacian is reported in ``details``.
    """
    if N not in (1, 2):
        raise DomainError("PDE check supports N in {1, 2}")
    tag = resolve_tag(representation)
    if not eigen_grid:
        raise InvalidGrid("empty grid")
    fn = _rep_value(tag, cfg)
    points, res, res_flat, mags = [], [], [], []
    for raw in eigen_grid:
        x = np.array(raw.values if isinstance(raw, Spectrum) else raw, dtype=float)
        if x.size != N:
            raise DomainError(f"grid point {x.tolist()} does not have N={N} entries")
        if N > 1 and min_gap(x) <= 10 * h:
            raise ConfluentSpectrum(f"eigenvalue gap below 10 h at {x.tolist()}")
        a = fn(x)
        lap = richardson_laplacian(fn, x, h)
        lap_flat = richardson_laplacian(fn, x, h, FLAT_WEIGHT)
        tr = float(np.sum(x))
        points.append(x.tolist())
        res.append(abs(lap + tr * a))
        res_flat.append(abs(lap_flat + tr * a))
        mags.append(abs(a))
    scale = max(max(mags), REL_FLOOR)
    rmax = max(res)
    rel = rmax / scale
    details = {"h": h, "laplacian": "metric tr(dX^2)", "residuals": res,
               "flat_residual_rel": max(res_flat) / scale}
    return ResidualReport(f"pde_N{N}_{tag}", points, rmax, rel, tolerance, rel <= tolerance, details)


# ---------------------------------------------------------------------------
# cross comparison


def cross_compare(
    rep_a: str,
    rep_b: str,
    grid: Sequence[MatrixArgument],
    calibration: CalibrationTable,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
    tolerance: float = 1e-3,
    cache: dict | None = None,
    check_id: str | None = None,
) -> ComparisonReport:
    """Largest ``|ka A_a - kb A_b| / max(|ka A_a|, 1e-8)`` over ``grid``."""
    rep_a, rep_b = resolve_tag(rep_a), resolve_tag(rep_b)
    ka, kb = calibration.kappa(rep_a), calibration.kappa(rep_b)
    cache = {} if cache is None else cache

    def value(tag, X) -> Evaluation:
        key = (tag, X)
        if key not in cache:
            cache[key] = evaluate(tag, X, cfg)
        return cache[key]

    worst, rows = 0.0, []
    for X in grid:
        ea, eb = value(rep_a, X), value(rep_b, X)
        va, vb = ka * ea.value, kb * eb.value
        rel = abs(va - vb) / max(abs(va), REL_FLOOR)
        combined = (abs(ka) * ea.error_estimate + abs(kb) * eb.error_estimate) / max(abs(va), REL_FLOOR)
        worst = max(worst, rel)
        rows.append({"a": _c(va), "b": _c(vb), "rel": rel, "combined_rel_error": combined})
    return ComparisonReport(
        check_id or f"cross_N{calibration.N}_{rep_a}_{rep_b}", (rep_a, rep_b),
        [X.to_dict() for X in grid], worst, (ka, kb), tolerance, worst <= tolerance,
        {"points": rows},
    )


# ---------------------------------------------------------------------------
# suites

N1_GRID = (-3.0, -1.0, 0.0, 1.0, 2.0)
N2_XI = (-1.0, 0.0, 1.0)
N2_R = (0.5, 1.0, 2.0)
N2_REPS = ("direct", "separated_eq5", "n2_double_eq10", "n2_single_eq12", "det_oracle")


def _well_separated(rng: np.random.Generator, N: int, count: int, gap: float) -> list[list[float]]:
    out = []
    while len(out) < count:
        x = np.sort(rng.uniform(-2.0, 2.0, N))[::-1]
        if N == 1 or min_gap(x) > gap:
            out.append([float(v) for v in x])
    return out


def suite_ode() -> list:
    grid = np.linspace(-6.0, 4.0, 101)
    return [ode_residual_check(grid), ode_residual_check(grid, convention="standard")]


def suite_pde(seed: int, cfg: QuadratureConfig) -> list:
    rng = np.random.default_rng([seed, 2])
    reports = [laplacian_self_test(seed=seed)]
    reports.append(pde_residual_check(1, [[x] for x in (-3.0, -1.0, 0.0, 1.0, 2.0)], "det_oracle", cfg))
    reports.append(pde_residual_check(2, _well_separated(rng, 2, 5, 0.5), "det_oracle", cfg))
    return reports


def suite_cross(seed: int, cfg: QuadratureConfig) -> list:
    rng = np.random.default_rng([seed, 3])
    reports = []
    # N = 1
    grid1 = [split([x]) for x in N1_GRID]
    cal1 = calibrate(["direct", "separated_eq5", "det_oracle"], split([0.5]), cfg)
    cache: dict = {}
    tags1 = ["direct", "separated_eq5", "det_oracle"]
    for i, a in enumerate(tags1):
        for b in tags1[i + 1:]:
            reports.append(cross_compare(a, b, grid1, cal1, cfg, 1e-3, cache))
    # N = 2
    grid2 = [MatrixArgument.from_xi_r(xi, r) for xi in N2_XI for r in N2_R]
    cal2 = calibrate(list(N2_REPS) + ["n2_green_eq13"], MatrixArgument.from_xi_r(0.0, 1.0), cfg)
    for i, a in enumerate(N2_REPS):
        for b in N2_REPS[i + 1:]:
            reports.append(cross_compare(a, b, grid2, cal2, cfg, 1e-3, cache))
    reports.append(cross_compare("n2_single_eq12", "n2_green_eq13", grid2, cal2, cfg, 5e-3, cache))
    recal = calibrate(list(N2_REPS) + ["n2_green_eq13"], MatrixArgument.from_xi_r(0.5, 1.5), cfg)
    drift = max(abs(recal.kappas[t] / cal2.kappas[t] - 1) for t in cal2.kappas)
    reports.append(ResidualReport("recalibration_N2", [[0.0, 1.0], [0.5, 1.5]], drift, drift, 1e-3,
                                  drift <= 1e-3, {"kappas_first": {k: _c(v) for k, v in sorted(cal2.kappas.items())},
                                                  "kappas_second": {k: _c(v) for k, v in sorted(recal.kappas.items())}}))
    # N = 3
    spectra3 = _well_separated(rng, 3, 4, 0.3)
    cal3 = calibrate(["separated_eq5", "det_oracle"], split(spectra3[0]), cfg)
    grid3 = [split(s) for s in spectra3[1:]]
    reports.append(cross_compare("separated_eq5", "det_oracle", grid3, cal3, cfg, 1e-3, cache))
    # Airy-argument scale of the single-integral form
    audit = audit_scale(cfg)
    reports.append(ResidualReport("scale_audit", [[audit.interval[0], audit.interval[1]]],
                                  audit.fit_residual, audit.fit_residual, 1e-3,
                                  audit.fit_residual <= 1e-3, audit.to_dict()))
    return reports


def suite_theorem2(seed: int, cfg: QuadratureConfig, samples: int = 10**6) -> list:
    f = hciz.gaussian_integrand(2)
    rows, worst = [], 0.0
    for k, q in enumerate((0.5, 1.0, 2.0)):
        red = hciz.reduced_integral(f, (q, -q), cfg)
        mc = hciz.direct_matrix_integral(f, (q, -q), samples, seed + k)
        z = abs(red.value - mc.value) / (red.error_estimate + mc.error_estimate)
        worst = max(worst, z)
        rows.append({"q": q, "reduced": _c(red.value), "reduced_err": red.error_estimate,
                     "monte_carlo": _c(mc.value), "monte_carlo_err": mc.error_estimate, "z": z})
    eq = StatisticalReport("hciz_equality", [[q, -q] for q in (0.5, 1.0, 2.0)], worst, 3.0,
                           worst <= 3.0, {"samples": samples, "points": rows})
    mc0 = hciz.direct_matrix_integral(f, (0.0, 0.0), samples, seed + 10)
    ref = 0.5 * math.pi**2
    z0 = abs(mc0.value - ref) / mc0.error_estimate
    zero = StatisticalReport("hciz_gaussian_origin", [[0.0, 0.0]], z0, 3.0, z0 <= 3.0,
                             {"monte_carlo": _c(mc0.value), "sigma": mc0.error_estimate,
                              "reference": ref})
    return [eq, zero]


def run_suite(suite: str = "all", seed: int = 0, cfg: QuadratureConfig = DEFAULT_CONFIG,
              samples: int = 10**6) -> dict:
    if suite not in SUITES:
        raise DomainError(f"suite must be one of {SUITES}")
    chosen = ("ode", "pde", "cross", "theorem2") if suite == "all" else (suite,)
    reports = []
    for name in chosen:
        if name == "ode":
            reports += suite_ode()
        elif name == "pde":
            reports += suite_pde(seed, cfg)
        elif name == "cross":
            reports += suite_cross(seed, cfg)
        else:
            reports += suite_theorem2(seed, cfg, samples)
    dicts = [r.to_dict() for r in reports]
    return {"suite": suite, "seed": seed, "config": cfg.to_dict(),
            "passed": all(d["passed"] for d in dicts), "reports": dicts}
