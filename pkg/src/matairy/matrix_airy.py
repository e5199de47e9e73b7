"""Representations of the matrix Airy function and their calibration.

Every representation returns its raw integral; overall constants are fixed by
:func:`calibrate` against a reference, never assumed. Conventions:

* ``F(x) = int exp(i (y**3/3 - x y)) dy = 2 pi Ai(-x)`` is the scalar factor
  (``scalar_airy.ai_paper``);
* an argument ``X`` is a :class:`~matairy.spectra.MatrixArgument`
  ``(xi, Q~)``; the N=2 forms use ``r = q1 - q2``;
* the matrix-space measure is the flat one of :mod:`matairy.hciz`.

Tags: ``direct``, ``separated_eq5``, ``n2_double_eq10``, ``n2_single_eq12``,
``n2_green_eq13``, ``det_oracle``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np
from scipy.optimize import curve_fit

from .errors import ConfluentSpectrum, DegenerateFit, DimensionMismatch, DomainError
from .oscillatory_quad import (
    DEFAULT_CONFIG,
    Evaluation,
    QuadratureConfig,
    _ladder_extrapolation,
    airy_contour,
    arc_rule,
    coarse_nodes,
    cubic_phase_integral,
    damped_lattice_integral,
    extrapolate_to_zero,
    panel_rule,
    ray_rule,
    uniform_rule,
)
from .scalar_airy import ai_paper_array, fourier_derivatives
from .spectra import (
    MatrixArgument,
    Spectrum,
    is_confluent,
    min_gap,
    phi_measure_kernel,
    split,
    vandermonde,
)

SCALE_CBRT_4 = 2.0 ** (2.0 / 3.0)
SCALE_CBRT_3_2 = 1.5 ** (1.0 / 3.0)
DEFAULT_ARC = 0.5
AIRY_CUTOFF = 16.0  # F(-s) = 2 pi Ai(s) is below 1e-18 beyond s = 16


@dataclass(frozen=True)
class Representation:
    tag: str
    n_min: int
    n_max: int

    def supports(self, N: int) -> bool:
        return self.n_min <= N <= self.n_max


REPRESENTATIONS = {
    "direct": Representation("direct", 1, 2),
    "separated_eq5": Representation("separated_eq5", 1, 4),
    "n2_double_eq10": Representation("n2_double_eq10", 2, 2),
    "n2_single_eq12": Representation("n2_single_eq12", 2, 2),
    "n2_green_eq13": Representation("n2_green_eq13", 2, 2),
    "det_oracle": Representation("det_oracle", 1, 4),
}

TAG_ALIASES = {
    "separated": "separated_eq5",
    "n2_double": "n2_double_eq10",
    "n2_single": "n2_single_eq12",
    "n2_green": "n2_green_eq13",
}


def resolve_tag(tag: str) -> str:
    tag = TAG_ALIASES.get(tag, tag)
    if tag not in REPRESENTATIONS:
        raise DomainError(f"unknown representation {tag!r}")
    return tag


def _rounding(terms) -> float:
    """Floor for error estimates: accumulated rounding of a weighted sum."""
    return 8 * np.finfo(float).eps * float(np.sum(np.abs(terms)))


def _with_tag(ev: Evaluation, tag: str, **extra) -> Evaluation:
    diag = dict(ev.diagnostics)
    diag.update(extra)
    return Evaluation(ev.value, ev.error_estimate, ev.nodes_used, ev.method_tag, tag, diag)


# ---------------------------------------------------------------------------
# direct definition


def airy_direct(X: MatrixArgument, cfg: QuadratureConfig = DEFAULT_CONFIG,
                method: str = "auto", arc_radius: float = 1.0) -> Evaluation:
    """The defining matrix integral for N <= 2.

    N=1 is the scalar cubic-phase integral. For N=2 the off-diagonal entry
    ``w`` enters only through ``exp(i |w|^2 (y1 + y2))`` and is integrated in
    closed form, leaving

        i pi int int exp(i (y1^3/3 - x1 y1 + y2^3/3 - x2 y2)) / (y1 + y2) dy1 dy2.

    ``method='rotated'`` puts both variables on the Airy contour through the
    upper half-plane (where the ``w`` integral converges). ``method='damped'``
    inserts ``exp(-eps tr Y^2)``, integrates ``w`` and ``y1 - y2`` exactly
    (both Gaussian), and extrapolates the remaining one-dimensional integral
    over the damping ladder.
    """
    N = X.N
    if N > 2:
        raise DomainError("the direct matrix integral is implemented for N <= 2")
    if method == "auto":
        method = "rotated" if cfg.rotation_angle > 0 else "damped"
    x = X.eigenvalues()
    if N == 1:
        ev = cubic_phase_integral(1.0, -float(x[0]), None, cfg, method=method)
        return _with_tag(ev, "direct")
    if method == "rotated":
        return _direct2_rotated(x, cfg, arc_radius)
    if method == "damped":
        return _direct2_damped(x, cfg)
    raise DomainError(f"unknown method {method!r}")


def _direct2_rotated(x: np.ndarray, cfg: QuadratureConfig, arc_radius: float) -> Evaluation:
    theta = cfg.rotation_angle
    length = cfg.radius("rotated")

    def run(n):
        t, w = airy_contour(theta, length, cfg.panels, n, arc_radius=arc_radius)
        e1 = w * np.exp(1j * (t**3 / 3 - x[0] * t))
        e2 = w * np.exp(1j * (t**3 / 3 - x[1] * t))
        inv = 1.0 / (t[:, None] + t[None, :])
        total = 1j * math.pi * (e1 @ inv @ e2)
        edge = float(np.abs(np.exp(1j * t[[0, -1]] ** 3 / 3)).max())
        floor = math.pi * _rounding(np.abs(e1) @ np.abs(inv) @ np.abs(e2))
        return total, t.size**2, edge + floor / length / math.pi

    fine, used, edge = run(cfg.nodes_per_dim)
    coarse, used_c, _ = run(coarse_nodes(cfg.nodes_per_dim))
    err = abs(fine - coarse) + math.pi * edge * length
    return Evaluation(fine, err, used + used_c, "rotated_contour", "direct",
                      {"arc_radius": arc_radius, "theta": theta})


def _direct2_damped(x: np.ndarray, cfg: QuadratureConfig) -> Evaluation:
    s = x[0] + x[1]
    d = x[0] - x[1]
    ladder = np.asarray(cfg.epsilon_ladder)

    def one(eps, n):
        # u = y1 + y2; graded panels resolve the width-eps structure at u = 0
        limit = math.sqrt(60.0 / eps)
        graded = eps * 2.0 ** np.arange(-8, 12)
        graded = graded[graded < 1.0]
        count = int(limit**3 / 12 / (4 * math.pi) + limit) + 2
        outer = np.linspace(1.0, limit, count)
        half = np.unique(np.concatenate([[0.0], graded, outer]))
        u, w = panel_rule(np.concatenate([-half[::-1], half[1:]]), n)
        a = eps / 2 - 0.25j * u
        f = (0.5j * math.pi / (u + 2j * eps) * np.sqrt(math.pi / a) * np.exp(-d**2 / (16 * a))
             * np.exp(1j * (u**3 / 12 - s * u / 2) - eps * u**2 / 2))
        return np.sum(w * f), u.size

    def run(n):
        out = [one(e, n) for e in ladder]
        return np.array([v for v, _ in out]), sum(c for _, c in out)

    vals, used = run(cfg.nodes_per_dim)
    vals_c, used_c = run(coarse_nodes(cfg.nodes_per_dim))
    value, err, residuals = _ladder_extrapolation(ladder, vals, cfg.extrapolation_degree, cfg)
    value_c = extrapolate_to_zero(ladder, vals_c, cfg.extrapolation_degree)
    return Evaluation(value, err + abs(value - value_c), used + used_c, "damped_extrapolated",
                      "direct", {"ladder_values": vals.tolist(), "ladder_residuals": residuals})


# ---------------------------------------------------------------------------
# separated representation


@lru_cache(maxsize=8)
def helmert_basis(N: int) -> np.ndarray:
    """Orthonormal basis (rows) of the hyperplane ``sum p_j = 0``."""
    H = np.zeros((N - 1, N))
    for a in range(1, N):
        H[a - 1, :a] = 1.0
        H[a - 1, a] = -float(a)
        H[a - 1] /= np.linalg.norm(H[a - 1])
    H.setflags(write=False)
    return H


def airy_separated(
    X: MatrixArgument,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
    positive_exponent: bool = False,
    airy_derivative: int = 0,
    method: str = "plain",
) -> Evaluation:
    """Eigenvalue integral over the traceless hyperplane.

    Integrand: ``exp(i tr(P^3)/3) N^{-1/3} F(N^{-1/3}(N xi - tr P^2)) Phi V(P)^2``
    where ``Phi V(P)^2`` uses ``det[exp(-i q_j p_k)]``. ``positive_exponent=True``
    uses ``exp(+i q_j p_k)`` instead, which yields the function at ``-Q~``
    (the two coincide for N <= 2).

    ``airy_derivative=1`` differentiates the scalar factor in ``xi``, giving
    ``dA/dxi`` from the same integral. The scalar factor decays like
    ``exp(-(2/3) N^{-1/2} |P|^3)``, so the integral converges absolutely;
    ``method='damped'`` still runs the damping ladder as a cross-check.
    """
    N = X.N
    if not 1 <= N <= 4:
        raise DomainError("separated representation supports 1 <= N <= 4")
    if airy_derivative not in (0, 1):
        raise DomainError("airy_derivative must be 0 or 1")
    xi = X.xi
    if N == 1:
        val = fourier_derivatives(xi, 1)[airy_derivative]
        return Evaluation(val, 0.0, 1, "direct", "separated_eq5")
    q = X.traceless.array()
    H = helmert_basis(N)
    c13 = N ** (-1.0 / 3.0)
    sign = 1 if positive_exponent else -1
    radius = math.sqrt(max(N * xi, 0.0) + AIRY_CUTOFF * N ** (1.0 / 3.0))

    def integrand(C):
        P = C @ H
        arg = c13 * (N * xi - np.sum(P**2, axis=-1))
        if airy_derivative:
            scalar = N ** (1.0 / 3.0) * ai_paper_array(arg, derivative=True)
        else:
            scalar = c13 * ai_paper_array(arg)
        phase = np.exp(1j * np.sum(P**3, axis=-1) / 3)
        return phase * scalar * phi_measure_kernel(q, P, sign)

    panels = max(2, cfg.panels // 2) if N == 4 else cfg.panels
    ev = damped_lattice_integral(integrand, N - 1, cfg, damped=method == "damped",
                                 radius=radius, panels=panels)
    return _with_tag(ev, "separated_eq5", positive_exponent=positive_exponent, radius=radius)


# ---------------------------------------------------------------------------
# N = 2 forms


def _sinc(z):
    z = np.asarray(z)
    safe = np.where(z == 0, 1.0, z)
    return np.where(z == 0, 1.0, np.sin(safe) / safe)


def airy_n2_single(xi: float, r: float, cfg: QuadratureConfig = DEFAULT_CONFIG,
                   scale: float = SCALE_CBRT_4) -> Evaluation:
    """``int_0^inf F(scale (xi - p^2)) sin(r p)/(r p) p^2 dp``.

    The default scale ``2^{2/3}`` is what the ``eta`` integral of the double
    form produces; pass ``scale=SCALE_CBRT_3_2`` for ``(3/2)^{1/3}``.
    The integrand decays like ``Ai(scale (p^2 - xi))`` and is cut where that
    argument reaches 16.
    """
    xi, r = float(xi), float(r)
    if scale <= 0:
        raise DomainError("scale must be positive")
    pmax = math.sqrt(max(xi, 0.0) + AIRY_CUTOFF / scale)

    def run(n):
        p, w = uniform_rule(0.0, pmax, cfg.panels, n)
        terms = w * ai_paper_array(scale * (xi - p**2)) * _sinc(r * p) * p**2
        return np.sum(terms), p.size, _rounding(terms)

    fine, used, floor = run(cfg.nodes_per_dim)
    coarse, used_c, _ = run(coarse_nodes(cfg.nodes_per_dim))
    return Evaluation(complex(fine), abs(fine - coarse) + floor, used + used_c, "direct",
                      "n2_single_eq12", {"scale": scale, "pmax": pmax})


def airy_n2_double(xi: float, r: float, cfg: QuadratureConfig = DEFAULT_CONFIG,
                   arc_radius: float = DEFAULT_ARC) -> Evaluation:
    """``int int exp((2i/3)(eta^3 + 3 eta p^2 - 3 xi eta)) sin(rp)/(rp) p^2 dp d eta``.

    ``eta`` runs on the Airy contour through the upper half-plane, bridged
    above the origin by an arc of radius ``arc_radius``; there ``Im eta > 0``
    and the inner ``p`` integral over ``[0, inf)`` converges like a Gaussian.
    The inner integral is done by Gauss-Legendre on ``[0, P(eta)]`` with
    ``exp(-2 Im(eta) P^2) = exp(-40)``.
    """
    xi, r = float(xi), float(r)
    theta = cfg.rotation_angle
    if theta <= 0:
        raise DomainError("the eta contour needs rotation_angle > 0")
    length = cfg.radius("rotated")

    def run(n):
        eta, we = airy_contour(theta, length, cfg.panels, n, arc_radius=arc_radius)
        pmax = np.sqrt(40.0 / (2.0 * eta.imag))
        u, wu = uniform_rule(0.0, 1.0, 3 * cfg.panels, 16 if n >= 16 else n)
        p = pmax[:, None] * u[None, :]
        wp = pmax[:, None] * wu[None, :]
        inner = np.sum(wp * p**2 * _sinc(r * p) * np.exp(2j * eta[:, None] * p**2), axis=1)
        outer = we * np.exp(2j / 3 * (eta**3 - 3 * xi * eta))
        edge = float(np.abs(outer[[0, -1]] / we[[0, -1]]).max())
        return np.sum(outer * inner), p.size, edge + _rounding(outer * inner) / length

    fine, used, edge = run(cfg.nodes_per_dim)
    coarse, used_c, _ = run(coarse_nodes(cfg.nodes_per_dim))
    return Evaluation(fine, abs(fine - coarse) + edge * length, used + used_c, "rotated_contour",
                      "n2_double_eq10", {"arc_radius": arc_radius})


def _green_contour(theta: float, length: float, panels: int, n: int, rho: float, literal: bool):
    if not literal:
        return airy_contour(theta, length, panels, n, arc_radius=rho)
    # rays leave the real axis at +-rho; the bridge is the lower semicircle
    t_out, w_out = ray_rule(rho, theta, length, panels, n)
    t_in, w_in = ray_rule(-rho, math.pi - theta, length, panels, n)
    t_arc, w_arc = arc_rule(rho, -math.pi, 0.0, 4 * n)
    t = np.concatenate([t_in[::-1], t_arc, t_out])
    w = np.concatenate([-w_in[::-1], w_arc, w_out])
    return t, w


def airy_n2_green(xi: float, r: float, cfg: QuadratureConfig = DEFAULT_CONFIG,
                  arc_radius: float = DEFAULT_ARC, literal: bool = False) -> Evaluation:
    """Single contour integral against the free three-dimensional propagator.

    Doing the ``p`` integral of the double form in closed form gives

        int exp((2i/3)(tau^3 - 3 xi tau)) G(r, tau) d tau,
        G(r, tau) = (-2 i tau)^{-3/2} exp(-i r^2 / (8 tau)),

    on the same contour as the double form (bridge above the origin, branch
    cut of the principal power on the negative imaginary axis).

    ``literal=True`` evaluates ``G = tau^{-3/2} exp(+i r^2 / tau)`` instead,
    bridged below the origin (where that exponential decays) with the cut of
    the power moved to the positive imaginary axis. It is not proportional to
    the other forms and is provided for comparison only.
    """
    xi, r = float(xi), float(r)
    if not r > 0:
        raise DomainError("the propagator form needs r > 0")
    theta = cfg.rotation_angle
    if theta <= 0:
        raise DomainError("the tau contour needs rotation_angle > 0")
    length = cfg.radius("rotated")

    def kernel(t):
        if not literal:
            return (-2j * t) ** -1.5 * np.exp(-1j * r**2 / (8 * t))
        ang = np.angle(t)
        ang = np.where(ang > math.pi / 2, ang - 2 * math.pi, ang)
        return np.exp(-1.5 * (np.log(np.abs(t)) + 1j * ang)) * np.exp(1j * r**2 / t)

    def run(n):
        t, w = _green_contour(theta, length, cfg.panels, n, arc_radius, literal)
        f = np.exp(2j / 3 * (t**3 - 3 * xi * t)) * kernel(t)
        edge = float(np.abs(f[[0, -1]]).max())
        return np.sum(w * f), t.size, edge + _rounding(w * f) / length

    fine, used, edge = run(cfg.nodes_per_dim)
    coarse, used_c, _ = run(coarse_nodes(cfg.nodes_per_dim))
    return Evaluation(fine, abs(fine - coarse) + edge * length, used + used_c, "rotated_contour",
                      "n2_green_eq13", {"arc_radius": arc_radius, "literal": literal})


# ---------------------------------------------------------------------------
# determinant oracle


def _det_value(x: np.ndarray) -> tuple[complex, float]:
    N = x.size
    M = np.empty((N, N), dtype=complex)
    for k, xk in enumerate(x):
        d = fourier_derivatives(float(xk), max(N - 1, 1))
        for j in range(N):
            M[j, k] = (1j) ** j * d[j]
    v = vandermonde(x)
    value = complex(np.linalg.det(M) / v)
    # rounding of the determinant expansion relative to its largest term
    scale = float(np.prod(np.abs(M).max(axis=1)))
    return value, 64 * np.finfo(float).eps * scale * math.factorial(N) / abs(v)


def airy_det_oracle(X: MatrixArgument, extrapolate: bool = False,
                    offsets: tuple[float, ...] = (4e-3, 2e-3, 1e-3)) -> Evaluation:
    """``det[(i d/dx)^{j} F(x_k)]_{j,k} / V(x)`` over the eigenvalues of ``X``.

    Coincident eigenvalues raise :class:`ConfluentSpectrum` unless
    ``extrapolate=True`` (split by ``delta (0, 1, ..., N-1)``, quadratic
    extrapolation in ``delta``).
    """
    N = X.N
    if N > 4:
        raise DomainError("determinant oracle supports N <= 4")
    x = X.eigenvalues()
    if N == 1:
        val = fourier_derivatives(float(x[0]), 0)[0]
        return Evaluation(val, 0.0, 1, "direct", "det_oracle")
    if not is_confluent(x):
        val, err = _det_value(x)
        return Evaluation(val, err, N, "direct", "det_oracle")
    if not extrapolate:
        raise ConfluentSpectrum(f"eigenvalues coincide (min gap {min_gap(x):.3g})")
    spread = np.arange(N, dtype=float) - (N - 1) / 2
    order = np.argsort(x, kind="stable")
    vals = []
    for d in offsets:
        xd = x.copy()
        xd[order] = x[order] + d * spread
        vals.append(_det_value(xd)[0])
    value = extrapolate_to_zero(offsets, vals, 2)
    err = abs(value - extrapolate_to_zero(offsets[1:], vals[1:], 1))
    return Evaluation(value, err, N * len(offsets), "direct", "det_oracle",
                      {"offsets": list(offsets), "values": vals})


# ---------------------------------------------------------------------------
# dispatch


def evaluate(tag: str, X: MatrixArgument, cfg: QuadratureConfig = DEFAULT_CONFIG) -> Evaluation:
    """Evaluate representation ``tag`` at ``X`` with default options."""
    tag = resolve_tag(tag)
    rep = REPRESENTATIONS[tag]
    if not rep.supports(X.N):
        raise DomainError(f"{tag} does not support N={X.N}")
    if tag == "direct":
        return airy_direct(X, cfg)
    if tag == "separated_eq5":
        return airy_separated(X, cfg)
    if tag == "det_oracle":
        return airy_det_oracle(X)
    r = X.r
    if tag == "n2_double_eq10":
        return airy_n2_double(X.xi, r, cfg)
    if tag == "n2_single_eq12":
        return airy_n2_single(X.xi, r, cfg)
    return airy_n2_green(X.xi, r, cfg)


def evaluate_eigenvalues(tag: str, eigenvalues, cfg: QuadratureConfig = DEFAULT_CONFIG) -> Evaluation:
    return evaluate(tag, split(eigenvalues), cfg)


def applicable(N: int, tags: Iterable[str] | None = None) -> list[str]:
    tags = REPRESENTATIONS if tags is None else [resolve_tag(t) for t in tags]
    return [t for t in tags if REPRESENTATIONS[t].supports(N)]


# ---------------------------------------------------------------------------
# calibration


def default_reference(N: int) -> str:
    return "direct" if N <= 2 else "det_oracle"


@dataclass(frozen=True)
class CalibrationTable:
    """Multipliers ``kappa_rep`` with ``kappa_rep * rep(X) = reference(X)``.

    One table holds one matrix size. ``r_convention`` records how N=2
    arguments map to the single-gap forms.
    """

    N: int
    reference: str
    kappas: Mapping[str, complex]
    fit_point: MatrixArgument
    fit_residual: float
    residuals: Mapping[str, float] = field(default_factory=dict)
    r_convention: str = "r = q1 - q2"

    def kappa(self, tag: str) -> complex:
        tag = resolve_tag(tag)
        if tag not in self.kappas:
            raise DomainError(f"no calibration constant for {tag!r} at N={self.N}")
        return self.kappas[tag]

    def apply(self, ev: Evaluation, tag: str | None = None) -> Evaluation:
        tag = tag or ev.representation
        return ev.scaled(self.kappa(tag))

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "reference": self.reference,
            "kappas": {k: {"re": v.real, "im": v.imag} for k, v in sorted(self.kappas.items())},
            "fit_point": self.fit_point.to_dict(),
            "fit_residual": self.fit_residual,
            "residuals": dict(sorted(self.residuals.items())),
            "r_convention": self.r_convention,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "CalibrationTable":
        fp = data["fit_point"]
        return cls(
            N=int(data["N"]),
            reference=data["reference"],
            kappas={k: complex(v["re"], v["im"]) for k, v in data["kappas"].items()},
            fit_point=MatrixArgument(float(fp["xi"]), Spectrum(tuple(fp["traceless"]))),
            fit_residual=float(data["fit_residual"]),
            residuals=dict(data.get("residuals", {})),
            r_convention=data.get("r_convention", "r = q1 - q2"),
        )


def calibrate(
    representations: Iterable[str] | None,
    fit_point: MatrixArgument,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
    reference: str | None = None,
    max_residual: float = 1e-3,
) -> CalibrationTable:
    """Fit ``kappa_rep = reference(fit_point) / rep(fit_point)``.

    The reference is ``direct`` for N <= 2 and ``det_oracle`` beyond (the
    direct integral is not available there). ``fit_residual`` is the largest
    combined relative error estimate of a fitted ratio.
    """
    N = fit_point.N
    reference = resolve_tag(reference or default_reference(N))
    tags = applicable(N, representations)
    if reference not in tags:
        tags = [reference] + tags
    ref = evaluate(reference, fit_point, cfg)
    _check_resolved(ref, reference)
    kappas, residuals = {}, {}
    for tag in tags:
        ev = ref if tag == reference else evaluate(tag, fit_point, cfg)
        _check_resolved(ev, tag)
        kappas[tag] = complex(1.0) if tag == reference else complex(ref.value / ev.value)
        residuals[tag] = ev.error_estimate / abs(ev.value) + (
            0.0 if tag == reference else ref.error_estimate / abs(ref.value))
    fit_residual = max(residuals.values())
    if fit_residual > max_residual:
        raise DegenerateFit(f"calibration residual {fit_residual:.3g} exceeds {max_residual:g}")
    return CalibrationTable(N, reference, kappas, fit_point, fit_residual, residuals)


def _check_resolved(ev: Evaluation, tag: str) -> None:
    if abs(ev.value) < 10 * ev.error_estimate:
        raise DegenerateFit(
            f"{tag}: |value| {abs(ev.value):.3g} is below ten error estimates ({ev.error_estimate:.3g})")


def save_calibrations(tables: Iterable[CalibrationTable], path: str | Path) -> None:
    data = {"tables": [t.to_dict() for t in sorted(tables, key=lambda t: t.N)]}
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def load_calibrations(path: str | Path) -> dict[int, CalibrationTable]:
    data = json.loads(Path(path).read_text())
    tables = [CalibrationTable.from_dict(t) for t in data["tables"]]
    return {t.N: t for t in tables}


# ---------------------------------------------------------------------------
# Airy-argument scale of the single integral


def eta_integral(s: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> Evaluation:
    """``int exp((2i/3)(eta^3 - 3 s eta)) d eta`` with ``s = xi - p^2``."""
    return cubic_phase_integral(2.0, -2.0 * float(s), None, cfg)


@dataclass(frozen=True)
class ScaleAudit:
    amplitude: float
    scale: float
    scale_stderr: float
    interval: tuple[float, float]
    fit_residual: float
    agrees_cbrt_4: bool
    agrees_cbrt_3_2: bool

    def to_dict(self) -> dict:
        return {
            "amplitude": self.amplitude,
            "scale": self.scale,
            "scale_stderr": self.scale_stderr,
            "interval": list(self.interval),
            "fit_residual": self.fit_residual,
            "candidate_cbrt_4": SCALE_CBRT_4,
            "candidate_cbrt_3_2": SCALE_CBRT_3_2,
            "agrees_cbrt_4": self.agrees_cbrt_4,
            "agrees_cbrt_3_2": self.agrees_cbrt_3_2,
        }


def audit_scale(cfg: QuadratureConfig = DEFAULT_CONFIG, s_grid=None,
                half_width: float = 1e-3, initial=(1.0, 1.3)) -> ScaleAudit:
    """Fit ``amplitude * F(scale * s)`` to the numerically integrated ``eta`` integral.

    ``interval`` is ``scale +- max(half_width, 3 stderr)``; a candidate agrees
    when it lies inside. ``fit_residual`` is the RMS residual over the RMS data.
    """
    s_grid = np.linspace(-3.0, 2.0, 51) if s_grid is None else np.asarray(s_grid, dtype=float)
    data = np.array([eta_integral(s, cfg).value.real for s in s_grid])

    def model(s, amp, scale):
        return amp * ai_paper_array(scale * s)

    popt, pcov = curve_fit(model, s_grid, data, p0=initial)
    amp, scale = (float(v) for v in popt)
    stderr = float(math.sqrt(max(pcov[1, 1], 0.0)))
    resid = data - model(s_grid, amp, scale)
    fit_residual = float(np.sqrt(np.mean(resid**2)) / np.sqrt(np.mean(data**2)))
    width = max(half_width, 3 * stderr)
    lo, hi = scale - width, scale + width
    return ScaleAudit(amp, scale, stderr, (lo, hi), fit_residual,
                      lo <= SCALE_CBRT_4 <= hi, lo <= SCALE_CBRT_3_2 <= hi)
