"""Quadrature for conditionally convergent integrals with cubic-phase oscillation.

Two regularizations are provided and are expected to agree:

* ``rotated``: deform the real line onto the two rays ``arg t = theta`` and
  ``arg t = pi - theta`` (upper half-plane for a positive cubic coefficient),
  where ``exp(i a t**3 / 3)`` decays super-exponentially.
* ``damped``: multiply by ``exp(-eps |t|**2)`` for each ``eps`` of a decreasing
  ladder, integrate on a truncated real box and extrapolate polynomially to
  ``eps = 0``.

All quadrature is Gauss-Legendre on panels.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import DomainError, NonConvergence

METHOD_TAGS = ("damped_extrapolated", "rotated_contour", "direct")

DEFAULT_ROTATION = 0.9 * math.pi / 6
DAMPED_RADIUS = 12.0
ROTATED_RADIUS = 8.0


@dataclass(frozen=True)
class QuadratureConfig:
    """Regularization and resolution settings shared by every integrator.

    ``truncation_radius=None`` selects the mode default (12 for damped
    lattices, 8 along rotated rays). ``panels`` is the number of
    Gauss-Legendre panels per dimension used by the generic lattice and by
    the contour rules; ``nodes_per_dim`` is the node count inside a panel.
    """

    damping_epsilon: float = 0.2
    epsilon_ladder: tuple[float, ...] = (0.2, 0.1, 0.05, 0.025)
    extrapolation_degree: int = 3
    rotation_angle: float = DEFAULT_ROTATION
    truncation_radius: float | None = None
    nodes_per_dim: int = 24
    panels: int = 8
    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    stall_tol: float = 0.05

    def __post_init__(self):
        ladder = tuple(float(e) for e in self.epsilon_ladder)
        object.__setattr__(self, "epsilon_ladder", ladder)
        if self.damping_epsilon <= 0:
            raise DomainError("damping_epsilon must be positive")
        if not ladder or any(e <= 0 for e in ladder):
            raise DomainError("epsilon_ladder must be non-empty and positive")
        if any(b >= a for a, b in zip(ladder, ladder[1:])):
            raise DomainError("epsilon_ladder must be strictly decreasing")
        if not 0 <= self.extrapolation_degree <= len(ladder) - 1:
            raise DomainError("extrapolation_degree must be below the ladder length")
        if not 0.0 <= self.rotation_angle <= math.pi / 6 + 1e-15:
            raise DomainError("rotation_angle must lie in [0, pi/6]")
        if self.truncation_radius is not None and self.truncation_radius <= 0:
            raise DomainError("truncation_radius must be positive")
        if self.nodes_per_dim < 8:
            raise DomainError("nodes_per_dim must be at least 8")
        if self.panels < 1:
            raise DomainError("panels must be at least 1")
        if self.abs_tol <= 0 or self.rel_tol <= 0 or self.stall_tol <= 0:
            raise DomainError("tolerances must be positive")

    def radius(self, mode: str) -> float:
        if self.truncation_radius is not None:
            return float(self.truncation_radius)
        return DAMPED_RADIUS if mode == "damped" else ROTATED_RADIUS

    def replace(self, **changes) -> "QuadratureConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["epsilon_ladder"] = list(self.epsilon_ladder)
        return d

    @classmethod
    def from_mapping(cls, values: Mapping[str, object]) -> "QuadratureConfig":
        kwargs = {}
        types = {f.name: f.type for f in dataclasses.fields(cls)}
        for key, raw in values.items():
            key = key.strip()
            if key not in types:
                raise DomainError(f"unknown quadrature option {key!r}")
            kwargs[key] = _coerce(key, raw)
        return cls(**kwargs)

    @classmethod
    def from_text(cls, text: str) -> "QuadratureConfig":
        """Parse ``key=value`` lines; ``#`` starts a comment."""
        values = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DomainError(f"line {lineno}: expected key=value")
            key, raw = line.split("=", 1)
            values[key.strip()] = raw.strip()
        return cls.from_mapping(values)

    @classmethod
    def from_file(cls, path: str | Path) -> "QuadratureConfig":
        return cls.from_text(Path(path).read_text())

    def to_text(self) -> str:
        lines = []
        for key, value in self.to_dict().items():
            if value is None:
                continue
            if isinstance(value, list):
                value = ",".join(repr(v) for v in value)
            lines.append(f"{key}={value}")
        return "\n".join(lines) + "\n"


def _coerce(key: str, raw):
    if not isinstance(raw, str):
        if key == "epsilon_ladder":
            return tuple(float(v) for v in raw)
        return raw
    if key == "epsilon_ladder":
        return tuple(float(v) for v in raw.split(",") if v.strip())
    if key in ("extrapolation_degree", "nodes_per_dim", "panels"):
        return int(raw)
    if key == "truncation_radius" and raw.lower() in ("", "none", "auto"):
        return None
    return float(raw)


DEFAULT_CONFIG = QuadratureConfig()


@dataclass(frozen=True)
class Evaluation:
    value: complex
    error_estimate: float
    nodes_used: int
    method_tag: str
    representation: str | None = None
    diagnostics: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.method_tag not in METHOD_TAGS:
            raise ValueError(f"unknown method tag {self.method_tag!r}")
        value = complex(self.value)
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "error_estimate", float(self.error_estimate))
        if not (np.isfinite(value.real) and np.isfinite(value.imag)):
            raise NonConvergence("non-finite quadrature value")
        if not np.isfinite(self.error_estimate) or self.error_estimate < 0:
            raise NonConvergence("non-finite error estimate")

    def scaled(self, factor: complex) -> "Evaluation":
        return dataclasses.replace(
            self,
            value=self.value * factor,
            error_estimate=self.error_estimate * abs(factor),
        )


# --------------------------------------------------------------------------
# Gauss-Legendre building blocks


@lru_cache(maxsize=64)
def _leggauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def panel_rule(breaks: Sequence[float] | np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre rule with ``n`` nodes on each ``[breaks[k], breaks[k+1]]``."""
    breaks = np.asarray(breaks, dtype=float)
    x, w = _leggauss(n)
    lo, hi = breaks[:-1, None], breaks[1:, None]
    half = 0.5 * (hi - lo)
    nodes = lo + half * (x + 1.0)
    weights = half * w
    return nodes.ravel(), weights.ravel()


def uniform_rule(a: float, b: float, panels: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    return panel_rule(np.linspace(a, b, panels + 1), n)


def ray_rule(start: complex, angle: float, length: float, panels: int, n: int):
    """Nodes and complex weights for ``t = start + s e^{i angle}``, ``s in [0, length]``."""
    s, w = uniform_rule(0.0, length, panels, n)
    direction = np.exp(1j * angle)
    return start + s * direction, w * direction


def arc_rule(radius: float, angle_from: float, angle_to: float, n_nodes: int):
    """Nodes and weights along ``t = radius e^{i phi}`` from ``angle_from`` to ``angle_to``."""
    panels = max(1, math.ceil(n_nodes / 16))
    phi, w = uniform_rule(angle_from, angle_to, panels, 16)
    t = radius * np.exp(1j * phi)
    return t, w * 1j * t


def airy_contour(
    theta: float,
    length: float,
    panels: int,
    n: int,
    arc_radius: float = 0.0,
    lower: bool = False,
) -> tuple[np.ndarray, np.ndarray]:
    """Rule for the Airy-type contour from ``inf e^{i(pi-theta)}`` to ``inf e^{i theta}``.

    With ``arc_radius > 0`` the contour runs along both rays from radius
    ``arc_radius`` outwards and joins them by an arc passing above the origin.
    ``lower=True`` returns the mirror image in the lower half-plane, which is
    the right deformation for a negative cubic coefficient.
    """
    rho = float(arc_radius)
    t_out, w_out = ray_rule(rho * np.exp(1j * theta), theta, length, panels, n)
    t_in, w_in = ray_rule(rho * np.exp(1j * (math.pi - theta)), math.pi - theta, length, panels, n)
    parts_t = [t_in[::-1], t_out]
    parts_w = [-w_in[::-1], w_out]
    if rho > 0:
        t_arc, w_arc = arc_rule(rho, math.pi - theta, theta, 4 * n)
        parts_t.insert(1, t_arc)
        parts_w.insert(1, w_arc)
    t = np.concatenate(parts_t)
    w = np.concatenate(parts_w)
    if lower:
        t, w = np.conj(t), np.conj(w)
    return t, w


def coarse_nodes(n: int) -> int:
    """Node count of the companion rule used for error estimation."""
    return max(8, (2 * n) // 3)


# --------------------------------------------------------------------------
# extrapolation


def extrapolate_to_zero(eps: Sequence[float], values: Sequence[complex], degree: int) -> complex:
    """Polynomial fit of ``values`` against ``eps`` evaluated at ``eps = 0``."""
    eps = np.asarray(eps, dtype=float)
    values = np.asarray(values, dtype=complex)
    degree = min(degree, len(eps) - 1)
    scale = eps.max()
    vander = np.vander(eps / scale, degree + 1, increasing=True)
    coef_re, *_ = np.linalg.lstsq(vander, values.real, rcond=None)
    coef_im, *_ = np.linalg.lstsq(vander, values.imag, rcond=None)
    return complex(coef_re[0], coef_im[0])


def extrapolation_gain(eps: Sequence[float], degree: int) -> float:
    """Sum of absolute extrapolation weights (noise amplification to ``eps = 0``)."""
    eps = np.asarray(eps, dtype=float)
    degree = min(degree, len(eps) - 1)
    vander = np.vander(eps / eps.max(), degree + 1, increasing=True)
    weights = np.linalg.pinv(vander)[0]
    return float(np.abs(weights).sum())


def _ladder_extrapolation(ladder, values, degree, cfg: QuadratureConfig):
    full = extrapolate_to_zero(ladder, values, degree)
    if len(ladder) > 1:
        sub = extrapolate_to_zero(ladder[1:], values[1:], min(degree, len(ladder) - 2))
        err = abs(full - sub)
    else:
        err = abs(values[0] - full)
    if err > cfg.stall_tol * max(1.0, abs(full)):
        raise NonConvergence(
            f"damping ladder did not stabilize (estimate {err:.3g} vs value {abs(full):.3g})"
        )
    residuals = [abs(v - full) for v in values]
    return full, err, residuals


# --------------------------------------------------------------------------
# one-dimensional cubic phase


Weight = Callable[[np.ndarray], np.ndarray]


def _apply_weight(weight: Weight | None, t: np.ndarray) -> np.ndarray:
    if weight is None:
        return np.ones_like(t, dtype=complex)
    return np.asarray(weight(t), dtype=complex) * np.ones_like(t, dtype=complex)


def _phase_breaks(a: float, b: float, radius: float, per_panel: float = 4 * math.pi) -> np.ndarray:
    """Breakpoints on ``[0, radius]`` so that each panel spans a bounded phase increment."""
    grid = np.linspace(0.0, radius, 4097)
    phase = abs(a) * grid**3 / 3 + abs(b) * grid
    # unit width floor keeps slowly varying stretches resolved
    phase = phase + grid * per_panel
    targets = np.arange(0.0, phase[-1], per_panel)
    breaks = np.interp(targets, phase, grid)
    return np.unique(np.append(breaks, radius))


def cubic_phase_integral(
    a: float,
    b: float,
    weight: Weight | None = None,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
    method: str = "auto",
) -> Evaluation:
    """Integrate ``exp(i (a t**3/3 + b t)) * weight(t)`` over the real line.

    ``weight`` receives complex node arrays and must be analytic in the sector
    swept by the rotation when ``method='rotated'``; ``None`` means 1.
    ``method='auto'`` rotates unless ``cfg.rotation_angle`` is zero.
    """
    if a == 0:
        raise DomainError("cubic coefficient must be nonzero")
    if method == "auto":
        method = "rotated" if cfg.rotation_angle > 0 else "damped"
    if method == "rotated":
        return _cubic_rotated(a, b, weight, cfg)
    if method == "damped":
        return _cubic_damped(a, b, weight, cfg)
    raise DomainError(f"unknown method {method!r}")


def _cubic_rotated(a, b, weight, cfg: QuadratureConfig) -> Evaluation:
    theta = cfg.rotation_angle
    if theta <= 0:
        raise DomainError("rotated contour needs rotation_angle > 0; use method='damped'")
    radius = cfg.radius("rotated")

    def run(n):
        t, w = airy_contour(theta, radius, cfg.panels, n, lower=a < 0)
        f = np.exp(1j * (a * t**3 / 3 + b * t)) * _apply_weight(weight, t)
        return np.sum(w * f), t.size, f

    fine, used, f = run(cfg.nodes_per_dim)
    coarse, used_c, _ = run(coarse_nodes(cfg.nodes_per_dim))
    tail = float(np.abs(f[[0, -1]]).max()) * radius
    return Evaluation(
        fine, abs(fine - coarse) + tail, used + used_c, "rotated_contour",
        diagnostics={"radius": radius, "theta": theta},
    )


def _cubic_damped(a, b, weight, cfg: QuadratureConfig) -> Evaluation:
    radius = cfg.radius("damped")
    ladder = np.asarray(cfg.epsilon_ladder)
    breaks = _phase_breaks(a, b, radius)
    breaks = np.concatenate([-breaks[::-1], breaks[1:]])

    def run(n):
        t, w = panel_rule(breaks, n)
        f = np.exp(1j * (a * t**3 / 3 + b * t)) * _apply_weight(weight, t.astype(complex))
        vals = np.array([np.sum(w * f * np.exp(-e * t**2)) for e in ladder])
        return vals, t.size, f

    vals, used, f = run(cfg.nodes_per_dim)
    vals_c, used_c, _ = run(coarse_nodes(cfg.nodes_per_dim))
    value, err, residuals = _ladder_extrapolation(ladder, vals, cfg.extrapolation_degree, cfg)
    value_c = extrapolate_to_zero(ladder, vals_c, cfg.extrapolation_degree)
    gain = extrapolation_gain(ladder, cfg.extrapolation_degree)
    # oscillatory boundary term left by the hard truncation at the smallest eps
    edge = float(np.abs(f[[0, -1]]).max()) * math.exp(-ladder[-1] * radius**2)
    tail = 2 * gain * edge / (abs(a) * radius**2 + abs(b))
    return Evaluation(
        value, err + abs(value - value_c) + tail, used + used_c, "damped_extrapolated",
        diagnostics={"radius": radius, "ladder_values": vals.tolist(),
                     "ladder_residuals": residuals},
    )


# --------------------------------------------------------------------------
# damped tensor lattice


def damped_lattice_integral(
    f: Callable[[np.ndarray], np.ndarray],
    d: int,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
    damped: bool = True,
    radius: float | None = None,
    panels: int | None = None,
) -> Evaluation:
    """Tensor Gauss-Legendre quadrature of ``f`` over ``[-R, R]**d``.

    ``f`` maps an array of points with trailing axis ``d`` to complex values.
    Each ladder damping ``exp(-eps |t|**2)`` is applied to the same samples
    and the results are extrapolated to ``eps = 0``. With ``damped=False`` a
    single undamped sum is returned (for integrands that already decay); the
    same happens automatically when ``|f|`` on the outermost nodes is so small
    that the truncation edge contributes below ``abs_tol``.
    ``radius`` and ``panels`` override the configuration for callers that know
    the effective support of their integrand.
    """
    if not 1 <= d <= 4:
        raise DomainError("lattice dimension must be between 1 and 4")
    radius = cfg.radius("damped") if radius is None else float(radius)
    panels = cfg.panels if panels is None else int(panels)
    ladder = np.asarray(cfg.epsilon_ladder) if damped else np.zeros(1)

    def run(n):
        x, w = uniform_rule(-radius, radius, panels, n)
        sums = np.zeros(ladder.size, dtype=complex)
        inner_sums = np.zeros(ladder.size, dtype=complex)
        inner_radius = 0.875 * radius
        plain = 0.0j
        edge = 0.0
        # chunk over the leading axis to bound memory for d >= 3
        rest = np.stack(np.meshgrid(*([x] * (d - 1)), indexing="ij"), axis=-1) if d > 1 else None
        rest_w = np.ones(1)
        if d > 1:
            rest_w = np.prod(np.stack(np.meshgrid(*([w] * (d - 1)), indexing="ij"), axis=-1), axis=-1)
            rest = rest.reshape(-1, d - 1)
            rest_w = rest_w.ravel()
            rest_r2 = np.sum(rest**2, axis=-1)
        for xi, wi in zip(x, w):
            if d == 1:
                pts = np.array([[xi]])
                ww = np.array([wi])
                r2 = np.array([xi**2])
            else:
                pts = np.concatenate([np.full((rest.shape[0], 1), xi), rest], axis=1)
                ww = wi * rest_w
                r2 = xi**2 + rest_r2
            raw = np.asarray(f(pts), dtype=complex)
            # largest |f| on the outermost shell of nodes
            outer = np.max(np.abs(pts), axis=1) >= abs(x[-1])
            if outer.any():
                edge = max(edge, float(np.abs(raw[outer]).max()))
            vals = raw * ww
            plain += np.sum(vals)
            damped_vals = np.array([vals * np.exp(-e * r2) for e in ladder])
            sums += damped_vals.sum(axis=1)
            inner = np.max(np.abs(pts), axis=1) < inner_radius
            inner_sums += damped_vals[:, inner].sum(axis=1)
        return sums, inner_sums, plain, edge, x.size**d

    vals, inner_vals, plain, edge, used = run(cfg.nodes_per_dim)
    vals_c, _, plain_c, _, used_c = run(coarse_nodes(cfg.nodes_per_dim))
    # The ladder only regularizes the truncation edge; an integrand that is
    # already negligible there has its eps -> 0 limit in the undamped sum.
    tail = edge * (2 * radius) ** d
    if not damped or tail < cfg.abs_tol:
        return Evaluation(plain, abs(plain - plain_c) + tail, used + used_c, "direct",
                          diagnostics={"radius": radius, "edge": edge})
    value, err, residuals = _ladder_extrapolation(ladder, vals, cfg.extrapolation_degree, cfg)
    value_c = extrapolate_to_zero(ladder, vals_c, cfg.extrapolation_degree)
    # truncation probe: the same extrapolation on the box shrunk by one eighth
    truncation = abs(value - extrapolate_to_zero(ladder, inner_vals, cfg.extrapolation_degree))
    return Evaluation(
        value, err + abs(value - value_c) + truncation, used + used_c, "damped_extrapolated",
        diagnostics={"radius": radius, "ladder_values": vals.tolist(),
                     "ladder_residuals": residuals, "truncation": truncation},
    )
