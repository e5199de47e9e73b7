"""Integrals of conjugation-invariant functions over Hermitian matrices.

The reduction to eigenvalues, with the flat measure
``dY = prod_i dY_ii prod_{i<j} dRe Y_ij dIm Y_ij``, reads

    int f(Y) exp(-i tr QY) dY
        = (i pi)^M / V(Q) int f(P) V(P) exp(-i tr QP) dP,    M = N(N-1)/2,

for diagonal ``Q`` with distinct entries. It follows from the Weyl integration
formula and the Harish-Chandra angular integral. ``reduced_integral`` also
offers the variant ``(-2 pi i)^M / V(Q) int f(P) V(P)^2 exp(-i tr QP) dP``
(``squared_measure=True``); it does not reproduce the matrix-space integral and is
kept so the disagreement can be measured.

``direct_matrix_integral`` is an independent importance-sampling Monte Carlo
in the N**2 real matrix coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfluentSpectrum, DomainError
from .oscillatory_quad import (
    DEFAULT_CONFIG,
    Evaluation,
    QuadratureConfig,
    damped_lattice_integral,
    extrapolate_to_zero,
)
from .spectra import Spectrum, _values, is_confluent, min_gap, vandermonde, vandermonde_batch

DECAY_HINTS = ("schwartz", "oscillatory")
EigenFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class InvariantIntegrand:
    """An invariant function given through its eigenvalues.

    ``eigen_fn`` maps an array of spectra with trailing axis N to values; it
    must be symmetric in the N entries. When ``N`` is given the symmetry is
    spot-checked on construction.
    """

    eigen_fn: EigenFn
    decay_hint: str = "schwartz"
    N: int | None = None
    check_seed: int = 0

    def __post_init__(self):
        if self.decay_hint not in DECAY_HINTS:
            raise DomainError(f"decay_hint must be one of {DECAY_HINTS}")
        if self.N is not None:
            self.check_symmetry(self.N)

    def __call__(self, P: np.ndarray) -> np.ndarray:
        return np.asarray(self.eigen_fn(np.asarray(P, dtype=float)), dtype=complex)

    def check_symmetry(self, N: int, trials: int = 5, rtol: float = 1e-10) -> None:
        rng = np.random.default_rng(self.check_seed)
        for _ in range(trials):
            p = rng.normal(size=N)
            base = self(p[None, :])[0]
            other = self(p[rng.permutation(N)][None, :])[0]
            if abs(other - base) > rtol * max(1.0, abs(base)):
                raise DomainError("eigen_fn is not symmetric under permutations")


def gaussian_integrand(N: int | None = None, scale: float = 1.0) -> InvariantIntegrand:
    """``exp(-scale tr Y^2)`` as an invariant integrand."""
    return InvariantIntegrand(lambda P: np.exp(-scale * np.sum(P**2, axis=-1)), "schwartz", N)


def reduction_prefactor(N: int, squared_measure: bool = False) -> complex:
    m = N * (N - 1) // 2
    return (-2j * math.pi) ** m if squared_measure else (1j * math.pi) ** m


def _reduced_value(f: InvariantIntegrand, q: np.ndarray, cfg: QuadratureConfig,
                   squared_measure: bool) -> Evaluation:
    N = q.size
    power = 2 if squared_measure else 1

    def integrand(P):
        return f(P) * vandermonde_batch(P) ** power * np.exp(-1j * P @ q)

    ev = damped_lattice_integral(integrand, N, cfg, damped=f.decay_hint == "oscillatory")
    factor = reduction_prefactor(N, squared_measure) / vandermonde(q)
    return ev.scaled(factor)


def reduced_integral(
    f: InvariantIntegrand,
    Q,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
    squared_measure: bool = False,
    extrapolate: bool = False,
    offsets: tuple[float, ...] = (4e-2, 2e-2, 1e-2),
) -> Evaluation:
    """Eigenvalue-side value of ``int f(Y) exp(-i tr QY) dY``.

    Schwartz integrands are summed on a plain tensor lattice, oscillatory ones
    through the damping ladder. A confluent ``Q`` raises unless
    ``extrapolate=True``, in which case the entries are split by
    ``delta * (0, 1, ..., N-1)`` (recentred) for each ``delta`` in ``offsets``
    and the results are extrapolated quadratically to ``delta = 0``.
    """
    q = _values(Q)
    if q.size > 4:
        raise DomainError("eigenvalue lattice supports N <= 4")
    if not is_confluent(q):
        return _reduced_value(f, q, cfg, squared_measure)
    if not extrapolate:
        raise ConfluentSpectrum(f"Q has coincident entries (min gap {min_gap(q):.3g})")
    spread = np.arange(q.size, dtype=float)
    spread -= spread.mean()
    order = np.argsort(q, kind="stable")
    evs = []
    for d in offsets:
        qd = q.copy()
        qd[order] = q[order] + d * spread
        evs.append(_reduced_value(f, qd, cfg, squared_measure))
    vals = [e.value for e in evs]
    value = extrapolate_to_zero(offsets, vals, 2)
    sub = extrapolate_to_zero(offsets[1:], vals[1:], 1)
    err = abs(value - sub) + max(e.error_estimate for e in evs)
    return Evaluation(value, err, sum(e.nodes_used for e in evs), evs[0].method_tag,
                      diagnostics={"offsets": list(offsets), "values": vals})


def _eig2(a: np.ndarray, d: np.ndarray, re: np.ndarray, im: np.ndarray) -> np.ndarray:
    """Eigenvalues of ``[[a, re + i im], [re - i im, d]]`` by the quadratic formula."""
    mean = 0.5 * (a + d)
    rad = np.sqrt((0.5 * (a - d)) ** 2 + re**2 + im**2)
    return np.stack([mean + rad, mean - rad], axis=-1)


def direct_matrix_integral(
    f: InvariantIntegrand,
    Q,
    samples: int = 10**6,
    seed: int = 0,
    proposal_scale: float = 1.0,
    streams: int = 8,
) -> Evaluation:
    """Monte Carlo estimate of ``int f(Y) exp(-i tr QY) dY`` for N <= 2.

    Every real coordinate is drawn from ``N(0, proposal_scale**2)``, which must
    be wider than ``f``. The sample is split into ``streams`` independent
    streams spawned from ``seed`` and recombined in stream order, so the
    result depends only on ``(samples, seed, proposal_scale, streams)``.
    The error estimate is one standard deviation.
    """
    q = _values(Q)
    N = q.size
    if N > 2:
        raise DomainError("direct matrix integration supports N <= 2")
    if f.decay_hint != "schwartz":
        raise DomainError("Monte Carlo needs a rapidly decaying integrand")
    if samples < 10**4:
        raise DomainError("use at least 1e4 samples")
    dims = N * N
    s = float(proposal_scale)
    log_norm = dims * math.log(s * math.sqrt(2 * math.pi))
    counts = [samples // streams + (1 if k < samples % streams else 0) for k in range(streams)]
    total = 0.0j
    total_sq = 0.0
    children = np.random.SeedSequence(seed).spawn(streams)
    for count, child in zip(counts, children):
        rng = np.random.default_rng(child)
        z = rng.standard_normal((count, dims))
        coords = s * z
        log_pdf = -0.5 * np.sum(z**2, axis=1) - log_norm
        if N == 1:
            eig = coords
            trace_qy = coords[:, 0] * q[0]
        else:
            eig = _eig2(coords[:, 0], coords[:, 1], coords[:, 2], coords[:, 3])
            trace_qy = q[0] * coords[:, 0] + q[1] * coords[:, 1]
        vals = f(eig) * np.exp(-1j * trace_qy - log_pdf)
        total += vals.sum()
        total_sq += float(np.sum(vals.real**2 + vals.imag**2))
    mean = total / samples
    var = max(total_sq / samples - abs(mean) ** 2, 0.0)
    err = math.sqrt(var / (samples - 1))
    return Evaluation(mean, err, samples, "direct",
                      diagnostics={"seed": seed, "streams": streams, "proposal_scale": s})


def gaussian_reference(q: float) -> float:
    """Closed form of ``int exp(-tr Y^2 - i tr QY) dY`` at N=2, ``Q = (q, -q)``."""
    return 0.5 * math.pi**2 * math.exp(-0.5 * q**2)


__all__ = [
    "InvariantIntegrand",
    "gaussian_integrand",
    "reduction_prefactor",
    "reduced_integral",
    "direct_matrix_integral",
    "gaussian_reference",
    "Spectrum",
]
