"""Eigenvalue-space data model.

Spectra, the Vandermonde determinant, the trace/traceless split of a matrix
argument, and the zonal spherical function

    Phi(P|Q) = det[exp(i q_j p_k)] / (V(P) V(Q))

with a stable limit when entries of either spectrum coincide.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import expm

from .errors import DimensionMismatch, DomainError

TRACE_TOL = 1e-12
CONFLUENT_RTOL = 1e-8
NEAR_RTOL = 1e-2  # below this relative gap the plain ratio loses digits
DIVIDED_MAX_SIZE = 20.0  # expm stays accurate while max|q'| max|p'| is moderate


@dataclass(frozen=True)
class Spectrum:
    """Real eigenvalues stored in nonincreasing order."""

    values: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(sorted((float(v) for v in self.values), reverse=True))
        if not vals:
            raise DomainError("a spectrum needs at least one entry")
        if not all(math.isfinite(v) for v in vals):
            raise DomainError("spectrum entries must be finite")
        object.__setattr__(self, "values", vals)

    @property
    def N(self) -> int:
        return len(self.values)

    def array(self) -> np.ndarray:
        return np.array(self.values, dtype=float)

    @classmethod
    def parse(cls, text: str) -> "Spectrum":
        parts = [p.strip() for p in text.split(",")]
        if not parts or any(not p for p in parts):
            raise DomainError(f"cannot parse spectrum {text!r}")
        try:
            return cls(tuple(float(p) for p in parts))
        except ValueError as exc:
            raise DomainError(f"cannot parse spectrum {text!r}") from exc

    def __str__(self) -> str:
        return ",".join(repr(v) for v in self.values)


@dataclass(frozen=True)
class MatrixArgument:
    """``X = X~ + xi I`` with ``tr X~ = 0``."""

    xi: float
    traceless: Spectrum

    def __post_init__(self):
        if not math.isfinite(self.xi):
            raise DomainError("xi must be finite")
        total = sum(self.traceless.values)
        scale = max(1.0, max(abs(v) for v in self.traceless.values))
        if abs(total) > TRACE_TOL * scale:
            raise DomainError(f"traceless part sums to {total!r}")

    @property
    def N(self) -> int:
        return self.traceless.N

    def eigenvalues(self) -> np.ndarray:
        return self.traceless.array() + self.xi

    @classmethod
    def from_xi_r(cls, xi: float, r: float) -> "MatrixArgument":
        """N=2 argument with eigenvalues ``xi +- r/2`` (so ``r = q1 - q2``)."""
        return cls(float(xi), Spectrum((0.5 * r, -0.5 * r)))

    @property
    def r(self) -> float:
        """Eigenvalue gap ``q1 - q2`` of an N=2 argument."""
        if self.N != 2:
            raise DimensionMismatch("r is defined for N=2 only")
        q = self.traceless.values
        return q[0] - q[1]

    def to_dict(self) -> dict:
        return {"xi": self.xi, "traceless": list(self.traceless.values)}


def _values(P) -> np.ndarray:
    """Entries in the order given (a Spectrum is already canonical)."""
    if isinstance(P, Spectrum):
        return P.array()
    arr = np.asarray(P, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise DomainError("expected a nonempty one-dimensional spectrum")
    return arr


def split(raw_eigenvalues: Sequence[float]) -> MatrixArgument:
    raw = _values(raw_eigenvalues)
    xi = float(np.mean(raw))
    q = raw - xi
    # remove the rounding residue of the mean so the trace check is exact
    q = q - np.sum(q) / q.size
    return MatrixArgument(xi, Spectrum(tuple(q)))


def vandermonde(P) -> float:
    """``prod_{j<k} (p_j - p_k)`` in the order given."""
    p = _values(P)
    out = 1.0
    for j in range(p.size):
        for k in range(j + 1, p.size):
            out *= p[j] - p[k]
    return out


def vandermonde_batch(P: np.ndarray) -> np.ndarray:
    """Row-wise Vandermonde of an ``(M, N)`` array."""
    P = np.asarray(P)
    out = np.ones(P.shape[:-1], dtype=P.dtype)
    n = P.shape[-1]
    for j in range(n):
        for k in range(j + 1, n):
            out = out * (P[..., j] - P[..., k])
    return out


def spherical_measure(P) -> float:
    return vandermonde(P) ** 2


def confluent_threshold(values: np.ndarray) -> float:
    spread = float(values.max() - values.min()) if values.size else 0.0
    return CONFLUENT_RTOL * (1.0 + spread)


def min_gap(values) -> float:
    v = np.sort(_values(values))
    return float(np.min(np.diff(v))) if v.size > 1 else math.inf


def is_confluent(values) -> bool:
    v = _values(values)
    return min_gap(v) < confluent_threshold(v)


def coincidence_groups(values: np.ndarray) -> list[list[int]]:
    """Indices of entries clustered within the confluent threshold."""
    tol = confluent_threshold(values)
    order = np.argsort(values, kind="stable")
    groups = [[int(order[0])]]
    for a, b in zip(order[:-1], order[1:]):
        if values[b] - values[a] < tol:
            groups[-1].append(int(b))
        else:
            groups.append([int(b)])
    return groups


def _expanded(values: np.ndarray):
    """Ordering, evaluation points and derivative orders for the confluent form.

    Entries of a cluster share the cluster mean as evaluation point and take
    derivative orders 0, 1, 2, ... (divided by the factorial).
    """
    perm, points, orders = [], [], []
    for g in coincidence_groups(values):
        centre = float(np.mean(values[g]))
        for l, idx in enumerate(g):
            perm.append(idx)
            points.append(centre)
            orders.append(l)
    return perm, np.array(points), orders


def _perm_sign(perm: Sequence[int]) -> int:
    perm = list(perm)
    sign = 1
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


def _power_matrix(points: np.ndarray, orders: Sequence[int]) -> np.ndarray:
    """``W[j, k] = (d/dx)^l x^j / l!`` at ``x = points[k]``, ``l = orders[k]``."""
    n = points.size
    W = np.zeros((n, n))
    for k, (x, l) in enumerate(zip(points, orders)):
        for j in range(l, n):
            W[j, k] = math.comb(j, l) * x ** (j - l)
    return W


def confluent_vandermonde(values) -> float:
    """Vandermonde with the vanishing in-cluster factors divided out.

    Equals :func:`vandermonde` for distinct entries. On clusters the power
    matrix gets derivative columns, which is the limit of ``V`` divided by the
    in-cluster differences.
    """
    v = _values(values)
    perm, points, orders = _expanded(v)
    m = v.size * (v.size - 1) // 2
    return (-1) ** m * _perm_sign(perm) * float(np.linalg.det(_power_matrix(points, orders)))


def _bidiagonal(x: np.ndarray) -> np.ndarray:
    """Matrix whose functions carry divided differences on the nodes ``x``."""
    return np.diag(x) + np.diag(np.ones(x.size - 1), 1)


def _phi_divided(p: np.ndarray, q: np.ndarray, sign: int) -> complex:
    """``Phi`` as the determinant of double divided differences of ``exp(i s q p)``.

    Row and column Newton transformations turn ``det[exp(i s q_j p_k)]`` into
    ``V(P) V(Q) det D`` with ``D_jk = [q_0..q_j][p_0..p_k] exp(i s q p)``. The
    table ``D`` is one row of ``expm(i s J_Q (x) J_P)`` with bidiagonal
    ``J``; it stays accurate as nodes approach each other and reduces to
    derivative columns when they coincide. Both spectra are centred first,
    which changes the determinant by the phase ``exp(i s N a b)`` only.
    """
    n = p.size
    a, b = float(q.mean()), float(p.mean())
    table = expm(1j * sign * np.kron(_bidiagonal(q - a), _bidiagonal(p - b)))
    return complex(np.exp(1j * sign * n * a * b) * np.linalg.det(table[0].reshape(n, n)))


def spherical_phi(P, Q, sign: int = 1) -> complex:
    """``det[exp(i s q_j p_k)] / (V(P) V(Q))`` with ``s = sign``.

    ``sign=1`` is the zonal spherical function as written; ``sign=-1`` is
    its complex conjugate for real spectra. The divided-difference form is
    used when any gap is below ``NEAR_RTOL * (1 + spread)`` (including exact
    coincidence) or when the centred spectra are moderate; the plain
    determinant ratio, which cancels less than the matrix exponential loses
    for large ``|q p|``, is kept for large well-separated arguments.
    """
    p = _values(P)
    q = _values(Q)
    if p.size != q.size:
        raise DimensionMismatch(f"spectra sizes differ: {p.size} vs {q.size}")
    if p.size == 1:
        return complex(np.exp(1j * sign * q[0] * p[0]))
    near = min_gap(p) <= NEAR_RTOL * (1 + np.ptp(p)) or min_gap(q) <= NEAR_RTOL * (1 + np.ptp(q))
    size = np.abs(p - p.mean()).max() * np.abs(q - q.mean()).max()
    if near or size <= DIVIDED_MAX_SIZE:
        return _phi_divided(p, q, sign)
    E = np.exp(1j * sign * np.outer(q, p))
    return complex(np.linalg.det(E) / (vandermonde(p) * vandermonde(q)))


def phi_measure_kernel(Q, P: np.ndarray, sign: int = -1) -> np.ndarray:
    """``Phi(Q|P) V(P)**2`` for a batch of spectra ``P`` of shape ``(M, N)``.

    ``Q`` may be confluent (for instance a scalar matrix); rows of ``P`` are
    assumed generic, which holds at quadrature nodes off a null set.
    """
    q = _values(Q)
    P = np.atleast_2d(np.asarray(P, dtype=float))
    if P.shape[1] != q.size:
        raise DimensionMismatch("kernel spectra sizes differ")
    vp = vandermonde_batch(P)
    c = 1j * sign
    perm, pts, orders = _expanded(q)
    E = np.empty(P.shape[:1] + (q.size, q.size), dtype=complex)
    for j, (x, l) in enumerate(zip(pts, orders)):
        E[:, j, :] = (c * P) ** l / math.factorial(l) * np.exp(c * x * P)
    # det W_P = (-1)^M V(P), and Phi V(P)^2 = det E V(P)^2 / (det W_Q det W_P)
    m = q.size * (q.size - 1) // 2
    den = np.linalg.det(_power_matrix(pts, orders)) * (-1) ** m
    return np.linalg.det(E) * vp / den


def as_spectrum(values: Iterable[float] | Spectrum) -> Spectrum:
    return values if isinstance(values, Spectrum) else Spectrum(tuple(values))
