"""Classical Airy function in two normalizations.

``ai_std`` is the usual Ai(x), with ``Ai'' = x Ai``. ``ai_paper`` is the bare
Fourier integral

    F(x) = int exp(i (y**3/3 - x y)) dy = 2 pi Ai(-x),

which solves ``F'' + x F = 0``. The reflected argument comes from the sign of
the linear term; both functions are carried side by side so that neither the
2 pi nor the reflection is ever absorbed silently.

Two evaluation paths live here:

* a precise scalar path (:func:`airy`, :func:`airy_derivatives`) using the
  Maclaurin series in extended precision for ``|x| <= 6`` and the
  exponentially improved (terminant-corrected) asymptotic expansion of
  ``K_{1/3}``/``K_{2/3}`` beyond;
* a vectorized complex path (:func:`ai_complex` and the sector pieces) in
  plain double precision, used inside integrands. Its absolute error is
  around 1e-10 or better.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np

from .errors import DomainError
from .oscillatory_quad import DEFAULT_CONFIG, Evaluation, QuadratureConfig, cubic_phase_integral

TWO_PI = 2 * math.pi
SERIES_LIMIT = 6.0
DOMAIN_LIMIT = 30.0
MAX_ORDER = 6
_DPS = 34

OMEGA = complex(-0.5, math.sqrt(3) / 2)  # exp(2 pi i / 3), for the connection formula
OMEGA2 = OMEGA.conjugate()


@dataclass(frozen=True)
class AiryValue:
    """``ai_std = Ai^(k)(x)`` and ``ai_paper = F^(k)(x) = 2 pi (-1)^k Ai^(k)(-x)``."""

    x: float
    ai_std: float
    ai_paper: float
    derivative_order: int


# ---------------------------------------------------------------------------
# precise scalar path


def _mp_constants():
    c1 = mpmath.mpf(3) ** (-mpmath.mpf(2) / 3) / mpmath.gamma(mpmath.mpf(2) / 3)
    c2 = mpmath.mpf(3) ** (-mpmath.mpf(1) / 3) / mpmath.gamma(mpmath.mpf(1) / 3)
    return c1, c2


def _series_mp(x):
    """Maclaurin series for (Ai, Ai') at working precision."""
    c1, c2 = _mp_constants()
    x = mpmath.mpf(x)
    x3 = x**3
    f, g, df, dg = mpmath.mpf(1), x, mpmath.mpf(0), mpmath.mpf(1)
    tf, tg, tdf, tdg = mpmath.mpf(1), x, x**2 / 2, mpmath.mpf(1)
    df = tdf
    eps = mpmath.mpf(10) ** (-_DPS)
    k = 0
    while True:
        tf *= x3 / ((3 * k + 2) * (3 * k + 3))
        tg *= x3 / ((3 * k + 3) * (3 * k + 4))
        tdf *= x3 / ((3 * k + 3) * (3 * k + 5))
        tdg *= x3 / ((3 * k + 1) * (3 * k + 3))
        f += tf
        g += tg
        df += tdf
        dg += tdg
        k += 1
        if max(abs(tf), abs(tg), abs(tdf), abs(tdg)) < eps and k > 2:
            break
    return c1 * f - c2 * g, c1 * df - c2 * dg


@lru_cache(maxsize=16)
def _bessel_coeffs(nu_num: int, count: int):
    nu = mpmath.mpf(nu_num) / 3
    out = [mpmath.mpf(1)]
    for k in range(1, count):
        out.append(out[-1] * (4 * nu**2 - (2 * k - 1) ** 2) / (8 * k))
    return tuple(out)


def _k_improved(nu_num: int, z, m: int = 8):
    """K_{nu}(z) for nu = nu_num/3 via the terminant-corrected expansion.

    The main series is cut near its smallest term (``2|z|`` terms) and the
    remainder is re-expanded in the terminant functions
    ``G_p(w) = e^w Gamma(p) Gamma(1-p, w) / (2 pi)`` evaluated at ``w = 2z``.
    """
    ell = int(mpmath.floor(2 * abs(z))) + 1
    a = _bessel_coeffs(nu_num, 64 * (ell // 64 + 1))
    main = mpmath.fsum(a[k] / z**k for k in range(ell))
    w = 2 * z

    if 2 * abs(z) > 50:
        # the terminant correction is below exp(-2|z|) < 2e-22 relative
        return mpmath.sqrt(mpmath.pi / (2 * z)) * mpmath.exp(-z) * main
    cos_term = 2 * mpmath.cos(mpmath.pi * mpmath.mpf(nu_num) / 3)
    # Gamma(1 - p, w) for p = ell, ell-1, ... by the upward recurrence
    # Gamma(s + 1, w) = s Gamma(s, w) + w^s e^{-w}, from one direct evaluation
    s0 = 1 - ell
    inc = [mpmath.gammainc(s0, w)]
    ew = mpmath.exp(-w)
    for j in range(1, m):
        s_prev = s0 + j - 1
        inc.append(s_prev * inc[-1] + w**s_prev * ew)
    G = [mpmath.exp(w) * mpmath.gamma(ell - k) * inc[k] / (2 * mpmath.pi) for k in range(m)]
    rest = mpmath.fsum(a[k] / z**k * G[k] for k in range(m))
    remainder = (-1) ** ell * cos_term * rest
    return mpmath.sqrt(mpmath.pi / (2 * z)) * mpmath.exp(-z) * (main + remainder)


def _asymptotic_mp(x):
    """(Ai, Ai') from the exponentially improved large-|x| expansion."""
    x = mpmath.mpf(x)
    if x > 0:
        zeta = mpmath.mpf(2) / 3 * x**1.5
        ai = mpmath.sqrt(x / 3) / mpmath.pi * _k_improved(1, zeta)
        aip = -x / (mpmath.pi * mpmath.sqrt(3)) * _k_improved(2, zeta)
        return ai, aip
    # Ai(-t) = 2 Re(-w^2 Ai(t e^{i pi/3})), Ai'(-t) = 2 Re(-w Ai'(t e^{i pi/3}))
    t = -x
    z = t * mpmath.expjpi(mpmath.mpf(1) / 3)
    zeta = mpmath.mpf(2) / 3 * z**1.5
    w = mpmath.expjpi(mpmath.mpf(2) / 3)
    ai_c = mpmath.sqrt(z / 3) / mpmath.pi * _k_improved(1, zeta)
    aip_c = -z / (mpmath.pi * mpmath.sqrt(3)) * _k_improved(2, zeta)
    return 2 * mpmath.re(-(w**2) * ai_c), 2 * mpmath.re(-w * aip_c)


def _ai_pair(x: float, branch: str = "auto"):
    with mpmath.workdps(_DPS):
        if branch == "auto":
            branch = "series" if abs(x) <= SERIES_LIMIT else "asymptotic"
        if branch == "series":
            ai, aip = _series_mp(x)
        elif branch == "asymptotic":
            if x == 0:
                raise DomainError("asymptotic branch needs x != 0")
            ai, aip = _asymptotic_mp(x)
        else:
            raise ValueError(f"unknown branch {branch!r}")
        return float(ai), float(aip)


def _check_domain(x: float):
    if not math.isfinite(x) or abs(x) > DOMAIN_LIMIT:
        raise DomainError(f"|x| must be at most {DOMAIN_LIMIT}, got {x!r}")


def airy_derivatives(x: float, max_order: int = 1) -> list[float]:
    """``[Ai(x), Ai'(x), ..., Ai^{(max_order)}(x)]`` in the standard normalization.

    Orders two and above come from ``Ai^{(k+2)} = x Ai^{(k)} + k Ai^{(k-1)}``.
    """
    x = float(x)
    _check_domain(x)
    if not 0 <= max_order <= MAX_ORDER:
        raise DomainError(f"derivative order must be in [0, {MAX_ORDER}]")
    ai, aip = _ai_pair(x)
    out = [ai, aip]
    for k in range(0, max_order - 1):
        prev = out[k - 1] if k >= 1 else 0.0
        out.append(x * out[k] + k * prev)
    return out[: max_order + 1]


def fourier_derivatives(x: float, max_order: int = 1) -> list[float]:
    """``[F(x), F'(x), ..., F^{(max_order)}(x)]`` for ``F(x) = 2 pi Ai(-x)``."""
    vals = airy_derivatives(-float(x), max_order)
    return [TWO_PI * (-1) ** k * v for k, v in enumerate(vals)]


def airy(x: float, order: int = 0) -> AiryValue:
    std = airy_derivatives(x, max(order, 1))[order]
    paper = fourier_derivatives(x, max(order, 1))[order]
    return AiryValue(float(x), std, paper, order)


def ai_std(x: float) -> float:
    return airy_derivatives(x, 0)[0]


def ai_paper(x: float) -> float:
    return fourier_derivatives(x, 0)[0]


def branch_overlap(x: float) -> float:
    """Discrepancy between the series and asymptotic branches at ``x``.

    Measured relative to the local scale: ``|Ai|`` (and ``|Ai'|/sqrt(x)``) on
    the positive axis, the modulus ``sqrt(Ai**2 + Bi**2)`` on the negative
    axis where Ai itself has zeros.
    """
    s0, s1 = _ai_pair(x, "series")
    a0, a1 = _ai_pair(x, "asymptotic")
    if x > 0:
        scale0, scale1 = abs(s0), abs(s1)
    else:
        t = abs(x)
        scale0 = 1 / (math.sqrt(math.pi) * t**0.25)
        scale1 = t**0.25 / math.sqrt(math.pi)
    return max(abs(s0 - a0) / scale0, abs(s1 - a1) / scale1)


def airy_via_quadrature(x: float, cfg: QuadratureConfig = DEFAULT_CONFIG,
                        method: str = "auto") -> Evaluation:
    """``int exp(i (y**3/3 - x y)) dy`` by oscillatory quadrature (equals ``ai_paper(x)``)."""
    if abs(x) > 8:
        raise DomainError("airy_via_quadrature supports |x| <= 8")
    return cubic_phase_integral(1.0, -float(x), None, cfg, method=method)


# ---------------------------------------------------------------------------
# vectorized complex path

_C1 = 3.0 ** (-2.0 / 3.0) / math.gamma(2.0 / 3.0)
_C2 = 3.0 ** (-1.0 / 3.0) / math.gamma(1.0 / 3.0)
_FAST_SWITCH = 7.0
_SERIES_TERMS = 48
_ASYM_TERMS = 24


def _uv_coeffs(count: int):
    u = [1.0]
    for k in range(1, count):
        num = 1.0
        for j in range(2 * k + 1, 6 * k, 2):
            num *= j
        u.append(num / (216.0**k * math.factorial(k)))
    v = [1.0] + [-(6 * k + 1) / (6 * k - 1) * u[k] for k in range(1, count)]
    return np.array(u), np.array(v)


_U, _V = _uv_coeffs(_ASYM_TERMS)


def _series_complex(z):
    z3 = z**3
    f = np.ones_like(z)
    g = z.copy()
    df = z**2 / 2
    dg = np.ones_like(z)
    tf, tg, tdf, tdg = f.copy(), g.copy(), df.copy(), dg.copy()
    for k in range(_SERIES_TERMS):
        tf = tf * z3 / ((3 * k + 2) * (3 * k + 3))
        tg = tg * z3 / ((3 * k + 3) * (3 * k + 4))
        tdf = tdf * z3 / ((3 * k + 3) * (3 * k + 5))
        tdg = tdg * z3 / ((3 * k + 1) * (3 * k + 3))
        f = f + tf
        g = g + tg
        df = df + tdf
        dg = dg + tdg
    return _C1 * f - _C2 * g, _C1 * df - _C2 * dg


def _asym_complex(z):
    """Recessive expansion, valid for ``|arg z| <= 2 pi / 3`` and large ``|z|``."""
    zeta = (2.0 / 3.0) * z**1.5
    inv = -1.0 / zeta
    su = np.zeros_like(z)
    sv = np.zeros_like(z)
    power = np.ones_like(z)
    for k in range(_ASYM_TERMS):
        su = su + _U[k] * power
        sv = sv + _V[k] * power
        power = power * inv
    pref = np.exp(-zeta) / (2 * math.sqrt(math.pi))
    q = z**0.25
    return pref * su / q, -pref * q * sv


def ai_complex(z, derivative: bool = False):
    """Vectorized Ai (or Ai') for complex arguments in double precision."""
    z = np.asarray(z, dtype=complex)
    shape = z.shape
    z = z.ravel()
    ai = np.empty_like(z)
    aip = np.empty_like(z)
    small = np.abs(z) <= _FAST_SWITCH
    if small.any():
        ai[small], aip[small] = _series_complex(z[small])
    big = ~small
    if big.any():
        zb = z[big]
        direct = np.abs(np.angle(zb)) <= 2 * math.pi / 3
        a_b = np.empty_like(zb)
        d_b = np.empty_like(zb)
        if direct.any():
            a_b[direct], d_b[direct] = _asym_complex(zb[direct])
        other = ~direct
        if other.any():
            zo = zb[other]
            a1, d1 = _asym_complex(OMEGA * zo)
            a2, d2 = _asym_complex(OMEGA2 * zo)
            a_b[other] = -OMEGA * a1 - OMEGA2 * a2
            d_b[other] = -OMEGA2 * d1 - OMEGA * d2
        ai[big], aip[big] = a_b, d_b
    out = aip if derivative else ai
    return out.reshape(shape)


def ai_real(x, derivative: bool = False) -> np.ndarray:
    """Vectorized real-axis Ai (or Ai'), standard normalization."""
    return ai_complex(np.asarray(x, dtype=float), derivative).real



def ai_paper_array(x, derivative: bool = False) -> np.ndarray:
    """Vectorized ``F(x) = 2 pi Ai(-x)`` (or ``F'``) for real arrays."""
    x = np.asarray(x, dtype=float)
    if derivative:
        return -TWO_PI * ai_real(-x, True)
    return TWO_PI * ai_real(-x)
