import math

import numpy as np
import pytest

from matairy import ConfluentSpectrum, DomainError
from matairy.hciz import (
    InvariantIntegrand,
    direct_matrix_integral,
    gaussian_integrand,
    gaussian_reference,
    reduced_integral,
    reduction_prefactor,
)
from matairy.oscillatory_quad import extrapolate_to_zero

# Frozen from the eigenvalue-side reduction at tight tolerance; agrees with
# the closed form (pi^2/2) exp(-q^2/2) and with the Monte Carlo oracle.
REDUCED_GAUSSIAN_Q05 = 4.354947656848326


def test_gaussian_reference_closed_form():
    assert gaussian_reference(0.0) == pytest.approx(math.pi**2 / 2)


def test_n1_is_a_fourier_transform():
    f = gaussian_integrand(1)
    ev = reduced_integral(f, (0.0,))
    assert abs(ev.value - math.sqrt(math.pi)) < 1e-8
    ev = reduced_integral(f, (1.2,))
    assert abs(ev.value - math.sqrt(math.pi) * math.exp(-1.2**2 / 4)) < 1e-8
    assert reduction_prefactor(1) == 1


def test_n2_regression_and_closed_form():
    ev = reduced_integral(gaussian_integrand(2), (0.5, -0.5))
    assert abs(ev.value - REDUCED_GAUSSIAN_Q05) < 1e-10
    for q in (0.25, 1.0, 2.0):
        ev = reduced_integral(gaussian_integrand(2), (q, -q))
        assert abs(ev.value - gaussian_reference(q)) < 1e-10


def test_permuting_q_is_exact():
    f = InvariantIntegrand(lambda P: np.exp(-np.sum(P**2, axis=-1)) * (1 + 0.3 * np.sum(P, axis=-1)),
                           N=3)
    a = reduced_integral(f, (0.7, -0.2, -0.5)).value
    b = reduced_integral(f, (-0.2, -0.5, 0.7)).value
    assert abs(a - b) <= 1e-12 * abs(a)


def test_confluent_q():
    f = gaussian_integrand(2)
    with pytest.raises(ConfluentSpectrum):
        reduced_integral(f, (0.3, 0.3))
    ev = reduced_integral(f, (0.0, 0.0), extrapolate=True)
    assert abs(ev.value - math.pi**2 / 2) < 1e-4


def test_phase_sanity_at_small_q():
    f = gaussian_integrand(2)
    qs = (0.2, 0.1, 0.05)
    vals = [reduced_integral(f, (q, -q)).value for q in qs]
    limit = extrapolate_to_zero(qs, vals, 2)
    assert abs(limit.imag) < 1e-8
    assert limit.real == pytest.approx(math.pi**2 / 2, rel=1e-4)


def test_squared_measure_variant_disagrees():
    ev = reduced_integral(gaussian_integrand(2), (0.5, -0.5), squared_measure=True)
    # imaginary where the matrix-space integral of a real even function is real
    assert abs(ev.value.real) < 1e-10 and abs(ev.value.imag) > 1.0
    assert reduction_prefactor(2, squared_measure=True) == -2j * math.pi


def test_symmetry_spot_check():
    with pytest.raises(DomainError):
        InvariantIntegrand(lambda P: P[..., 0], N=2)
    with pytest.raises(DomainError):
        InvariantIntegrand(lambda P: P[..., 0], decay_hint="smooth")


def test_monte_carlo_gaussian_origin():
    ev = direct_matrix_integral(gaussian_integrand(2), (0.0, 0.0), samples=200_000, seed=1)
    assert abs(ev.value - math.pi**2 / 2) <= 3 * ev.error_estimate
    ev1 = direct_matrix_integral(gaussian_integrand(1), (0.0,), samples=200_000, seed=1)
    assert abs(ev1.value - math.sqrt(math.pi)) <= 3 * ev1.error_estimate


def test_monte_carlo_matches_reduction():
    f = gaussian_integrand(2)
    for k, q in enumerate((0.5, 1.0)):
        red = reduced_integral(f, (q, -q))
        mc = direct_matrix_integral(f, (q, -q), samples=200_000, seed=20 + k)
        assert abs(red.value - mc.value) <= 3 * (red.error_estimate + mc.error_estimate)


def test_monte_carlo_is_deterministic():
    f = gaussian_integrand(2)
    a = direct_matrix_integral(f, (0.4, -0.4), samples=50_000, seed=5)
    b = direct_matrix_integral(f, (0.4, -0.4), samples=50_000, seed=5)
    c = direct_matrix_integral(f, (0.4, -0.4), samples=50_000, seed=6)
    assert a.value == b.value and a.error_estimate == b.error_estimate
    assert a.value != c.value


def test_monte_carlo_preconditions():
    f = gaussian_integrand()
    with pytest.raises(DomainError):
        direct_matrix_integral(f, (0.1, 0.2, 0.3))
    with pytest.raises(DomainError):
        direct_matrix_integral(f, (0.1, 0.2), samples=100)
    osc = InvariantIntegrand(lambda P: np.exp(1j * np.sum(P**3, axis=-1)), "oscillatory")
    with pytest.raises(DomainError):
        direct_matrix_integral(osc, (0.1, 0.2))
