import math

import numpy as np
import pytest
from scipy.special import airy as scipy_airy

from matairy import DomainError, NonConvergence
from matairy.oscillatory_quad import (
    DEFAULT_CONFIG,
    QuadratureConfig,
    cubic_phase_integral,
    damped_lattice_integral,
    extrapolate_to_zero,
)

# 2 pi Ai(0) from the Gamma-function closed form, independent of the package
TWO_PI_AI0 = 2 * math.pi * 3 ** (-2 / 3) / math.gamma(2 / 3)
AI_ZERO_1 = -2.338107410459767


def fourier_airy(x):
    """Oracle for int exp(i(t^3/3 - x t)) dt via scipy's Ai."""
    return 2 * math.pi * scipy_airy(-x)[0]


def test_cubic_at_origin_matches_gamma_closed_form():
    ev = cubic_phase_integral(1.0, 0.0)
    assert abs(ev.value - TWO_PI_AI0) < 1e-12
    assert ev.method_tag == "rotated_contour"


def test_cubic_imaginary_part_vanishes_by_parity():
    for b in (-3.0, -0.7, 0.0, 1.3, 2.5):
        for method in ("rotated", "damped"):
            ev = cubic_phase_integral(1.0, b, method=method)
            assert abs(ev.value.imag) < 1e-10


def test_cubic_zero_lies_at_negative_b():
    # exp(i(t^3/3 + b t)) integrates to 2 pi Ai(b); it vanishes at b = a1 < 0
    ev = cubic_phase_integral(1.0, AI_ZERO_1)
    assert abs(ev.value) < 1e-6
    # the positive mirror point is far from a zero
    assert abs(cubic_phase_integral(1.0, -AI_ZERO_1).value) > 0.1


@pytest.mark.parametrize("b", [-4.0, -2.0, -0.5, 0.0, 1.0, 2.0])
def test_methods_agree_within_combined_errors(b):
    rot = cubic_phase_integral(1.0, b, method="rotated")
    dmp = cubic_phase_integral(1.0, b, method="damped")
    assert abs(rot.value - dmp.value) <= rot.error_estimate + dmp.error_estimate
    assert abs(rot.value - fourier_airy(-b)) < 1e-10


def test_negative_cubic_coefficient_is_conjugate():
    ev = cubic_phase_integral(-1.0, -0.8)
    ref = cubic_phase_integral(1.0, 0.8)
    assert abs(ev.value - np.conj(ref.value)) < 1e-12


def test_cubic_with_weight():
    # t exp(i(t^3/3 + b t)) integrates to -i d/db (2 pi Ai(b)) = -2 pi i Ai'(b)
    b = 0.4
    ev = cubic_phase_integral(1.0, b, weight=lambda t: t)
    assert abs(ev.value - (-2j * math.pi * scipy_airy(b)[1])) < 1e-10


def test_zero_cubic_coefficient_rejected():
    with pytest.raises(DomainError):
        cubic_phase_integral(0.0, 1.0)


def test_unknown_method_rejected():
    with pytest.raises(DomainError):
        cubic_phase_integral(1.0, 0.0, method="levin")


def test_truncation_doubling_rotated():
    cfg = DEFAULT_CONFIG
    for b in (-3.0, 0.0, 2.0):
        base = cubic_phase_integral(1.0, b, cfg=cfg, method="rotated").value
        doubled = cubic_phase_integral(
            1.0, b, cfg=cfg.replace(truncation_radius=16.0, panels=16), method="rotated").value
        assert abs(doubled - base) <= cfg.rel_tol * max(abs(base), 1.0)


def test_ladder_residuals_shrink_with_epsilon():
    for x in np.linspace(-4.0, 2.0, 7):
        ev = cubic_phase_integral(1.0, -x, method="damped")
        res = ev.diagnostics["ladder_residuals"]
        assert all(a > b for a, b in zip(res, res[1:]))


def test_damped_cubic_error_estimate_is_honest():
    for x in (-4.0, -2.0, 0.0, 1.0, 2.0):
        ev = cubic_phase_integral(1.0, -x, method="damped")
        assert abs(ev.value - fourier_airy(x)) <= ev.error_estimate


def test_lattice_gaussian_is_pi_for_any_ladder():
    f = lambda p: np.exp(-np.sum(p**2, axis=-1))
    for ladder in ((0.2, 0.1, 0.05, 0.025), (0.5, 0.3), (1.0, 0.5, 0.25)):
        cfg = DEFAULT_CONFIG.replace(epsilon_ladder=ladder, extrapolation_degree=len(ladder) - 1)
        ev = damped_lattice_integral(f, 2, cfg)
        assert abs(ev.value - math.pi) < 1e-8


def test_lattice_cubic_matches_rotated_contour():
    cfg = DEFAULT_CONFIG.replace(panels=96)
    ev = damped_lattice_integral(lambda p: np.exp(1j * p[:, 0] ** 3 / 3), 1, cfg)
    ref = cubic_phase_integral(1.0, 0.0)
    assert ev.method_tag == "damped_extrapolated"
    assert abs(ev.value - ref.value) <= ev.error_estimate + ref.error_estimate


def test_lattice_odd_integrand_vanishes():
    f = lambda p: p[:, 0] * np.exp(1j * p[:, 1] ** 3 / 3 - 0.1 * p[:, 0] ** 2)
    ev = damped_lattice_integral(f, 2, DEFAULT_CONFIG.replace(panels=48))
    assert abs(ev.value) < DEFAULT_CONFIG.abs_tol


def test_lattice_dimension_bounds():
    with pytest.raises(DomainError):
        damped_lattice_integral(lambda p: p[:, 0], 5)
    with pytest.raises(DomainError):
        damped_lattice_integral(lambda p: p[:, 0], 0)


def test_lattice_raises_when_ladder_stalls():
    # exp(+t^2/20) grows; the damped sums cannot be extrapolated
    cfg = DEFAULT_CONFIG.replace(epsilon_ladder=(0.02, 0.015, 0.0125, 0.011))
    with pytest.raises(NonConvergence):
        damped_lattice_integral(lambda p: np.exp(np.sum(p**2, axis=-1) / 20) * np.cos(5 * p[:, 0]),
                                1, cfg)


def test_extrapolation_is_exact_on_polynomials():
    eps = [0.2, 0.1, 0.05, 0.025]
    vals = [3 - 2 * e + e**3 for e in eps]
    assert abs(extrapolate_to_zero(eps, vals, 3) - 3) < 1e-12


def test_config_validation():
    with pytest.raises(DomainError):
        QuadratureConfig(rotation_angle=math.pi / 5)
    with pytest.raises(DomainError):
        QuadratureConfig(epsilon_ladder=(0.1, 0.2))
    with pytest.raises(DomainError):
        QuadratureConfig(nodes_per_dim=4)
    with pytest.raises(DomainError):
        QuadratureConfig.from_text("bogus_key=1")
    with pytest.raises(DomainError):
        QuadratureConfig.from_text("no equals sign")


def test_config_text_roundtrip(tmp_path):
    cfg = DEFAULT_CONFIG.replace(nodes_per_dim=32, epsilon_ladder=(0.3, 0.15, 0.075),
                                 extrapolation_degree=2)
    assert QuadratureConfig.from_text(cfg.to_text()) == cfg
    path = tmp_path / "quad.cfg"
    path.write_text("# comment\nnodes_per_dim = 16\nrotation_angle=0.3  # trailing\n")
    loaded = QuadratureConfig.from_file(path)
    assert loaded.nodes_per_dim == 16 and loaded.rotation_angle == 0.3
    assert loaded.epsilon_ladder == DEFAULT_CONFIG.epsilon_ladder


def test_truncation_radius_defaults():
    assert DEFAULT_CONFIG.radius("damped") == 12.0
    assert DEFAULT_CONFIG.radius("rotated") == 8.0
