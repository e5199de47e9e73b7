import json
from importlib import resources

import jsonschema
import numpy as np
import pytest

from matairy import ConfluentSpectrum, DomainError, InvalidGrid
from matairy.matrix_airy import calibrate
from matairy.spectra import MatrixArgument, split
from matairy.verification import (
    ComparisonReport,
    ResidualReport,
    cross_compare,
    laplacian_self_test,
    matrix_laplacian,
    ode_residual_check,
    pde_residual_check,
    radial_laplacian,
    richardson_laplacian,
    run_suite,
)

GRID = np.linspace(-6.0, 4.0, 101)


def report_schema():
    return json.loads(resources.files("matairy").joinpath("schemas/report.schema.json").read_text())


def test_ode_check_passes_in_both_conventions():
    for convention in ("fourier", "standard"):
        rep = ode_residual_check(GRID, convention=convention)
        assert rep.passed and rep.residual_rel <= 1e-6
        assert rep.passed == (rep.residual_rel <= rep.tolerance)


def test_ode_check_single_point_is_stencil_error():
    rep4 = ode_residual_check([0.0])
    rep2 = ode_residual_check([0.0], stencil="second")
    # the three-point stencil leaves an h^2-size error, the five-point one far less
    assert 1e-9 < rep2.residual_max < 1e-5
    assert rep4.residual_max < rep2.residual_max


def test_ode_check_errors():
    with pytest.raises(InvalidGrid):
        ode_residual_check([])
    with pytest.raises(InvalidGrid):
        ode_residual_check([31.0])
    with pytest.raises(DomainError):
        ode_residual_check([0.0], convention="other")


def test_wrong_sign_ode_fails():
    # the standard function does not solve F'' + x F = 0; the check must notice
    from matairy.verification import second_difference
    from matairy.scalar_airy import ai_std

    res = max(abs(second_difference(ai_std, x, 1e-3) + x * ai_std(x)) for x in GRID)
    assert res > 1e-2


@pytest.mark.parametrize("N", [2, 3])
def test_radial_laplacian_polynomials(N):
    x = np.linspace(1.5, -1.5, N)
    assert abs(richardson_laplacian(lambda y: 1.0, x, 1e-3)) < 1e-9
    assert abs(richardson_laplacian(lambda y: float(np.sum(y)), x, 1e-3)) < 1e-6
    assert abs(richardson_laplacian(lambda y: float(np.sum(y**2)), x, 1e-3) - 2 * N * N) < 1e-6


def test_radial_matches_matrix_coordinates():
    x = np.array([1.2, -0.1, -0.9])
    fn = lambda y: float(np.sum(y**3) + np.sum(y) ** 2)
    radial = richardson_laplacian(fn, x, 1e-3)
    full = matrix_laplacian(lambda Y: fn(np.linalg.eigvalsh(Y)), np.diag(x), 1e-3)
    assert abs(radial - full) < 1e-5 * max(1.0, abs(full))
    # the unit-weight flat Laplacian has twice the off-diagonal part
    flat = matrix_laplacian(lambda Y: fn(np.linalg.eigvalsh(Y)), np.diag(x), 1e-3, 1.0)
    assert abs(radial_laplacian(fn, x, 1e-3, 4.0) - flat) < 1e-4 * max(1.0, abs(flat))


def test_laplacian_self_test_report():
    rep = laplacian_self_test()
    assert rep.passed and rep.residual_rel < 1e-6


def test_pde_check_n1_reduces_to_ode():
    rep = pde_residual_check(1, [[-2.0], [0.0], [1.5]], "det_oracle")
    assert rep.passed and rep.residual_rel < 1e-8


def test_pde_check_n2():
    rng = np.random.default_rng(0)
    grid = []
    while len(grid) < 3:
        x = np.sort(rng.uniform(-2, 2, 2))[::-1]
        if x[0] - x[1] > 0.5:
            grid.append(x.tolist())
    rep = pde_residual_check(2, grid, "det_oracle")
    assert rep.passed and rep.residual_rel <= 5e-3
    # the unit-weight flat Laplacian does not annihilate A
    assert rep.details["flat_residual_rel"] > 0.1


def test_pde_check_errors():
    with pytest.raises(ConfluentSpectrum):
        pde_residual_check(2, [[0.5, 0.55]], "det_oracle")
    with pytest.raises(DomainError):
        pde_residual_check(3, [[1.0, 0.0, -1.0]], "det_oracle")
    with pytest.raises(InvalidGrid):
        pde_residual_check(2, [], "det_oracle")


def test_cross_compare_same_rep_is_zero():
    cal = calibrate(["n2_single"], MatrixArgument.from_xi_r(0.0, 1.0))
    grid = [MatrixArgument.from_xi_r(xi, 1.0) for xi in (-1.0, 0.0, 1.0)]
    rep = cross_compare("n2_single", "n2_single", grid, cal)
    assert rep.max_rel_disagreement == 0.0 and rep.passed


def test_cross_compare_n3_separated_vs_det():
    cal = calibrate(None, split([0.9, 0.1, -1.0]))
    grid = [split(s) for s in ([1.2, -0.2, -1.0], [0.4, 0.0, -0.6], [1.5, 0.3, -0.5])]
    rep = cross_compare("separated_eq5", "det_oracle", grid, cal, tolerance=1e-2)
    assert rep.passed and rep.max_rel_disagreement < 1e-6
    d = rep.to_dict()
    assert d["kind"] == "comparison" and len(d["kappa_used"]) == 2


def test_report_passed_flag_matches_tolerance():
    r = ResidualReport("x", [], 1.0, 0.5, 0.4, False)
    assert r.to_dict()["passed"] is False
    c = ComparisonReport("y", ("a", "b"), [], 0.1, (1, 1j), 0.2, True)
    assert c.to_dict()["kappa_used"][1] == {"re": 0.0, "im": 1.0}


def test_run_suite_schema_and_determinism():
    a = run_suite("ode", seed=3)
    b = run_suite("ode", seed=3)
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
    jsonschema.validate(a, report_schema())
    t2 = run_suite("theorem2", seed=3, samples=50_000)
    jsonschema.validate(t2, report_schema())
    assert {r["kind"] for r in t2["reports"]} == {"statistical"}
    with pytest.raises(DomainError):
        run_suite("nope")
