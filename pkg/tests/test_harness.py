import math

import numpy as np
import pytest

from manispline.functionals import dirac_family, total_integral
from manispline.harness import (
    AuditEntry,
    ConvergenceSpec,
    TargetFunction,
    build_family,
    multiplier_audit,
    optimality_audit,
    random_coefficients,
    run_convergence_order,
    run_convergence_rho,
    schedule_order,
    transform_consistency,
)
from manispline.lattices import farthest_point_sample, point_set, symmetrize, uniform_circle
from manispline.spectrum import CIRCLE, SPHERE2, DomainError, SpectralIndex, mode_count, mode_degrees
from manispline.spline import SplineProblem, evaluate_spline, solve_spline


def test_schedule():
    assert schedule_order(CIRCLE, 2.0, 0) == 3.0
    assert schedule_order(SPHERE2, 1.0, 3) == 17.0


def test_target_functions():
    t = TargetFunction.named(CIRCLE, "exp_cos")
    assert t(np.array([0.0]))[0] == pytest.approx(math.e)
    e = TargetFunction.eigenfunction(CIRCLE, SpectralIndex(2, 2))
    assert e(np.array([math.pi / 4]))[0] == pytest.approx(1 / math.sqrt(math.pi))
    assert e.band == 2
    with pytest.raises(ValueError):
        TargetFunction.named(SPHERE2, "exp_cos")
    z = TargetFunction.named(SPHERE2, "sinh_z")
    assert z(np.array([[0, 0, 1.0]]))[0] == pytest.approx(math.sinh(1))


def test_random_coefficients_respect_degrees():
    c = random_coefficients(SPHERE2, (1, 3), 0)
    deg = mode_degrees(SPHERE2, 3)
    assert np.all(c[deg % 2 == 0] == 0) and np.all(c[deg % 2 == 1] != 0)
    assert np.array_equal(c, random_coefficients(SPHERE2, (1, 3), 0))


def test_spec_validation():
    tgt = TargetFunction.named(CIRCLE, "exp_cos")
    with pytest.raises(ValueError):
        ConvergenceSpec(CIRCLE, "dirac", tgt, 2.0, "raise_order", orders=(0,), points=uniform_circle(8))
    with pytest.raises(ValueError):
        ConvergenceSpec(CIRCLE, "dirac", tgt, 2.0, "refine_density")
    with pytest.raises(ValueError):
        ConvergenceSpec(CIRCLE, "dirac", tgt, 2.0, "refine_density", sizes=(8,), error_norms=("C3",))
    with pytest.raises(ValueError):
        build_family(CIRCLE, "hemisphere", [0.0, math.pi])


def circle_rho_spec(**kw):
    base = dict(sizes=(8, 16), error_norms=("L2", "Linf", "C1", "C2"))
    base.update(kw)
    return ConvergenceSpec(CIRCLE, "dirac", TargetFunction.named(CIRCLE, "exp_cos"), 2.0, "refine_density", **base)


def test_rho_table_csv_layout():
    table = run_convergence_rho(circle_rho_spec())
    lines = table.to_csv().splitlines()
    assert lines[0] == "# manispline convergence v1"
    assert lines[1] == "N,rho_param,J,condition_estimate,err_L2,err_Linf,err_C1,err_C2"
    assert len(lines) == 5 and lines[-1].startswith("# slope=")
    r = table.rows[0]
    assert r.errors["Linf"] <= r.errors["C1"] <= r.errors["C2"]


def test_threads_do_not_change_results():
    a = run_convergence_rho(circle_rho_spec(sizes=(8, 16, 32)), threads=1).to_csv()
    b = run_convergence_rho(circle_rho_spec(sizes=(8, 16, 32)), threads=3).to_csv()
    assert a == b


def test_error_norms_on_known_error():
    # sin(3 theta) vanishes on the 6-point lattice, so the spline is 0 and
    # the error is the target itself: L2 = 1, Ck = 3^k / sqrt(pi)
    target = TargetFunction.eigenfunction(CIRCLE, SpectralIndex(3, 2))
    spec = ConvergenceSpec(
        CIRCLE, "dirac", target, 2.0, "refine_density", sizes=(6,), error_norms=("L2", "Linf", "C1", "C2"), degree=40,
    )
    err = run_convergence_rho(spec).rows[0].errors
    root_pi = math.sqrt(math.pi)
    assert err["L2"] == pytest.approx(1.0, abs=1e-12)
    assert err["Linf"] == pytest.approx(1 / root_pi, abs=1e-6)
    assert err["C1"] == pytest.approx(3 / root_pi, rel=1e-6)
    assert err["C2"] == pytest.approx(9 / root_pi, rel=1e-6)


def test_sphere_error_norms_on_known_error():
    # z vanishes on the equator: Dirac data there gives the zero spline
    target = TargetFunction.eigenfunction(SPHERE2, SpectralIndex(1, 2))
    pts = np.array([[np.cos(a), np.sin(a), 0.0] for a in np.linspace(0, 2 * np.pi, 5, endpoint=False)])
    spec = ConvergenceSpec(
        SPHERE2, "dirac", target, 1.0, "raise_order", orders=(0,), points=point_set(SPHERE2, pts),
        error_norms=("L2", "Linf", "C1", "C2"), degree=10,
    )
    err = run_convergence_order(spec).rows[0].errors
    amp = math.sqrt(3 / (4 * math.pi))
    assert err["L2"] == pytest.approx(1.0, abs=1e-12)
    # Gauss nodes stop short of the poles, where |z| peaks
    assert err["Linf"] == pytest.approx(amp, rel=5e-3)
    assert err["C1"] == pytest.approx(amp, rel=5e-3)
    assert err["C2"] == pytest.approx(amp, rel=5e-3)


def test_spline_target_has_zero_error():
    pts = uniform_circle(8).points
    s = solve_spline(SplineProblem(CIRCLE, 3.0, tuple(dirac_family(CIRCLE, pts)), np.sin(pts) + 0.3, degree=40))
    spec = ConvergenceSpec(
        CIRCLE, "dirac", TargetFunction.band_limited(CIRCLE, s.fourier), 2.0, "refine_density", sizes=(8,), degree=40,
    )
    assert run_convergence_rho(spec).rows[0].errors["Linf"] <= 1e-9


def test_aliasing_witness_gives_zero_spline():
    target = TargetFunction.eigenfunction(CIRCLE, SpectralIndex(32, 2))
    spec = ConvergenceSpec(
        CIRCLE, "dirac", target, 2.0, "raise_order", orders=(0, 1), points=uniform_circle(32), degree=128
    )
    table = run_convergence_order(spec)
    for r in table.rows:
        assert r.errors["L2"] == pytest.approx(1.0, abs=1e-12)
    assert not table.monotone_decrease and table.density_guard is False
    assert "monotone_decrease=false" in table.to_csv()


def test_order_m0_row_matches_density_row():
    c = random_coefficients(CIRCLE, range(5), 0)
    tgt = TargetFunction.band_limited(CIRCLE, c)
    order = run_convergence_order(
        ConvergenceSpec(CIRCLE, "dirac", tgt, 2.0, "raise_order", orders=(0,), points=uniform_circle(32), degree=96)
    )
    rho = run_convergence_rho(ConvergenceSpec(CIRCLE, "dirac", tgt, 2.0, "refine_density", sizes=(32,), degree=96))
    assert order.rows[0].errors == rho.rows[0].errors


def test_singular_rows_are_flagged():
    c = random_coefficients(CIRCLE, range(3), 0)
    pts = point_set(CIRCLE, [0.0, 0.0, 1.0])
    spec = ConvergenceSpec(
        CIRCLE, "dirac", TargetFunction.band_limited(CIRCLE, c), 2.0, "raise_order", orders=(0,), points=pts, degree=20
    )
    row = run_convergence_order(spec).rows[0]
    assert row.flagged and math.isnan(row.errors["Linf"]) and "singular" in row.note


def test_audit_entry_contract():
    assert AuditEntry("x", 1e-9, 1e-8).passed
    assert not AuditEntry("x", 1e-7, 1e-8).passed
    assert AuditEntry("info", 5.0, math.inf).to_dict()["bound"] is None


def test_optimality_audit_sphere_eight_diracs():
    pts = farthest_point_sample(SPHERE2, 8, 0).points
    v = np.random.default_rng(0).standard_normal(8)
    p = SplineProblem(SPHERE2, 2.0, tuple(dirac_family(SPHERE2, pts)), v, degree=40)
    rep = optimality_audit(p, 32, 0)
    assert rep.all_passed, rep.to_dict()
    for check in ("orthogonality", "pythagoras", "constraints", "midpoint"):
        assert rep[check].measured <= 1e-8


def test_optimality_audit_zero_perturbation():
    p = SplineProblem(CIRCLE, 2.0, tuple(dirac_family(CIRCLE, [0.0, 2.0])), [1.0, -1.0], degree=50)
    rep = optimality_audit(p, 4, 0, scale=0.0)
    assert rep.all_passed


def test_optimality_audit_closed_form_reports_norm():
    p = SplineProblem(CIRCLE, 1.0, (dirac_family(CIRCLE, [0.0])[0],), [1.0], closed_form=True)
    rep = optimality_audit(p, 8, 0)
    assert rep.all_passed
    assert rep["sobolev_norm_sq"].measured == pytest.approx(2 * math.tanh(math.pi), abs=1e-9)


def test_optimality_audit_mixed_functionals():
    fams = tuple(dirac_family(SPHERE2, farthest_point_sample(SPHERE2, 5, 1).points)) + (total_integral(SPHERE2),)
    p = SplineProblem(SPHERE2, 3.0, fams, np.arange(6.0), degree=30)
    assert optimality_audit(p, 8, 1).all_passed


def test_multiplier_audit():
    rep = multiplier_audit(12)
    assert rep.all_passed
    assert rep.info["radon_ratio_mean"] == pytest.approx(7.0898154, abs=1e-7)
    assert rep["hemisphere_ratio[j=1]"].measured <= 1e-12
    assert rep["hemisphere_ratio[j=3]"].measured <= 1e-12
    with pytest.raises(DomainError):
        multiplier_audit(25)
    with pytest.raises(DomainError):
        multiplier_audit(12, d=3)


def odd_coefficients(seed):
    return random_coefficients(SPHERE2, (1, 3), seed)


def test_transform_consistency():
    pts = symmetrize(farthest_point_sample(SPHERE2, 8, 0)).points
    rep = transform_consistency(odd_coefficients(0), pts, 3.0, 30)
    assert rep.all_passed, rep.to_dict()
    assert math.isfinite(rep["dual_spline_discrepancy"].measured)
    assert rep.info["tau"] == 4.5


def test_transform_consistency_zonal_harmonic_on_axis():
    c = np.zeros(mode_count(SPHERE2, 1))
    c[2] = 1.0  # degree one zonal harmonic
    pts = np.array([[0, 0, 1.0], [0, 0, -1.0], [1.0, 0, 0], [-1.0, 0, 0]])
    rep = transform_consistency(c, pts, 3.0, 20)
    assert rep["Tf_quadrature"].measured <= 1e-8


def test_transform_consistency_flags_even_input():
    pts = symmetrize(farthest_point_sample(SPHERE2, 4, 0)).points
    even = random_coefficients(SPHERE2, (0, 2), 1)
    rep = transform_consistency(even, pts, 3.0, 20)
    assert not rep["input_even_coefficients"].passed


def test_transform_consistency_zero_and_guards():
    pts = symmetrize(farthest_point_sample(SPHERE2, 4, 0)).points
    rep = transform_consistency(np.zeros(16), pts, 3.0, 20)
    assert rep["interpolation_Ts_vs_Tf"].measured == 0.0
    with pytest.raises(DomainError):
        transform_consistency(odd_coefficients(0), farthest_point_sample(SPHERE2, 4, 0).points, 3.0, 20)
    with pytest.raises(DomainError):
        transform_consistency(odd_coefficients(0), pts, 3.0, 2)


def test_transform_spline_evaluation_parity():
    pts = symmetrize(farthest_point_sample(SPHERE2, 8, 2)).points
    family = build_family(SPHERE2, "hemisphere", pts)
    f = odd_coefficients(2)
    tgt = TargetFunction.band_limited(SPHERE2, f)
    s = solve_spline(SplineProblem(SPHERE2, 3.0, tuple(family), [tgt.functional_value(F) for F in family]))
    x = farthest_point_sample(SPHERE2, 20, 5).points
    np.testing.assert_allclose(evaluate_spline(s, x), -evaluate_spline(s, -x), atol=1e-12)
