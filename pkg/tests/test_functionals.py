import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate
from scipy.special import eval_legendre, gamma

from conftest import unit_vectors
from manispline.functionals import (
    antipodal_representatives,
    apply_by_quadrature,
    apply_to_series,
    arc,
    coefficient,
    coefficient_matrix,
    coefficient_vector,
    dirac,
    great_circle,
    great_circle_weights,
    hemisphere,
    hemisphere_odd,
    hemisphere_weights,
    hemispherical_multiplier,
    legendre_at_zero,
    multiplier_table,
    radon_multiplier,
    series_from_mapping,
    total_integral,
    transform_data,
    transform_family,
)
from manispline.lattices import farthest_point_sample, symmetrize
from manispline.spectrum import (
    CIRCLE,
    SPHERE2,
    DomainError,
    SpectralIndex,
    basis_matrix,
    mode_count,
    mode_degrees,
)

NORTH = np.array([0.0, 0.0, 1.0])
ZONAL1 = SpectralIndex(1, 2)
ZONAL2 = SpectralIndex(2, 3)


def random_series(M, J, seed):
    return np.random.default_rng(seed).standard_normal(mode_count(M, J))


# -- per-kind examples --------------------------------------------------------------


def test_dirac_examples():
    F = dirac(CIRCLE, 0.0)
    assert coefficient(F, SpectralIndex(0, 1)) == pytest.approx(0.398942, abs=1e-6)
    for k in range(1, 6):
        assert coefficient(F, SpectralIndex(k, 2)) == 0.0
    G = dirac(SPHERE2, NORTH)
    assert coefficient(G, ZONAL1) == pytest.approx(math.sqrt(3 / (4 * math.pi)), abs=1e-15)
    assert F.sobolev_order == 0.75 and G.sobolev_order == 1.25


def test_hemisphere_examples():
    F = hemisphere(NORTH)
    assert coefficient(F, SpectralIndex(0, 1)) == pytest.approx(math.sqrt(math.pi), abs=1e-14)
    assert coefficient(F, ZONAL1) == pytest.approx(math.sqrt(3 * math.pi) / 2, abs=1e-14)
    assert coefficient(F, ZONAL1) == pytest.approx(1.534990, abs=1e-6)
    for i in range(1, 6):
        assert coefficient(F, SpectralIndex(2, i)) == pytest.approx(0.0, abs=1e-15)


def test_great_circle_examples():
    F = great_circle(NORTH)
    assert coefficient(F, SpectralIndex(0, 1)) == pytest.approx(math.sqrt(math.pi), abs=1e-14)
    for i in range(1, 4):
        assert coefficient(F, SpectralIndex(1, i)) == 0.0
    assert coefficient(F, ZONAL2) == pytest.approx(-math.pi * math.sqrt(5 / (4 * math.pi)), abs=1e-14)
    assert coefficient(F, ZONAL2) == pytest.approx(-1.981664, abs=1e-6)


def test_arc_examples():
    full = coefficient_vector(arc(0.0, 2 * math.pi), 6)
    np.testing.assert_allclose(full, coefficient_vector(total_integral(CIRCLE), 6), atol=1e-15)
    half = arc(0.0, math.pi)
    assert coefficient(half, SpectralIndex(1, 2)) == pytest.approx(2 / math.sqrt(math.pi), abs=1e-15)
    assert coefficient(half, SpectralIndex(1, 1)) == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(DomainError):
        arc(1.0, 1.0)
    with pytest.raises(DomainError):
        arc(2.0, 1.0)


def test_total_integral_examples():
    assert coefficient(total_integral(CIRCLE), SpectralIndex(0, 1)) == pytest.approx(math.sqrt(2 * math.pi))
    assert coefficient(total_integral(SPHERE2), SpectralIndex(0, 1)) == pytest.approx(math.sqrt(4 * math.pi))
    assert np.all(coefficient_vector(total_integral(SPHERE2), 5)[1:] == 0)


def test_non_unit_poles_rejected():
    with pytest.raises(DomainError):
        hemisphere([0, 0, 2])
    with pytest.raises(DomainError):
        great_circle([1, 1, 1])


# -- weights ------------------------------------------------------------------------------


def test_legendre_at_zero_matches_scipy():
    np.testing.assert_allclose(legendre_at_zero(40), eval_legendre(np.arange(41), 0.0), atol=1e-15)


def test_hemisphere_weights_match_integral_of_legendre():
    w = hemisphere_weights(20)
    for j in range(21):
        exact, _ = integrate.quad(lambda u: eval_legendre(j, u), 0.0, 1.0, epsabs=1e-14)
        assert w[j] == pytest.approx(2 * math.pi * exact, abs=1e-12)


def test_weight_parity_up_to_24():
    h, g = hemisphere_weights(24), great_circle_weights(24)
    assert np.all(h[2::2] == 0.0)
    assert h[0] == 2 * math.pi
    assert np.all(g[1::2] == 0.0)


def test_hemisphere_odd_drops_even_degrees():
    w = hemisphere_odd(NORTH).zonal_weights(9)
    np.testing.assert_array_equal(w[0::2], 0.0)
    np.testing.assert_array_equal(w[1::2], hemisphere_weights(9)[1::2])


# -- transform multipliers ---------------------------------------------------------------------


def test_multiplier_spot_values():
    assert math.sqrt(math.pi) * hemispherical_multiplier(2, 1) == pytest.approx(math.pi, rel=1e-14)
    assert math.sqrt(math.pi) * hemispherical_multiplier(2, 3) == pytest.approx(-math.pi / 4, rel=1e-14)
    assert hemispherical_multiplier(2, 4) == 0.0 and radon_multiplier(2, 3) == 0.0


def test_hemisphere_weights_equal_scaled_multiplier():
    w = hemisphere_weights(11)
    for j in range(1, 12, 2):
        m = (-1) ** ((j - 1) // 2) * gamma(j / 2) / gamma((j + 3) / 2)
        assert w[j] / (math.sqrt(math.pi) * m) == pytest.approx(1.0, abs=1e-10)


def test_great_circle_ratio_is_four_root_pi():
    w = great_circle_weights(12)
    table = multiplier_table("radon", 2, 12).scaled()
    ratios = w[0::2] / table[0::2]
    assert np.ptp(ratios) <= 1e-9 * 4 * math.sqrt(math.pi)
    assert ratios[0] == pytest.approx(7.0898154, abs=1e-7)


def test_multiplier_table_parity():
    h = multiplier_table("hemispherical", 2, 12)
    r = multiplier_table("radon", 2, 12)
    assert np.all(h.values[2::2] == 0) and np.all(r.values[1::2] == 0)
    assert h.prefactor == pytest.approx(math.sqrt(math.pi))
    assert r.prefactor == pytest.approx(gamma(1.5) / math.sqrt(math.pi))


# -- coefficient contract ----------------------------------------------------------------------


@pytest.mark.parametrize(
    "F",
    [
        dirac(SPHERE2, [0.6, 0.0, 0.8]),
        hemisphere([0.0, 0.6, 0.8]),
        hemisphere_odd([0.48, 0.6, 0.64]),
        great_circle([0.6, 0.8, 0.0]),
        total_integral(SPHERE2),
    ],
    ids=lambda F: F.kind,
)
def test_funk_hecke_against_quadrature(F):
    J = 12
    coeffs = coefficient_vector(F, J)
    for flat in range(mode_count(SPHERE2, J)):
        q = apply_by_quadrature(F, lambda x: basis_matrix(SPHERE2, x, J)[:, flat], 2 * J + 8).value
        assert abs(coeffs[flat] - q) <= 1e-6 * (1 + abs(coeffs[flat]))


@pytest.mark.parametrize("F", [arc(0.3, 2.0), dirac(CIRCLE, 1.1), total_integral(CIRCLE)], ids=lambda F: F.kind)
def test_circle_functionals_against_quadrature(F):
    f = random_series(CIRCLE, 10, 3)
    q = apply_by_quadrature(F, lambda th: basis_matrix(CIRCLE, th, 10) @ f, 24).value
    assert apply_to_series(F, f) == pytest.approx(q, rel=1e-10, abs=1e-12)


def test_quadrature_examples():
    z = apply_by_quadrature(hemisphere(NORTH), lambda x: x[:, 2], 8).value
    assert z == pytest.approx(math.pi, abs=1e-8)
    one = apply_by_quadrature(great_circle(NORTH), lambda x: np.ones(len(x)), 4).value
    assert one == pytest.approx(2 * math.pi, abs=1e-10)
    x0 = np.array([0.0, 0.6, 0.8])
    val = apply_by_quadrature(dirac(SPHERE2, x0), lambda x: x[:, 1] ** 3, 0).value
    assert val == 0.6**3


def test_underresolved_quadrature_warns():
    with pytest.warns(RuntimeWarning):
        res = apply_by_quadrature(hemisphere(NORTH), lambda x: x[:, 2], 4, band_limit=10)
    assert res.underresolved
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert not apply_by_quadrature(hemisphere(NORTH), lambda x: x[:, 2], 20, band_limit=10).underresolved


@given(unit_vectors(), st.integers(0, 12))
def test_dirac_pairing_is_point_evaluation(x, J):
    f = random_series(SPHERE2, J, J)
    assert apply_to_series(dirac(SPHERE2, x), f) == pytest.approx(float(basis_matrix(SPHERE2, x, J)[0] @ f), abs=1e-12)


def test_apply_to_series_mapping_and_zero():
    assert apply_to_series(total_integral(SPHERE2), {SpectralIndex(0, 1): 1.0}) == pytest.approx(math.sqrt(4 * math.pi))
    assert apply_to_series(hemisphere(NORTH), np.zeros(16)) == 0.0
    dense = series_from_mapping(SPHERE2, {SpectralIndex(2, 1): 2.0})
    assert len(dense) == 9 and dense[4] == 2.0


@given(unit_vectors())
def test_dirac_growth_bound(x):
    c = coefficient_vector(dirac(SPHERE2, x), 24)
    deg = mode_degrees(SPHERE2, 24)
    assert np.all(np.abs(c) <= np.sqrt((2 * deg + 1) / (4 * math.pi)) + 1e-12)


@given(unit_vectors())
def test_envelopes_bound_degree_energy(x):
    J = 120
    deg = mode_degrees(SPHERE2, J)
    for F in (dirac(SPHERE2, x), hemisphere(x), great_circle(x)):
        energy = np.sqrt(np.bincount(deg, coefficient_vector(F, J) ** 2))
        env = F.envelope
        u = np.arange(1, J + 1) + 0.5
        assert np.all(energy[1:] <= env.scale * u**env.power * (1 + 1e-12))


def test_circle_envelopes():
    J = 500
    deg = mode_degrees(CIRCLE, J)
    k = np.arange(1, J + 1)
    for F in (dirac(CIRCLE, 0.7), arc(0.2, 3.0), arc(0.0, 2 * math.pi)):
        energy = np.sqrt(np.bincount(deg, coefficient_vector(F, J) ** 2))
        assert np.all(energy[1:] <= F.envelope.scale * k**F.envelope.power * (1 + 1e-12))


def test_coefficient_matrix_rows():
    fams = [dirac(SPHERE2, NORTH), hemisphere([1.0, 0, 0]), total_integral(SPHERE2)]
    A = coefficient_matrix(fams, 6)
    for row, F in zip(A, fams):
        np.testing.assert_allclose(row, coefficient_vector(F, 6), atol=1e-15)


# -- symmetric families -------------------------------------------------------------------------


def test_antipodal_representatives():
    pts = symmetrize(farthest_point_sample(SPHERE2, 5, 2)).points
    reps = antipodal_representatives(SPHERE2, pts)
    assert 2 * len(reps) == len(pts)
    with pytest.raises(DomainError):
        antipodal_representatives(SPHERE2, [NORTH, [1.0, 0, 0]])


def test_reduced_families_impose_the_same_constraints():
    pts = symmetrize(farthest_point_sample(SPHERE2, 6, 0)).points
    f = random_series(SPHERE2, 9, 11)
    for kind, ctor in (("hemisphere", hemisphere), ("great_circle", great_circle)):
        full = np.array([apply_to_series(ctor(p), f) for p in pts])
        reduced = np.array([apply_to_series(F, f) for F in transform_family(kind, pts)])
        np.testing.assert_allclose(transform_data(kind, pts, full), reduced, rtol=1e-12, atol=1e-12)


def test_hemisphere_odd_is_antisymmetric_part():
    xi = np.array([0.0, 0.6, 0.8])
    f = random_series(SPHERE2, 7, 5)
    up = apply_to_series(hemisphere(xi), f)
    down = apply_to_series(hemisphere(-xi), f)
    assert apply_to_series(hemisphere_odd(xi), f) == pytest.approx(0.5 * (up - down), abs=1e-13)
    assert up + down == pytest.approx(apply_to_series(total_integral(SPHERE2), f), abs=1e-12)


def test_describe_roundtrip_fields():
    assert dirac(CIRCLE, 1.5).describe() == {"kind": "dirac", "point": 1.5}
    assert arc(0.0, 1.0).describe() == {"kind": "arc", "a": 0.0, "b": 1.0}
    assert hemisphere(NORTH).describe() == {"kind": "hemisphere", "pole": [0.0, 0.0, 1.0]}
