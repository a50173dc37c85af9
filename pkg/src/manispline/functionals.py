"""Linear functionals represented by their spectral coefficients ``F(phi_{j,i})``.

Zonal functionals (point evaluation, hemisphere and great-circle integrals,
the total integral) satisfy ``F(phi_{j,i}) = c_j * phi_{j,i}(pole)`` with a
per-degree weight ``c_j`` given by the Funk-Hecke formula. Arc integrals on
the circle are handled through explicit coefficient vectors.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .spectrum import (
    CIRCLE,
    SPHERE2,
    DomainError,
    Manifold,
    SpectralIndex,
    as_points,
    basis_matrix,
    degree_for_count,
    mode_count,
    mode_degrees,
    mode_index,
    quadrature_rule,
)

__all__ = [
    "Functional",
    "Envelope",
    "MultiplierTable",
    "QuadratureValue",
    "dirac",
    "hemisphere",
    "hemisphere_odd",
    "great_circle",
    "arc",
    "total_integral",
    "legendre_at_zero",
    "hemisphere_weights",
    "great_circle_weights",
    "coefficient",
    "coefficient_vector",
    "coefficient_matrix",
    "apply_to_series",
    "apply_by_quadrature",
    "hemispherical_multiplier",
    "radon_multiplier",
    "multiplier_table",
    "antipodal_representatives",
    "dirac_family",
    "transform_family",
    "transform_data",
    "series_from_mapping",
]

ZONAL_KINDS = ("dirac", "hemisphere", "hemisphere_odd", "great_circle", "total_integral")


@dataclass(frozen=True)
class Envelope:
    """Bound ``sqrt(sum_i F(phi_{j,i})**2) <= scale * u**power`` for ``j >= 1``.

    ``u = j`` on the circle and ``u = j + 1/2`` on the sphere.
    """

    scale: float
    power: float


@dataclass(frozen=True)
class Functional:
    kind: str
    manifold: Manifold
    pole: tuple | float | None = None
    interval: tuple[float, float] | None = None
    sobolev_order: float = 0.0

    @property
    def is_zonal(self) -> bool:
        return self.kind in ZONAL_KINDS

    def pole_point(self):
        """Pole used by the zonal kernel (arbitrary for the total integral)."""
        if self.pole is not None:
            return np.asarray(self.pole, dtype=float)
        return 0.0 if self.manifold.is_circle else np.array([0.0, 0.0, 1.0])

    def zonal_weights(self, max_degree: int) -> np.ndarray:
        """Per-degree weights ``c_0..c_max_degree``."""
        n = max_degree + 1
        if self.kind == "dirac":
            return np.ones(n)
        if self.kind == "total_integral":
            w = np.zeros(n)
            w[0] = self.manifold.total_measure
            return w
        if self.kind == "hemisphere":
            return hemisphere_weights(max_degree)
        if self.kind == "hemisphere_odd":
            w = hemisphere_weights(max_degree)
            w[0::2] = 0.0
            return w
        if self.kind == "great_circle":
            return great_circle_weights(max_degree)
        raise TypeError(f"{self.kind} functional is not zonal")

    @property
    def envelope(self) -> Envelope:
        circle = self.manifold.is_circle
        if self.kind == "total_integral":
            return Envelope(0.0, 0.0)
        if self.kind == "dirac":
            if circle:
                return Envelope(1 / math.sqrt(math.pi), 0.0)
            return Envelope(1 / math.sqrt(2 * math.pi), 0.5)
        if self.kind == "arc":
            return Envelope(2 / math.sqrt(math.pi), -1.0)
        if self.kind in ("hemisphere", "hemisphere_odd"):
            # |int_0^1 P_j| <= 2 / (2j + 1)
            return Envelope(math.sqrt(2 * math.pi), -0.5)
        if self.kind == "great_circle":
            # |P_2n(0)| <= 1 / sqrt(pi n)
            return Envelope(math.sqrt(5.0), 0.0)
        raise TypeError(self.kind)

    def describe(self) -> dict:
        out = {"kind": self.kind}
        if self.kind == "dirac":
            out["point"] = _jsonable(self.pole)
        elif self.kind in ("hemisphere", "hemisphere_odd", "great_circle"):
            out["pole"] = _jsonable(self.pole)
        elif self.kind == "arc":
            out["a"], out["b"] = self.interval
        return out


def _jsonable(p):
    return float(p) if np.ndim(p) == 0 else [float(v) for v in p]


# -- constructors --------------------------------------------------------------


def _unit_pole(xi) -> tuple:
    try:
        pts = as_points(SPHERE2, xi)
    except DomainError as exc:
        raise DomainError(f"pole must be a unit vector: {exc}") from None
    if len(pts) != 1:
        raise DomainError("expected a single pole")
    return tuple(float(v) for v in pts[0])


def dirac(manifold: Manifold, point) -> Functional:
    """Point evaluation ``f -> f(point)``."""
    pts = as_points(manifold, point)
    if len(pts) != 1:
        raise DomainError("expected a single point")
    pole = float(pts[0]) if manifold.is_circle else tuple(float(v) for v in pts[0])
    return Functional("dirac", manifold, pole=pole, sobolev_order=manifold.dim / 2 + 0.25)


def hemisphere(xi) -> Functional:
    """Integral over the open hemisphere ``{x : xi . x > 0}``."""
    return Functional("hemisphere", SPHERE2, pole=_unit_pole(xi))


def hemisphere_odd(xi) -> Functional:
    """Odd part ``(H_xi - H_{-xi}) / 2`` of the hemisphere integral."""
    return Functional("hemisphere_odd", SPHERE2, pole=_unit_pole(xi))


def great_circle(theta) -> Functional:
    """Arc-length integral over the great circle with normal ``theta``."""
    return Functional("great_circle", SPHERE2, pole=_unit_pole(theta))


def arc(a: float, b: float) -> Functional:
    """Integral over the circular arc ``[a, b)``."""
    if not (0.0 <= a < b <= 2 * math.pi):
        raise DomainError("arc needs 0 <= a < b <= 2*pi")
    return Functional("arc", CIRCLE, interval=(float(a), float(b)))


def total_integral(manifold: Manifold) -> Functional:
    return Functional("total_integral", manifold)


# -- Funk-Hecke weights --------------------------------------------------------


def legendre_at_zero(max_degree: int) -> np.ndarray:
    """``P_j(0)`` for ``j = 0..max_degree`` from the Gamma-ratio closed form."""
    out = np.zeros(max_degree + 1)
    for j in range(0, max_degree + 1, 2):
        mag = math.exp(math.lgamma(j + 1) - j * math.log(2) - 2 * math.lgamma(j // 2 + 1))
        out[j] = -mag if (j // 2) % 2 else mag
    return out


def hemisphere_weights(max_degree: int) -> np.ndarray:
    """``c_j = 2 pi int_0^1 P_j(u) du``."""
    p0 = legendre_at_zero(max_degree + 1)
    j = np.arange(max_degree + 1)
    w = np.empty(max_degree + 1)
    w[0] = 2 * math.pi
    if max_degree >= 1:
        jj = j[1:]
        w[1:] = 2 * math.pi * (p0[jj - 1] - p0[jj + 1]) / (2 * jj + 1)
    return w


def great_circle_weights(max_degree: int) -> np.ndarray:
    """``c_j = 2 pi P_j(0)``."""
    return 2 * math.pi * legendre_at_zero(max_degree)


# -- coefficients --------------------------------------------------------------


def coefficient_vector(F: Functional, max_degree: int) -> np.ndarray:
    """``F(phi_n)`` for every flat mode ``n`` up to ``max_degree``."""
    M = F.manifold
    if F.kind == "total_integral":
        out = np.zeros(mode_count(M, max_degree))
        out[0] = math.sqrt(M.total_measure)
        return out
    if F.kind == "arc":
        return _arc_coefficients(F.interval, max_degree)
    weights = F.zonal_weights(max_degree)
    basis = basis_matrix(M, F.pole_point(), max_degree)[0]
    return weights[mode_degrees(M, max_degree)] * basis


def coefficient_matrix(functionals: Sequence[Functional], max_degree: int) -> np.ndarray:
    """Rows are ``coefficient_vector`` of each functional."""
    if not functionals:
        raise ValueError("no functionals")
    M = functionals[0].manifold
    out = np.empty((len(functionals), mode_count(M, max_degree)))
    diracs = [n for n, F in enumerate(functionals) if F.kind == "dirac"]
    if diracs:
        pts = [functionals[n].pole for n in diracs]
        out[diracs] = basis_matrix(M, pts, max_degree)
    for n, F in enumerate(functionals):
        if F.kind != "dirac":
            out[n] = coefficient_vector(F, max_degree)
    return out


def _arc_coefficients(interval, max_degree: int) -> np.ndarray:
    a, b = interval
    out = np.empty(2 * max_degree + 1)
    out[0] = (b - a) / math.sqrt(2 * math.pi)
    if max_degree > 0:
        k = np.arange(1, max_degree + 1)
        norm = k * math.sqrt(math.pi)
        out[1::2] = (np.sin(k * b) - np.sin(k * a)) / norm
        out[2::2] = (np.cos(k * a) - np.cos(k * b)) / norm
    return out


def coefficient(F: Functional, index: SpectralIndex) -> float:
    flat = mode_index(F.manifold, index)
    return float(coefficient_vector(F, index.degree)[flat])


def series_from_mapping(manifold: Manifold, coeffs: Mapping[SpectralIndex, float]) -> np.ndarray:
    """Dense flat coefficient array from a sparse ``{SpectralIndex: value}`` map."""
    if not coeffs:
        return np.zeros(1)
    J = max(idx.degree for idx in coeffs)
    out = np.zeros(mode_count(manifold, J))
    for idx, value in coeffs.items():
        out[mode_index(manifold, idx)] = value
    return out


def apply_to_series(F: Functional, coeffs) -> float:
    """``sum_n F(phi_n) c_n`` for a finitely supported series.

    ``coeffs`` is a flat array or a ``{SpectralIndex: value}`` mapping.
    """
    if isinstance(coeffs, Mapping):
        coeffs = series_from_mapping(F.manifold, coeffs)
    coeffs = np.asarray(coeffs, dtype=float)
    J = degree_for_count(F.manifold, len(coeffs))
    return float(coefficient_vector(F, J) @ coeffs)


# -- quadrature oracle -----------------------------------------------------------


@dataclass(frozen=True)
class QuadratureValue:
    value: float
    degree: int
    underresolved: bool


def _frame(pole: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    helper = np.eye(3)[np.argmin(np.abs(pole))]
    e1 = np.cross(pole, helper)
    e1 /= np.linalg.norm(e1)
    return e1, np.cross(pole, e1)


def apply_by_quadrature(
    F: Functional,
    f: Callable[[np.ndarray], np.ndarray],
    degree: int,
    band_limit: int | None = None,
) -> QuadratureValue:
    """Integrate ``f`` over the support of ``F`` numerically.

    ``f`` maps an array of points (angles or ``(n, 3)`` unit vectors) to
    values. ``degree`` is the polynomial degree the rule integrates exactly;
    the result is flagged ``underresolved`` when it is below ``band_limit``.
    """
    underresolved = band_limit is not None and degree < band_limit
    if underresolved:
        warnings.warn(
            f"quadrature degree {degree} below band limit {band_limit}", RuntimeWarning, stacklevel=2
        )
    M = F.manifold
    if F.kind == "dirac":
        pts = np.asarray([F.pole]) if M.is_circle else np.asarray(F.pole)[None, :]
        value = float(np.asarray(f(pts))[0])
        return QuadratureValue(value, degree, False)
    if F.kind == "total_integral":
        rule = quadrature_rule(M, degree)
        return QuadratureValue(rule.integrate(f(rule.nodes)), degree, underresolved)
    if F.kind == "arc":
        a, b = F.interval
        u, w = np.polynomial.legendre.leggauss(degree + 16)
        theta = 0.5 * (b - a) * u + 0.5 * (a + b)
        value = 0.5 * (b - a) * float(np.dot(w, f(theta)))
        return QuadratureValue(value, degree, underresolved)
    if F.kind == "hemisphere_odd":
        upper = apply_by_quadrature(hemisphere(F.pole), f, degree).value
        lower = apply_by_quadrature(hemisphere(-np.asarray(F.pole)), f, degree).value
        return QuadratureValue(0.5 * (upper - lower), degree, underresolved)
    pole = np.asarray(F.pole, dtype=float)
    e1, e2 = _frame(pole)
    n_az = degree + 1
    phi = 2 * np.pi * np.arange(n_az) / n_az
    ring = np.outer(np.cos(phi), e1) + np.outer(np.sin(phi), e2)
    if F.kind == "great_circle":
        value = (2 * np.pi / n_az) * float(np.sum(f(ring)))
        return QuadratureValue(value, degree, underresolved)
    # hemisphere: Gauss-Legendre in u = pole . x over (0, 1), trapezoid in azimuth
    u, wu = np.polynomial.legendre.leggauss(degree // 2 + 1)
    u, wu = 0.5 * (u + 1.0), 0.5 * wu
    r = np.sqrt(1.0 - u * u)
    pts = (u[:, None, None] * pole + r[:, None, None] * ring[None, :, :]).reshape(-1, 3)
    weights = np.repeat(wu * (2 * np.pi / n_az), n_az)
    return QuadratureValue(float(np.dot(weights, f(pts))), degree, underresolved)


# -- multipliers of the hemispherical and Radon transforms ----------------------


@dataclass(frozen=True)
class MultiplierTable:
    transform: str
    d: int
    values: np.ndarray

    @property
    def prefactor(self) -> float:
        d = self.d
        if self.transform == "hemispherical":
            return math.pi ** ((d - 1) / 2)
        return math.gamma((d + 1) / 2) / math.sqrt(math.pi)

    def scaled(self) -> np.ndarray:
        """Per-degree eigenvalue of the transform, prefactor included."""
        return self.prefactor * self.values


def hemispherical_multiplier(d: int, j: int) -> float:
    """``(-1)^((j-1)/2) Gamma(j/2) / Gamma((j+d+1)/2)`` for odd ``j``, else 0."""
    if j % 2 == 0:
        return 0.0
    mag = math.exp(math.lgamma(j / 2) - math.lgamma((j + d + 1) / 2))
    return -mag if ((j - 1) // 2) % 2 else mag


def radon_multiplier(d: int, j: int) -> float:
    """``(-1)^(j/2) Gamma((j+1)/2) / Gamma((j+d)/2)`` for even ``j``, else 0."""
    if j % 2:
        return 0.0
    mag = math.exp(math.lgamma((j + 1) / 2) - math.lgamma((j + d) / 2))
    return -mag if (j // 2) % 2 else mag


def multiplier_table(transform: str, d: int, max_degree: int) -> MultiplierTable:
    fn = {"hemispherical": hemispherical_multiplier, "radon": radon_multiplier}[transform]
    return MultiplierTable(transform, d, np.array([fn(d, j) for j in range(max_degree + 1)]))


# -- families --------------------------------------------------------------------


def antipodal_representatives(manifold: Manifold, points, tol: float = 1e-9) -> list[int]:
    """Indices of one point per antipodal pair.

    Raises ``DomainError`` if the set is not closed under ``x -> -x``.
    """
    pts = as_points(manifold, points)
    if manifold.is_circle:
        anti = np.mod(pts + np.pi, 2 * np.pi)
        diff = np.abs(np.mod(pts[:, None] - anti[None, :] + np.pi, 2 * np.pi) - np.pi)
    else:
        diff = np.linalg.norm(pts[:, None, :] + pts[None, :, :], axis=-1)
    partner = np.argmin(diff, axis=1)
    if np.any(diff[np.arange(len(pts)), partner] > tol):
        raise DomainError("point set is not symmetric under the antipodal map")
    reps, seen = [], set()
    for n, p in enumerate(partner):
        if n in seen:
            continue
        reps.append(n)
        seen.update((n, int(p)))
    return reps


def dirac_family(manifold: Manifold, points) -> list[Functional]:
    return [dirac(manifold, p) for p in as_points(manifold, points)]


def transform_family(kind: str, points) -> list[Functional]:
    """Linearly independent functionals spanning a symmetric hemisphere or
    great-circle family.

    For ``Xi = -Xi`` the hemisphere integrals satisfy
    ``T(xi) + T(-xi) = int f``, and great circles of ``theta`` and ``-theta``
    coincide; the full families are therefore dependent. The returned family
    keeps one pole per antipodal pair and imposes exactly the same
    constraints. Hemisphere data splits into the odd parts
    ``(T(xi) - T(-xi)) / 2`` and the total integral, which keeps the Gram
    matrix block diagonal by parity.
    """
    pts = as_points(SPHERE2, points)
    reps = antipodal_representatives(SPHERE2, pts)
    if kind == "hemisphere":
        return [hemisphere_odd(pts[n]) for n in reps] + [total_integral(SPHERE2)]
    if kind == "great_circle":
        return [great_circle(pts[n]) for n in reps]
    raise ValueError(f"unknown transform family {kind!r}")


def transform_data(kind: str, points, values) -> np.ndarray:
    """Map data ``T(xi)`` on a symmetric set to the values of ``transform_family``.

    Antipodal pairs are combined exactly as the reduced functionals are; for
    hemispheres the total integral is the mean of ``T(xi) + T(-xi)`` over pairs.
    """
    pts = as_points(SPHERE2, points)
    v = np.asarray(values, dtype=float)
    if v.shape != (len(pts),):
        raise ValueError("one value per point expected")
    reps = antipodal_representatives(SPHERE2, pts)
    partner = [int(np.argmin(np.linalg.norm(pts + pts[n], axis=1))) for n in reps]
    if kind == "great_circle":
        return np.array([0.5 * (v[n] + v[p]) for n, p in zip(reps, partner)])
    if kind == "hemisphere":
        odd = [0.5 * (v[n] - v[p]) for n, p in zip(reps, partner)]
        total = float(np.mean([v[n] + v[p] for n, p in zip(reps, partner)]))
        return np.array(odd + [total])
    raise ValueError(f"unknown transform family {kind!r}")
