"""Laplace-Beltrami eigenstructure of the circle and the 2-sphere.

Points on the circle are angles (radians). Points on the sphere are unit
3-vectors. All bases are real and orthonormal with respect to the
unnormalized arc-length / surface measure.

Spectral modes are stored in a flat layout:

* circle: flat 0 is the constant; degree ``k >= 1`` occupies ``2k - 1``
  (order 1, ``cos``) and ``2k`` (order 2, ``sin``).
* sphere: degree ``j`` occupies ``j**2 .. j**2 + 2j``; order ``i`` in
  ``1 .. 2j + 1`` corresponds to azimuthal index ``m = i - j - 1``, so the
  zonal harmonic is order ``j + 1``, ``m > 0`` are cosine and ``m < 0`` are
  sine harmonics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "DomainError",
    "Manifold",
    "CIRCLE",
    "SPHERE2",
    "SpectralIndex",
    "Eigenpair",
    "QuadratureRule",
    "eigenvalue",
    "eigenvalues",
    "multiplicity",
    "mode_count",
    "mode_degrees",
    "degree_for_count",
    "mode_index",
    "mode_label",
    "eigenpairs",
    "as_points",
    "evaluate_basis",
    "basis_matrix",
    "legendre_P",
    "legendre_table",
    "zonal_kernel",
    "quadrature_rule",
    "geodesic_distance",
]

POINT_TOL = 1e-10


class DomainError(ValueError):
    """A point or argument lies outside the domain of an operation."""


@dataclass(frozen=True)
class Manifold:
    kind: str
    dim: int
    total_measure: float

    def __post_init__(self):
        expected = {"circle": (1, 2 * math.pi), "sphere2": (2, 4 * math.pi)}
        if self.kind not in expected:
            raise ValueError(f"unknown manifold kind {self.kind!r}")
        if (self.dim, self.total_measure) != expected[self.kind]:
            raise ValueError(f"inconsistent dim/measure for {self.kind}")

    @classmethod
    def from_name(cls, name: str) -> "Manifold":
        if name == "circle":
            return CIRCLE
        if name in ("sphere2", "sphere"):
            return SPHERE2
        raise ValueError(f"unknown manifold {name!r}")

    @property
    def is_circle(self) -> bool:
        return self.kind == "circle"


CIRCLE = Manifold("circle", 1, 2 * math.pi)
SPHERE2 = Manifold("sphere2", 2, 4 * math.pi)


@dataclass(frozen=True, order=True)
class SpectralIndex:
    degree: int
    order: int


@dataclass(frozen=True)
class Eigenpair:
    index: SpectralIndex
    eigenvalue: float


@dataclass(frozen=True)
class QuadratureRule:
    manifold: Manifold
    nodes: np.ndarray
    weights: np.ndarray
    exact_degree: int

    def integrate(self, values: np.ndarray) -> float:
        return float(np.dot(self.weights, values))


# -- eigenvalues and mode bookkeeping ---------------------------------------


def eigenvalue(manifold: Manifold, degree: int) -> float:
    if degree < 0:
        raise DomainError("degree must be nonnegative")
    if manifold.is_circle:
        return float(degree * degree)
    return float(degree * (degree + 1))


def eigenvalues(manifold: Manifold, degrees: np.ndarray) -> np.ndarray:
    degrees = np.asarray(degrees, dtype=float)
    if manifold.is_circle:
        return degrees * degrees
    return degrees * (degrees + 1.0)


def multiplicity(d: int, degree: int) -> int:
    """Dimension of the degree-``degree`` eigenspace on ``S^d``.

    ``n_d(j) = (d + 2j - 1) (d + j - 2)! / (j! (d - 1)!)`` for ``d >= 2``,
    evaluated in exact integer arithmetic.
    """
    if d < 1 or degree < 0:
        raise DomainError("need d >= 1 and degree >= 0")
    if d == 1:
        return 1 if degree == 0 else 2
    j = degree
    # (d+j-2)!/(j!(d-1)!) == comb(d+j-2, j) / (d-1)
    numerator = (d + 2 * j - 1) * math.comb(d + j - 2, j)
    value, rem = divmod(numerator, d - 1)
    assert rem == 0
    if value > np.iinfo(np.int64).max:
        raise OverflowError(f"multiplicity n_{d}({j}) exceeds int64 range")
    return value


def mode_count(manifold: Manifold, max_degree: int) -> int:
    if max_degree < 0:
        return 0
    if manifold.is_circle:
        return 2 * max_degree + 1
    return (max_degree + 1) ** 2


def degree_for_count(manifold: Manifold, count: int) -> int:
    """Inverse of ``mode_count``; rejects counts that split a degree block."""
    J = (count - 1) // 2 if manifold.is_circle else math.isqrt(count) - 1
    if count < 1 or mode_count(manifold, J) != count:
        raise ValueError(f"{count} coefficients is not a full degree block")
    return J


def mode_degrees(manifold: Manifold, max_degree: int) -> np.ndarray:
    """Degree of every flat mode up to ``max_degree``."""
    if manifold.is_circle:
        k = np.arange(1, max_degree + 1)
        return np.concatenate([[0], np.repeat(k, 2)])
    j = np.arange(max_degree + 1)
    return np.repeat(j, 2 * j + 1)


def _check_index(manifold: Manifold, index: SpectralIndex) -> None:
    j, i = index.degree, index.order
    if j < 0 or not 1 <= i <= multiplicity(manifold.dim, j):
        raise DomainError(f"invalid spectral index {index} on {manifold.kind}")


def mode_index(manifold: Manifold, index: SpectralIndex) -> int:
    _check_index(manifold, index)
    j, i = index.degree, index.order
    if manifold.is_circle:
        return 0 if j == 0 else 2 * j - 2 + i
    return j * j + i - 1


def mode_label(manifold: Manifold, flat: int) -> SpectralIndex:
    if flat < 0:
        raise DomainError("negative flat index")
    if manifold.is_circle:
        if flat == 0:
            return SpectralIndex(0, 1)
        return SpectralIndex((flat + 1) // 2, 2 - flat % 2)
    j = math.isqrt(flat)
    return SpectralIndex(j, flat - j * j + 1)


def eigenpairs(manifold: Manifold, max_degree: int) -> list[Eigenpair]:
    return [
        Eigenpair(mode_label(manifold, n), eigenvalue(manifold, int(j)))
        for n, j in enumerate(mode_degrees(manifold, max_degree))
    ]


# -- points ------------------------------------------------------------------


def as_points(manifold: Manifold, points) -> np.ndarray:
    """Validate and reshape to ``(n,)`` angles or ``(n, 3)`` unit vectors."""
    arr = np.asarray(points, dtype=float)
    if manifold.is_circle:
        arr = np.atleast_1d(arr)
        if arr.ndim != 1:
            raise DomainError("circle points must be a scalar or 1-d array of angles")
        if not np.all(np.isfinite(arr)):
            raise DomainError("non-finite angle")
        return arr
    arr = np.atleast_2d(arr)
    if arr.shape[-1] != 3 or arr.ndim != 2:
        raise DomainError("sphere points must have shape (3,) or (n, 3)")
    norms = np.linalg.norm(arr, axis=1)
    if not np.all(np.abs(norms - 1.0) <= POINT_TOL):
        raise DomainError("point is not on the unit sphere")
    return arr


def geodesic_distance(manifold: Manifold, x, y) -> np.ndarray:
    """Pairwise geodesic distances, shape ``(len(x), len(y))``."""
    x = as_points(manifold, x)
    y = as_points(manifold, y)
    if manifold.is_circle:
        diff = np.mod(x[:, None] - y[None, :], 2 * np.pi)
        return np.minimum(diff, 2 * np.pi - diff)
    dot = x @ y.T
    out = np.arccos(np.clip(dot, -1.0, 1.0))
    # arccos loses half the digits near +-1; use chord lengths there instead
    a, b = np.nonzero(dot > 0.9)
    if len(a):
        chord = np.linalg.norm(x[a] - y[b], axis=1)
        out[a, b] = 2 * np.arcsin(np.minimum(chord / 2, 1.0))
    a, b = np.nonzero(dot < -0.9)
    if len(a):
        chord = np.linalg.norm(x[a] + y[b], axis=1)
        out[a, b] = np.pi - 2 * np.arcsin(np.minimum(chord / 2, 1.0))
    return out


# -- Legendre ------------------------------------------------------------------


def legendre_P(degree: int, x):
    """Legendre polynomial ``P_degree(x)`` by the three-term recurrence."""
    if degree < 0:
        raise DomainError("degree must be nonnegative")
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1.0 + 1e-14):
        raise DomainError("|x| must not exceed 1")
    p_prev, p = np.ones_like(x), x.copy()
    if degree == 0:
        return p_prev if p_prev.ndim else float(p_prev)
    for n in range(1, degree):
        p_prev, p = p, ((2 * n + 1) * x * p - n * p_prev) / (n + 1)
    return p if p.ndim else float(p)


def legendre_table(max_degree: int, x) -> np.ndarray:
    """``P_0..P_max_degree`` at ``x``; shape ``(max_degree + 1,) + x.shape``."""
    x = np.asarray(x, dtype=float)
    out = np.empty((max_degree + 1,) + x.shape)
    out[0] = 1.0
    if max_degree >= 1:
        out[1] = x
    for n in range(1, max_degree):
        out[n + 1] = ((2 * n + 1) * x * out[n] - n * out[n - 1]) / (n + 1)
    return out


# -- basis evaluation --------------------------------------------------------


def _sphere_basis(points: np.ndarray, max_degree: int) -> np.ndarray:
    x, y, z = points[:, 0], points[:, 1], points[:, 2]
    sin_theta = np.hypot(x, y)
    phi = np.arctan2(y, x)
    npts = len(points)
    out = np.empty((npts, (max_degree + 1) ** 2))
    p_mm = np.full(npts, 1.0 / math.sqrt(4 * math.pi))
    sqrt2 = math.sqrt(2.0)
    for m in range(max_degree + 1):
        if m > 0:
            p_mm = math.sqrt((2 * m + 1) / (2 * m)) * sin_theta * p_mm
        if m == 0:
            trig_c, trig_s = None, None
        else:
            trig_c, trig_s = sqrt2 * np.cos(m * phi), sqrt2 * np.sin(m * phi)
        p_prev, p_cur = None, p_mm
        for j in range(m, max_degree + 1):
            if j == m + 1:
                p_prev, p_cur = p_cur, math.sqrt(2 * m + 3) * z * p_cur
            elif j > m + 1:
                a = math.sqrt((4 * j * j - 1) / (j * j - m * m))
                b = math.sqrt(((j - 1) ** 2 - m * m) / (4 * (j - 1) ** 2 - 1))
                p_prev, p_cur = p_cur, a * (z * p_cur - b * p_prev)
            base = j * j + j
            if m == 0:
                out[:, base] = p_cur
            else:
                out[:, base + m] = p_cur * trig_c
                out[:, base - m] = p_cur * trig_s
    return out


def _circle_basis(theta: np.ndarray, max_degree: int) -> np.ndarray:
    out = np.empty((len(theta), 2 * max_degree + 1))
    out[:, 0] = 1.0 / math.sqrt(2 * math.pi)
    if max_degree > 0:
        k = np.arange(1, max_degree + 1)
        arg = np.outer(theta, k)
        out[:, 1::2] = np.cos(arg) / math.sqrt(math.pi)
        out[:, 2::2] = np.sin(arg) / math.sqrt(math.pi)
    return out


def basis_matrix(manifold: Manifold, points, max_degree: int) -> np.ndarray:
    """All orthonormal eigenfunctions up to ``max_degree`` at ``points``.

    Returns an array of shape ``(n_points, mode_count(manifold, max_degree))``.
    """
    pts = as_points(manifold, points)
    if max_degree < 0:
        raise DomainError("max_degree must be nonnegative")
    if manifold.is_circle:
        return _circle_basis(pts, max_degree)
    return _sphere_basis(pts, max_degree)


def evaluate_basis(manifold: Manifold, index: SpectralIndex, point) -> float:
    flat = mode_index(manifold, index)
    pts = as_points(manifold, point)
    if len(pts) != 1:
        raise DomainError("evaluate_basis takes a single point")
    return float(basis_matrix(manifold, pts, index.degree)[0, flat])


# -- zonal kernels -------------------------------------------------------------

_CHUNK = 1 << 22


def _circle_zonal(weights: np.ndarray, delta: np.ndarray) -> np.ndarray:
    flat = delta.ravel()
    acc = np.full(flat.shape, weights[0] / (2 * math.pi))
    n_deg = len(weights) - 1
    step = max(1, _CHUNK // max(1, flat.size))
    for start in range(1, n_deg + 1, step):
        k = np.arange(start, min(n_deg, start + step - 1) + 1)
        acc += np.cos(np.outer(flat, k)) @ weights[k] / math.pi
    return acc.reshape(delta.shape)


def _sphere_zonal(weights: np.ndarray, cosines: np.ndarray) -> np.ndarray:
    j = np.arange(len(weights))
    coeffs = weights * (2 * j + 1) / (4 * math.pi)
    return np.polynomial.legendre.legval(cosines, coeffs)


def zonal_kernel(manifold: Manifold, weights: Sequence[float], x, y):
    """``sum_j a_j sum_i phi_{j,i}(x) phi_{j,i}(y)`` via the addition theorem.

    ``x`` and ``y`` may be single points or arrays of points; for arrays the
    result has shape ``(len(x), len(y))``.
    """
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or len(w) == 0:
        raise DomainError("weights must be a nonempty 1-d sequence")
    single = _is_single(manifold, x) and _is_single(manifold, y)
    xs, ys = as_points(manifold, x), as_points(manifold, y)
    if manifold.is_circle:
        out = _circle_zonal(w, xs[:, None] - ys[None, :])
    else:
        out = _sphere_zonal(w, np.clip(xs @ ys.T, -1.0, 1.0))
    return float(out[0, 0]) if single else out


def _is_single(manifold: Manifold, p) -> bool:
    arr = np.asarray(p)
    return arr.ndim == 0 if manifold.is_circle else arr.ndim == 1


# -- quadrature ----------------------------------------------------------------


def quadrature_rule(manifold: Manifold, exact_degree: int) -> QuadratureRule:
    """Rule integrating every eigenfunction product of total degree
    ``<= exact_degree`` exactly.

    Circle: equal-weight trapezoid with ``exact_degree + 1`` nodes.
    Sphere: Gauss-Legendre in ``cos(theta)`` times trapezoid in azimuth.
    """
    if exact_degree < 0:
        raise DomainError("exact_degree must be nonnegative")
    n_az = exact_degree + 1
    if manifold.is_circle:
        nodes = 2 * np.pi * np.arange(n_az) / n_az
        weights = np.full(n_az, 2 * np.pi / n_az)
        return QuadratureRule(manifold, nodes, weights, exact_degree)
    n_z = exact_degree // 2 + 1
    z, wz = np.polynomial.legendre.leggauss(n_z)
    phi = 2 * np.pi * np.arange(n_az) / n_az
    zz, pp = np.meshgrid(z, phi, indexing="ij")
    rr = np.sqrt(1.0 - zz * zz)
    nodes = np.stack([rr * np.cos(pp), rr * np.sin(pp), zz], axis=-1).reshape(-1, 3)
    weights = np.repeat(wz * (2 * np.pi / n_az), n_az)
    return QuadratureRule(manifold, nodes, weights, exact_degree)
