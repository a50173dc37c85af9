"""Point families on the circle and sphere with packing/covering statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spectrum import CIRCLE, Manifold, as_points, geodesic_distance

__all__ = [
    "PointSet",
    "LatticeReport",
    "point_set",
    "fibonacci_sphere",
    "probe_grid",
    "uniform_circle",
    "farthest_point_sample",
    "symmetrize",
    "validate_rho_lattice",
]

PROBE_FACTOR = 100
MIN_PROBES = 2000
DEDUP_TOL = 1e-9


@dataclass(frozen=True)
class PointSet:
    """Points with separation ``delta``, covering radius ``mesh_norm`` and
    ``rho_param`` (largest nearest-neighbour distance)."""

    manifold: Manifold
    points: np.ndarray
    separation: float
    mesh_norm: float
    rho_param: float

    def __len__(self) -> int:
        return len(self.points)

    def to_dict(self) -> dict:
        def num(x):
            return None if math.isinf(x) else float(x)

        pts = self.points.tolist()
        return {
            "manifold": self.manifold.kind,
            "points": pts,
            "separation": num(self.separation),
            "mesh_norm": num(self.mesh_norm),
            "rho_param": num(self.rho_param),
        }


def fibonacci_sphere(n: int) -> np.ndarray:
    i = np.arange(n)
    z = 1.0 - (2 * i + 1) / n
    r = np.sqrt(1.0 - z * z)
    phi = i * math.pi * (3.0 - math.sqrt(5.0))
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)


def probe_grid(manifold: Manifold, n_points: int) -> np.ndarray:
    """Dense grid used for covering radii: ``100 n`` probes at least."""
    if manifold.is_circle:
        m = PROBE_FACTOR * max(n_points, 1)
        return 2 * np.pi * np.arange(m) / m
    return fibonacci_sphere(max(PROBE_FACTOR * n_points, MIN_PROBES))


def _min_distance_to(manifold: Manifold, probes: np.ndarray, pts: np.ndarray) -> np.ndarray:
    out = np.empty(len(probes))
    step = max(1, 4_000_000 // max(1, len(pts)))
    for start in range(0, len(probes), step):
        chunk = probes[start : start + step]
        out[start : start + step] = geodesic_distance(manifold, chunk, pts).min(axis=1)
    return out


def _pair_stats(manifold: Manifold, pts: np.ndarray) -> tuple[float, float]:
    if len(pts) < 2:
        return math.inf, math.inf
    dist = geodesic_distance(manifold, pts, pts)
    np.fill_diagonal(dist, np.inf)
    nearest = dist.min(axis=1)
    return float(nearest.min()), float(nearest.max())


def point_set(manifold: Manifold, points, probes: np.ndarray | None = None) -> PointSet:
    pts = as_points(manifold, points)
    if probes is None:
        probes = probe_grid(manifold, len(pts))
    delta, rho = _pair_stats(manifold, pts)
    h = float(_min_distance_to(manifold, probes, pts).max())
    return PointSet(manifold, pts, delta, h, rho)


def uniform_circle(n: int) -> PointSet:
    """``theta_k = 2 pi k / n``; separation ``2 pi / n``, mesh norm ``pi / n``."""
    if n < 1:
        raise ValueError("need at least one point")
    return point_set(CIRCLE, 2 * np.pi * np.arange(n) / n)


def farthest_point_sample(manifold: Manifold, n: int, seed: int = 0) -> PointSet:
    """Greedy farthest-point selection from the probe grid, random start.

    Candidates double as probes, so the reported mesh norm is the distance
    the next greedy step would achieve and ``separation >= mesh_norm``.
    """
    if n < 1:
        raise ValueError("need at least one point")
    cand = probe_grid(manifold, n)
    rng = np.random.default_rng(seed)
    chosen = [int(rng.integers(len(cand)))]
    mind = geodesic_distance(manifold, cand, cand[chosen]).ravel()
    for _ in range(n - 1):
        nxt = int(np.argmax(mind))
        chosen.append(nxt)
        mind = np.minimum(mind, geodesic_distance(manifold, cand, cand[[nxt]]).ravel())
    return point_set(manifold, cand[chosen], probes=cand)


def _antipodes(manifold: Manifold, pts: np.ndarray) -> np.ndarray:
    if manifold.is_circle:
        return np.mod(pts + np.pi, 2 * np.pi)
    return -pts


def symmetrize(ps: PointSet) -> PointSet:
    """Union with the antipodal set, deduplicated at 1e-9."""
    M = ps.manifold
    merged = list(ps.points)
    for q in _antipodes(M, ps.points):
        d = geodesic_distance(M, np.asarray([q]), np.asarray(merged))
        if d.min() > DEDUP_TOL:
            merged.append(q)
    return point_set(M, np.asarray(merged))


@dataclass(frozen=True)
class LatticeReport:
    valid: bool
    disjoint: bool
    covers: bool
    rho: float
    separation: float
    mesh_norm: float


def validate_rho_lattice(ps: PointSet, rho: float, tol: float = 1e-12) -> LatticeReport:
    """Packing (all pairwise distances ``> rho``) and covering (mesh norm ``<= rho``)."""
    if not rho > 0:
        raise ValueError("rho must be positive")
    disjoint = ps.separation > rho
    covers = ps.mesh_norm <= rho + tol
    return LatticeReport(disjoint and covers, disjoint, covers, rho, ps.separation, ps.mesh_norm)

