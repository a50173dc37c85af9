"""Variational interpolating splines: Gram assembly, solve, evaluation, norms.

A spline minimizes ``||(1 + Delta)^{t/2} u||`` subject to ``F_nu(u) = v_nu``.
Its Fourier coefficients are ``c_n = (1 + lambda_n)^{-t} sum_nu alpha_nu F_nu(phi_n)``
where ``alpha`` solves ``beta alpha = v`` with the Gram matrix
``beta_{nu mu} = sum_n (1 + lambda_n)^{-t} F_nu(phi_n) F_mu(phi_n)``.

The infinite spectral sums are truncated at a degree ``J`` chosen from an
explicit tail majorant, except for point evaluations on the circle, where the
kernel is summed in closed form (Poisson summation of a Matern kernel).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np
import scipy.linalg
from scipy.special import gammaln, kv

from .functionals import (
    Functional,
    apply_to_series,
    coefficient_matrix,
    series_from_mapping,
)
from .spectrum import (
    DomainError,
    Manifold,
    as_points,
    basis_matrix,
    degree_for_count,
    eigenvalues,
    mode_count,
    mode_degrees,
    zonal_kernel,
)

__all__ = [
    "SplineError",
    "SummabilityError",
    "SingularGramError",
    "ConfigurationError",
    "SplineProblem",
    "GramReport",
    "Spline",
    "tail_bound",
    "truncation_degree",
    "resolve_degree",
    "assemble_gram",
    "gram_by_series",
    "solve_spline",
    "evaluate_spline",
    "sobolev_norm",
    "spectral_norm",
    "sobolev_inner",
    "lagrangian_basis",
    "interpolate_function",
    "circle_matern_kernel",
]

DEFAULT_TAIL_TOL = 1e-10
CHOLESKY_COND_LIMIT = 1e10
SINGULAR_COND = 1e14
QR_SIZE_LIMIT = 20_000_000
DEFAULT_MAX_DEGREE = {"circle": 1 << 23, "sphere2": 2048}


class SplineError(RuntimeError):
    pass


class SummabilityError(ValueError):
    """Gram series is not absolutely summable for the requested smoothness."""


class ConfigurationError(ValueError):
    pass


class SingularGramError(SplineError):
    def __init__(self, message: str, pair: tuple[int, int], condition: float):
        super().__init__(message)
        self.pair = pair
        self.condition = condition


@dataclass(frozen=True)
class SplineProblem:
    """Data of one interpolation problem.

    Truncation: an explicit ``degree`` wins over ``tail_tol``; with neither,
    ``tail_tol`` defaults to 1e-10. ``closed_form`` sums circle point
    evaluation kernels exactly and ignores both.
    """

    manifold: Manifold
    smoothness: float
    functionals: tuple[Functional, ...]
    values: tuple[float, ...]
    degree: int | None = None
    tail_tol: float | None = None
    closed_form: bool = False
    jitter: bool = False
    max_degree: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "functionals", tuple(self.functionals))
        object.__setattr__(self, "values", tuple(float(v) for v in np.ravel(self.values)))
        if not self.functionals:
            raise ConfigurationError("need at least one functional")
        if len(self.values) != len(self.functionals):
            raise ConfigurationError("values and functionals differ in length")
        if any(F.manifold != self.manifold for F in self.functionals):
            raise ConfigurationError("functional defined on a different manifold")
        if self.degree is not None and self.degree < 0:
            raise ConfigurationError("degree must be nonnegative")
        if self.tail_tol is not None and not self.tail_tol > 0:
            raise ConfigurationError("tail_tol must be positive")
        if self.closed_form:
            if not self.manifold.is_circle or any(
                F.kind not in ("dirac", "total_integral") for F in self.functionals
            ):
                raise ConfigurationError(
                    "closed-form kernels exist only for point evaluations on the circle"
                )
        threshold = summability_threshold(self.functionals)
        if not self.smoothness > threshold:
            raise SummabilityError(
                f"series not absolutely summable: smoothness {self.smoothness} must exceed "
                f"{threshold} for these functionals"
            )

    @property
    def v(self) -> np.ndarray:
        return np.asarray(self.values)

    @property
    def n(self) -> int:
        return len(self.functionals)

    def with_values(self, values) -> "SplineProblem":
        return replace(self, values=tuple(float(x) for x in np.ravel(values)))


@dataclass(frozen=True)
class GramReport:
    matrix: np.ndarray
    truncation_degree: int | None
    tail_bound: float
    condition_estimate: float
    min_eigenvalue: float


# -- truncation ------------------------------------------------------------------


def summability_threshold(functionals: Sequence[Functional]) -> float:
    """Smallest excluded smoothness: the Gram series converges iff ``t`` exceeds it."""
    powers = [F.envelope.power for F in functionals if F.envelope.scale > 0]
    return max(powers) + 0.5 if powers else -math.inf


def _envelope_pairs(problem: SplineProblem):
    envs = {(F.envelope.scale, F.envelope.power) for F in problem.functionals}
    envs = sorted(e for e in envs if e[0] > 0)
    for a in range(len(envs)):
        for b in range(a, len(envs)):
            (ka, pa), (kb, pb) = envs[a], envs[b]
            yield ka * kb, pa + pb - 2 * problem.smoothness


def _tail_lower_limit(manifold: Manifold, degree: int) -> float:
    return float(degree) if manifold.is_circle else degree + 0.5


def tail_bound(problem: SplineProblem, degree: int) -> float:
    """Majorant of ``|beta_{nu mu} - beta^{(degree)}_{nu mu}|`` over all pairs."""
    lower = _tail_lower_limit(problem.manifold, degree)
    worst = 0.0
    for scale, q in _envelope_pairs(problem):
        if q >= -1:
            raise SummabilityError("series not absolutely summable")
        if lower <= 0:
            return math.inf
        worst = max(worst, scale * lower ** (q + 1) / (-q - 1))
    return worst


def truncation_degree(problem: SplineProblem, tail_tol: float) -> int:
    """Smallest ``J`` whose tail majorant is below ``tail_tol``.

    Per degree the summand is bounded by ``K_nu K_mu u^(p_nu + p_mu) u^(-2t)``
    (``u = j`` on the circle, ``j + 1/2`` on the sphere) and the tail is
    bounded by the integral of that power law.
    """
    if not tail_tol > 0:
        raise ConfigurationError("tail_tol must be positive")
    circle = problem.manifold.is_circle
    best = 1 if circle else 0
    for scale, q in _envelope_pairs(problem):
        if q >= -1:
            raise SummabilityError("series not absolutely summable")
        lstar = (scale / ((-q - 1) * tail_tol)) ** (1.0 / (-q - 1))
        J = math.floor(lstar if circle else lstar - 0.5) + 1
        best = max(best, J)
    J = best
    while tail_bound(problem, J) >= tail_tol:
        J += 1
    while J > (1 if circle else 0) and tail_bound(problem, J - 1) < tail_tol:
        J -= 1
    return J


def resolve_degree(problem: SplineProblem) -> tuple[int | None, float]:
    """Truncation degree actually used, with its tail majorant."""
    if problem.closed_form:
        return None, 0.0
    if problem.degree is not None:
        J = problem.degree
    else:
        J = truncation_degree(problem, problem.tail_tol or DEFAULT_TAIL_TOL)
        while mode_count(problem.manifold, J) < problem.n:
            J += 1
    cap = problem.max_degree or DEFAULT_MAX_DEGREE[problem.manifold.kind]
    if J > cap:
        raise ConfigurationError(
            f"truncation degree {J} exceeds the cap {cap}; raise smoothness, loosen "
            "tail_tol or give an explicit degree"
        )
    return J, tail_bound(problem, J)


# -- kernels ---------------------------------------------------------------------


def circle_matern_kernel(delta, t: float, images: int = 12) -> np.ndarray:
    """``(1/2pi) sum_{k in Z} (1 + k^2)^{-t} cos(k delta)`` in closed form.

    Poisson summation turns the series into a sum of shifted Fourier
    transforms ``g(x) = 2 sqrt(pi)/Gamma(t) (|x|/2)^{t-1/2} K_{t-1/2}(|x|)``,
    which decay like ``exp(-|x|)``.
    """
    if not t > 0.5:
        raise SummabilityError("closed-form circle kernel needs t > 1/2")
    delta = np.asarray(delta, dtype=float)
    base = np.mod(delta + np.pi, 2 * np.pi) - np.pi
    nu = t - 0.5
    log_pref = math.log(2 * math.sqrt(math.pi)) - gammaln(t)
    at_zero = math.exp(0.5 * math.log(math.pi) + gammaln(nu) - gammaln(t)) if nu > 0 else math.inf
    total = np.zeros_like(base)
    for n in range(-images, images + 1):
        x = np.abs(base + 2 * np.pi * n)
        with np.errstate(divide="ignore", invalid="ignore"):
            term = np.exp(log_pref + nu * np.log(x / 2)) * kv(nu, x)
        total += np.where(x == 0, at_zero, term)
    return total / (2 * np.pi)


def _decay(problem: SplineProblem, degree: int) -> np.ndarray:
    """``(1 + lambda_j)^{-t}`` per degree."""
    j = np.arange(degree + 1)
    return (1.0 + eigenvalues(problem.manifold, j)) ** (-problem.smoothness)


def _zonal_groups(functionals: Sequence[Functional]) -> dict[str, list[int]]:
    groups: dict[str, list[int]] = {}
    for n, F in enumerate(functionals):
        if F.is_zonal:
            groups.setdefault(F.kind, []).append(n)
    return groups


def _poles(functionals, idx):
    return np.array([functionals[n].pole_point() for n in idx])


def _arc_indices(functionals) -> list[int]:
    return [n for n, F in enumerate(functionals) if not F.is_zonal]


def gram_by_series(problem: SplineProblem, degree: int) -> np.ndarray:
    """Gram matrix as the explicit double sum over all modes (oracle path)."""
    A = coefficient_matrix(problem.functionals, degree)
    d = _decay(problem, degree)[mode_degrees(problem.manifold, degree)]
    return (A * d) @ A.T


def assemble_gram(problem: SplineProblem) -> GramReport:
    J, tail = resolve_degree(problem)
    Fs = problem.functionals
    N = problem.n
    beta = np.zeros((N, N))
    if problem.closed_form:
        beta = _closed_form_gram(problem)
    else:
        d = _decay(problem, J)
        groups = _zonal_groups(Fs)
        kinds = sorted(groups)
        for a, ka in enumerate(kinds):
            wa = Fs[groups[ka][0]].zonal_weights(J)
            for kb in kinds[a:]:
                wb = Fs[groups[kb][0]].zonal_weights(J)
                block = zonal_kernel(
                    problem.manifold, d * wa * wb, _poles(Fs, groups[ka]), _poles(Fs, groups[kb])
                )
                ia, ib = np.array(groups[ka]), np.array(groups[kb])
                beta[np.ix_(ia, ib)] = block
                beta[np.ix_(ib, ia)] = block.T
        arcs = _arc_indices(Fs)
        if arcs:
            A = coefficient_matrix(Fs, J)
            dm = d[mode_degrees(problem.manifold, J)]
            rows = (A[arcs] * dm) @ A.T
            beta[arcs, :] = rows
            beta[:, arcs] = rows.T
    # mirror the upper triangle so the matrix is exactly symmetric
    upper = np.triu(beta)
    beta = upper + np.triu(beta, 1).T
    cond, min_eig = _spectrum_stats(beta)
    return GramReport(beta, J, tail, cond, min_eig)


def _closed_form_gram(problem: SplineProblem) -> np.ndarray:
    Fs = problem.functionals
    N = problem.n
    beta = np.empty((N, N))
    for a in range(N):
        for b in range(a, N):
            beta[a, b] = beta[b, a] = _closed_form_entry(problem, Fs[a], Fs[b])
    return beta


def _closed_form_entry(problem, Fa: Functional, Fb: Functional) -> float:
    if Fa.kind == "dirac" and Fb.kind == "dirac":
        return float(circle_matern_kernel(Fa.pole - Fb.pole, problem.smoothness))
    # only the constant mode survives: c_0 products over 2 pi
    return float(Fa.zonal_weights(0)[0] * Fb.zonal_weights(0)[0] / (2 * math.pi))


def _spectrum_stats(beta: np.ndarray) -> tuple[float, float]:
    eig = np.linalg.eigvalsh(beta)
    lo, hi = float(eig[0]), float(eig[-1])
    cond = hi / lo if lo > 0 else math.inf
    return cond, lo


def _closest_pair(beta: np.ndarray) -> tuple[int, int]:
    N = len(beta)
    if N == 1:
        return (0, 0)
    diag = np.sqrt(np.abs(np.diag(beta)))
    with np.errstate(divide="ignore", invalid="ignore"):
        corr = np.abs(beta) / np.outer(diag, diag)
    corr = np.nan_to_num(corr, nan=1.0, posinf=1.0)
    np.fill_diagonal(corr, -np.inf)
    a, b = np.unravel_index(np.argmax(corr), corr.shape)
    return (int(min(a, b)), int(max(a, b)))


# -- solve -------------------------------------------------------------------------


@dataclass(frozen=True)
class Spline:
    """Solved spline. ``fourier`` is materialized lazily up to the truncation degree."""

    problem: SplineProblem
    alpha: np.ndarray
    gram: GramReport | None
    solver: str
    norm_sq: float
    degree: int | None
    qr_fourier: np.ndarray | None = field(default=None, repr=False)

    @cached_property
    def fourier(self) -> np.ndarray:
        if self.degree is None:
            raise SplineError("closed-form spline: use fourier_coefficients(max_degree)")
        if self.qr_fourier is not None:
            return self.qr_fourier
        return self.fourier_coefficients(self.degree)

    def fourier_coefficients(self, max_degree: int) -> np.ndarray:
        """``c_n = (1 + lambda_n)^{-t} sum_nu alpha_nu F_nu(phi_n)`` up to ``max_degree``.

        For truncated splines degrees beyond the truncation degree are zero.
        """
        if self.degree is not None and self.qr_fourier is not None:
            return _resize(self.problem.manifold, self.qr_fourier, max_degree)
        J = max_degree if self.degree is None else min(max_degree, self.degree)
        A = coefficient_matrix(self.problem.functionals, J)
        d = _decay(self.problem, J)[mode_degrees(self.problem.manifold, J)]
        return _resize(self.problem.manifold, d * (self.alpha @ A), max_degree)

    @property
    def values(self) -> np.ndarray:
        return self.problem.v

    @cached_property
    def functional_values(self) -> np.ndarray:
        """``F_nu(s)`` for every functional of the problem."""
        if self.degree is None:
            return self.gram.matrix @ self.alpha
        A = coefficient_matrix(self.problem.functionals, self.degree)
        return A @ self.fourier

    @property
    def residual_max(self) -> float:
        return float(np.max(np.abs(self.functional_values - self.values)))


def _resize(manifold: Manifold, coeffs: np.ndarray, max_degree: int) -> np.ndarray:
    out = np.zeros(mode_count(manifold, max_degree))
    n = min(len(out), len(coeffs))
    out[:n] = coeffs[:n]
    return out


class _Factorization:
    """Cholesky factor of the Gram matrix, obtained either directly or by
    orthogonal triangularization of the weighted coefficient matrix."""

    def __init__(self, problem: SplineProblem, gram: GramReport, method: str = "auto"):
        self.problem = problem
        self.gram = gram
        beta = gram.matrix
        if problem.jitter:
            beta = beta + 1e-12 * np.trace(beta) / len(beta) * np.eye(len(beta))
        J = gram.truncation_degree
        if method == "auto":
            if J is None or gram.condition_estimate <= CHOLESKY_COND_LIMIT:
                method = "cholesky"
            elif problem.n * mode_count(problem.manifold, J) <= QR_SIZE_LIMIT:
                method = "qr"
            else:
                method = "cholesky"
        if method == "qr" and J is None:
            raise ConfigurationError("qr solver needs a truncated problem")
        self.method = method
        if method == "cholesky":
            self._cholesky(beta)
        elif method == "qr":
            self._qr(J)
        else:
            raise ConfigurationError(f"unknown solver {method!r}")

    def _fail(self, why: str, cond: float):
        pair = _closest_pair(self.gram.matrix)
        raise SingularGramError(
            f"numerically singular Gram matrix ({why}); nearest functionals {pair}", pair, cond
        )

    def _cholesky(self, beta: np.ndarray) -> None:
        cond, _ = _spectrum_stats(beta) if self.problem.jitter else (
            self.gram.condition_estimate,
            self.gram.min_eigenvalue,
        )
        if not cond <= SINGULAR_COND:
            self._fail(f"condition estimate {cond:.3g}", cond)
        try:
            self.factor = scipy.linalg.cho_factor(beta, lower=True)
        except np.linalg.LinAlgError:
            self._fail("Cholesky factorization failed", cond)

    def _qr(self, J: int) -> None:
        p = self.problem
        A = coefficient_matrix(p.functionals, J)
        self.sqrt_decay = np.sqrt(_decay(p, J))[mode_degrees(p.manifold, J)]
        Q, R = np.linalg.qr((A * self.sqrt_decay).T)
        signs = np.where(np.diag(R) < 0, -1.0, 1.0)
        self.Q, self.R = Q * signs, R * signs[:, None]
        sv = np.linalg.svd(self.R, compute_uv=False)
        cond_r = sv[0] / sv[-1] if sv[-1] > 0 else math.inf
        if not cond_r <= SINGULAR_COND:
            self._fail(f"triangular factor condition {cond_r:.3g}", cond_r**2)

    def solve(self, values: np.ndarray) -> Spline:
        p = self.problem.with_values(values)
        v = p.v
        J = self.gram.truncation_degree
        if self.method == "cholesky":
            alpha = scipy.linalg.cho_solve(self.factor, v)
            solver = "closed_form" if J is None else "cholesky"
            return Spline(p, alpha, self.gram, solver, float(alpha @ v), J)
        z = scipy.linalg.solve_triangular(self.R.T, v, lower=True)
        alpha = scipy.linalg.solve_triangular(self.R, z)
        fourier = self.sqrt_decay * (self.Q @ z)
        return Spline(p, alpha, self.gram, "qr", float(z @ z), J, fourier)


def solve_spline(problem: SplineProblem, method: str = "auto") -> Spline:
    """Solve ``beta alpha = v`` and return the spline.

    ``method`` is ``"cholesky"``, ``"qr"`` or ``"auto"`` (Cholesky unless the
    Gram condition estimate exceeds 1e10, then the orthogonal route).
    """
    gram = assemble_gram(problem)
    return _Factorization(problem, gram, method).solve(problem.v)


def lagrangian_basis(
    manifold: Manifold,
    functionals: Sequence[Functional],
    t: float,
    degree: int | None = None,
    tail_tol: float | None = None,
    closed_form: bool = False,
    method: str = "auto",
) -> list[Spline]:
    """Splines ``l^nu`` with ``F_mu(l^nu) = delta_{nu mu}``; one factorization."""
    N = len(functionals)
    problem = SplineProblem(
        manifold, t, tuple(functionals), (0.0,) * N, degree, tail_tol, closed_form
    )
    fact = _Factorization(problem, assemble_gram(problem), method)
    return [fact.solve(e) for e in np.eye(N)]


def interpolate_function(
    f_coeffs,
    functionals: Sequence[Functional],
    t: float,
    degree: int | None = None,
    tail_tol: float | None = None,
    method: str = "auto",
) -> Spline:
    """Spline matching ``F_nu(f)`` for a band-limited ``f`` given by coefficients."""
    manifold = functionals[0].manifold
    if isinstance(f_coeffs, Mapping):
        f_coeffs = series_from_mapping(manifold, f_coeffs)
    values = [apply_to_series(F, f_coeffs) for F in functionals]
    problem = SplineProblem(manifold, t, tuple(functionals), values, degree, tail_tol)
    return solve_spline(problem, method)


# -- evaluation and norms ------------------------------------------------------------


def evaluate_spline(s: Spline, points):
    """``s(x) = sum_nu alpha_nu E_nu(x)``; returns a float for a single point."""
    p = s.problem
    M = p.manifold
    single = np.ndim(points) == (0 if M.is_circle else 1)
    pts = as_points(M, points)
    if s.solver == "qr":
        out = basis_matrix(M, pts, s.degree) @ s.fourier
        return float(out[0]) if single else out
    Fs = p.functionals
    out = np.zeros(len(pts))
    if s.degree is None:
        for n, F in enumerate(Fs):
            if F.kind == "dirac":
                out += s.alpha[n] * circle_matern_kernel(pts - F.pole, p.smoothness)
            else:
                out += s.alpha[n] * F.zonal_weights(0)[0] / (2 * math.pi)
        return float(out[0]) if single else out
    J = s.degree
    d = _decay(p, J)
    for kind, idx in _zonal_groups(Fs).items():
        w = d * Fs[idx[0]].zonal_weights(J)
        out += s.alpha[idx] @ zonal_kernel(M, w, _poles(Fs, idx), pts)
    arcs = _arc_indices(Fs)
    if arcs:
        A = coefficient_matrix([Fs[n] for n in arcs], J)
        coeffs = d[mode_degrees(M, J)] * (s.alpha[arcs] @ A)
        out += basis_matrix(M, pts, J) @ coeffs
    return float(out[0]) if single else out


def spectral_norm(manifold: Manifold, coeffs: np.ndarray, t: float) -> float:
    """``(sum_n (1 + lambda_n)^t c_n^2)^{1/2}``."""
    coeffs = np.asarray(coeffs, dtype=float)
    J = degree_for_count(manifold, len(coeffs))
    lam = eigenvalues(manifold, mode_degrees(manifold, J))
    return math.sqrt(float(np.sum((1.0 + lam) ** t * coeffs**2)))


def sobolev_norm(s: Spline) -> float:
    """``||s||_t = (sum_nu alpha_nu v_nu)^{1/2}``."""
    if s.norm_sq < -1e-12:
        raise SplineError(f"negative squared norm {s.norm_sq:.3g}: inconsistent solve")
    return math.sqrt(max(s.norm_sq, 0.0))


def sobolev_inner(s: Spline, g_coeffs) -> float:
    """``<s, g>_t = sum_n (1 + lambda_n)^t c_n(s) g_n`` for band-limited ``g``."""
    M = s.problem.manifold
    if isinstance(g_coeffs, Mapping):
        g_coeffs = series_from_mapping(M, g_coeffs)
    g = np.asarray(g_coeffs, dtype=float)
    Jg = degree_for_count(M, len(g))
    if s.degree is not None and Jg > s.degree:
        raise DomainError(f"g has degree {Jg} beyond the spline truncation {s.degree}")
    c = s.fourier_coefficients(Jg)
    lam = eigenvalues(M, mode_degrees(M, Jg))
    return float(np.sum((1.0 + lam) ** s.problem.smoothness * c * g))
