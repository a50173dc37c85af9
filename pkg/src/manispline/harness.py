"""Experiments: convergence in density and in smoothness order, optimality,
multiplier and transform audits."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .functionals import (
    Functional,
    apply_by_quadrature,
    apply_to_series,
    coefficient_matrix,
    dirac_family,
    great_circle,
    hemisphere,
    hemisphere_weights,
    great_circle_weights,
    hemispherical_multiplier,
    radon_multiplier,
    antipodal_representatives,
    transform_family,
)
from .lattices import PointSet, farthest_point_sample, symmetrize, uniform_circle
from .spectrum import (
    SPHERE2,
    DomainError,
    Manifold,
    SpectralIndex,
    as_points,
    basis_matrix,
    degree_for_count,
    eigenvalues,
    mode_count,
    mode_degrees,
    mode_index,
    quadrature_rule,
)
from .spline import (
    Spline,
    SplineError,
    SplineProblem,
    evaluate_spline,
    lagrangian_basis,
    solve_spline,
)

__all__ = [
    "TargetFunction",
    "ConvergenceSpec",
    "ConvergenceRow",
    "ConvergenceTable",
    "AuditEntry",
    "AuditReport",
    "schedule_order",
    "build_family",
    "run_convergence_rho",
    "run_convergence_order",
    "optimality_audit",
    "multiplier_audit",
    "transform_consistency",
    "random_coefficients",
]

FLAG_COND = 1e12
CONVERGENCE_HEADER = "# manispline convergence v1"
DECREASE_MARGIN = 1e-9

NAMED_FUNCTIONS: dict[tuple[str, str], Callable[[np.ndarray], np.ndarray]] = {
    ("circle", "exp_cos"): lambda th: np.exp(np.cos(th)),
    ("sphere2", "exp_z"): lambda x: np.exp(x[:, 2]),
    ("sphere2", "sinh_z"): lambda x: np.sinh(x[:, 2]),
    ("sphere2", "cosh_z"): lambda x: np.cosh(x[:, 2]),
}


# -- targets ------------------------------------------------------------------------


def random_coefficients(
    manifold: Manifold,
    degrees: Sequence[int],
    seed: int,
    max_degree: int | None = None,
) -> np.ndarray:
    """Standard normal coefficients on the listed degrees, zero elsewhere."""
    J = max(degrees) if max_degree is None else max_degree
    rng = np.random.default_rng(seed)
    out = np.zeros(mode_count(manifold, J))
    mask = np.isin(mode_degrees(manifold, J), list(degrees))
    out[mask] = rng.standard_normal(int(mask.sum()))
    return out


@dataclass(frozen=True)
class TargetFunction:
    """Either band-limited (flat ``coeffs``) or a named smooth function."""

    manifold: Manifold
    name: str
    coeffs: np.ndarray | None = None

    @classmethod
    def band_limited(cls, manifold: Manifold, coeffs, name: str = "band_limited"):
        c = np.asarray(coeffs, dtype=float)
        degree_for_count(manifold, len(c))
        return cls(manifold, name, c)

    @classmethod
    def named(cls, manifold: Manifold, name: str):
        if (manifold.kind, name) not in NAMED_FUNCTIONS:
            raise ValueError(f"no function {name!r} on {manifold.kind}")
        return cls(manifold, name)

    @classmethod
    def eigenfunction(cls, manifold: Manifold, index: SpectralIndex):
        c = np.zeros(mode_count(manifold, index.degree))
        c[mode_index(manifold, index)] = 1.0
        return cls(manifold, f"phi_{index.degree}_{index.order}", c)

    @property
    def band(self) -> int | None:
        return None if self.coeffs is None else degree_for_count(self.manifold, len(self.coeffs))

    def __call__(self, points) -> np.ndarray:
        pts = as_points(self.manifold, points)
        if self.coeffs is None:
            return NAMED_FUNCTIONS[(self.manifold.kind, self.name)](pts)
        return basis_matrix(self.manifold, pts, self.band) @ self.coeffs

    def functional_value(self, F: Functional, quad_degree: int = 96) -> float:
        if self.coeffs is not None:
            return apply_to_series(F, self.coeffs)
        return apply_by_quadrature(F, self, quad_degree).value


# -- families and error norms --------------------------------------------------------


def schedule_order(manifold: Manifold, t_base: float, m: int) -> float:
    """Smoothness ``2^m d + t`` of the convergence schedule."""
    return 2**m * manifold.dim + t_base


def build_family(manifold: Manifold, family: str, points) -> list[Functional]:
    if family == "dirac":
        return dirac_family(manifold, points)
    if manifold.is_circle:
        raise ValueError(f"{family} family needs the sphere")
    return transform_family(family, points)


def _tangent_frame(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    helper = np.where(np.abs(x[:, 2:3]) < 0.9, [[0.0, 0.0, 1.0]], [[1.0, 0.0, 0.0]])
    u = helper - np.sum(helper * x, axis=1, keepdims=True) * x
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    return u, np.cross(x, u)


# fourth-order central stencils
_D1 = ((-2, 1 / 12), (-1, -8 / 12), (1, 8 / 12), (2, -1 / 12))
_D2 = ((-2, -1 / 12), (-1, 16 / 12), (0, -30 / 12), (1, 16 / 12), (2, -1 / 12))


@dataclass
class _EvalGrid:
    manifold: Manifold
    nodes: np.ndarray
    weights: np.ndarray
    fd_step: float


def _eval_grid(manifold: Manifold, resolution: int) -> _EvalGrid:
    if manifold.is_circle:
        nodes = 2 * np.pi * np.arange(resolution) / resolution
        return _EvalGrid(manifold, nodes, np.full(resolution, 2 * np.pi / resolution), 2 * np.pi / resolution)
    rule = quadrature_rule(manifold, resolution)
    return _EvalGrid(manifold, rule.nodes, rule.weights, 1e-2)


def _error_norms(grid: _EvalGrid, err_fn: Callable, norms: Sequence[str]) -> dict[str, float]:
    e = err_fn(grid.nodes)
    out = {
        "L2": math.sqrt(float(np.dot(grid.weights, e * e))),
        "Linf": float(np.max(np.abs(e))),
    }
    need_c = [k for k in norms if k in ("C1", "C2")]
    if not need_c:
        return out
    h = grid.fd_step
    if grid.manifold.is_circle:
        # error is sampled on a uniform periodic grid: differentiate by rolling
        d1 = sum(w * np.roll(e, -s) for s, w in _D1) / h
        d2 = sum(w * np.roll(e, -s) for s, w in _D2) / h**2
        c1 = max(out["Linf"], float(np.max(np.abs(d1))))
        c2 = max(c1, float(np.max(np.abs(d2))))
    else:
        x = grid.nodes
        u, w = _tangent_frame(x)
        dirs = [u, w, (u + w) / math.sqrt(2), (u - w) / math.sqrt(2)]
        c1 = out["Linf"]
        c2 = c1
        for k, v in enumerate(dirs):
            samples = {s: err_fn(np.cos(s * h) * x + np.sin(s * h) * v) for s in (-2, -1, 1, 2)}
            samples[0] = e
            if k < 2:
                c1 = max(c1, float(np.max(np.abs(sum(wt * samples[s] for s, wt in _D1) / h))))
            c2 = max(c2, float(np.max(np.abs(sum(wt * samples[s] for s, wt in _D2) / h**2))))
        c2 = max(c2, c1)
    if "C1" in norms:
        out["C1"] = c1
    if "C2" in norms:
        out["C2"] = c2
    return out


def _parity_leak(s: Spline, family: str) -> float | None:
    if family == "dirac":
        return None
    c = s.fourier
    deg = mode_degrees(s.problem.manifold, s.degree)
    bad = deg % 2 == (0 if family == "hemisphere" else 1)
    return float(np.max(np.abs(c[bad]))) if bad.any() else 0.0


# -- convergence tables ------------------------------------------------------------------


@dataclass(frozen=True)
class ConvergenceSpec:
    """Configuration of a convergence study.

    ``mode='refine_density'`` builds one lattice per entry of ``sizes`` and
    uses the order ``2^m d + t_base`` with ``m = schedule_m``.
    ``mode='raise_order'`` keeps ``points`` fixed and runs every ``m`` in
    ``orders``; it requires a band-limited target.
    """

    manifold: Manifold
    family: str
    target: TargetFunction
    t_base: float
    mode: str
    sizes: tuple[int, ...] = ()
    orders: tuple[int, ...] = ()
    points: PointSet | None = None
    schedule_m: int = 0
    lattice: str = "uniform"
    error_norms: tuple[str, ...] = ("L2", "Linf")
    degree: int | None = None
    tail_tol: float | None = None
    eval_resolution: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("refine_density", "raise_order"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.family not in ("dirac", "hemisphere", "great_circle"):
            raise ValueError(f"unknown family {self.family!r}")
        if self.mode == "raise_order":
            if self.target.coeffs is None:
                raise ValueError("raise_order needs a band-limited target")
            if self.points is None or not self.orders:
                raise ValueError("raise_order needs points and orders")
        elif not self.sizes:
            raise ValueError("refine_density needs sizes")
        bad = set(self.error_norms) - {"L2", "Linf", "C1", "C2"}
        if bad:
            raise ValueError(f"unknown error norms {sorted(bad)}")


@dataclass(frozen=True)
class ConvergenceRow:
    key: int
    rho_param: float
    smoothness: float
    degree: int | None
    condition_estimate: float
    errors: dict[str, float]
    flagged: bool
    parity_leak: float | None = None
    note: str = ""


@dataclass(frozen=True)
class ConvergenceTable:
    mode: str
    rows: tuple[ConvergenceRow, ...]
    slope: float | None
    monotone_decrease: bool
    density_guard: bool | None
    error_norms: tuple[str, ...]
    family: str

    def to_csv(self) -> str:
        key = "N" if self.mode == "refine_density" else "m"
        cols = [key, "rho_param", "J", "condition_estimate"] + [f"err_{n}" for n in self.error_norms]
        if self.family != "dirac":
            cols.append("parity_leak")
        lines = [CONVERGENCE_HEADER, ",".join(cols)]
        for r in self.rows:
            vals = [str(r.key), _fmt(r.rho_param), "" if r.degree is None else str(r.degree)]
            vals.append(_fmt(r.condition_estimate))
            vals += [_fmt(r.errors.get(n, math.nan)) for n in self.error_norms]
            if self.family != "dirac":
                vals.append(_fmt(r.parity_leak))
            lines.append(",".join(vals))
        flagged = [str(r.key) for r in self.rows if r.flagged]
        lines.append(
            f"# slope={_fmt(self.slope)} monotone_decrease={str(self.monotone_decrease).lower()}"
            f" density_guard={_fmt_bool(self.density_guard)} flagged={';'.join(flagged)}"
        )
        return "\n".join(lines) + "\n"


def _fmt(x) -> str:
    if x is None:
        return ""
    return repr(float(x))


def _fmt_bool(b) -> str:
    return "na" if b is None else str(b).lower()


def _solve_row(spec: ConvergenceSpec, key: int, ps: PointSet, t: float, grid: _EvalGrid) -> ConvergenceRow:
    M = spec.manifold
    try:
        family = build_family(M, spec.family, ps.points)
        values = [spec.target.functional_value(F) for F in family]
        problem = SplineProblem(M, t, tuple(family), values, spec.degree, spec.tail_tol)
        s = solve_spline(problem)
    except SplineError as exc:
        nan = {n: math.nan for n in spec.error_norms}
        return ConvergenceRow(key, ps.rho_param, t, None, math.inf, nan, True, None, str(exc))
    errs = _error_norms(grid, lambda x: evaluate_spline(s, x) - spec.target(x), spec.error_norms)
    cond = s.gram.condition_estimate
    return ConvergenceRow(
        key, ps.rho_param, t, s.degree, cond, errs, not cond <= FLAG_COND, _parity_leak(s, spec.family)
    )


def _strictly_decreasing(errors: Sequence[float]) -> bool:
    return all(b < a * (1 - DECREASE_MARGIN) for a, b in zip(errors, errors[1:]))


def _lattice(spec: ConvergenceSpec, n: int) -> PointSet:
    M = spec.manifold
    if M.is_circle and spec.lattice == "uniform":
        ps = uniform_circle(n)
    else:
        ps = farthest_point_sample(M, n, spec.seed)
    if spec.family != "dirac":
        ps = symmetrize(ps)
    return ps


def _default_resolution(spec: ConvergenceSpec) -> int:
    if spec.eval_resolution is not None:
        return spec.eval_resolution
    return 2048 if spec.manifold.is_circle else 64


def _map_rows(fn, items, threads: int):
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(i) for i in items]


def run_convergence_rho(spec: ConvergenceSpec, threads: int = 1) -> ConvergenceTable:
    """Error of the spline interpolant as the lattice is refined."""
    if spec.mode != "refine_density":
        raise ValueError("spec mode must be refine_density")
    grid = _eval_grid(spec.manifold, _default_resolution(spec))
    t = schedule_order(spec.manifold, spec.t_base, spec.schedule_m)

    def row(n):
        return _solve_row(spec, n, _lattice(spec, n), t, grid)

    rows = tuple(_map_rows(row, spec.sizes, threads))
    fit = [r for r in rows if not r.flagged and r.errors["Linf"] > 0]
    slope = None
    if len(fit) >= 2:
        x = np.log([r.rho_param for r in fit])
        y = np.log([r.errors["Linf"] for r in fit])
        slope = float(np.polyfit(x, y, 1)[0])
    linf = [r.errors["Linf"] for r in rows]
    return ConvergenceTable(
        spec.mode, rows, slope, _strictly_decreasing(linf), None, spec.error_norms, spec.family
    )


def run_convergence_order(spec: ConvergenceSpec, threads: int = 1) -> ConvergenceTable:
    """Error on a fixed lattice as the order ``2^m d + t`` grows."""
    if spec.mode != "raise_order":
        raise ValueError("spec mode must be raise_order")
    grid = _eval_grid(spec.manifold, _default_resolution(spec))
    ps = spec.points

    def row(m):
        return _solve_row(spec, m, ps, schedule_order(spec.manifold, spec.t_base, m), grid)

    rows = tuple(_map_rows(row, spec.orders, threads))
    linf = [r.errors["Linf"] for r in rows]
    guard = None
    by_m = {r.key: r.errors["Linf"] for r in rows}
    if 0 in by_m and 1 in by_m:
        guard = bool(by_m[1] < by_m[0])
    return ConvergenceTable(
        spec.mode, rows, None, _strictly_decreasing(linf), guard, spec.error_norms, spec.family
    )


# -- audits ------------------------------------------------------------------------------


@dataclass(frozen=True)
class AuditEntry:
    check_id: str
    measured: float
    bound: float

    @property
    def passed(self) -> bool:
        return bool(self.measured <= self.bound)

    def to_dict(self) -> dict:
        bound = None if math.isinf(self.bound) else self.bound
        return {"check_id": self.check_id, "measured": self.measured, "bound": bound, "pass": self.passed}


@dataclass
class AuditReport:
    kind: str
    entries: list[AuditEntry] = field(default_factory=list)
    info: dict = field(default_factory=dict)

    def add(self, check_id: str, measured: float, bound: float = math.inf) -> None:
        self.entries.append(AuditEntry(check_id, float(measured), float(bound)))

    @property
    def all_passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def __getitem__(self, check_id: str) -> AuditEntry:
        for e in self.entries:
            if e.check_id == check_id:
                return e
        raise KeyError(check_id)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "all_pass": self.all_passed,
            "entries": [e.to_dict() for e in self.entries],
            "info": self.info,
        }


def _ratio(num: float, den: float) -> float:
    return num / den if den > 0 else (0.0 if num == 0 else math.inf)


def optimality_audit(
    problem: SplineProblem,
    trials: int = 32,
    seed: int = 0,
    band: int | None = None,
    scale: float = 1.0,
    tol: float = 1e-8,
    norm_tol: float = 1e-10,
) -> AuditReport:
    """Check the extremal identities of the spline on random perturbations.

    For random band-limited ``g`` the perturbation
    ``h = g - sum_nu F_nu(g) l^nu`` satisfies ``F_nu(h) = 0``; the spline must
    be ``H_t``-orthogonal to it, ``||s + h||^2 = ||s||^2 + ||h||^2``, and ``s``
    is the midpoint of ``s +- h``.

    Truncated problems work on Fourier coefficients. Closed-form problems
    represent every function as ``sum_mu a_mu E_mu + g`` and use the Gram
    matrix for kernel-kernel products and ``F_mu(g)`` for kernel-g products.
    """
    M, t = problem.manifold, problem.smoothness
    s = solve_spline(problem)
    J = s.degree
    Jg = band if band is not None else (8 if J is None else min(J, 8))
    if J is not None and Jg > J:
        raise DomainError("perturbation band exceeds truncation degree")
    lag = lagrangian_basis(
        M, problem.functionals, t, problem.degree, problem.tail_tol, problem.closed_form
    )
    lam_g = (1.0 + eigenvalues(M, mode_degrees(M, Jg))) ** t
    A_g = coefficient_matrix(problem.functionals, Jg)
    n_g = mode_count(M, Jg)

    if J is not None:
        A = coefficient_matrix(problem.functionals, J)
        L = np.array([l.fourier for l in lag])
        lam = (1.0 + eigenvalues(M, mode_degrees(M, J))) ** t
        sc = s.fourier

        def perturb(g):
            gj = np.zeros(len(sc))
            gj[:n_g] = g
            h = gj - (A_g @ g) @ L
            return h, A @ h

        def ip(a, b):
            return float(np.sum(lam * a * b))

        def combine(x, y, cx=1.0, cy=1.0):
            return cx * x + cy * y

        s_vec = sc
    else:
        beta = s.gram.matrix
        Lalpha = np.array([l.alpha for l in lag])

        # a function is a pair (kernel weights, band-limited coefficients)
        def perturb(g):
            b = -(A_g @ g) @ Lalpha
            return (b, g), beta @ b + A_g @ g

        def ip(x, y):
            (a, g), (b, k) = x, y
            return float(a @ beta @ b + a @ (A_g @ k) + b @ (A_g @ g) + np.sum(lam_g * g * k))

        def combine(x, y, cx=1.0, cy=1.0):
            return (cx * x[0] + cy * y[0], cx * x[1] + cy * y[1])

        s_vec = (s.alpha, np.zeros(n_g))

    rng = np.random.default_rng(seed)
    worst = {"orthogonality": 0.0, "pythagoras": 0.0, "constraints": 0.0, "midpoint": 0.0}
    K = 0.0
    s_sq = ip(s_vec, s_vec)
    for _ in range(trials):
        g = scale * rng.standard_normal(n_g)
        Fg = A_g @ g
        h, Fh = perturb(g)
        h_sq = ip(h, h)
        plus, minus = combine(s_vec, h), combine(s_vec, h, 1.0, -1.0)
        plus_sq, minus_sq = ip(plus, plus), ip(minus, minus)
        K = max(K, math.sqrt(max(plus_sq, 0.0)), math.sqrt(max(minus_sq, 0.0)))
        worst["orthogonality"] = max(
            worst["orthogonality"], _ratio(abs(ip(s_vec, h)), math.sqrt(max(s_sq, 0.0) * h_sq))
        )
        worst["pythagoras"] = max(
            worst["pythagoras"], _ratio(abs(plus_sq - s_sq - h_sq), s_sq + h_sq)
        )
        worst["constraints"] = max(
            worst["constraints"], float(np.max(np.abs(Fh))) / (1.0 + float(np.max(np.abs(Fg))))
        )
        d_lo = combine(s_vec, plus, 1.0, -1.0)
        d_hi = combine(plus, minus, 0.5, -0.5)
        lhs = math.sqrt(max(ip(d_lo, d_lo), 0.0))
        rhs = math.sqrt(max(ip(d_hi, d_hi), 0.0))
        worst["midpoint"] = max(worst["midpoint"], _ratio(abs(lhs - rhs), math.sqrt(h_sq)))

    report = AuditReport("optimality")
    v = problem.v
    report.add("residual", s.residual_max / (1.0 + float(np.max(np.abs(v)))), tol)
    report.add("norm_identity", abs(s_sq - float(s.alpha @ v)) / (1.0 + abs(s_sq)), norm_tol)
    for name in ("orthogonality", "pythagoras", "constraints", "midpoint"):
        report.add(name, worst[name], tol)
    report.add("sobolev_norm_sq", s.norm_sq)
    report.add("K", K)
    report.info = {
        "trials": trials,
        "seed": seed,
        "perturbation_band": Jg,
        "truncation_degree": J,
        "solver": s.solver,
        "condition_estimate": s.gram.condition_estimate,
    }
    return report


def multiplier_audit(max_degree: int = 12, d: int = 2, quad_degree: int | None = None) -> AuditReport:
    """Compare Funk-Hecke coefficients of hemisphere and great-circle integrals
    with quadrature and with the closed-form transform multipliers."""
    if d != 2:
        raise DomainError("coefficients are implemented for the 2-sphere only")
    if not 1 <= max_degree <= 24:
        raise DomainError("multiplier audit covers degrees 1..24")
    J = max_degree
    qdeg = quad_degree or 2 * J + 8
    pole = np.array([0.0, 0.0, 1.0])
    hemi = hemisphere_weights(J)
    circ = great_circle_weights(J)
    report = AuditReport("multiplier")
    hemi_dev, radon_ratios, q_dev = 0.0, [], 0.0
    for j in range(J + 1):
        zonal = SpectralIndex(j, j + 1)
        flat = mode_index(SPHERE2, zonal)

        def f(x, j=j, flat=flat):
            return basis_matrix(SPHERE2, x, j)[:, flat]

        y_pole = math.sqrt((2 * j + 1) / (4 * math.pi))
        for weight, F in ((hemi[j], hemisphere(pole)), (circ[j], great_circle(pole))):
            quad = apply_by_quadrature(F, f, qdeg).value
            q_dev = max(q_dev, abs(weight * y_pole - quad) / max(1.0, abs(weight * y_pole)))
        if j % 2 == 1:
            closed = math.sqrt(math.pi) ** (d - 1) * hemispherical_multiplier(d, j)
            hemi_dev = max(hemi_dev, abs(hemi[j] / closed - 1.0))
            report.add(f"hemisphere_ratio[j={j}]", abs(hemi[j] / closed - 1.0), 1e-10)
        else:
            closed = math.gamma((d + 1) / 2) / math.sqrt(math.pi) * radon_multiplier(d, j)
            radon_ratios.append(circ[j] / closed)
    target = 4 * math.sqrt(math.pi)
    ratios = np.array(radon_ratios)
    report.add("hemisphere_ratio_max_dev", hemi_dev, 1e-10)
    report.add("radon_ratio_spread", float(ratios.max() - ratios.min()), 1e-9)
    report.add("radon_ratio_vs_4sqrtpi", float(np.max(np.abs(ratios - target))) / target, 1e-9)
    report.add("quadrature_max_rel_dev", q_dev, 1e-6)
    report.info = {
        "max_degree": J,
        "radon_ratio_mean": float(ratios.mean()),
        "hemisphere_weights": hemi.tolist(),
        "great_circle_weights": circ.tolist(),
    }
    return report


def transform_consistency(
    f_coeffs,
    points,
    t: float,
    degree: int,
    grid_resolution: int = 48,
) -> AuditReport:
    """Hemisphere-data spline versus Dirac interpolation of ``Tf`` on the dual sphere.

    ``points`` must satisfy ``Xi = -Xi``. Agreement of ``(T s)(xi)`` with
    ``(Tf)(xi)`` is exact by construction; the grid discrepancy between
    ``T s`` and the dual Dirac spline of order ``t + 3/2`` is reported as a
    diagnostic only.
    """
    pts = as_points(SPHERE2, points)
    antipodal_representatives(SPHERE2, pts)  # raises on asymmetric sets
    f = np.asarray(f_coeffs, dtype=float)
    Jf = degree_for_count(SPHERE2, len(f))
    if Jf > degree:
        raise DomainError("target degree exceeds truncation degree")
    report = AuditReport("transform")
    deg_f = mode_degrees(SPHERE2, Jf)
    report.add("input_even_coefficients", float(np.max(np.abs(f[deg_f % 2 == 0]), initial=0.0)), 1e-12)

    family = transform_family("hemisphere", pts)
    values = [apply_to_series(F, f) for F in family]
    s = solve_spline(SplineProblem(SPHERE2, t, tuple(family), values, degree))
    deg = mode_degrees(SPHERE2, degree)
    report.add("spline_even_coefficients", float(np.max(np.abs(s.fourier[deg % 2 == 0]))), 1e-10)

    full = [hemisphere(p) for p in pts]
    Tf = np.array([apply_to_series(F, f) for F in full])
    Ts = np.array([apply_to_series(F, s.fourier) for F in full])
    report.add("interpolation_Ts_vs_Tf", float(np.max(np.abs(Ts - Tf))) / (1.0 + float(np.max(np.abs(Tf)))), 1e-8)

    quad = np.array(
        [apply_by_quadrature(F, lambda x: basis_matrix(SPHERE2, x, Jf) @ f, 2 * Jf + 8).value for F in full]
    )
    report.add("Tf_quadrature", float(np.max(np.abs(quad - Tf))) / (1.0 + float(np.max(np.abs(Tf)))), 1e-8)

    tau = t + 1.5
    dual = solve_spline(SplineProblem(SPHERE2, tau, tuple(dirac_family(SPHERE2, pts)), Tf, degree))
    grid = quadrature_rule(SPHERE2, grid_resolution).nodes
    Ts_grid = basis_matrix(SPHERE2, grid, degree) @ (hemisphere_weights(degree)[deg] * s.fourier)
    discrepancy = float(np.max(np.abs(Ts_grid - evaluate_spline(dual, grid))))
    report.add("dual_spline_discrepancy", discrepancy)
    report.info = {
        "n_points": len(pts),
        "n_functionals": len(family),
        "tau": tau,
        "truncation_degree": degree,
    }
    return report
