"""Variational splines on the circle and the 2-sphere."""

from .functionals import (
    Functional,
    arc,
    dirac,
    dirac_family,
    great_circle,
    hemisphere,
    hemisphere_odd,
    total_integral,
    transform_data,
    transform_family,
)
from .harness import (
    ConvergenceSpec,
    TargetFunction,
    multiplier_audit,
    optimality_audit,
    run_convergence_order,
    run_convergence_rho,
    transform_consistency,
)
from .lattices import PointSet, farthest_point_sample, symmetrize, uniform_circle, validate_rho_lattice
from .spectrum import CIRCLE, SPHERE2, DomainError, Manifold, SpectralIndex
from .spline import (
    SingularGramError,
    Spline,
    SplineError,
    SplineProblem,
    SummabilityError,
    evaluate_spline,
    interpolate_function,
    lagrangian_basis,
    solve_spline,
    sobolev_norm,
)

__all__ = [
    "Functional",
    "arc",
    "dirac",
    "dirac_family",
    "great_circle",
    "hemisphere",
    "hemisphere_odd",
    "total_integral",
    "transform_data",
    "transform_family",
    "ConvergenceSpec",
    "TargetFunction",
    "multiplier_audit",
    "optimality_audit",
    "run_convergence_order",
    "run_convergence_rho",
    "transform_consistency",
    "SingularGramError",
    "Spline",
    "SplineError",
    "SplineProblem",
    "SummabilityError",
    "evaluate_spline",
    "interpolate_function",
    "lagrangian_basis",
    "solve_spline",
    "sobolev_norm",
    "PointSet",
    "farthest_point_sample",
    "symmetrize",
    "uniform_circle",
    "validate_rho_lattice",
    "CIRCLE",
    "SPHERE2",
    "DomainError",
    "Manifold",
    "SpectralIndex",
]

__version__ = "0.1.0"
