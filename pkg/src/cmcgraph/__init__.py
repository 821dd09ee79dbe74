"""Constant mean curvature graphs over planar domains.

Finite element solver for ``div(grad u / sqrt(1 + |grad u|^2)) + H = 0`` with
the cone supersolutions, continuation in ``t``, logarithmic boundary barriers,
the vertex-at-infinity limit and the Perron sandwich, plus analytic oracles.
"""
__version__ = "0.1.0"

from .barriers import (BarrierParams, CollarChart, beta_floor, boundary_gradient_bound,
                       build_collar, choose_barrier_params, delta_interval, verify_lower_barrier, xi)
from .errors import (CMCError, ConfigError, ConvergenceError, GeometryError, HypothesisError,
                     MeshError, PreconditionError, SandwichViolation)
from .fem import assemble_jacobian, assemble_residual
from .geometry import (ConeSpec, CurveFunction, HypothesisReport, PlanarCurve, ProblemConfig,
                       Tolerances, boundary_curvature, check_hypotheses, cone_height,
                       cone_mean_curvature, is_H_cone)
from .mesh import Mesh, generate_mesh
from .perron import build_subsolution, perron_sandwich_check, perron_sweep, scale_problem
from .solver import (continuation_solve, newton_solve, serrin_limit_solve, smooth_supersolution,
                     solve_dirichlet)
from .validation import radial_shoot, run_invariant_suite, spherical_cap

__all__ = [
    "BarrierParams", "CollarChart", "beta_floor", "boundary_gradient_bound", "build_collar",
    "choose_barrier_params", "delta_interval", "verify_lower_barrier", "xi",
    "CMCError", "ConfigError", "ConvergenceError", "GeometryError", "HypothesisError",
    "MeshError", "PreconditionError", "SandwichViolation",
    "assemble_jacobian", "assemble_residual",
    "ConeSpec", "CurveFunction", "HypothesisReport", "PlanarCurve", "ProblemConfig", "Tolerances",
    "boundary_curvature", "check_hypotheses", "cone_height", "cone_mean_curvature", "is_H_cone",
    "Mesh", "generate_mesh",
    "build_subsolution", "perron_sandwich_check", "perron_sweep", "scale_problem",
    "continuation_solve", "newton_solve", "serrin_limit_solve", "smooth_supersolution",
    "solve_dirichlet",
    "radial_shoot", "run_invariant_suite", "spherical_cap",
]
