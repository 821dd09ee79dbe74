"""Newton solver, supersolution construction and continuation in ``t``.

The continuation family is ``H_t = (1 - t) H_psi + t H`` where ``H_psi`` is
the mean curvature of the (vertex-smoothed) cone ``psi``: at ``t = 0`` the cone
itself solves the problem, at ``t = 1`` the prescribed constant ``H`` is
reached.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse.linalg as spla
from scipy.integrate import cumulative_simpson
from scipy.interpolate import CubicSpline

from .errors import ConvergenceError, GeometryError, HypothesisError, SandwichViolation
from .fem import assemble_jacobian, flux_vector, load_vector, stiffness_matrix
from .geometry import (ConeSpec, CurveFunction, ProblemConfig, check_hypotheses, cone_height,
                       is_H_cone, surface_mean_curvature)
from .mesh import generate_mesh

log = logging.getLogger(__name__)


@dataclass
class NewtonResult:
    v: np.ndarray
    converged: bool
    iterations: int
    residual_norms: list
    tolerance: float
    message: str = ""
    condition_estimate: float | None = None

    @property
    def residual_norm(self):
        return self.residual_norms[-1]


def _condition_estimate(J, lu=None):
    try:
        lu = lu or spla.splu(J)
        inv = spla.LinearOperator(J.shape, matvec=lu.solve, rmatvec=lambda x: lu.solve(x, trans="T"))
        return float(spla.onenormest(J) * spla.onenormest(inv))
    except (RuntimeError, ValueError):
        return float("inf")


def newton_solve(mesh, initial, H_field, boundary_values, rtol=1e-10, maxiter=50,
                 max_halvings=30, quadrature=3, blowup=1e8):
    """Damped Newton iteration for the discrete Dirichlet problem.

    Boundary values are imposed exactly.  Convergence means
    ``||r||_2 <= rtol * ||load||_2`` on interior nodes (the load norm is
    replaced by the initial flux norm when ``H_field`` vanishes).  Each step
    uses Armijo backtracking on the residual norm, halving the step up to
    ``max_halvings`` times.

    Failure is reported through ``converged=False`` and ``message``; this
    function never raises on nonconvergence.
    """
    I = mesh.interior
    B = mesh.boundary_vertices
    v = np.array(initial, dtype=float, copy=True)
    v[B] = boundary_values
    load = load_vector(mesh, H_field, quadrature)[I]

    def residual(w):
        return load - flux_vector(mesh, w)[I]

    r = residual(v)
    ref = np.linalg.norm(load)
    if ref == 0.0:
        ref = np.linalg.norm(flux_vector(mesh, v)[I]) or 1.0
    tol = rtol * ref
    norms = [float(np.linalg.norm(r))]

    def fail(msg, it, cond=None):
        log.debug("newton failed after %d iterations: %s", it, msg)
        return NewtonResult(v, False, it, norms, tol, msg, cond)

    for it in range(maxiter + 1):
        if norms[-1] <= tol:
            return NewtonResult(v, True, it, norms, tol, "converged")
        if it == maxiter:
            return fail("maximum iterations reached", it)
        J = assemble_jacobian(mesh, v)
        try:
            lu = spla.splu(J)
            delta = lu.solve(-r)
        except RuntimeError:
            return fail("singular Jacobian", it, float("inf"))
        if not np.all(np.isfinite(delta)):
            return fail("singular Jacobian", it, _condition_estimate(J, lu))
        lam = 1.0
        for _ in range(max_halvings + 1):
            trial = v.copy()
            trial[I] += lam * delta
            rt = residual(trial)
            nt = np.linalg.norm(rt)
            if np.isfinite(nt) and nt <= (1.0 - 1e-4 * lam) * norms[-1]:
                break
            lam *= 0.5
        else:
            return fail("line search stagnation", it, _condition_estimate(J, lu))
        v, r = trial, rt
        norms.append(float(nt))
        if np.max(np.abs(v)) > blowup:
            return fail("iterate blow-up", it + 1)
    return fail("maximum iterations reached", maxiter)  # pragma: no cover


def harmonic_extension(mesh, boundary_values):
    """Discrete harmonic field with the given boundary values."""
    K = stiffness_matrix(mesh).tocsr()
    I, B = mesh.interior, mesh.boundary_vertices
    v = np.zeros(mesh.n_vertices)
    v[B] = boundary_values
    if len(I):
        v[I] = spla.spsolve(K[I][:, I].tocsc(), -K[I][:, B] @ v[B])
    return v


@dataclass
class Supersolution:
    psi: np.ndarray
    H_psi: np.ndarray
    smoothed: bool
    rho0: float | None
    cap_radius: float | None
    min_margin: float

    def to_dict(self):
        return {"smoothed": self.smoothed, "rho0": self.rho0, "cap_radius": self.cap_radius,
                "min_margin": self.min_margin, "max_psi": float(np.max(self.psi))}


def _tip_profile(q0, rho0, n=4001):
    """Rotational graph on ``[0, rho0]`` with flux ``q = f'/W`` cubic in ``rho``.

    ``q(rho) = -k0 (3 rho - rho^3/rho0^2) / 2`` with ``k0 = q0/rho0`` gives mean
    curvature ``-(rho q)'/rho = k0 (3 - 2 rho^2/rho0^2)``, equal to ``k0`` with
    zero derivative of ``q`` at ``rho0``.  Returns ``f`` with ``f(rho0) = 0``
    and the curvature function.
    """
    k0 = q0 / rho0
    r = np.linspace(0.0, rho0, n)
    q = -0.5 * k0 * (3.0 * r - r ** 3 / rho0 ** 2)
    fp = q / np.sqrt(1.0 - q * q)
    F = cumulative_simpson(fp, x=r, initial=0.0)
    spline = CubicSpline(r, F - F[-1])
    return spline, lambda rho: k0 * (3.0 - 2.0 * rho ** 2 / rho0 ** 2)


def smooth_supersolution(config, mesh, profile="polynomial"):
    """Nodal cone heights ``psi`` and their mean curvature ``H_psi``.

    If the vertex projects into the domain, the cone tip inside the disk of
    radius ``rho0`` about the projection is replaced by a rotational cap
    matching the cone's value and slope at ``rho0``; ``rho0`` is halved until
    the cap curvature is at least ``H``.

    ``profile="polynomial"`` (default) prescribes the cap curvature
    ``k0 (3 - 2 rho^2/rho0^2)`` with ``k0`` the cone curvature at ``rho0``: the
    glued surface is C^2 and ``H_psi`` continuous.  ``profile="spherical"`` uses
    the tangent spherical cap, whose curvature ``2 k0`` jumps at ``rho0``.

    Caps need a rotationally symmetric cone.  Other cones are kept unsmoothed
    (the tip is a concave kink, which only helps the supersolution
    inequality) and ``H_psi`` is evaluated at ruling parameter at most
    ``1 - rho0/R``.
    """
    cone = config.cone
    if cone.is_cylinder:
        raise GeometryError("smooth_supersolution needs a finite vertex")
    X = mesh.vertices
    psi = cone_height(cone, X)
    th, tau = cone.locate(X)
    tau = np.minimum(tau, 1.0)
    apex = cone.apex
    L = config.L
    d_apex = float(L.signed_distance(apex))
    H_psi = np.empty(mesh.n_vertices)
    ok = tau > 1e-12
    if d_apex <= 0:
        if not np.all(ok):
            raise GeometryError("vertex projection lies on a mesh node outside the smoothing region")
        H_psi[:] = surface_mean_curvature(cone, th, tau)
        return Supersolution(psi, H_psi, False, None, None, float(np.min(H_psi) - config.H))

    g = config.gamma
    rotational = (g.is_circle and np.allclose(g.center, apex, atol=1e-14)
                  and cone.base_height.is_constant)
    if rotational:
        s = (cone.height - cone.base_height.values[0]) / g.radius
        q0 = s / np.sqrt(1.0 + s * s)
        rho0 = 0.5 * d_apex
        for _ in range(60):
            if q0 / rho0 >= config.H:
                break
            rho0 *= 0.5
        else:
            raise GeometryError("no admissible smoothing radius: vertex too blunt relative to H")
        rho = np.linalg.norm(X - apex, axis=1)
        cap = rho < rho0
        top = cone.height - s * rho0
        if profile == "spherical":
            Rc = rho0 / q0
            psi[cap] = top - np.sqrt(Rc * Rc - rho0 * rho0) + np.sqrt(Rc * Rc - rho[cap] ** 2)
            H_cap = np.full(np.count_nonzero(cap), 2.0 / Rc)
        else:
            Rc = None
            f, H_of = _tip_profile(q0, rho0)
            psi[cap] = top + f(rho[cap])
            H_cap = H_of(rho[cap])
        H_psi[~cap] = surface_mean_curvature(cone, th[~cap], tau[~cap])
        H_psi[cap] = H_cap
        return Supersolution(psi, H_psi, True, float(rho0), Rc, float(np.min(H_psi) - config.H))

    rho0 = 0.5 * d_apex
    R = np.linalg.norm(g.point(th) - apex, axis=1)
    tau_c = np.maximum(tau, np.minimum(rho0 / R, 1.0))
    H_psi[:] = surface_mean_curvature(cone, th, tau_c)
    return Supersolution(psi, H_psi, False, float(rho0), None, float(np.min(H_psi) - config.H))


@dataclass
class StepRecord:
    t: float
    dt: float
    iterations: int
    residual_norm: float
    accepted: bool
    message: str = ""

    def to_dict(self):
        return dict(self.__dict__)


@dataclass
class ContinuationState:
    t: float
    v: np.ndarray
    H_t: np.ndarray
    mesh: object
    boundary_values: np.ndarray
    supersolution: Supersolution | None = None
    history: list = field(default_factory=list)

    @property
    def accepted(self):
        return [s for s in self.history if s.accepted]

    def to_dict(self):
        return {"t": self.t, "steps": [s.to_dict() for s in self.history],
                "n_accepted": len(self.accepted)}


def _sandwich(v, lower, upper, tol):
    lo = float(np.min(v - lower))
    hi = float(np.min(upper - v))
    return min(lo, hi) >= -tol, lo, hi


def continuation_solve(config, mesh=None, force=False, dt0=0.25, dt_min=1e-4, grow=1.5,
                       fast_iters=3, sandwich_tol=0.0):
    """Solve the family ``H_t`` from ``t = 0`` (``v = psi``) to ``t = 1``.

    For a cylinder (vertex at infinity) there is no cone supersolution and the
    family is ``H_t = t H`` starting from the minimal-surface solution.

    At every accepted step the nodewise bounds
    ``min(boundary data) <= v <= max(psi)`` are checked.

    Raises
    ------
    HypothesisError
        Hypotheses fail and ``force`` is false.
    ConvergenceError
        The step size dropped below ``dt_min`` before ``t = 1``.
    SandwichViolation
        An accepted step broke the nodewise bounds.
    """
    report = check_hypotheses(config)
    if not report.all_ok and not force:
        raise HypothesisError("hypotheses not satisfied", report)
    mesh = mesh if mesh is not None else generate_mesh(config.L, config.mesh_h)
    tol = config.tolerances
    B = mesh.boundary_vertices
    bv = config.boundary_values(mesh.vertices[B], mesh.boundary_params)

    if config.vertex is not None:
        sup = smooth_supersolution(config, mesh)
        H0, H1 = sup.H_psi, np.full(mesh.n_vertices, config.H)
        start = sup.psi.copy()
        upper = float(np.max(sup.psi))
    else:
        sup = None
        H0, H1 = np.zeros(mesh.n_vertices), np.full(mesh.n_vertices, config.H)
        start = harmonic_extension(mesh, bv)
        upper = np.inf
    lower = float(np.min(bv))

    def H_at(t):
        return (1.0 - t) * H0 + t * H1

    def newton(v, t):
        return newton_solve(mesh, v, H_at(t), bv, rtol=tol.newton_rtol, maxiter=tol.newton_maxiter)

    res = newton(start, 0.0)
    state = ContinuationState(0.0, res.v, H_at(0.0), mesh, bv, sup)
    state.history.append(StepRecord(0.0, 0.0, res.iterations, res.residual_norm, res.converged, res.message))
    if not res.converged:
        raise ConvergenceError(f"no solution at t=0: {res.message}", state, res)

    t, dt = 0.0, dt0
    while t < 1.0:
        t_new = min(1.0, t + dt)
        res = newton(state.v, t_new)
        if res.converged:
            ok, lo, hi = _sandwich(res.v, lower, upper, sandwich_tol)
            state.history.append(StepRecord(t_new, t_new - t, res.iterations, res.residual_norm, True))
            if not ok:
                raise SandwichViolation(
                    f"nodewise bounds violated at t={t_new:g} (lower margin {lo:.3g}, upper margin {hi:.3g})",
                    min(lo, hi))
            t = t_new
            state.t, state.v, state.H_t = t, res.v, H_at(t)
            if res.iterations <= fast_iters:
                dt *= grow
        else:
            state.history.append(StepRecord(t_new, t_new - t, res.iterations, res.residual_norm,
                                            False, res.message))
            dt *= 0.5
            if dt < dt_min:
                raise ConvergenceError(f"step underflow at t={t:g}: {res.message}", state, res)
    return state


def solve_dirichlet(mesh, H, boundary_values, initial=None, rtol=1e-10, maxiter=50):
    """Direct solve of ``Q_H[v] = 0`` with constant ``H``.

    Tries Newton from ``initial`` (default: harmonic extension); on failure
    falls back to continuation ``H_t = t H``.  Raises :class:`ConvergenceError`
    when neither reaches a solution.
    """
    if initial is None:
        initial = harmonic_extension(mesh, boundary_values)
    res = newton_solve(mesh, initial, H, boundary_values, rtol=rtol, maxiter=maxiter)
    if res.converged:
        return res.v
    v = harmonic_extension(mesh, boundary_values)
    res0 = newton_solve(mesh, v, 0.0, boundary_values, rtol=rtol, maxiter=maxiter)
    if not res0.converged:
        raise ConvergenceError(f"minimal surface start failed: {res0.message}", None, res0)
    v, t, dt = res0.v, 0.0, 0.25
    while t < 1.0:
        t_new = min(1.0, t + dt)
        r = newton_solve(mesh, v, t_new * H, boundary_values, rtol=rtol, maxiter=maxiter)
        if r.converged:
            v, t = r.v, t_new
            if r.iterations <= 3:
                dt *= 1.5
        else:
            dt *= 0.5
            if dt < 1e-4:
                raise ConvergenceError(f"H-continuation stalled at H={t * H:g}: {r.message}", None, r)
    return v


@dataclass
class SerrinResult:
    fields: list
    H_values: list
    vertex_heights: list
    differences: list
    max_abs: list
    height_bound: float
    monotone: bool
    height_ok: bool
    warnings: list
    mesh: object

    @property
    def final(self):
        return self.fields[-1]

    @property
    def extrapolated(self):
        """First-order extrapolation in ``1/(k+1)`` of the last two iterates."""
        if len(self.fields) < 2:
            return self.fields[-1]
        N = len(self.fields)
        return (N + 1) * self.fields[-1] - N * self.fields[-2]

    def to_dict(self):
        return {"H_values": self.H_values, "vertex_heights": self.vertex_heights,
                "differences": self.differences, "max_abs": self.max_abs,
                "height_bound": self.height_bound, "monotone": self.monotone,
                "height_ok": self.height_ok, "warnings": self.warnings}


def serrin_limit_solve(L, boundary_values, H, N=6, mesh=None, h=0.05, force=False,
                       tolerances=None):
    """Vertex-at-infinity case through cones with finite vertices.

    For ``k = 1..N`` the constant is ``H_k = k/(k+1) H`` and a vertex above the
    centroid of ``L`` is raised (doubling) until the cone over the boundary
    curve is an ``H_k``-cone; each problem is solved by
    :func:`continuation_solve`.  The reported height bound is
    ``max|phi| + 4/H``.
    """
    phi = boundary_values if isinstance(boundary_values, CurveFunction) else CurveFunction.constant(boundary_values)
    th = np.linspace(0.0, 2 * np.pi, 512, endpoint=False)
    if np.min(L.curvature(th)) < H and not force:
        raise HypothesisError("cylinder over L is not an H-cone (Serrin's condition fails)")
    mesh = mesh if mesh is not None else generate_mesh(L, h)
    from .geometry import Tolerances
    tolerances = tolerances or Tolerances()
    c = L.centroid
    fields, Hs, heights, maxabs, warnings = [], [], [], [], []
    base_top = float(np.max(phi.values))
    for k in range(1, N + 1):
        Hk = k / (k + 1.0) * H
        height = base_top + 1.0
        for _ in range(60):
            cone = ConeSpec(L, (c[0], c[1], height), phi)
            if is_H_cone(cone, Hk, tolerances.n_samples, tolerances.ruling_cutoff).ok:
                break
            height *= 2.0
        else:
            raise ConvergenceError(f"no H_k-cone found for k={k}")
        cfg = ProblemConfig(L, (c[0], c[1], height), L, Hk, "from-cone", mesh.h, tolerances, phi)
        state = continuation_solve(cfg, mesh=mesh, force=force)
        fields.append(state.v)
        Hs.append(Hk)
        heights.append(height)
        maxabs.append(float(np.max(np.abs(state.v))))
    diffs = [float(np.max(np.abs(fields[i] - fields[i - 1]))) for i in range(1, len(fields))]
    monotone = all(b < a for a, b in zip(diffs, diffs[1:]))
    if not monotone:
        warnings.append("consecutive differences are not decreasing")
    bound = float(np.max(np.abs(phi.values)) + 4.0 / H)
    return SerrinResult(fields, Hs, heights, diffs, maxabs, bound,
                        monotone, all(m <= bound for m in maxabs), warnings, mesh)
