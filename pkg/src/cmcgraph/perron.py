"""Scaled cone family and the sub/supersolution sandwich for continuous data.

For ``k = 1, 2, ...`` the cone is dilated about the origin by
``lambda_k = 1 + 1/k``.  Dilation divides mean curvature by ``lambda_k``, so
the dilated cone is an ``H_k``-cone for ``H_k = H / lambda_k`` (``mode =
"dilation"``, the default).  ``mode = "literal"`` uses ``H_k = lambda_k H``
instead; the dilated cone then fails the ``H_k``-cone check, which is reported.

Below the supersolution ``psi_k`` sits the downward cone ``chi_k`` over the
trace curve with apex ``V - z0 e``; the solution ``v_k`` of ``Q_{H_k} = 0`` with
data ``phi_k = psi_k|_L`` must lie between them.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, GeometryError, HypothesisError, SandwichViolation
from .fem import assemble_residual
from .geometry import (ConeSpec, CurveFunction, cone_height, is_H_cone,
                       surface_mean_curvature)
from .mesh import generate_mesh
from .solver import newton_solve

TWO_PI = 2.0 * np.pi
Z0_CAP = 2.0 ** 20


def scale_factor(k):
    return 1.0 + 1.0 / k


def scaled_H(H, k, mode="dilation"):
    """``H_k`` for the dilated cone: ``H / (1 + 1/k)`` or literally ``(1 + 1/k) H``."""
    if mode == "dilation":
        return H / scale_factor(k)
    if mode == "literal":
        return H * scale_factor(k)
    raise ValueError("mode must be 'dilation' or 'literal'")


def centered(config):
    """Translate ``config`` so the centroid of the domain of gamma is the origin."""
    c = config.gamma.centroid
    shift = -np.asarray(c, dtype=float)
    vertex = None if config.vertex is None else (config.vertex[0] + shift[0], config.vertex[1] + shift[1], config.vertex[2])
    return config.replace(gamma=config.gamma.transformed(0.0, shift),
                          L=config.L.transformed(0.0, shift), vertex=vertex), shift


@dataclass
class ScaledProblem:
    k: int
    factor: float
    mode: str
    H: float
    H_k: float
    cone: ConeSpec
    config: object
    mesh: object
    psi: np.ndarray
    phi_k: CurveFunction
    boundary_values: np.ndarray
    phi: np.ndarray
    hcone_min: float
    margins: dict
    messages: list = field(default_factory=list)

    @property
    def trace_error(self):
        """``sup |phi_k - phi|`` over the boundary vertices."""
        return float(np.max(np.abs(self.boundary_values - self.phi)))

    @property
    def ok(self):
        return all(m >= 0 for m in self.margins.values())

    def to_dict(self):
        return {"k": self.k, "factor": self.factor, "mode": self.mode, "H_k": self.H_k,
                "hcone_min": self.hcone_min, "trace_error": self.trace_error,
                "margins": self.margins, "ok": self.ok, "messages": self.messages}


def scale_problem(config, k, mesh=None, mode="dilation", force=False):
    """Dilated cone, ``H_k``, supersolution ``psi_k`` and trace ``phi_k`` on ``L``.

    The domain of gamma must contain the origin (see :func:`centered`).
    Invariant failures raise :class:`HypothesisError` unless ``force``.
    """
    if config.vertex is None:
        raise HypothesisError("scaled cones need a finite vertex")
    if not config.gamma.contains(np.zeros(2)):
        raise HypothesisError("domain of gamma does not contain the origin; translate the config first")
    tol = config.tolerances
    lam = scale_factor(k)
    Hk = scaled_H(config.H, k, mode)
    cone = config.cone.scaled(lam)
    mesh = mesh if mesh is not None else generate_mesh(config.L, config.mesh_h)
    hc = is_H_cone(cone, Hk, tol.n_samples, tol.ruling_cutoff)
    th = np.linspace(0.0, TWO_PI, 512, endpoint=False)
    pts = config.L.point(th)
    kL = float(np.min(config.L.curvature(th)))
    margins = {
        "contains_omega": float(np.min(cone.base.signed_distance(pts))),
        "h_cone": hc.min_curvature - Hk,
        "h_L_strict": kL + Hk,
    }
    messages = []
    if margins["h_L_strict"] <= 0:
        messages.append("H_L > -H_k fails")
        margins["h_L_strict"] = min(margins["h_L_strict"], -0.0)
    bad = [name for name, m in margins.items() if m < 0 or (name == "h_L_strict" and m <= 0)]
    if bad and not force:
        raise HypothesisError(f"scaled problem k={k} ({mode}): invariant failure {bad}")
    psi = cone_height(cone, mesh.vertices)
    bidx = mesh.boundary_vertices
    bv = psi[bidx].copy()
    phi = config.boundary_values(mesh.vertices[bidx], mesh.boundary_params)
    phi_k = CurveFunction(cone_height(cone, pts))
    return ScaledProblem(k, lam, mode, config.H, Hk, cone, config, mesh, psi, phi_k,
                         bv, np.asarray(phi, dtype=float), hc.min_curvature,
                         {n: float(m) for n, m in margins.items()}, messages)


@dataclass
class SubsolutionCone:
    z0: float
    apex: np.ndarray
    chi: np.ndarray
    max_curvature: float
    margin: float
    doublings: int
    cone: ConeSpec = field(repr=False)

    def to_dict(self):
        return {"z0": self.z0, "apex": self.apex.tolist(), "max_curvature": self.max_curvature,
                "margin": self.margin, "doublings": self.doublings}


def downward_cone_curvature(cone, n_samples=64, cutoff=0.95):
    """Largest sampled mean curvature (downward normal) of a cone graph."""
    th = np.linspace(0.0, TWO_PI, n_samples, endpoint=False)
    t = np.linspace(0.0, cutoff, max(8, n_samples // 2))
    TH, T = np.meshgrid(th, t, indexing="ij")
    return float(np.max(surface_mean_curvature(cone, TH, 1.0 - T)))


def build_subsolution(scaled, z0_start=None, n_samples=None, cutoff=None):
    """Downward cone through the trace curve with apex ``V - z0 e``.

    ``z0`` starts at ``<V,e>`` and doubles until the sampled mean curvature of
    the cone graph is below ``H_k`` everywhere away from the apex, i.e.
    ``Q_{H_k}[chi_k] > 0``.  Boundary values of ``chi_k`` are set to ``phi_k``
    exactly.
    """
    cfg = scaled.config
    tol = cfg.tolerances
    n_samples = n_samples or tol.n_samples
    cutoff = cutoff if cutoff is not None else tol.ruling_cutoff
    kL = float(np.min(cfg.L.curvature(np.linspace(0.0, TWO_PI, 512, endpoint=False))))
    if not kL + scaled.H_k > 0:
        raise HypothesisError("subsolution needs H_L > -H_k")
    V = np.asarray(cfg.vertex, dtype=float)
    if not cfg.L.contains(V[:2]):
        raise HypothesisError("vertex projection must lie inside the domain enclosed by L")
    height = V[2]
    z0 = float(height if z0_start is None else z0_start)
    cap = Z0_CAP * height
    doublings = 0
    while True:
        apex = np.array([V[0], V[1], height - z0])
        try:
            cone = ConeSpec(cfg.L, apex, scaled.phi_k)
            kmax = downward_cone_curvature(cone, n_samples, cutoff)
        except GeometryError as exc:
            raise HypothesisError(f"subsolution cone: {exc}") from exc
        if kmax < scaled.H_k and apex[2] < np.min(scaled.phi_k.values):
            break
        z0 *= 2.0
        doublings += 1
        if z0 > cap:
            raise HypothesisError(f"z0 search cap reached (last max curvature {kmax:.4g} vs H_k {scaled.H_k:.4g})")
    mesh = scaled.mesh
    chi = cone_height(cone, mesh.vertices)
    chi[mesh.boundary_vertices] = scaled.boundary_values
    return SubsolutionCone(z0, apex, chi, kmax, float(scaled.H_k - kmax), doublings, cone)


@dataclass
class SandwichReport:
    k: int
    chi_le_v: float
    v_le_psi: float
    chi_le_psi: float
    psi_residual_max: float
    chi_residual_min: float
    trace_error: float
    tol: float

    @property
    def ok(self):
        return (self.chi_le_v >= -self.tol and self.v_le_psi >= -self.tol and self.chi_le_psi >= -self.tol
                and self.psi_residual_max <= self.tol and self.chi_residual_min >= -self.tol)

    def to_dict(self):
        d = dict(self.__dict__)
        d["ok"] = self.ok
        return d


def perron_sandwich_check(scaled, sub, v, tol=1e-8, raise_on_fail=False):
    """Nodewise ``chi_k <= v_k <= psi_k`` and discrete residual signs.

    Residuals are the weak ones of :func:`assemble_residual` with constant
    ``H_k``: the supersolution has residual ``<= tol`` and the subsolution
    ``>= -tol`` on every interior node.
    """
    mesh = scaled.mesh
    psi, chi = scaled.psi, sub.chi
    rep = SandwichReport(
        k=scaled.k,
        chi_le_v=float(np.min(v - chi)),
        v_le_psi=float(np.min(psi - v)),
        chi_le_psi=float(np.min(psi - chi)),
        psi_residual_max=float(np.max(assemble_residual(mesh, psi, scaled.H_k))),
        chi_residual_min=float(np.min(assemble_residual(mesh, chi, scaled.H_k))),
        trace_error=scaled.trace_error,
        tol=tol,
    )
    if raise_on_fail and not rep.ok:
        margin = min(rep.chi_le_v, rep.v_le_psi, rep.chi_le_psi)
        raise SandwichViolation(f"Perron sandwich fails at k={scaled.k}", margin)
    return rep


@dataclass
class PerronSweep:
    ks: list
    problems: list
    subsolutions: list
    solutions: list
    reports: list
    trace_errors: list
    differences: list
    shift: np.ndarray
    mesh: object

    @property
    def traces_decreasing(self):
        e = self.trace_errors
        return all(b < a for a, b in zip(e, e[1:]))

    @property
    def differences_decreasing(self):
        d = self.differences
        return all(b < a for a, b in zip(d, d[1:]))

    @property
    def ok(self):
        return all(r.ok for r in self.reports) and self.traces_decreasing

    def to_dict(self):
        return {"ks": self.ks, "shift": self.shift.tolist(),
                "problems": [p.to_dict() for p in self.problems],
                "subsolutions": [s.to_dict() for s in self.subsolutions],
                "sandwich": [r.to_dict() for r in self.reports],
                "trace_errors": self.trace_errors, "differences": self.differences,
                "traces_decreasing": self.traces_decreasing,
                "differences_decreasing": self.differences_decreasing, "ok": self.ok}

    def rows(self):
        """Per-``k`` table rows for CSV export."""
        out = []
        for p, s, r in zip(self.problems, self.subsolutions, self.reports):
            out.append({"k": p.k, "H_k": p.H_k, "trace_error": p.trace_error, "z0": s.z0,
                        "chi_le_v": r.chi_le_v, "v_le_psi": r.v_le_psi,
                        "psi_residual_max": r.psi_residual_max,
                        "chi_residual_min": r.chi_residual_min, "ok": r.ok})
        return out


def perron_sweep(config, ks=(1, 2, 4, 8), mesh=None, mode="dilation", tol=1e-8, force=False):
    """Run the scaled problems for each ``k`` and verify every sandwich.

    The config is first translated so the centroid of the domain of gamma is
    the origin.  ``v_k`` is obtained by Newton from ``psi_k``.
    """
    cfg, shift = centered(config)
    mesh = mesh if mesh is not None else generate_mesh(cfg.L, cfg.mesh_h)
    problems, subs, sols, reports = [], [], [], []
    for k in ks:
        sp = scale_problem(cfg, k, mesh, mode, force)
        sub = build_subsolution(sp)
        res = newton_solve(mesh, sp.psi, sp.H_k, sp.boundary_values,
                           rtol=cfg.tolerances.newton_rtol, maxiter=cfg.tolerances.newton_maxiter)
        if not res.converged:
            raise ConvergenceError(f"Dirichlet solve failed at k={k}: {res.message}", None, res)
        problems.append(sp)
        subs.append(sub)
        sols.append(res.v)
        reports.append(perron_sandwich_check(sp, sub, res.v, tol))
    diffs = [float(np.max(np.abs(a - b))) for a, b in zip(sols, sols[1:])]
    return PerronSweep(list(ks), problems, subs, sols, reports,
                       [p.trace_error for p in problems], diffs, shift, mesh)
