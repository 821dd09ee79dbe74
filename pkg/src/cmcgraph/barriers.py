"""Collar chart near the boundary curve and the logarithmic lower barrier.

In the collar ``{x = y + s eta(y) : y in L, 0 <= s <= epsilon}`` the barrier is

    w(x) = xi(d(x)) + phi(x),    xi(s) = delta * log(1 + beta * s)

with ``d`` the distance to ``L`` and ``phi`` the boundary data extended
constantly along inward normals.  ``w`` is verified to be a subsolution by
evaluating the full operator ``A^{3/2} Q_t[w]`` with finite differences of
``w`` on a (parameter x distance) grid.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import GeometryError, PreconditionError
from .fem import gradient_norms

TWO_PI = 2.0 * np.pi


class CollarChart:
    """Tubular-neighbourhood data of ``L`` on the side of its enclosed domain.

    Parameters
    ----------
    L : PlanarCurve
    phi : CurveFunction
        Boundary data as a function of the parameter of ``L``.
    epsilon : float
        Collar width.
    grid : (int, int)
        Tensor sample grid (curve parameter, distance) used for the norms.
    """

    def __init__(self, L, phi, epsilon, grid=(256, 64)):
        self.L = L
        self.phi = phi
        self.epsilon = float(epsilon)
        self.grid = tuple(grid)
        X, th, s = self.grid_points(grid[0], grid[1], self.epsilon)
        g = self.grad_extension(X.reshape(-1, 2))
        gnorm = np.linalg.norm(g, axis=-1)
        hess = _fd_hessian(self.extension, X.reshape(-1, 2), 1e-4)
        hnorm = np.max(np.abs(np.linalg.eigvalsh(hess)), axis=-1)
        vals = np.abs(self.phi(th.ravel()))
        self.grad_max = float(np.max(gnorm))
        self.B_max = 1.0 + self.grad_max ** 2
        self.phi_c2 = float(np.max(vals + gnorm + hnorm))

    @property
    def boundary_curvature_min(self):
        th = np.linspace(0.0, TWO_PI, 1024, endpoint=False)
        return float(np.min(self.L.curvature(th)))

    def grid_points(self, n_theta, n_s, s_max):
        th = np.linspace(0.0, TWO_PI, n_theta, endpoint=False)
        s = np.linspace(0.0, s_max, n_s)
        TH, S = np.meshgrid(th, s, indexing="ij")
        X = self.L.point(TH) + S[..., None] * self.L.inward_normal(TH)
        return X, TH, S

    def query(self, x):
        """``(theta, foot, s, in_collar)`` for plane points ``x``.

        ``s`` is the signed normal offset from the foot point (the distance to
        ``L`` inside the collar).
        """
        th, foot, s = self.L.project(x)
        inside = (s >= -1e-12) & (s <= self.epsilon)
        return th, foot, s, inside

    def distance(self, x):
        return self.L.project(x)[2]

    def parallel_curvature(self, theta, s):
        """Curvature ``H^s`` of the parallel curve at inward distance ``s``."""
        k = self.L.curvature(theta)
        return k / (1.0 - s * k)

    def extension(self, x):
        """Boundary data extended constantly along normals."""
        th = self.L.project(x)[0]
        return self.phi(th)

    def grad_extension(self, x):
        th, _, s = self.L.project(x)
        d1 = self.L.derivative(th, 1)
        sp = np.linalg.norm(d1, axis=-1)
        k = self.L.curvature(th)
        scale = self.phi(th, 1) / (sp * (1.0 - s * k))
        return (scale / sp)[..., None] * d1

    def B(self, x):
        g = self.grad_extension(x)
        return 1.0 + np.sum(g * g, axis=-1)


def build_collar(L, phi, epsilon=None, grid=(256, 64)):
    """Collar chart of ``L`` carrying the boundary data ``phi``.

    The default width is half the smallest radius of curvature of ``L``,
    reduced (halving) until the inward normal map is injective on the
    samples.  An explicit ``epsilon`` that fails these bounds raises.
    """
    kmax = L.max_abs_curvature
    requested = epsilon is not None
    eps = 0.5 / kmax if epsilon is None else float(epsilon)
    if requested and eps * kmax >= 1.0:
        raise GeometryError("collar width underflow: epsilon exceeds the curvature radius of L")
    th = np.linspace(0.0, TWO_PI, 512, endpoint=False)
    for _ in range(30):
        q = L.point(th) + eps * L.inward_normal(th)
        back = L.project(q)[0]
        err = np.abs(np.angle(np.exp(1j * (back - th))))
        if np.max(err) < 1e-6:
            break
        if requested:
            raise GeometryError("collar width underflow: normal map is not injective at epsilon")
        eps *= 0.5
    else:
        raise GeometryError("collar width underflow")
    return CollarChart(L, phi, eps, grid)


@dataclass(frozen=True)
class BarrierParams:
    delta: float
    beta: float
    epsilon1: float

    def __post_init__(self):
        if not (self.delta < 0 and self.beta > 0 and self.epsilon1 > 0):
            raise ValueError("barrier parameters need delta < 0, beta > 0, epsilon1 > 0")

    def to_dict(self):
        return dict(self.__dict__)


def xi(s, params):
    """``xi(s) = delta log(1 + beta s)`` with its first two derivatives."""
    s = np.asarray(s, dtype=float)
    d, b = params.delta, params.beta
    val = d * np.log1p(b * s)
    xs = d * b / (1.0 + b * s)
    return val, xs, -xs * xs / d


def delta_interval(B_max, phi_c2):
    """Admissible ``delta`` solving ``B/delta + |phi|_2 < 0`` with ``delta < 0``."""
    if phi_c2 <= 0:
        return -np.inf, 0.0
    return -B_max / phi_c2, 0.0


def default_delta(B_max, phi_c2):
    lo, hi = delta_interval(B_max, phi_c2)
    return -1.0 if not np.isfinite(lo) else 0.5 * (lo + hi)


def beta_floor(delta, vertex_height, epsilon1):
    """Smallest ``beta`` with ``delta log(1 + epsilon1 beta) + <V,e> <= 0``."""
    return float(np.expm1(-vertex_height / delta) / epsilon1)


def _fd_derivatives(f, X, step):
    ex = np.array([step, 0.0])
    ey = np.array([0.0, step])
    g = np.stack([f(X + ex) - f(X - ex), f(X + ey) - f(X - ey)], axis=-1) / (2 * step)
    return g, _fd_hessian(f, X, step)


def _fd_hessian(f, X, step):
    ex = np.array([step, 0.0])
    ey = np.array([0.0, step])
    f0 = f(X)
    fxx = (f(X + ex) - 2 * f0 + f(X - ex)) / step ** 2
    fyy = (f(X + ey) - 2 * f0 + f(X - ey)) / step ** 2
    fxy = (f(X + ex + ey) - f(X + ex - ey) - f(X - ex + ey) + f(X - ex - ey)) / (4 * step ** 2)
    return np.stack([np.stack([fxx, fxy], -1), np.stack([fxy, fyy], -1)], -2)


@dataclass
class BarrierReport:
    passed: bool
    min_scaled: float
    min_Q: float
    argmin: tuple
    operator_ok: bool
    inner_ok: bool
    inner_value: float
    delta_ok: bool
    beta_ok: bool
    params: BarrierParams
    beta_floor: float
    doublings: int = 0
    warnings: list = field(default_factory=list)

    @property
    def margin(self):
        return self.min_scaled

    @property
    def margin_unit(self):
        """Margin against the normalisation ``A^{3/2} Q_t[w] >= 1``."""
        return self.min_scaled - 1.0

    def to_dict(self):
        d = dict(self.__dict__)
        d["params"] = self.params.to_dict()
        d["argmin"] = list(self.argmin)
        d["margin_unit"] = self.margin_unit
        return d


def _H_values(H_t, X):
    if callable(H_t):
        return np.asarray(H_t(X), dtype=float)
    return np.broadcast_to(np.asarray(H_t, dtype=float), X.shape[:-1])


def _check_sign_condition(chart, H_t_min):
    m = chart.boundary_curvature_min + H_t_min
    if m < 0:
        raise PreconditionError(f"H_L + H_t >= 0 fails on L (min {m:.4g})")


def barrier_value(chart, params, x):
    """``w(x) = xi(d(x)) + phi(x)``."""
    th, _, s = chart.L.project(x)
    return xi(s, params)[0] + chart.phi(th)


class CollarSamples(NamedTuple):
    """Geometric derivatives on a collar grid, in the frame ``(nu, tau)``."""

    theta: np.ndarray
    s: np.ndarray
    points: np.ndarray
    grad_d: np.ndarray
    hess_d: np.ndarray
    grad_phi: np.ndarray
    hess_phi: np.ndarray


def _stencil(chart, X, step):
    """Central-difference gradient and Hessian of ``d`` and of the extended data."""
    offsets = {"0": (0, 0), "+x": (1, 0), "-x": (-1, 0), "+y": (0, 1), "-y": (0, -1),
               "++": (1, 1), "+-": (1, -1), "-+": (-1, 1), "--": (-1, -1)}
    vals = {}
    for key, (i, j) in offsets.items():
        th, _, sd = chart.L.project(X + step * np.array([i, j], dtype=float))
        vals[key] = np.stack([sd, chart.phi(th)], axis=-1)
    g = np.stack([vals["+x"] - vals["-x"], vals["+y"] - vals["-y"]], axis=1) / (2 * step)
    hxx = (vals["+x"] - 2 * vals["0"] + vals["-x"]) / step ** 2
    hyy = (vals["+y"] - 2 * vals["0"] + vals["-y"]) / step ** 2
    hxy = (vals["++"] - vals["+-"] - vals["-+"] + vals["--"]) / (4 * step ** 2)
    Hs = np.stack([np.stack([hxx, hxy], 1), np.stack([hxy, hyy], 1)], 1)
    return g[..., 0], Hs[..., 0], g[..., 1], Hs[..., 1]


def collar_samples(chart, epsilon1, grid=None):
    """Derivatives of ``d`` and ``phi`` on the (parameter x distance) grid over ``[0, epsilon1]``.

    Results depend only on the geometry and are cached on the chart, so many
    ``(delta, beta)`` trials reuse one set of samples.
    """
    grid = tuple(grid or chart.grid)
    key = (float(epsilon1), grid)
    cache = chart.__dict__.setdefault("_samples", {})
    if key in cache:
        return cache[key]
    X, TH, S = chart.grid_points(grid[0], grid[1], epsilon1)
    flat = X.reshape(-1, 2)
    step = 1e-4 * max(chart.epsilon, 1e-3)
    dd, Hd, dp, Hp = _stencil(chart, flat, step)
    gd = np.linalg.norm(dd, axis=-1)
    nu = dd / gd[:, None]
    R = np.stack([nu, np.stack([-nu[:, 1], nu[:, 0]], -1)], axis=1)
    out = CollarSamples(TH, S, flat, gd,
                        np.einsum("nai,nij,nbj->nab", R, Hd, R),
                        np.einsum("nai,ni->na", R, dp),
                        np.einsum("nai,nij,nbj->nab", R, Hp, R))
    cache[key] = out
    return out


def verify_lower_barrier(chart, params, H_t, vertex_height, grid=None):
    """Sample ``A^{3/2} Q_t[w]`` over ``s in [0, epsilon1]`` and check ``w`` at ``epsilon1``.

    ``H_t`` is a scalar or a callable of plane points.  The distance ``d`` and
    the extended data are differentiated numerically and rotated into the
    frame ``(nu, tau)``, ``nu = grad d``; ``xi`` enters by the chain rule in that
    frame, so a large ``beta`` causes no cancellation.

    Passes iff the sampled minimum is ``>= 0`` and
    ``delta log(1 + epsilon1 beta) + <V,e> <= 0``.  With ``0 <= phi <= <V,e>``
    on ``L`` the latter gives ``w <= 0 <= v`` at ``s = epsilon1``.
    """
    H_min = float(np.min(_H_values(H_t, chart.L.point(np.linspace(0, TWO_PI, 64)))))
    _check_sign_condition(chart, H_min)
    cs = collar_samples(chart, params.epsilon1, grid)
    _, xs, xss = xi(cs.s.ravel(), params)
    gd, Hd, dp, Hp = cs.grad_d, cs.hess_d, cs.grad_phi, cs.hess_phi
    wn = xs * gd + dp[:, 0]
    wt = dp[:, 1]
    wnn = xss * gd * gd + xs * Hd[:, 0, 0] + Hp[:, 0, 0]
    wnt = xs * Hd[:, 0, 1] + Hp[:, 0, 1]
    wtt = xs * Hd[:, 1, 1] + Hp[:, 1, 1]
    A = 1.0 + wn * wn + wt * wt
    Hv = _H_values(H_t, cs.points)
    scaled = (1 + wt * wt) * wnn - 2 * wn * wt * wnt + (1 + wn * wn) * wtt + A ** 1.5 * Hv
    scaled = scaled.reshape(cs.s.shape)
    i = np.unravel_index(int(np.argmin(scaled)), scaled.shape)
    min_scaled = float(scaled[i])
    min_Q = float(np.min(scaled.ravel() / A ** 1.5))
    warnings = []
    if i[1] in (0, cs.s.shape[1] - 1):
        warnings.append("minimum attained on the edge of the sample set; refine the grid")

    inner_value = float(params.delta * np.log1p(params.epsilon1 * params.beta) + vertex_height)
    lo, hi = delta_interval(chart.B_max, chart.phi_c2)
    floor = beta_floor(params.delta, vertex_height, params.epsilon1)
    return BarrierReport(
        passed=bool(min_scaled >= 0 and inner_value <= 0),
        min_scaled=min_scaled,
        min_Q=min_Q,
        argmin=(float(cs.theta[i]), float(cs.s[i])),
        operator_ok=bool(min_scaled >= 0),
        inner_ok=bool(inner_value <= 0),
        inner_value=inner_value,
        delta_ok=bool(lo < params.delta < hi),
        beta_ok=bool(params.beta >= floor),
        params=params,
        beta_floor=floor,
        warnings=warnings,
    )


def choose_barrier_params(chart, vertex_height, H_t_min, epsilon1=None, max_doublings=30,
                          max_halvings=12, grid=None):
    """Pick ``(delta, beta, epsilon1)`` and verify the barrier.

    ``delta`` is the midpoint of the admissible interval (``-1`` when
    ``|phi|_2 = 0``).  For ``epsilon1`` (default: the collar width) ``beta``
    starts at the closed-form floor and is doubled until
    :func:`verify_lower_barrier` passes.  When doubling stops improving the
    margin, the failure sits where ``xi_s ~ delta/epsilon1`` no longer
    dominates the data terms; ``epsilon1`` is then halved (unless given
    explicitly) and the search restarts at the new floor.

    Returns
    -------
    params, report
    """
    _check_sign_condition(chart, H_t_min)
    fixed = epsilon1 is not None
    eps1 = chart.epsilon if epsilon1 is None else float(epsilon1)
    if not 0 < eps1 <= chart.epsilon:
        raise ValueError("epsilon1 must lie in (0, epsilon]")
    delta = default_delta(chart.B_max, chart.phi_c2)
    total = 0
    for _ in range(1 if fixed else max_halvings + 1):
        beta = beta_floor(delta, vertex_height, eps1)
        prev = -np.inf
        for _ in range(max_doublings + 1):
            params = BarrierParams(delta, beta, eps1)
            report = verify_lower_barrier(chart, params, H_t_min, vertex_height, grid)
            report.doublings = total
            if report.passed:
                return params, report
            gain = report.min_scaled - prev
            if not fixed and np.isfinite(prev) and gain <= 1e-3 * abs(report.min_scaled):
                break
            prev = report.min_scaled
            beta *= 2.0
            total += 1
        eps1 *= 0.5
    raise PreconditionError(
        f"barrier verification failed after {total} doublings; worst sample "
        f"(theta, s) = {report.argmin}, value {report.min_scaled:.4g}")


@dataclass
class GradientBoundReport:
    M: float
    w_le_v: bool
    w_margin: float
    v_le_psi: bool
    psi_margin: float
    boundary_max: float
    interior_max: float
    max_on_boundary: bool
    collar_nodes: int

    @property
    def ok(self):
        return self.w_le_v and self.v_le_psi and self.max_on_boundary

    def to_dict(self):
        d = dict(self.__dict__)
        d["ok"] = self.ok
        return d


def boundary_gradient_bound(mesh, v, chart, params, psi, tol=1e-12):
    """A priori gradient bound and the nodewise comparisons behind it.

    ``M = max(|delta| beta + max|grad phi|, max|grad psi|)``.  Checks
    ``w <= v`` on interior nodes with ``s <= epsilon1``, ``v <= psi`` on all
    nodes, and that the elementwise maximum of ``|grad v|`` away from the
    boundary layer does not exceed the boundary-layer maximum by more than a
    factor ``1 + 10 h``.
    """
    th, _, s, _ = chart.query(mesh.vertices)
    # w = phi = v on L by construction; compare at interior collar nodes
    sel = (s >= -1e-12) & (s <= params.epsilon1) & ~mesh.is_boundary
    w = xi(np.maximum(s[sel], 0.0), params)[0] + chart.phi(th[sel])
    w_margin = float(np.min(v[sel] - w))
    psi_margin = float(np.min(psi - v))
    gv = gradient_norms(mesh, v)
    layer = mesh.boundary_layer_elements
    bmax = float(np.max(gv[layer]))
    imax = float(np.max(gv[~layer])) if np.any(~layer) else 0.0
    M = max(abs(params.delta) * params.beta + chart.grad_max, float(np.max(gradient_norms(mesh, psi))))
    return GradientBoundReport(
        M=float(M),
        w_le_v=bool(w_margin >= -tol),
        w_margin=w_margin,
        v_le_psi=bool(psi_margin >= -tol),
        psi_margin=psi_margin,
        boundary_max=bmax,
        interior_max=imax,
        max_on_boundary=bool(imax <= bmax * (1.0 + 10.0 * mesh.h)),
        collar_nodes=int(np.count_nonzero(sel)),
    )
