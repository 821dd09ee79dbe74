"""Planar curves, cones over them, and the hypothesis checks.

Conventions
-----------
Curves are positively oriented and parametrised by ``theta`` in ``[0, 2*pi)``.
Curvature is signed with respect to the inward unit normal, so a circle of
radius ``r`` has curvature ``1/r``.  Mean curvature of a surface is the sum of
principal curvatures (non-normalised), computed with respect to the downward
normal of its graph; a dome or a cone opening downward is positive and
``-div(grad u / sqrt(1 + |grad u|^2))`` is the mean curvature of ``graph u``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.spatial import cKDTree

from .errors import GeometryError

TWO_PI = 2.0 * np.pi

CURVE_KINDS = ("analytic-circle", "analytic-ellipse", "periodic-spline")


def _cross(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def _as_points(x):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != 2:
        raise GeometryError(f"expected plane points with shape (..., 2), got {x.shape}")
    return x


def _segments_intersect(P):
    """True if the closed polygon ``P`` has two non-adjacent crossing edges."""
    n = len(P)
    A, B = P, np.roll(P, -1, axis=0)
    i, j = np.triu_indices(n, k=2)
    keep = ~((i == 0) & (j == n - 1))
    i, j = i[keep], j[keep]
    a, b, c, d = A[i], B[i], A[j], B[j]
    d1 = _cross(b - a, c - a)
    d2 = _cross(b - a, d - a)
    d3 = _cross(d - c, a - c)
    d4 = _cross(d - c, b - c)
    return bool(np.any((d1 * d2 < 0) & (d3 * d4 < 0)))


class PlanarCurve:
    """Closed, simple, positively oriented C^2 curve in the plane.

    Use the constructors :meth:`circle`, :meth:`ellipse` and :meth:`spline`.
    Instances are immutable.
    """

    _DENSE = 2048

    def __init__(self, kind, **params):
        if kind not in CURVE_KINDS:
            raise GeometryError(f"unknown curve kind {kind!r}")
        self.kind = kind
        self._params = params
        if kind == "analytic-circle":
            self._center = np.asarray(params["center"], dtype=float).reshape(2)
            self._radius = float(params["radius"])
            if not self._radius > 0:
                raise GeometryError("circle radius must be positive")
        elif kind == "analytic-ellipse":
            self._center = np.asarray(params["center"], dtype=float).reshape(2)
            a, b = (float(r) for r in params["radii"])
            if not (a > 0 and b > 0):
                raise GeometryError("ellipse radii must be positive")
            self._radii = (a, b)
            ang = float(params.get("angle", 0.0))
            self._rot = np.array([[np.cos(ang), -np.sin(ang)], [np.sin(ang), np.cos(ang)]])
        else:
            pts = np.asarray(params["points"], dtype=float)
            if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 4:
                raise GeometryError("spline needs at least 4 control points of shape (m, 2)")
            area = 0.5 * np.sum(_cross(pts, np.roll(pts, -1, axis=0)))
            if area < 0:
                pts = pts[::-1].copy()
            self._ctrl = pts
            knots = np.linspace(0.0, TWO_PI, len(pts) + 1)
            closed = np.vstack([pts, pts[:1]])
            self._spline = CubicSpline(knots, closed, bc_type="periodic")
            self._spl_d = [self._spline.derivative(k) for k in (1, 2)]
            if _segments_intersect(self.point(np.linspace(0, TWO_PI, 8 * len(pts), endpoint=False))):
                raise GeometryError("spline curve is self-intersecting")

    # -- constructors -------------------------------------------------------
    @classmethod
    def circle(cls, center=(0.0, 0.0), radius=1.0):
        return cls("analytic-circle", center=tuple(map(float, center)), radius=float(radius))

    @classmethod
    def ellipse(cls, center=(0.0, 0.0), radii=(2.0, 1.0), angle=0.0):
        return cls("analytic-ellipse", center=tuple(map(float, center)),
                   radii=tuple(map(float, radii)), angle=float(angle))

    @classmethod
    def spline(cls, points):
        return cls("periodic-spline", points=np.asarray(points, dtype=float))

    def to_dict(self):
        out = {"kind": self.kind}
        for k, v in self._params.items():
            out[k] = np.asarray(v).tolist() if isinstance(v, (np.ndarray, tuple, list)) else v
        if self.kind == "periodic-spline":
            out["points"] = self._ctrl.tolist()
        return out

    def __repr__(self):
        return f"PlanarCurve({self.to_dict()!r})"

    # -- evaluation ---------------------------------------------------------
    def derivative(self, theta, order=0):
        """Position (order 0) or its first/second parameter derivative."""
        theta = np.asarray(theta, dtype=float)
        if self.kind == "analytic-circle":
            c, s = np.cos(theta), np.sin(theta)
            r = self._radius
            if order == 0:
                return self._center + r * np.stack([c, s], axis=-1)
            if order == 1:
                return r * np.stack([-s, c], axis=-1)
            return -r * np.stack([c, s], axis=-1)
        if self.kind == "analytic-ellipse":
            c, s = np.cos(theta), np.sin(theta)
            a, b = self._radii
            if order == 0:
                local = np.stack([a * c, b * s], axis=-1)
            elif order == 1:
                local = np.stack([-a * s, b * c], axis=-1)
            else:
                local = np.stack([-a * c, -b * s], axis=-1)
            out = local @ self._rot.T
            return out + self._center if order == 0 else out
        th = np.mod(theta, TWO_PI)
        if order == 0:
            return self._spline(th)
        return self._spl_d[order - 1](th)

    def point(self, theta):
        return self.derivative(theta, 0)

    def curvature(self, theta):
        """Signed curvature with respect to the inward normal."""
        d1 = self.derivative(theta, 1)
        d2 = self.derivative(theta, 2)
        return _cross(d1, d2) / np.linalg.norm(d1, axis=-1) ** 3

    def inward_normal(self, theta):
        d1 = self.derivative(theta, 1)
        n = np.stack([-d1[..., 1], d1[..., 0]], axis=-1)
        return n / np.linalg.norm(n, axis=-1, keepdims=True)

    def speed(self, theta):
        return np.linalg.norm(self.derivative(theta, 1), axis=-1)

    # -- global quantities --------------------------------------------------
    @cached_property
    def _dense(self):
        th = np.linspace(0.0, TWO_PI, self._DENSE, endpoint=False)
        return th, self.point(th)

    @cached_property
    def _tree(self):
        return cKDTree(self._dense[1])

    @cached_property
    def length(self):
        th = np.linspace(0.0, TWO_PI, 4 * self._DENSE, endpoint=False)
        return float(np.mean(self.speed(th)) * TWO_PI)

    @cached_property
    def area(self):
        # trapezoid rule on the periodic line integrals (Green's theorem)
        th, P = self._dense
        d = self.derivative(th, 1)
        return float(0.5 * np.mean(_cross(P, d)) * TWO_PI)

    @cached_property
    def centroid(self):
        th, P = self._dense
        d = self.derivative(th, 1)
        mx = np.mean(P[:, 0] ** 2 * d[:, 1]) * np.pi
        my = -np.mean(P[:, 1] ** 2 * d[:, 0]) * np.pi
        return np.array([mx, my]) / self.area

    @cached_property
    def max_abs_curvature(self):
        return float(np.max(np.abs(self.curvature(self._dense[0]))))

    def sample(self, n):
        th = np.linspace(0.0, TWO_PI, n, endpoint=False)
        return th, self.point(th)

    def arclength_parameters(self, n):
        """``n`` parameters splitting the curve into arcs of equal length."""
        th = np.linspace(0.0, TWO_PI, 8 * self._DENSE + 1)
        sp = self.speed(th)
        cum = np.concatenate([[0.0], np.cumsum(0.5 * (sp[1:] + sp[:-1]) * np.diff(th))])
        target = np.linspace(0.0, cum[-1], n, endpoint=False)
        return np.interp(target, cum, th)

    # -- point queries ------------------------------------------------------
    def contains(self, x):
        """Even-odd test against a dense polygonisation (boundary is ambiguous)."""
        x = _as_points(x)
        flat = x.reshape(-1, 2)
        P = self._dense[1]
        A, B = P, np.roll(P, -1, axis=0)
        inside = np.zeros(len(flat), dtype=bool)
        for lo in range(0, len(flat), 2048):
            q = flat[lo:lo + 2048, None, :]
            ay, by = A[None, :, 1], B[None, :, 1]
            straddle = (ay > q[..., 1]) != (by > q[..., 1])
            with np.errstate(divide="ignore", invalid="ignore"):
                xint = A[None, :, 0] + (q[..., 1] - ay) * (B[None, :, 0] - A[None, :, 0]) / (by - ay)
            hits = straddle & (q[..., 0] < xint)
            inside[lo:lo + 2048] = np.count_nonzero(hits, axis=1) % 2 == 1
        return inside.reshape(x.shape[:-1])

    def project(self, x, iterations=30):
        """Nearest point on the curve.

        Returns
        -------
        theta, foot, signed_distance
            ``signed_distance`` is ``(x - foot) . inward_normal``: positive
            inside the enclosed domain (near the curve), negative outside.
        """
        x = _as_points(x)
        flat = x.reshape(-1, 2)
        th_tab = self._dense[0]
        _, idx = self._tree.query(flat)
        th = th_tab[idx].copy()
        dth = TWO_PI / self._DENSE
        lo, hi = th - dth, th + dth
        for _ in range(iterations):
            c = self.derivative(th, 0)
            d1 = self.derivative(th, 1)
            d2 = self.derivative(th, 2)
            r = c - flat
            f = np.sum(r * d1, axis=-1)
            fp = np.sum(d1 * d1, axis=-1) + np.sum(r * d2, axis=-1)
            step = np.where(fp > 0, f / np.where(fp > 0, fp, 1.0), 0.0)
            new = th - step
            bad = (new < lo) | (new > hi) | ~(fp > 0)
            # bisection fallback keeps the iterate inside the initial bracket
            lo = np.where(f > 0, lo, np.maximum(lo, th))
            hi = np.where(f > 0, np.minimum(hi, th), hi)
            new = np.where(bad, 0.5 * (lo + hi), new)
            if np.max(np.abs(new - th)) < 1e-15:
                th = new
                break
            th = new
        th = np.mod(th, TWO_PI)
        foot = self.point(th)
        sd = np.sum((flat - foot) * self.inward_normal(th), axis=-1)
        shp = x.shape[:-1]
        return th.reshape(shp), foot.reshape(shp + (2,)), sd.reshape(shp)

    def signed_distance(self, x):
        """Distance to the curve, positive inside the enclosed domain."""
        x = _as_points(x)
        _, foot, _ = self.project(x)
        d = np.linalg.norm(x - foot, axis=-1)
        return np.where(self.contains(x), d, -d)

    def transformed(self, angle=0.0, translation=(0.0, 0.0)):
        """Image under the rigid motion ``x -> R(angle) x + translation``."""
        R = np.array([[np.cos(angle), -np.sin(angle)], [np.sin(angle), np.cos(angle)]])
        t = np.asarray(translation, dtype=float)
        if self.kind == "analytic-circle":
            return PlanarCurve.circle(R @ self._center + t, self._radius)
        if self.kind == "analytic-ellipse":
            return PlanarCurve.ellipse(R @ self._center + t, self._radii,
                                       float(self._params.get("angle", 0.0)) + angle)
        return PlanarCurve.spline(self._ctrl @ R.T + t)

    def scaled(self, factor):
        """Image under the dilation ``x -> factor * x`` about the origin."""
        f = float(factor)
        if self.kind == "analytic-circle":
            return PlanarCurve.circle(f * self._center, f * self._radius)
        if self.kind == "analytic-ellipse":
            a, b = self._radii
            return PlanarCurve.ellipse(f * self._center, (f * a, f * b), self._params.get("angle", 0.0))
        return PlanarCurve.spline(f * self._ctrl)

    @property
    def is_circle(self):
        return self.kind == "analytic-circle"

    @property
    def center(self):
        if self.kind == "periodic-spline":
            return self.centroid
        return self._center

    @property
    def radius(self):
        if self.kind != "analytic-circle":
            raise AttributeError("radius is only defined for circles")
        return self._radius


class CurveFunction:
    """Periodic scalar function of a curve parameter (boundary data on a curve).

    Either a constant or a periodic cubic spline through values at the
    uniform parameters ``2*pi*j/m``.
    """

    def __init__(self, values):
        values = np.atleast_1d(np.asarray(values, dtype=float))
        if not np.all(np.isfinite(values)):
            raise GeometryError("boundary data must be finite")
        self.values = values
        if len(values) == 1:
            self._spline = None
        else:
            knots = np.linspace(0.0, TWO_PI, len(values) + 1)
            self._spline = CubicSpline(knots, np.append(values, values[0]), bc_type="periodic")

    @classmethod
    def constant(cls, c):
        return cls([float(c)])

    @classmethod
    def from_callable(cls, f, n=256):
        th = np.linspace(0.0, TWO_PI, n, endpoint=False)
        return cls(np.asarray(f(th), dtype=float))

    @property
    def is_constant(self):
        return self._spline is None or np.ptp(self.values) == 0.0

    def __call__(self, theta, order=0):
        theta = np.asarray(theta, dtype=float)
        if self._spline is None:
            return np.full(theta.shape, self.values[0] if order == 0 else 0.0)
        return self._spline(np.mod(theta, TWO_PI), order)

    def shifted(self, c):
        return CurveFunction(self.values + c)

    def to_dict(self):
        if self._spline is None:
            return {"constant": float(self.values[0])}
        return {"values": self.values.tolist()}


class _RayTable(NamedTuple):
    theta: np.ndarray
    angle: np.ndarray


class ConeSpec:
    """Cone ``K_V(gamma)`` with apex ``vertex`` or the cylinder ``C(gamma)``.

    Parameters
    ----------
    base : PlanarCurve
        Base curve gamma.
    vertex : sequence of 3 floats or None
        Apex ``(x, y, height)``; ``None`` means vertex at infinity (cylinder).
    base_height : CurveFunction, optional
        Heights of the base curve over the plane.  The default (zero) gives a
        cone whose base lies in the plane; a non-zero function gives the cone
        over a space curve lying on the cylinder over gamma.
    top_height : float
        Value reported by :func:`cone_height` for a cylinder.
    """

    def __init__(self, base, vertex=None, base_height=None, top_height=1.0):
        self.base = base
        self.base_height = base_height if base_height is not None else CurveFunction.constant(0.0)
        self.top_height = float(top_height)
        if vertex is None:
            self.vertex = None
        else:
            v = np.asarray(vertex, dtype=float).reshape(3)
            if not np.all(np.isfinite(v)):
                raise GeometryError("vertex must be finite or None (infinity)")
            self.vertex = v
            if not base.contains(v[:2]) or abs(base.signed_distance(v[:2])) < 1e-12:
                raise GeometryError("vertex must project strictly inside the domain enclosed by gamma")

    @property
    def is_cylinder(self):
        return self.vertex is None

    @property
    def apex(self):
        return None if self.vertex is None else self.vertex[:2]

    @property
    def height(self):
        """``<V, e>``, the vertex height (``inf`` for the cylinder)."""
        return np.inf if self.vertex is None else float(self.vertex[2])

    def scaled(self, factor):
        """Dilation of the whole cone about the origin of space."""
        f = float(factor)
        bh = CurveFunction(f * self.base_height.values)
        v = None if self.vertex is None else f * self.vertex
        return ConeSpec(self.base.scaled(f), v, bh, self.top_height)

    @cached_property
    def _rays(self):
        center = self.base.centroid if self.vertex is None else self.vertex[:2]
        th = np.linspace(0.0, TWO_PI, 4096, endpoint=False)
        rho = self.base.point(th) - center
        if np.any(_cross(rho, self.base.derivative(th, 1)) <= 0):
            raise GeometryError("base curve is not star-shaped with respect to the vertex projection")
        ang = np.unwrap(np.arctan2(rho[:, 1], rho[:, 0]))
        return _RayTable(np.append(th, TWO_PI), np.append(ang, ang[0] + TWO_PI))

    def locate(self, x):
        """Cone coordinates of plane points.

        Returns ``(theta, tau)`` with ``x = P + tau * (gamma(theta) - P)``
        where ``P`` is the vertex projection (the centroid for a cylinder);
        ``tau = 1 - t`` in terms of the ruling parameter ``t``.
        """
        x = _as_points(x)
        flat = x.reshape(-1, 2)
        center = self.base.centroid if self.vertex is None else self.vertex[:2]
        tab = self._rays
        a = flat - center
        r = np.linalg.norm(a, axis=-1)
        safe = r > 0
        u = np.where(safe[:, None], a / np.where(safe, r, 1.0)[:, None], np.array([1.0, 0.0]))
        alpha = np.arctan2(u[:, 1], u[:, 0])
        alpha = tab.angle[0] + np.mod(alpha - tab.angle[0], TWO_PI)
        j = np.clip(np.searchsorted(tab.angle, alpha) - 1, 0, len(tab.theta) - 2)
        lo, hi = tab.theta[j], tab.theta[j + 1]
        w = (alpha - tab.angle[j]) / (tab.angle[j + 1] - tab.angle[j])
        th = lo + w * (hi - lo)
        for _ in range(40):
            rho = self.base.point(th) - center
            g = np.arctan2(_cross(u, rho), np.sum(u * rho, axis=-1))
            gp = _cross(rho, self.base.derivative(th, 1)) / np.sum(rho * rho, axis=-1)
            lo = np.where(g < 0, th, lo)
            hi = np.where(g > 0, th, hi)
            new = th - g / gp
            out = (new < lo) | (new > hi)
            new = np.where(out, 0.5 * (lo + hi), new)
            if np.max(np.abs(new - th)) < 1e-15:
                th = new
                break
            th = new
        th = np.mod(th, TWO_PI)
        R = np.linalg.norm(self.base.point(th) - center, axis=-1)
        tau = r / R
        shp = x.shape[:-1]
        return th.reshape(shp), tau.reshape(shp)


def _check_inside(tau, tol=1e-9):
    if np.any(tau > 1.0 + tol):
        raise GeometryError("point lies outside the domain enclosed by the cone base")


def cone_height(cone, x):
    """Height ``psi(x)`` of the cone surface above the plane point(s) ``x``."""
    x = _as_points(x)
    if cone.is_cylinder:
        _, tau = cone.locate(x)
        _check_inside(tau)
        return np.full(x.shape[:-1], cone.top_height)
    th, tau = cone.locate(x)
    _check_inside(tau)
    tau = np.minimum(tau, 1.0)
    return (1.0 - tau) * cone.height + tau * cone.base_height(th)


def surface_mean_curvature(cone, theta, tau):
    """Mean curvature of the cone surface at cone coordinates ``(theta, tau)``.

    First and second fundamental forms of ``X(theta, t) = t V + (1 - t) p(theta)``
    with ``p`` the (possibly lifted) base curve; the ruling direction carries
    no curvature.
    """
    theta = np.asarray(theta, dtype=float)
    tau = np.asarray(tau, dtype=float)
    c = cone.base.point(theta)
    c1 = cone.base.derivative(theta, 1)
    c2 = cone.base.derivative(theta, 2)
    b = cone.base_height(theta)
    b1 = cone.base_height(theta, 1)
    b2 = cone.base_height(theta, 2)
    V = cone.vertex
    p1 = np.concatenate([c1, b1[..., None]], axis=-1)
    p2 = np.concatenate([c2, b2[..., None]], axis=-1)
    Xth = tau[..., None] * p1
    Xt = np.concatenate([V[:2] - c, (V[2] - b)[..., None]], axis=-1)
    Xthth = tau[..., None] * p2
    Xtht = -p1
    N = np.cross(Xth, Xt)
    n = -N / np.linalg.norm(N, axis=-1, keepdims=True)
    E = np.sum(Xth * Xth, axis=-1)
    F = np.sum(Xth * Xt, axis=-1)
    G = np.sum(Xt * Xt, axis=-1)
    e = np.sum(Xthth * n, axis=-1)
    f = np.sum(Xtht * n, axis=-1)
    return (e * G - 2.0 * f * F) / (E * G - F * F)


def cone_mean_curvature(cone, base_point):
    """Mean curvature of the cone at the point above ``base_point``.

    For the cylinder this is the curvature of gamma at the point hit by the ray
    from the centroid through ``base_point``.
    """
    x = _as_points(base_point)
    th, tau = cone.locate(x)
    _check_inside(tau)
    if cone.is_cylinder:
        return cone.base.curvature(th)
    if np.any(tau < 1e-12):
        raise GeometryError("mean curvature is singular at the vertex projection")
    return surface_mean_curvature(cone, th, np.minimum(tau, 1.0))


class HConeResult(NamedTuple):
    ok: bool
    min_curvature: float
    theta: float
    t: float


def is_H_cone(cone, H, n_samples=64, cutoff=0.95):
    """Sample the cone mean curvature and compare its minimum with ``H``.

    The ruling parameter ``t`` runs over ``[0, cutoff]``, staying away from the
    singular vertex.
    """
    if n_samples < 16:
        raise ValueError("n_samples must be at least 16")
    th = np.linspace(0.0, TWO_PI, n_samples, endpoint=False)
    if cone.is_cylinder:
        k = cone.base.curvature(th)
        i = int(np.argmin(k))
        return HConeResult(bool(k[i] >= H), float(k[i]), float(th[i]), 0.0)
    if cone.height <= np.max(cone.base_height.values):
        raise GeometryError("degenerate cone: vertex height must exceed the base heights")
    t = np.linspace(0.0, cutoff, max(8, n_samples // 2))
    TH, T = np.meshgrid(th, t, indexing="ij")
    k = surface_mean_curvature(cone, TH, 1.0 - T)
    i = np.unravel_index(int(np.argmin(k)), k.shape)
    m = float(k[i])
    return HConeResult(bool(m >= H), m, float(TH[i]), float(T[i]))


def boundary_curvature(L, theta):
    """Curvature of ``L`` with respect to the normal pointing into its domain."""
    return L.curvature(theta)


@dataclass(frozen=True)
class Tolerances:
    newton_rtol: float = 1e-10
    newton_maxiter: int = 50
    cone_tol: float = 1e-6
    containment_tol: float = 1e-9
    ruling_cutoff: float = 0.95
    n_samples: int = 64
    barrier_grid: tuple = (256, 64)

    def to_dict(self):
        d = dict(self.__dict__)
        d["barrier_grid"] = list(self.barrier_grid)
        return d


@dataclass(frozen=True)
class ProblemConfig:
    """Full data of a Dirichlet problem instance.

    ``boundary_data`` is either ``"from-cone"`` (the boundary curve is the
    intersection of the cone with the cylinder over ``L``) or a
    :class:`CurveFunction` of the parameter of ``L``.
    """

    gamma: PlanarCurve
    vertex: tuple | None
    L: PlanarCurve
    H: float
    boundary_data: object = "from-cone"
    mesh_h: float = 0.05
    tolerances: Tolerances = field(default_factory=Tolerances)
    cone_base_height: CurveFunction | None = None

    def __post_init__(self):
        if not (np.isfinite(self.H) and self.H > 0):
            raise GeometryError("H must be a positive real")
        if not (np.isfinite(self.mesh_h) and self.mesh_h > 0):
            raise GeometryError("mesh_h must be positive")
        if not (self.boundary_data == "from-cone" or isinstance(self.boundary_data, CurveFunction)):
            raise GeometryError("boundary_data must be 'from-cone' or a CurveFunction")

    @cached_property
    def cone(self):
        return ConeSpec(self.gamma, self.vertex, self.cone_base_height)

    @property
    def vertex_height(self):
        return np.inf if self.vertex is None else float(self.vertex[2])

    def boundary_values(self, points, theta):
        """Boundary data at points of ``L`` with parameters ``theta``."""
        if self.boundary_data == "from-cone":
            if self.vertex is None:
                return np.zeros(np.shape(theta))
            return cone_height(self.cone, points)
        return self.boundary_data(theta)

    def boundary_function(self, n=256):
        """Boundary data as a :class:`CurveFunction` on the parameter of ``L``."""
        if self.boundary_data == "from-cone":
            th, pts = self.L.sample(n)
            vals = self.boundary_values(pts, th)
            if np.ptp(vals) <= 1e-12 * (1.0 + np.max(np.abs(vals))):
                return CurveFunction.constant(float(np.mean(vals)))
            return CurveFunction(vals)
        return self.boundary_data

    def replace(self, **changes):
        from dataclasses import replace
        return replace(self, **changes)


@dataclass
class HypothesisReport:
    h_cone_ok: bool
    h_cone_min: float
    h_L_ok: bool
    h_L_min: float
    containment_ok: bool
    containment_min: float
    gamma_on_cone_ok: bool
    gamma_on_cone_dev: float
    margins: dict
    messages: list = field(default_factory=list)

    @property
    def all_ok(self):
        return self.h_cone_ok and self.h_L_ok and self.containment_ok and self.gamma_on_cone_ok

    def to_dict(self):
        d = dict(self.__dict__)
        d["all_ok"] = self.all_ok
        return d


def check_hypotheses(config, n_curve=512):
    """Evaluate the existence hypotheses for ``config``; failures are reported."""
    tol = config.tolerances
    H = config.H
    messages = []

    try:
        hc = is_H_cone(config.cone, H, tol.n_samples, tol.ruling_cutoff)
        h_cone_min = hc.min_curvature
    except GeometryError as exc:
        messages.append(f"cone: {exc}")
        h_cone_min = -np.inf

    th, pts = config.L.sample(n_curve)
    kL = boundary_curvature(config.L, th)
    h_L_min = float(np.min(kL))

    sd = config.gamma.signed_distance(pts)
    containment_min = float(np.min(sd))

    dev = 0.0
    if config.boundary_data != "from-cone":
        phi = config.boundary_data(th)
        try:
            if config.vertex is None:
                dev = float(np.max(np.abs(sd)))
            else:
                dev = float(np.max(np.abs(phi - cone_height(config.cone, pts))))
        except GeometryError as exc:
            messages.append(f"boundary data: {exc}")
            dev = np.inf

    margins = {
        "h_cone": h_cone_min - H,
        "h_L": h_L_min + H,
        "containment": containment_min + tol.containment_tol,
        "gamma_on_cone": tol.cone_tol - dev,
    }
    return HypothesisReport(
        h_cone_ok=bool(margins["h_cone"] >= 0),
        h_cone_min=float(h_cone_min),
        h_L_ok=bool(margins["h_L"] >= 0),
        h_L_min=h_L_min,
        containment_ok=bool(margins["containment"] >= 0),
        containment_min=containment_min,
        gamma_on_cone_ok=bool(margins["gamma_on_cone"] >= 0),
        gamma_on_cone_dev=dev,
        margins={k: float(v) for k, v in margins.items()},
        messages=messages,
    )
