"""Boundary-fitted triangulations of the domain enclosed by a curve.

Constrained quality Delaunay meshing is delegated to Shewchuk's Triangle
(``triangle`` package); boundary vertices are placed exactly on the curves at
equal arc-length spacing and Triangle is forbidden from splitting boundary
segments, so every boundary vertex carries an exact curve parameter.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import triangle

from .errors import MeshError
from .geometry import _segments_intersect

MIN_ANGLE = 20.0


@dataclass(frozen=True, eq=False)
class Mesh:
    """Conforming P1 triangulation.

    Attributes
    ----------
    vertices : (N, 2) array
    triangles : (E, 3) int array, counter-clockwise
    boundary_vertices : (B,) int array
    boundary_params : (B,) array of curve parameters of the boundary vertices
    boundary_curve : (B,) int array, 0 for the outer curve, ``i + 1`` for hole ``i``
    """

    vertices: np.ndarray
    triangles: np.ndarray
    boundary_vertices: np.ndarray
    boundary_params: np.ndarray
    boundary_curve: np.ndarray

    @property
    def n_vertices(self):
        return len(self.vertices)

    @cached_property
    def is_boundary(self):
        mask = np.zeros(self.n_vertices, dtype=bool)
        mask[self.boundary_vertices] = True
        return mask

    @cached_property
    def interior(self):
        return np.flatnonzero(~self.is_boundary)

    @cached_property
    def edges(self):
        T = self.triangles
        e = np.sort(np.vstack([T[:, [0, 1]], T[:, [1, 2]], T[:, [2, 0]]]), axis=1)
        return np.unique(e, axis=0)

    @cached_property
    def h(self):
        """Maximum edge length."""
        e = self.edges
        return float(np.max(np.linalg.norm(self.vertices[e[:, 0]] - self.vertices[e[:, 1]], axis=1)))

    @cached_property
    def areas(self):
        p = self.vertices[self.triangles]
        d1, d2 = p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    @cached_property
    def basis_gradients(self):
        """Gradients of the three P1 basis functions on each triangle, (E, 3, 2)."""
        p = self.vertices[self.triangles]
        d1, d2 = p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]
        two_a = (2.0 * self.areas)[:, None]
        G = np.empty((len(self.triangles), 3, 2))
        G[:, 1] = np.stack([d2[:, 1], -d2[:, 0]], axis=1) / two_a
        G[:, 2] = np.stack([-d1[:, 1], d1[:, 0]], axis=1) / two_a
        G[:, 0] = -G[:, 1] - G[:, 2]
        return G

    @cached_property
    def min_angle(self):
        """Smallest interior angle over all triangles, in degrees."""
        p = self.vertices[self.triangles]
        ang = []
        for i in range(3):
            a = p[:, (i + 1) % 3] - p[:, i]
            b = p[:, (i + 2) % 3] - p[:, i]
            cosv = np.sum(a * b, axis=1) / (np.linalg.norm(a, axis=1) * np.linalg.norm(b, axis=1))
            ang.append(np.degrees(np.arccos(np.clip(cosv, -1.0, 1.0))))
        return float(np.min(ang))

    @property
    def euler_characteristic(self):
        return self.n_vertices - len(self.edges) + len(self.triangles)

    @cached_property
    def boundary_layer_elements(self):
        """Triangles with at least one boundary vertex."""
        return np.any(self.is_boundary[self.triangles], axis=1)


def _boundary_polygon(curve, h):
    n = max(8, int(np.ceil(curve.length / h)))
    th = curve.arclength_parameters(n)
    P = curve.point(th)
    if _segments_intersect(P):
        raise MeshError("target edge length too coarse: boundary polygon self-intersects")
    return th, P


def _interior_point(curve):
    c = curve.centroid
    if curve.contains(c):
        return c
    th, P = curve.sample(64)
    for s in (1e-3, 1e-2, 1e-1):
        q = P + s * curve.inward_normal(th)
        ok = curve.contains(q)
        if np.any(ok):
            return q[np.argmax(ok)]
    raise MeshError("could not place a point inside the hole curve")


def generate_mesh(L, h, holes=(), min_angle=MIN_ANGLE):
    """Quality triangulation of the domain enclosed by ``L`` (minus ``holes``).

    Parameters
    ----------
    L : PlanarCurve
        Outer boundary.
    h : float
        Target edge length; boundary spacing is ``<= h`` and the triangle
        area bound is that of an equilateral triangle of side ``h``.
    holes : sequence of PlanarCurve
        Inner boundary curves (e.g. for annuli).
    min_angle : float
        Quality bound in degrees passed to Triangle and verified afterwards.
    """
    if not h > 0:
        raise MeshError("target edge length must be positive")
    curves = [L, *holes]
    pts, segs, params, which, hole_pts = [], [], [], [], []
    offset = 0
    for ci, curve in enumerate(curves):
        th, P = _boundary_polygon(curve, h)
        n = len(P)
        idx = np.arange(n) + offset
        pts.append(P)
        segs.append(np.stack([idx, np.roll(idx, -1)], axis=1))
        params.append(th)
        which.append(np.full(n, ci))
        if ci > 0:
            hole_pts.append(_interior_point(curve))
        offset += n
    data = {"vertices": np.vstack(pts), "segments": np.vstack(segs)}
    if hole_pts:
        data["holes"] = np.array(hole_pts)
    area = np.sqrt(3.0) / 4.0 * h * h
    out = triangle.triangulate(data, f"pq{min_angle:g}Ya{area:.15f}Q")
    V = np.asarray(out["vertices"], dtype=float)
    T = np.asarray(out["triangles"], dtype=np.int64)
    nb = offset
    if not np.allclose(V[:nb], data["vertices"]):
        raise MeshError("mesher reordered boundary vertices")
    p = V[T]
    d1, d2 = p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]
    neg = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0] < 0
    T[neg] = T[neg][:, [0, 2, 1]]
    mesh = Mesh(V, T, np.arange(nb), np.concatenate(params), np.concatenate(which))
    if np.any(mesh.areas <= 0):
        raise MeshError("degenerate triangle in mesh")
    if mesh.min_angle < min_angle - 1e-9:
        raise MeshError(f"quality bound unreachable: min angle {mesh.min_angle:.2f} deg")
    return mesh


def single_triangle_mesh():
    """Three vertices, one triangle; handy for format tests."""
    V = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    return Mesh(V, np.array([[0, 1, 2]]), np.arange(3), np.zeros(3), np.zeros(3, dtype=int))
