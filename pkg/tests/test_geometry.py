import numpy as np
import pytest

from cmcgraph import (ConeSpec, CurveFunction, GeometryError, PlanarCurve, ProblemConfig,
                      boundary_curvature, check_hypotheses, cone_height, cone_mean_curvature,
                      is_H_cone)
from cmcgraph.geometry import surface_mean_curvature

UNIT = PlanarCurve.circle()


def graph_mean_curvature_fd(f, x, h=1e-4):
    """``-div(grad f / W)`` by nested central differences."""
    def flux(p):
        gx = (f(p + [h, 0]) - f(p - [h, 0])) / (2 * h)
        gy = (f(p + [0, h]) - f(p - [0, h])) / (2 * h)
        W = np.sqrt(1 + gx ** 2 + gy ** 2)
        return np.array([gx / W, gy / W])

    x = np.asarray(x, float)
    div = ((flux(x + [h, 0])[0] - flux(x - [h, 0])[0]) + (flux(x + [0, h])[1] - flux(x - [0, h])[1])) / (2 * h)
    return -div


class TestCurves:
    def test_circle_curvature_exact(self):
        c = PlanarCurve.circle(radius=2.0)
        assert np.allclose(boundary_curvature(c, np.linspace(0, 6, 7)), 0.5, atol=1e-15)
        assert np.allclose(boundary_curvature(UNIT, [0.3]), 1.0)

    def test_ellipse_major_axis(self):
        e = PlanarCurve.ellipse(radii=(2.0, 1.0))
        assert np.allclose(e.point(0.0), [2.0, 0.0])
        assert e.curvature(0.0) == pytest.approx(2.0, rel=1e-12)
        assert e.curvature(np.pi / 2) == pytest.approx(0.25, rel=1e-12)

    def test_spline_circle_curvature_second_order(self):
        errs = []
        for m in (16, 32, 64):
            th = np.linspace(0, 2 * np.pi, m, endpoint=False)
            s = PlanarCurve.spline(np.c_[np.cos(th), np.sin(th)])
            t = np.linspace(0, 2 * np.pi, 500, endpoint=False)
            errs.append(np.max(np.abs(s.curvature(t) - 1.0)))
        orders = np.log2(np.array(errs[:-1]) / errs[1:])
        assert np.all(orders > 1.7)

    def test_orientation_and_winding(self):
        th = np.linspace(0, 2 * np.pi, 12, endpoint=False)
        cw = PlanarCurve.spline(np.c_[np.cos(-th), np.sin(-th)])
        assert cw.area > 0
        assert cw.contains(np.array([0.0, 0.0]))
        assert not cw.contains(np.array([1.5, 0.0]))

    def test_self_intersecting_spline_rejected(self):
        bow = [[1, 1], [-1, -1], [1, -1], [-1, 1], [0, 1.5]]
        with pytest.raises(GeometryError):
            PlanarCurve.spline(bow)

    def test_projection_and_distance(self):
        th, foot, s = UNIT.project(np.array([[0.95, 0.0], [0.0, -0.3]]))
        assert np.allclose(foot, [[1, 0], [0, -1]], atol=1e-12)
        assert np.allclose(s, [0.05, 0.7], atol=1e-12)
        assert UNIT.signed_distance(np.array([2.0, 0.0])) == pytest.approx(-1.0)

    def test_length_area(self):
        e = PlanarCurve.ellipse(radii=(2.0, 1.0))
        assert e.area == pytest.approx(2 * np.pi, rel=1e-6)
        assert UNIT.length == pytest.approx(2 * np.pi, rel=1e-6)


class TestCones:
    cone = ConeSpec(UNIT, (0.0, 0.0, 2.0))

    def test_heights(self):
        h = cone_height(self.cone, np.array([[0.5, 0.0], [0.0, 0.0], [0.0, 1.0]]))
        assert np.allclose(h, [1.0, 2.0, 0.0], atol=1e-12)

    def test_mean_curvature_values(self):
        k = cone_mean_curvature(self.cone, np.array([[1.0, 0.0], [0.5, 0.0]]))
        assert np.allclose(k, [2 / np.sqrt(5), 2 / (0.5 * np.sqrt(5))], rtol=1e-12)

    def test_cylinder_curvature(self):
        cyl = ConeSpec(UNIT, None)
        assert cone_mean_curvature(cyl, np.array([0.3, 0.4])) == pytest.approx(1.0)

    def test_vertex_singularity_and_outside(self):
        with pytest.raises(GeometryError):
            cone_mean_curvature(self.cone, np.array([0.0, 0.0]))
        with pytest.raises(GeometryError):
            cone_height(self.cone, np.array([1.5, 0.0]))

    def test_vertex_outside_rejected(self):
        with pytest.raises(GeometryError):
            ConeSpec(UNIT, (2.0, 0.0, 1.0))

    def test_matches_finite_difference_graph(self):
        # ellipse base, off-centre vertex, lifted base heights
        base = PlanarCurve.ellipse(radii=(1.3, 0.9), angle=0.4)
        bh = CurveFunction.from_callable(lambda t: 0.1 * np.sin(2 * t))
        cone = ConeSpec(base, (0.2, -0.1, 2.5), bh)
        for x in ([0.5, 0.3], [-0.4, 0.2], [0.1, -0.5]):
            fd = graph_mean_curvature_fd(lambda p: cone_height(cone, p), x)
            assert cone_mean_curvature(cone, np.array(x)) == pytest.approx(fd, rel=1e-5)

    def test_monotone_along_ruling(self):
        tau = np.linspace(0.05, 1.0, 200)
        k = surface_mean_curvature(self.cone, np.zeros_like(tau), tau)
        assert np.all(np.diff(k) <= 1e-14)

    def test_scaling_covariance(self):
        base = PlanarCurve.ellipse(radii=(1.2, 0.8))
        cone = ConeSpec(base, (0.1, 0.1, 1.5))
        lam = 1.7
        big = cone.scaled(lam)
        x = np.array([[0.3, -0.2], [-0.5, 0.1]])
        assert np.allclose(cone_mean_curvature(big, lam * x), cone_mean_curvature(cone, x) / lam, rtol=1e-10)


class TestHCone:
    cone = ConeSpec(UNIT, (0.0, 0.0, 2.0))

    def test_examples(self):
        r = is_H_cone(self.cone, 0.85)
        assert r.ok and r.min_curvature == pytest.approx(0.8944271909999159, abs=1e-10)
        assert not is_H_cone(self.cone, 0.95).ok
        cyl = is_H_cone(ConeSpec(UNIT, None), 1.0)
        assert cyl.ok and cyl.min_curvature == pytest.approx(1.0)

    def test_threshold_formula(self):
        for r, h in ((1.0, 0.5), (2.0, 1.0), (0.7, 3.0)):
            cone = ConeSpec(PlanarCurve.circle(radius=r), (0, 0, h))
            thr = h / (r * np.sqrt(r * r + h * h))
            assert is_H_cone(cone, thr * (1 - 1e-9)).ok
            assert not is_H_cone(cone, thr * (1 + 1e-6)).ok

    def test_degenerate_and_sampling(self):
        with pytest.raises(GeometryError):
            is_H_cone(ConeSpec(UNIT, (0, 0, -1.0)), 0.5)
        with pytest.raises(ValueError):
            is_H_cone(self.cone, 0.5, n_samples=8)


class TestHypotheses:
    def test_demo_all_ok(self, demo_config):
        rep = check_hypotheses(demo_config)
        assert rep.all_ok
        assert rep.margins["h_cone"] == pytest.approx(0.8944271909999 - 0.8, abs=1e-9)
        assert rep.margins["h_L"] == pytest.approx(1 / 0.6 + 0.8, rel=1e-9)

    def test_failures(self, demo_config):
        assert not check_hypotheses(demo_config.replace(H=1.2)).h_cone_ok
        assert not check_hypotheses(demo_config.replace(L=PlanarCurve.circle(radius=1.5))).containment_ok

    def test_flags_follow_margins(self, demo_config):
        for cfg in (demo_config, demo_config.replace(H=1.2)):
            rep = check_hypotheses(cfg)
            assert rep.h_cone_ok == (rep.margins["h_cone"] >= 0)
            assert rep.h_L_ok == (rep.margins["h_L"] >= 0)
            assert rep.containment_ok == (rep.margins["containment"] >= 0)

    def test_explicit_data_on_cone(self, demo_config):
        ok = demo_config.replace(boundary_data=CurveFunction.constant(0.8))
        off = demo_config.replace(boundary_data=CurveFunction.constant(0.9))
        assert check_hypotheses(ok).gamma_on_cone_ok
        assert not check_hypotheses(off).gamma_on_cone_ok

    def test_rigid_motion_invariance(self):
        g = PlanarCurve.ellipse(radii=(1.2, 1.0))
        L = PlanarCurve.ellipse(radii=(0.7, 0.5), angle=0.2)
        cfg = ProblemConfig(g, (0.05, 0.0, 2.5), L, 0.6)
        ang, tr = 0.9, np.array([3.0, -1.0])
        rot = np.array([[np.cos(ang), -np.sin(ang)], [np.sin(ang), np.cos(ang)]])
        v = rot @ np.array([0.05, 0.0]) + tr
        moved = ProblemConfig(g.transformed(ang, tr), (v[0], v[1], 2.5), L.transformed(ang, tr), 0.6)
        a, b = check_hypotheses(cfg), check_hypotheses(moved)
        for key in a.margins:
            assert a.margins[key] == pytest.approx(b.margins[key], rel=1e-5, abs=1e-7)
