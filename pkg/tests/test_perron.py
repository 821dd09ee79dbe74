import numpy as np
import pytest

from cmcgraph import HypothesisError, PlanarCurve, ProblemConfig, build_subsolution, perron_sandwich_check
from cmcgraph import perron_sweep, scale_problem
from cmcgraph.geometry import ConeSpec, is_H_cone
from cmcgraph.mesh import generate_mesh
from cmcgraph.perron import centered, downward_cone_curvature, scale_factor, scaled_H
from cmcgraph.solver import newton_solve

UNIT = PlanarCurve.circle()


@pytest.fixture(scope="module")
def mesh06():
    return generate_mesh(PlanarCurve.circle(radius=0.6), 0.08)


def test_scaling_formulas():
    assert scale_factor(1) == 2.0
    assert scaled_H(1.0, 1, "literal") == 2.0
    assert scaled_H(1.0, 1) == 0.5
    with pytest.raises(ValueError):
        scaled_H(1.0, 1, "other")


def test_scaled_cone_curvature():
    cone = ConeSpec(UNIT, (0.0, 0.0, 2.0)).scaled(scale_factor(1))
    res = is_H_cone(cone, 0.1)
    assert res.min_curvature == pytest.approx(1.0 / np.sqrt(5.0), abs=1e-8)


def test_scale_problem_demo(demo_config, mesh06):
    sp = scale_problem(demo_config, 2, mesh06)
    assert sp.ok and sp.H_k == pytest.approx(0.8 / 1.5)
    assert sp.margins["contains_omega"] > 0 and sp.margins["h_cone"] >= 0
    assert np.array_equal(sp.boundary_values, sp.psi[mesh06.boundary_vertices])


def test_trace_error_decreasing(demo_config, mesh06):
    errs = [scale_problem(demo_config, k, mesh06).trace_error for k in (1, 2, 4, 8, 16)]
    assert all(b < a for a, b in zip(errs, errs[1:]))
    assert np.allclose(np.array(errs) * np.array([1, 2, 4, 8, 16]), errs[0], rtol=1e-10)


def test_literal_mode_reports_failure(demo_config, mesh06):
    with pytest.raises(HypothesisError, match="h_cone"):
        scale_problem(demo_config, 1, mesh06, mode="literal")
    sp = scale_problem(demo_config, 1, mesh06, mode="literal", force=True)
    assert not sp.ok and sp.margins["h_cone"] < 0


def test_origin_required(demo_config, mesh06):
    moved = demo_config.replace(gamma=UNIT.transformed(0.0, (3.0, 0.0)))
    with pytest.raises(HypothesisError, match="origin"):
        scale_problem(moved, 1, mesh06)


def test_centering():
    cfg = ProblemConfig(PlanarCurve.circle((0.5, -0.2), 1.0), (0.5, -0.2, 2.0),
                        PlanarCurve.circle((0.5, -0.2), 0.6), 0.8)
    c, shift = centered(cfg)
    assert np.allclose(shift, [-0.5, 0.2])
    assert np.allclose(c.gamma.centroid, 0.0, atol=1e-12)
    assert np.allclose(c.vertex, (0.0, 0.0, 2.0))


def test_subsolution_demo(demo_config, mesh06):
    sp = scale_problem(demo_config, 2, mesh06)
    sub = build_subsolution(sp)
    B = mesh06.boundary_vertices
    assert np.array_equal(sub.chi[B], sp.boundary_values)
    assert np.all(sub.chi <= sp.psi)
    assert sub.max_curvature < sp.H_k and sub.margin > 0
    # steeper cones keep the bound
    for z in (2 * sub.z0, 8 * sub.z0):
        apex = np.array([0.0, 0.0, 2.0 - z])
        assert downward_cone_curvature(ConeSpec(demo_config.L, apex, sp.phi_k)) < sp.H_k


def test_sandwich_demo(demo_config, mesh06):
    sp = scale_problem(demo_config, 2, mesh06)
    sub = build_subsolution(sp)
    v = newton_solve(mesh06, sp.psi, sp.H_k, sp.boundary_values).v
    rep = perron_sandwich_check(sp, sub, v)
    assert rep.ok
    assert rep.psi_residual_max <= 1e-8 and rep.chi_residual_min >= -1e-8


def test_sweep(demo_config, mesh06):
    sw = perron_sweep(demo_config, (1, 2, 4, 8), mesh=mesh06)
    assert sw.ok and sw.traces_decreasing and sw.differences_decreasing
    assert [r["k"] for r in sw.rows()] == [1, 2, 4, 8]


def test_zero_trace_case(mesh06):
    cfg = ProblemConfig(UNIT, (0.0, 0.0, 2.0), UNIT, 0.8)
    m = generate_mesh(UNIT, 0.1)
    sp = scale_problem(cfg, 4, m)
    assert np.max(np.abs(sp.phi)) < 1e-12
    v = newton_solve(m, sp.psi, sp.H_k, sp.boundary_values).v
    assert np.min(v) >= 0.0
    sub = build_subsolution(sp)
    assert perron_sandwich_check(sp, sub, v).ok
