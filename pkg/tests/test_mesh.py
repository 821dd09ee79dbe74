import numpy as np
import pytest

from cmcgraph import MeshError, PlanarCurve, generate_mesh
from cmcgraph.mesh import single_triangle_mesh

UNIT = PlanarCurve.circle()


def test_coarse_disk_topology():
    m = generate_mesh(UNIT, 0.5)
    assert len(m.triangles) >= 12
    assert m.euler_characteristic == 1


def test_refinement_scaling():
    a = generate_mesh(UNIT, 0.1).n_vertices
    b = generate_mesh(UNIT, 0.05).n_vertices
    assert 3.4 < b / a < 4.6


def test_ellipse_boundary_on_curve():
    e = PlanarCurve.ellipse(radii=(2.0, 1.0))
    m = generate_mesh(e, 0.1)
    P = m.vertices[m.boundary_vertices]
    assert np.max(np.abs(e.signed_distance(P))) < 1e-10
    assert np.allclose(e.point(m.boundary_params), P, atol=1e-12)


def test_quality_and_orientation():
    m = generate_mesh(PlanarCurve.ellipse(radii=(1.5, 1.0)), 0.08)
    assert np.all(m.areas > 0)
    assert m.min_angle >= 20.0
    assert np.isclose(m.areas.sum(), 1.5 * np.pi, rtol=5e-3)


def test_annulus_topology():
    m = generate_mesh(UNIT, 0.1, holes=[PlanarCurve.circle(radius=0.5)])
    assert m.euler_characteristic == 0
    r = np.linalg.norm(m.vertices, axis=1)
    assert np.all(r > 0.5 - 1e-12)
    assert set(np.unique(m.boundary_curve)) == {0, 1}


def test_deterministic():
    a, b = generate_mesh(UNIT, 0.07), generate_mesh(UNIT, 0.07)
    assert np.array_equal(a.vertices, b.vertices) and np.array_equal(a.triangles, b.triangles)


def test_errors():
    with pytest.raises(MeshError):
        generate_mesh(UNIT, 0.0)
    thin = PlanarCurve.ellipse(radii=(1.0, 0.02))
    with pytest.raises(MeshError):
        generate_mesh(thin, 0.9)


def test_single_triangle():
    m = single_triangle_mesh()
    assert m.n_vertices == 3 and len(m.triangles) == 1 and len(m.interior) == 0
