"""
Spherical cap on the unit disk
==============================

The upper hemisphere of radius 2 has mean curvature 1.  Over the unit disk
with zero boundary data it is the graph of ``sqrt(4 - |x|^2) - sqrt(3)``.
We solve the discrete problem on three meshes and watch the error drop by
about four per halving of the mesh size.
"""
import numpy as np

from cmcgraph import PlanarCurve, generate_mesh, solve_dirichlet, spherical_cap

disk = PlanarCurve.circle()
errors = []
for h in (0.1, 0.05, 0.025):
    mesh = generate_mesh(disk, h)
    v = solve_dirichlet(mesh, H=1.0, boundary_values=0.0)
    rho = np.linalg.norm(mesh.vertices, axis=1)
    exact = spherical_cap(2.0, rho).value - np.sqrt(3.0)
    errors.append(np.max(np.abs(v - exact)))
    print(f"h={h:<6} vertices={mesh.n_vertices:<6} max error={errors[-1]:.2e}")

# observed order between consecutive meshes
print("orders:", np.round(np.log2(np.array(errors[:-1]) / errors[1:]), 2))
print(f"top of the cap: {np.max(v):.5f} (exact {2 - np.sqrt(3):.5f})")
