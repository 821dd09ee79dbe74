"""
Raising the vertex to infinity
==============================

With the cylinder over the unit circle the cone construction degenerates.
Instead we take cones with finite vertices for H_k = k/(k+1) H and let k grow.
The iterates approach the cap for H = 1 only as fast as H_k approaches H, so
the last iterate still differs from the direct solve by about the cap
difference for H_6 = 6/7; a first-order extrapolation in 1/(k+1) removes most
of it.
"""
import numpy as np

from cmcgraph import PlanarCurve, generate_mesh, serrin_limit_solve, solve_dirichlet

disk = PlanarCurve.circle()
mesh = generate_mesh(disk, 0.05)
res = serrin_limit_solve(disk, 0.0, H=1.0, N=6, mesh=mesh)
direct = solve_dirichlet(mesh, 1.0, 0.0)
for k, (Hk, top) in enumerate(zip(res.H_values, res.max_abs), 1):
    print(f"k={k} H_k={Hk:.4f} max u_k={top:.5f} (bound {res.height_bound})")
print("consecutive differences:", np.round(res.differences, 5))
print(f"|u_6 - direct| = {np.max(np.abs(res.final - direct)):.4f}")
print(f"|extrapolated - direct| = {np.max(np.abs(res.extrapolated - direct)):.2e}")
