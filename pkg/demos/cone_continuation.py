"""
From a cone to an H-graph
=========================

The cone over the unit circle with vertex (0, 0, 2) has mean curvature at
least 2/sqrt(5) > 0.8.  Its restriction to the disk of radius 0.6 is a
supersolution; deforming the curvature from that of the cone to the constant
0.8 yields the graph with boundary values given by the cone.
"""
import numpy as np

from cmcgraph import PlanarCurve, ProblemConfig, check_hypotheses, continuation_solve, generate_mesh

config = ProblemConfig(gamma=PlanarCurve.circle(), vertex=(0.0, 0.0, 2.0),
                       L=PlanarCurve.circle(radius=0.6), H=0.8)
report = check_hypotheses(config)
print("hypotheses hold:", report.all_ok, {k: round(m, 4) for k, m in report.margins.items()})

mesh = generate_mesh(config.L, 0.05)
state = continuation_solve(config, mesh)
for step in state.history:
    flag = "ok " if step.accepted else "rej"
    print(f"{flag} t={step.t:.4f} newton iterations={step.iterations}")

psi = state.supersolution.psi
v = state.v
# the solution lies between the boundary data and the supersolution
print(f"v in [{v.min():.4f}, {v.max():.4f}], max psi = {psi.max():.4f}, psi - v >= {np.min(psi - v):.2e}")
