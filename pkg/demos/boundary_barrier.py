"""
Logarithmic barrier near the boundary curve
===========================================

Near L the function ``w = delta log(1 + beta d) + phi`` (``d`` the distance to
L) is a lower barrier once ``beta`` is large.  The parameters are chosen
automatically and the operator is evaluated on a grid in the collar.
"""
import numpy as np

from cmcgraph import CurveFunction, PlanarCurve, build_collar, choose_barrier_params

# circle of radius 0.6, constant data shifted to zero, vertex height 2
chart = build_collar(PlanarCurve.circle(radius=0.6), CurveFunction.constant(0.0))
params, report = choose_barrier_params(chart, vertex_height=2.0, H_t_min=0.8)
print(f"collar width {chart.epsilon}, delta={params.delta}, beta={params.beta:.4f}, "
      f"epsilon1={params.epsilon1}")
print(f"closed-form floor (e^2 - 1)/epsilon1 = {(np.e ** 2 - 1) / params.epsilon1:.4f}")
print(f"min of A^(3/2) Q[w] over the samples: {report.min_scaled:.3f} at (theta, s) = {report.argmin}")

# an ellipse with varying data needs a smaller delta and a thinner layer
ellipse = PlanarCurve.ellipse(radii=(1.2, 0.8), angle=0.3)
th = np.linspace(0, 2 * np.pi, 64, endpoint=False)
chart = build_collar(ellipse, CurveFunction(0.5 + 0.2 * np.cos(th)))
params, report = choose_barrier_params(chart, vertex_height=3.0, H_t_min=0.6)
print(f"ellipse: delta={params.delta:.4f}, beta={params.beta:.4g}, epsilon1={params.epsilon1:.4g}, "
      f"passed={report.passed}")
