"""
Radial shooting oracle
======================

Rotationally symmetric graphs reduce to one ordinary differential equation.
On an annulus the flux constant is found by bisection; on a disk it vanishes
and the profile is a spherical cap in any dimension.
"""
import numpy as np

from cmcgraph import radial_shoot

ring = radial_shoot(n=2, H=1.0, r_out=1.0, u_out=0.0, r_in=0.5, u_in=0.0)
print(f"annulus: c={ring.c:.12f}, max u={ring.u.max():.6f}, "
      f"first integral residual={ring.first_integral_residual:.1e}")

for n, H in ((2, 1.0), (3, 1.5), (4, 2.0)):
    prof = radial_shoot(n=n, H=H, r_out=1.0)
    R = n / H
    print(f"n={n} H={H}: u(0)={prof(0.0):.12f}, cap value {R - np.sqrt(R * R - 1):.12f}")
