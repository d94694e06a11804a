"""
Effective potential of the cavatappi
====================================

The screw symmetry turns geodesic flow into one-dimensional motion in the
effective potential V(r) = ell^2 / (2 M(r)^2). This script tabulates V for the
smooth tube and for the ridged cavatappi and lists their equilibria.
"""

import math

import numpy as np

from helixgeo import SurfaceParams, find_equilibria, effective_potential

smooth = SurfaceParams(1.5, 1.0, 0.8)
cavatappi = SurfaceParams.cavatappi()

# the smooth tube has one well (outer equator) and one hump (inner equator)
for name, p in [("smooth", smooth), ("cavatappi", cavatappi)]:
    print(f"{name}: a={p.a} b={p.b} c={p.c} d={p.d} m={p.m}")
    for e in find_equilibria(p, ell=1.0):
        print(f"  r = {e.r_star:+.6f}  {e.stability.value:9s} V = {e.V_value:.6f}")

# coarse text plot of V over one period
r = np.linspace(-math.pi, math.pi, 33)
V = effective_potential(cavatappi, 1.0, r)
lo, hi = V.min(), V.max()
for ri, vi in zip(r, V):
    bar = int(50 * (vi - lo) / (hi - lo))
    print(f"{ri:+.3f} | " + "#" * bar)

# the ridges add a shallow well at r = +/-0.5 and turn the inner equator
# into a local minimum between two high humps at r = +/-2.88
