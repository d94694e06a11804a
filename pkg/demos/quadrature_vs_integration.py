"""
Quadrature against direct integration
=====================================

Two quantities can be computed either by integrating the geodesic equations
or by a one-dimensional quadrature: the time between turning points, and the
azimuth gained by a zero-momentum geodesic on one loop around the tube.
"""

from helixgeo import (
    LaunchSpec,
    SurfaceParams,
    integrate,
    lambda_of_r,
    launch,
    surface_area,
    turning_points,
    zero_momentum_loop,
)

p = SurfaceParams.cavatappi()

# half oscillation of a bound orbit
trace = integrate(p, launch(p, LaunchSpec(beta=1.0)), 30.0)
turns = trace.events_of("turning")
tp = turning_points(p, trace.conserved)
print("half period from events    :", turns[1].lam - turns[0].lam)
print("half period from quadrature:", lambda_of_r(p, trace.conserved, tp.r_minus, tp.r_plus))

# ell = 0: one full meridian loop
trace = integrate(p, launch(p, LaunchSpec(beta=0.0)), 2 * p.period)
lap = [e for e in trace.events_of("outer_equator") if abs(e.state.r - p.period) < 1e-6][0]
print("loop dphi from integration :", lap.state.phi)
print("loop dphi from quadrature  :", zero_momentum_loop(p))

# 2.5 turns of pasta
print("area of 2.5 revolutions    :", surface_area(p, 5 * 3.141592653589793))
