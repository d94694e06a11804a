"""
A few geodesics on the cavatappi
================================

Launch angle beta is measured from the meridian direction. From the outer
equator with unit speed, beta below about 0.36 clears the humps next to the
inner equator and winds around the tube; larger beta stays trapped between
turning points, and beta = pi/2 runs along the outer equator. beta = 0 is a zero-momentum geodesic that
drifts in phi on each loop and so never closes.
"""

import math
import sys
from pathlib import Path

from helixgeo import LaunchSpec, SurfaceParams, classify_orbit, integrate, launch
from helixgeo import export

out = Path(sys.argv[1] if len(sys.argv) > 1 else "gallery")
out.mkdir(exist_ok=True)

p = SurfaceParams.cavatappi()
export.write_obj(p, export.MeshSpec(96, 48, 2.5), out / "cavatappi.obj")

for beta in (0.0, 0.3, 1.0, math.pi / 2):
    start = launch(p, LaunchSpec(beta=beta))
    trace = integrate(p, start, 40.0)
    kind = classify_orbit(p, trace.conserved, allow_zero_momentum=True).kind.value
    turns = len(trace.events_of("turning"))
    inner = len(trace.events_of("inner_equator"))
    print(f"beta={beta:.3f} ell={trace.conserved.ell:+.5f} {kind:18s} "
          f"turns={turns:2d} inner crossings={inner:2d} drift={trace.drift:.1e}")
    export.write_geodesic(trace, out / f"beta_{beta:.3f}.csv", out / f"beta_{beta:.3f}.json")

print(f"wrote mesh and traces to {out}/")
