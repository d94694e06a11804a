"""Geodesics, curvature and meshes for five-parameter helical tubes."""

from .dynamics import (
    ConservedPair,
    Equilibrium,
    OrbitAnalysis,
    OrbitKind,
    Stability,
    TurningPoints,
    classify_orbit,
    effective_potential,
    find_equilibria,
    potential_derivatives,
    turning_points,
)
from .errors import HelixGeoError, NumericalError, ValidationError
from .integrator import (
    GeodesicState,
    GeodesicTrace,
    IntegrateOptions,
    LaunchSpec,
    conserved_quantities,
    integrate,
    integrate_many,
    launch,
    rhs_explicit_smooth,
    rhs_general,
    state_beta,
)
from .quadrature import (
    RadialSpeedFn,
    lambda_of_r,
    phi_of_r_zero_momentum,
    surface_area,
    zero_momentum_loop,
)
from .surface import (
    SurfaceParams,
    christoffel,
    embed,
    frames_at,
    gaussian_curvature,
    gaussian_curvature_general,
    gaussian_curvature_smooth,
    metric_at,
    validate_params,
)

__version__ = "0.1.0"
