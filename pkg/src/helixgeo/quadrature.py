"""Quadratures: affine parameter along r, zero-momentum azimuth drift, area.

All integrals use QUADPACK's adaptive Gauss-Kronrod rule (``scipy.integrate.quad``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .dynamics import ConservedPair, effective_potential, potential_derivatives
from .errors import ForbiddenRegion
from .surface import SurfaceParams, metric_at

EPSABS = 1e-12
EPSREL = 1e-10
#: Distance from an endpoint, in units of b, handled by the linearised remainder.
ENDPOINT_CUT = 1e-8
_LIMIT = 500


def _quad(fn, lo, hi):
    value, _ = integrate.quad(fn, lo, hi, epsabs=EPSABS, epsrel=EPSREL, limit=_LIMIT)
    return value


@dataclass(frozen=True)
class RadialSpeedFn:
    """``f(r) = |dr/dlambda| = sqrt(2 (E - V(r)) / gamma_rr(r))``."""

    params: SurfaceParams
    conserved: ConservedPair

    def squared(self, r):
        g = metric_at(self.params, r)
        V = effective_potential(self.params, self.conserved.ell, r)
        return 2.0 * (self.conserved.E - V) / g.gamma_rr

    def __call__(self, r):
        return np.sqrt(np.maximum(self.squared(r), 0.0))

    def allowed(self, r):
        return effective_potential(self.params, self.conserved.ell, r) <= self.conserved.E


def _endpoint_remainder(p, conserved, r_end, inward, delta):
    """``int_0^delta ds / f(r_end + inward*s)`` with ``f^2`` linearised at ``r_end``."""
    g = metric_at(p, r_end)
    V, dV, _ = potential_derivatives(p, conserved.ell, r_end)
    gap = conserved.E - V
    # a root known only to rounding is a turning point; a spurious 1e-16 gap
    # would shift the time by 2 sqrt(gap / beta)
    if gap <= 16.0 * np.finfo(float).eps * conserved.E:
        gap = 0.0
    alpha = 2.0 * gap / g.gamma_rr
    beta = -2.0 * inward * dV / g.gamma_rr  # d(f^2)/ds
    if abs(beta) * delta <= 1e-12 * alpha:
        return delta / math.sqrt(alpha)
    end = alpha + beta * delta
    if end <= 0:
        return math.inf
    return 2.0 * (math.sqrt(end) - math.sqrt(alpha)) / beta


def lambda_of_r(p: SurfaceParams, conserved: ConservedPair, r0: float, r1: float) -> float:
    """Affine-parameter time to move monotonically between ``r0`` and ``r1``.

    Either endpoint may be a turning point: each half of the interval is
    integrated in ``u`` with ``r = end -/+ u^2``, which removes the inverse
    square root, and the last ``1e-8 b`` before each endpoint is taken from
    the linearised speed.

    Raises
    ------
    ForbiddenRegion
        ``V > E`` somewhere strictly inside the interval.
    """
    lo, hi = sorted((float(r0), float(r1)))
    if lo == hi:
        return 0.0
    f = RadialSpeedFn(p, conserved)
    inner = np.linspace(lo, hi, 2051)[1:-1]
    V = effective_potential(p, conserved.ell, inner)
    if np.any(V > conserved.E * (1.0 + 1e-12)):
        bad = inner[np.argmax(V - conserved.E)]
        raise ForbiddenRegion(f"V > E at r = {bad:.12g} inside [{lo}, {hi}]")
    delta = min(ENDPOINT_CUT * p.b, (hi - lo) / 4.0)
    mid = 0.5 * (lo + hi)

    def left(u):
        return 2.0 * u / f(lo + u * u)

    def right(u):
        return 2.0 * u / f(hi - u * u)

    total = _quad(left, math.sqrt(delta), math.sqrt(mid - lo))
    total += _quad(right, math.sqrt(delta), math.sqrt(hi - mid))
    total += _endpoint_remainder(p, conserved, lo, +1.0, delta)
    total += _endpoint_remainder(p, conserved, hi, -1.0, delta)
    return total


def half_period(p: SurfaceParams, conserved: ConservedPair, r_minus: float, r_plus: float) -> float:
    """Time from one turning point to the other."""
    return lambda_of_r(p, conserved, r_minus, r_plus)


def phi_of_r_zero_momentum(p: SurfaceParams, r0: float, r1: float) -> float:
    """Azimuth change ``-int M_r dr`` along an ``ell = 0`` geodesic from ``r0`` to ``r1``."""
    if r0 == r1 or p.c == 0.0:
        return 0.0

    def M_r(w):
        return float(metric_at(p, w).M_r)

    # one sub-interval per half period keeps QUADPACK's subdivision cheap
    n = max(1, math.ceil(abs(r1 - r0) / (math.pi * p.b)))
    edges = np.linspace(r0, r1, n + 1)
    return -sum(_quad(M_r, lo, hi) for lo, hi in zip(edges[:-1], edges[1:]))


def zero_momentum_loop(p: SurfaceParams) -> float:
    """Azimuth gained by an ``ell = 0`` geodesic over one full meridian loop."""
    return phi_of_r_zero_momentum(p, 0.0, p.period)


def surface_area(p: SurfaceParams, phi_span: float = 2.0 * math.pi) -> float:
    """Area of the tube over an azimuthal span ``phi_span``."""
    if not phi_span > 0:
        raise ValueError(f"phi_span must be positive, got {phi_span}")

    def density(r):
        return float(metric_at(p, r).area_density)

    edges = np.linspace(0.0, p.period, 5)
    per_radian = sum(_quad(density, lo, hi) for lo, hi in zip(edges[:-1], edges[1:]))
    return phi_span * per_radian
