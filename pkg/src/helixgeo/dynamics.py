"""Symmetry-reduced radial motion.

The screw momentum ``ell = M U^phihat`` and the energy ``E = |U|^2 / 2`` are
conserved along geodesics, which leaves one-dimensional motion in ``r``::

    (U^rhat)^2 / 2 + V(r) = E,      V(r) = ell^2 / (2 M(r)^2)

``M^2 = R^2 + c^2``, so the critical points of ``V`` are the zeros of
``R T`` (``R > 0`` on every valid surface).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BelowMinimum, DegenerateCritical, ForbiddenRegion, ZeroMomentum
from .surface import SurfaceParams, _profile, sincospi

#: Grid density of the root scans, per period ``2 pi b``.
SCAN_SAMPLES = 8192
ROOT_TOL = 1e-12
SEPARATRIX_RTOL = 1e-12
DEGENERACY_TOL = 1e-10


@dataclass(frozen=True)
class ConservedPair:
    ell: float
    E: float

    def __post_init__(self):
        if self.E < 0:
            raise ValueError(f"energy must be non-negative, got {self.E}")

    @property
    def speed(self) -> float:
        return math.sqrt(2.0 * self.E)


class Stability(str, enum.Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"


class OrbitKind(str, enum.Enum):
    BOUND = "bound"
    UNBOUND = "unbound"
    EQUATORIAL_STABLE = "equatorial-stable"
    EQUATORIAL_UNSTABLE = "equatorial-unstable"


@dataclass(frozen=True)
class Equilibrium:
    r_star: float
    stability: Stability
    V_value: float


@dataclass(frozen=True)
class TurningPoints:
    r_plus: float
    r_minus: float
    #: True when the bounding point is an unstable equilibrium at energy E.
    separatrix: bool = False


@dataclass(frozen=True)
class OrbitAnalysis:
    conserved: ConservedPair
    kind: OrbitKind
    turning: TurningPoints | None
    equilibria: list[Equilibrium] = field(default_factory=list)
    #: Unbound orbits cross the inner equator infinitely often.
    crosses_inner_equator: bool = False


def effective_potential(p: SurfaceParams, ell: float, r):
    R, _, _ = _profile(p, r)
    return 0.5 * ell * ell / (R * R + p.c * p.c)


def potential_derivatives(p: SurfaceParams, ell: float, r):
    """Return ``(V, V', V'')`` at ``r``."""
    x = np.asarray(r, dtype=float) / (p.b * np.pi)
    s1, c1 = sincospi(x)
    sm, cm = sincospi(p.m * x)
    a, b, c, d, m = p.a, p.b, p.c, p.d, p.m
    R = a + b * c1 + d * cm
    T = b * s1 + d * m * sm
    dR = -T / b
    dT = (b * c1 + d * m * m * cm) / b
    M2 = R * R + c * c
    l2 = ell * ell
    V = 0.5 * l2 / M2
    dV = l2 * R * T / (b * M2 * M2)
    ddV = l2 / b * ((dR * T + R * dT) / M2**2 - 4.0 * R * R * T * dR / M2**3)
    return V, dV, ddV


def _bisect(fn, lo, hi, f_lo, tol):
    """Vectorized bisection on brackets ``[lo, hi]`` with ``sign(f(lo)) = sign(f_lo)``."""
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    sign_lo = np.sign(f_lo)
    for _ in range(200):
        if np.all(np.abs(hi - lo) <= tol):
            break
        mid = 0.5 * (lo + hi)
        f_mid = fn(mid)
        same = np.sign(f_mid) == sign_lo
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)
    return 0.5 * (lo + hi)


def find_equilibria(p: SurfaceParams, ell: float = 1.0) -> list[Equilibrium]:
    """Critical points of ``V`` in ``(-b pi, b pi]``, sorted by position.

    Sign-change scan of ``V'`` on 8192 samples, bisection to 1e-12, then one
    Newton step.

    Raises
    ------
    ZeroMomentum
        ``ell == 0``: the potential is flat.
    DegenerateCritical
        ``|V''|`` at a root is below ``1e-10 ell^2 / b^4``.
    """
    if ell == 0:
        raise ZeroMomentum("the effective potential is flat for ell = 0")
    b = p.b
    half = SCAN_SAMPLES // 2
    h = b * np.pi / half
    grid = h * np.arange(-half + 1, half + 1)

    def dV(r):
        return potential_derivatives(p, ell, r)[1]

    f = dV(grid)
    exact = grid[f == 0.0]
    bracket = (f[:-1] * f[1:]) < 0.0
    lo, hi = grid[:-1][bracket], grid[1:][bracket]
    roots = _bisect(dV, lo, hi, f[:-1][bracket], ROOT_TOL)
    if roots.size:
        _, d1, d2 = potential_derivatives(p, ell, roots)
        step = np.where(d2 != 0.0, d1 / np.where(d2 != 0.0, d2, 1.0), 0.0)
        polished = roots - step
        roots = np.where((polished > lo) & (polished < hi), polished, roots)
    # V' vanishes exactly at the symmetry points; grid ends at b pi
    roots = np.sort(np.concatenate([exact, roots]))

    V, _, ddV = potential_derivatives(p, ell, roots)
    threshold = DEGENERACY_TOL * ell * ell / b**4
    out = []
    for r, v, k in zip(roots, V, ddV):
        if abs(k) < threshold:
            raise DegenerateCritical(f"V'' = {k:.3g} at r = {r:.12g} is numerically zero")
        out.append(Equilibrium(float(r), Stability.STABLE if k > 0 else Stability.UNSTABLE, float(v)))
    return out


def _periodic_equilibria(p, eqs, lo, hi):
    """Copies of the one-period equilibria shifted into ``[lo, hi]``."""
    P = p.period
    out = []
    for e in eqs:
        k0 = math.ceil((lo - e.r_star) / P)
        k1 = math.floor((hi - e.r_star) / P)
        for k in range(k0, k1 + 1):
            out.append((e.r_star + k * P, e))
    return out


def _boundary(p, ell, E, r0, direction, eqs):
    """First point beyond ``r0`` in ``direction`` where ``V`` reaches ``E``.

    Returns ``(r, separatrix)``; ``(None, False)`` if ``V < E`` for a full period.
    """
    V0, dV0, _ = potential_derivatives(p, ell, r0)
    if V0 >= E * (1.0 - SEPARATRIX_RTOL) and direction * dV0 > 0:
        return float(r0), False
    P = p.period
    h = P / SCAN_SAMPLES
    offsets = h * np.arange(1, SCAN_SAMPLES + 1)
    excess = effective_potential(p, ell, r0 + direction * offsets) - E
    hit = np.flatnonzero(excess >= 0.0)
    s_hit = offsets[hit[0]] if hit.size else math.inf

    # a local maximum of V at height ~E can hide between grid points
    best = None
    lo_r, hi_r = sorted((r0, r0 + direction * P))
    for r_eq, e in _periodic_equilibria(p, eqs, lo_r, hi_r):
        s = (r_eq - r0) * direction
        if e.stability is Stability.UNSTABLE and 0 < s <= s_hit:
            if e.V_value >= E * (1.0 - SEPARATRIX_RTOL) and (best is None or s < best[0]):
                best = (s, r_eq, e)
    if best is not None:
        s_hi, r_eq, e = best
        if abs(e.V_value - E) <= SEPARATRIX_RTOL * E:
            return float(r_eq), True
    elif hit.size:
        s_hi = s_hit
    else:
        return None, False
    s_lo = h * math.floor(s_hi / h)
    if s_lo >= s_hi:
        s_lo -= h
    s_lo = max(s_lo, 0.0)

    def g(s):
        return effective_potential(p, ell, r0 + direction * s) - E

    g_lo = g(s_lo)
    if g_lo >= 0:
        return float(r0 + direction * s_lo), False
    s = float(_bisect(g, s_lo, s_hi, g_lo, ROOT_TOL))
    root = r0 + direction * s
    V, dV, _ = potential_derivatives(p, ell, root)
    if dV != 0.0:
        newton = root - (V - E) / dV
        if (newton - r0) * direction >= s_lo and (newton - r0) * direction <= s_hi:
            root = newton
    return float(root), False


def _is_symmetry_point(p, r):
    x = r / (p.b * np.pi)
    return x == round(x)


def _equilibrium_at(p, eqs, r):
    P = p.period
    for e in eqs:
        shift = r - e.r_star
        if abs(shift - P * round(shift / P)) <= 1e-9 * p.b:
            return e
    return None


def turning_points(p: SurfaceParams, conserved: ConservedPair, r0: float = 0.0) -> TurningPoints | None:
    """Turning points of the radial motion through ``r0``, or ``None`` if unbound.

    For ``r0`` on a symmetry point (an equator) only the outward root is
    solved and ``r_minus`` is its mirror image, so ``r_minus = -r_plus``
    exactly for ``r0 = 0``. Starting on an equilibrium at its own energy gives
    ``r_plus == r_minus == r0``.

    Raises
    ------
    BelowMinimum
        ``E`` is below the minimum of ``V``.
    ForbiddenRegion
        ``V(r0) > E``.
    """
    ell, E = conserved.ell, conserved.E
    if ell == 0:
        return None
    eqs = find_equilibria(p, ell)
    v_min = min(e.V_value for e in eqs)
    v_max = max(e.V_value for e in eqs)
    if E < v_min * (1.0 - SEPARATRIX_RTOL):
        raise BelowMinimum(f"E = {E} is below min V = {v_min}")
    V0 = float(effective_potential(p, ell, r0))
    if E < V0 * (1.0 - SEPARATRIX_RTOL):
        raise ForbiddenRegion(f"V(r0) = {V0} exceeds E = {E}")
    if E > v_max * (1.0 + SEPARATRIX_RTOL):
        return None
    if abs(E - V0) <= SEPARATRIX_RTOL * E:
        e = _equilibrium_at(p, eqs, r0)
        if e is not None:
            return TurningPoints(float(r0), float(r0), e.stability is Stability.UNSTABLE)
    r_plus, sep_plus = _boundary(p, ell, E, r0, +1.0, eqs)
    if _is_symmetry_point(p, r0):
        return TurningPoints(r_plus, 2.0 * r0 - r_plus, sep_plus)
    r_minus, sep_minus = _boundary(p, ell, E, r0, -1.0, eqs)
    return TurningPoints(r_plus, r_minus, sep_plus or sep_minus)


def classify_orbit(
    p: SurfaceParams,
    conserved: ConservedPair,
    r0: float = 0.0,
    *,
    allow_zero_momentum: bool = False,
) -> OrbitAnalysis:
    """Classify the radial motion with conserved ``(ell, E)`` through ``r0``.

    For ridged surfaces with several wells the classification refers to the
    energetically allowed interval containing ``r0``.
    """
    if conserved.ell == 0:
        if not allow_zero_momentum:
            raise ZeroMomentum("ell = 0 needs allow_zero_momentum=True")
        return OrbitAnalysis(conserved, OrbitKind.UNBOUND, None, [], crosses_inner_equator=True)
    eqs = find_equilibria(p, conserved.ell)
    tp = turning_points(p, conserved, r0)
    if tp is None:
        return OrbitAnalysis(conserved, OrbitKind.UNBOUND, None, eqs, crosses_inner_equator=True)
    if tp.separatrix:
        return OrbitAnalysis(conserved, OrbitKind.EQUATORIAL_UNSTABLE, tp, eqs)
    if tp.r_plus == tp.r_minus:
        return OrbitAnalysis(conserved, OrbitKind.EQUATORIAL_STABLE, tp, eqs)
    return OrbitAnalysis(conserved, OrbitKind.BOUND, tp, eqs)
