"""Helically symmetric tubes: parameters, embedding and intrinsic geometry.

The surface is the screw revolution of a (possibly ridged) circle about the
z-axis::

    rho = a + b cos(chi) + d cos(m chi)
    z   = c phi + b sin(chi) + d sin(m chi)

with radial coordinate ``r = b chi`` measured along the meridian from the outer
equator. All geometric quantities depend on ``r`` only; the helical symmetry
is translation in ``phi``.

Every function taking ``r`` accepts a float or a numpy array and broadcasts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AxisIntersection,
    BadFrequency,
    CuspedProfile,
    InvalidParameter,
    NonPositiveB,
)

#: Largest ridge frequency the equilibrium scan is dimensioned for.
M_MAX = 64
#: Samples per meridian period in the cusp scan.
CUSP_SCAN_SAMPLES = 4096


def sincospi(x):
    """Return ``(sin(pi x), cos(pi x))`` with exact zeros at half-integers.

    Plain ``np.sin(np.pi)`` is 1.2e-16, which would make the inner equator only
    approximately a geodesic. Reducing the argument in units of pi first keeps
    the symmetry points exact.
    """
    x = np.asarray(x, dtype=float)
    y = x - 2.0 * np.floor(0.5 * x + 0.5)  # [-1, 1)
    ys = np.where(y > 0.5, 1.0 - y, np.where(y < -0.5, -1.0 - y, y))
    s = np.sin(np.pi * ys)
    co = np.sin(np.pi * (0.5 - np.abs(y)))
    if s.ndim == 0:
        return float(s), float(co)
    return s, co


@dataclass(frozen=True)
class SurfaceParams:
    """One member of the five-parameter helical tube family.

    Parameters
    ----------
    a : float
        Radius of the cylinder carrying the central helix.
    b : float
        Radius of the cross-section circle.
    c : float
        Helix pitch per radian; ``c < 0`` gives a left-handed tube.
    d : float
        Ridge amplitude, ``0`` for the smooth tube.
    m : int
        Ridge frequency; ignored when ``d == 0``.

    Construction validates; see :func:`validate_params` for the rules.
    """

    a: float
    b: float
    c: float
    d: float = 0.0
    m: int = 0
    strict: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        for name in ("a", "b", "c", "d"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise InvalidParameter(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, float(value))
        _check(self)

    @property
    def eta(self) -> float:
        """Inclination angle of the central helix, ``arctan(c / a)``."""
        return math.atan2(self.c, self.a)

    @property
    def period(self) -> float:
        """Period of every metric quantity in ``r``."""
        return 2.0 * math.pi * self.b

    @property
    def is_smooth(self) -> bool:
        return self.d == 0.0

    def as_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "c": self.c, "d": self.d, "m": self.m}

    @classmethod
    def cavatappi(cls, exact_pitch: bool = False) -> "SurfaceParams":
        """Legendre's ridged cavatappo, scaled by 1/2.

        ``exact_pitch`` uses his pitch ``5 / (2 pi)`` instead of the rational
        approximation 4/5.
        """
        c = 5.0 / (2.0 * math.pi) if exact_pitch else 0.8
        return cls(1.5, 1.0, c, 0.05, 10)

    @classmethod
    def torus(cls, a: float, b: float) -> "SurfaceParams":
        return cls(a, b, 0.0, 0.0, 0)


def _check(p: SurfaceParams) -> None:
    if p.b <= 0:
        raise NonPositiveB(f"cross-section radius must be positive, got b={p.b}")
    if p.d < 0:
        raise InvalidParameter(f"ridge amplitude must be non-negative, got d={p.d}")
    if p.a - p.b - p.d <= 0:
        raise AxisIntersection(
            f"surface reaches the screw axis: a - b - d = {p.a - p.b - p.d} <= 0"
        )
    if p.d > 0:
        m = p.m
        if isinstance(m, float) and m.is_integer():
            m = int(m)
            object.__setattr__(p, "m", m)
        if isinstance(m, bool) or not isinstance(m, (int, np.integer)) or m < 2:
            raise BadFrequency(f"ridge frequency must be an integer >= 2, got m={p.m!r}")
        if m > M_MAX:
            raise BadFrequency(f"ridge frequency m={m} exceeds the supported maximum {M_MAX}")
        object.__setattr__(p, "m", int(m))
        if p.strict:
            if p.d * m >= p.b:
                raise CuspedProfile(
                    f"d*m = {p.d * m} >= b = {p.b}; the profile may have cusps "
                    "(pass strict=False to fall back to a scan)"
                )
        else:
            x = np.arange(CUSP_SCAN_SAMPLES) * (2.0 / CUSP_SCAN_SAMPLES)
            _, S, T = _profile(p, p.b * np.pi * x)
            speed2 = S * S + T * T
            if speed2.min() <= 1e-12 * p.b * p.b:
                raise CuspedProfile(
                    f"profile speed vanishes near chi = {np.pi * x[speed2.argmin()]:.6g}"
                )
    else:
        m = p.m
        if isinstance(m, float) and m.is_integer():
            object.__setattr__(p, "m", int(m))


def validate_params(a, b, c, d=0.0, m=0, *, strict: bool = True) -> SurfaceParams:
    """Build a :class:`SurfaceParams`, raising on invalid input.

    Raises
    ------
    NonPositiveB
        ``b <= 0``.
    AxisIntersection
        ``a - b - d <= 0``.
    BadFrequency
        ``d > 0`` and ``m`` is not an integer in ``[2, 64]``.
    CuspedProfile
        ``d*m >= b`` in strict mode, or the sampled profile speed vanishes
        otherwise.
    """
    return SurfaceParams(a, b, c, d, m, strict=strict)


@dataclass(frozen=True)
class SurfacePoint:
    r: float
    chi: float
    phi: float
    xyz: np.ndarray


def wrap_angle(chi):
    """Reduce an angle into ``(-pi, pi]``."""
    return np.pi - np.mod(np.pi - np.asarray(chi, dtype=float), 2.0 * np.pi)


def embed(p: SurfaceParams, chi, phi) -> np.ndarray:
    """Cartesian position of the surface point(s) at angles ``(chi, phi)``.

    Returns an array of shape ``broadcast(chi, phi).shape + (3,)``.
    """
    chi = np.asarray(chi, dtype=float)
    phi = np.asarray(phi, dtype=float)
    rho = p.a + p.b * np.cos(chi) + p.d * np.cos(p.m * chi)
    z = p.c * phi + p.b * np.sin(chi) + p.d * np.sin(p.m * chi)
    return np.stack(np.broadcast_arrays(rho * np.cos(phi), rho * np.sin(phi), z), axis=-1)


def surface_point(p: SurfaceParams, r: float, phi: float) -> SurfacePoint:
    chi = r / p.b
    return SurfacePoint(float(r), float(wrap_angle(chi)), float(phi), embed(p, chi, phi))


def _trig(p: SurfaceParams, r):
    x = np.asarray(r, dtype=float) / (p.b * np.pi)
    s1, c1 = sincospi(x)
    sm, cm = sincospi(p.m * x)
    return s1, c1, sm, cm


def _profile(p: SurfaceParams, r):
    s1, c1, sm, cm = _trig(p, r)
    R = p.a + p.b * c1 + p.d * cm
    S = p.b * c1 + p.d * p.m * cm
    T = p.b * s1 + p.d * p.m * sm
    return R, S, T


@dataclass(frozen=True)
class MetricComponents:
    """First fundamental form and its orthogonalized pieces at radius ``r``.

    ``ds^2 = g_phiphi dphi^2 + 2 g_phir dphi dr + g_rr dr^2
    = M^2 (dphi + M_r dr)^2 + gamma_rr dr^2``.
    """

    R: np.ndarray
    S: np.ndarray
    T: np.ndarray
    g_phiphi: np.ndarray
    g_phir: np.ndarray
    g_rr: np.ndarray
    M: np.ndarray
    M_r: np.ndarray
    gamma_rr: np.ndarray
    det_g: np.ndarray
    area_density: np.ndarray

    def matrix(self) -> np.ndarray:
        """Metric as ``(..., 2, 2)`` array in coordinate order ``(r, phi)``."""
        return np.stack(
            [
                np.stack([self.g_rr, self.g_phir], axis=-1),
                np.stack([self.g_phir, self.g_phiphi], axis=-1),
            ],
            axis=-2,
        )


def metric_at(p: SurfaceParams, r) -> MetricComponents:
    R, S, T = _profile(p, r)
    b2 = p.b * p.b
    c2 = p.c * p.c
    g_phiphi = R * R + c2
    g_phir = p.c * S / p.b
    g_rr = (S * S + T * T) / b2
    M_r = p.c * S / (p.b * g_phiphi)
    gamma_rr = (S * S + T * T - c2 * S * S / g_phiphi) / b2
    det_g = g_phiphi * g_rr - g_phir * g_phir
    return MetricComponents(
        R=R,
        S=S,
        T=T,
        g_phiphi=g_phiphi,
        g_phir=g_phir,
        g_rr=g_rr,
        M=np.sqrt(g_phiphi),
        M_r=M_r,
        gamma_rr=gamma_rr,
        det_g=det_g,
        area_density=np.sqrt(det_g),
    )


@dataclass(frozen=True)
class MetricDerivatives:
    """Analytic first (``d*``) and second (``dd*``) r-derivatives of the metric."""

    g_phiphi: np.ndarray
    g_phir: np.ndarray
    g_rr: np.ndarray
    dg_phiphi: np.ndarray
    dg_phir: np.ndarray
    dg_rr: np.ndarray
    ddg_phiphi: np.ndarray
    ddg_phir: np.ndarray
    ddg_rr: np.ndarray


def metric_derivatives(p: SurfaceParams, r) -> MetricDerivatives:
    s1, c1, sm, cm = _trig(p, r)
    a, b, c, d, m = p.a, p.b, p.c, p.d, p.m
    R = a + b * c1 + d * cm
    S = b * c1 + d * m * cm
    T = b * s1 + d * m * sm
    dR = -T / b
    dS = -(b * s1 + d * m * m * sm) / b
    dT = (b * c1 + d * m * m * cm) / b
    ddR = -dT / b
    ddS = -(b * c1 + d * m**3 * cm) / (b * b)
    ddT = -(b * s1 + d * m**3 * sm) / (b * b)
    b2 = b * b
    return MetricDerivatives(
        g_phiphi=R * R + c * c,
        g_phir=c * S / b,
        g_rr=(S * S + T * T) / b2,
        dg_phiphi=2.0 * R * dR,
        dg_phir=c * dS / b,
        dg_rr=2.0 * (S * dS + T * dT) / b2,
        ddg_phiphi=2.0 * (dR * dR + R * ddR),
        ddg_phir=c * ddS / b,
        ddg_rr=2.0 * (dS * dS + S * ddS + dT * dT + T * ddT) / b2,
    )


@dataclass(frozen=True)
class Frame:
    """Orthonormal frame and coframe in the coordinate order ``(r, phi)``.

    ``vectors[..., k, :]`` holds the components of ``e_rhat`` (k=0) and
    ``e_phihat`` (k=1) on ``(d/dr, d/dphi)``; ``coframe[..., k, :]`` holds
    ``omega^rhat`` and ``omega^phihat`` on ``(dr, dphi)``.
    """

    vectors: np.ndarray
    coframe: np.ndarray

    def pairing(self) -> np.ndarray:
        return np.einsum("...ai,...bi->...ab", self.coframe, self.vectors)

    def metric(self) -> np.ndarray:
        return np.einsum("...ai,...aj->...ij", self.coframe, self.coframe)


def frames_at(p: SurfaceParams, r) -> Frame:
    g = metric_at(p, r)
    sg = np.sqrt(g.gamma_rr)
    zero = np.zeros_like(sg)
    vectors = np.stack(
        [np.stack([1.0 / sg, -g.M_r / sg], axis=-1), np.stack([zero, 1.0 / g.M], axis=-1)],
        axis=-2,
    )
    coframe = np.stack(
        [np.stack([sg, zero], axis=-1), np.stack([g.M * g.M_r, g.M], axis=-1)],
        axis=-2,
    )
    return Frame(vectors, coframe)


def christoffel(p: SurfaceParams, r) -> np.ndarray:
    """Christoffel symbols ``Gamma[..., i, j, k]`` in coordinate order ``(r, phi)``."""
    md = metric_derivatives(p, r)
    g = np.stack(
        [
            np.stack([md.g_rr, md.g_phir], axis=-1),
            np.stack([md.g_phir, md.g_phiphi], axis=-1),
        ],
        axis=-2,
    )
    dg_r = np.stack(
        [
            np.stack([md.dg_rr, md.dg_phir], axis=-1),
            np.stack([md.dg_phir, md.dg_phiphi], axis=-1),
        ],
        axis=-2,
    )
    # dg[..., l, i, j] = d_l g_ij ; only d_r is nonzero
    dg = np.stack([dg_r, np.zeros_like(dg_r)], axis=-3)
    lowered = 0.5 * (
        np.swapaxes(dg, -3, -2)  # d_j g_lk  -> [l, j, k]
        + np.moveaxis(dg, -3, -1)  # d_k g_lj -> [l, j, k]
        - dg  # d_l g_jk
    )
    return np.einsum("...il,...ljk->...ijk", np.linalg.inv(g), lowered)


def _brioschi(E, F, G, Eu, Ev, Fu, Fv, Gu, Gv, Evv, Fuv, Guu):
    def det3(m):
        return (
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        )

    m1 = [
        [-0.5 * Evv + Fuv - 0.5 * Guu, 0.5 * Eu, Fu - 0.5 * Ev],
        [Fv - 0.5 * Gu, E, F],
        [0.5 * Gv, F, G],
    ]
    m2 = [
        [0.0 * E, 0.5 * Ev, 0.5 * Gu],
        [0.5 * Ev, E, F],
        [0.5 * Gu, F, G],
    ]
    return (det3(m1) - det3(m2)) / (E * G - F * F) ** 2


def gaussian_curvature_general(p: SurfaceParams, r):
    """Gaussian curvature from the Brioschi formula with analytic derivatives.

    Coordinates are ``(u, v) = (phi, r)``; every ``u`` derivative vanishes.
    """
    md = metric_derivatives(p, r)
    z = np.zeros_like(md.g_rr)
    return _brioschi(
        md.g_phiphi, md.g_phir, md.g_rr,
        z, md.dg_phiphi, z, md.dg_phir, z, md.dg_rr,
        md.ddg_phiphi, z, z,
    )


def gaussian_curvature_smooth(p: SurfaceParams, r):
    """Closed-form curvature of the smooth tube (``d == 0``)."""
    if not p.is_smooth:
        raise ValueError("closed-form curvature requires d == 0")
    a, b, c = p.a, p.b, p.c
    s, co = sincospi(np.asarray(r, dtype=float) / (b * np.pi))
    R = a + b * co
    return (co * R**3 - b * c * c * s**4) / (b * (R * R + c * c * s * s) ** 2)


def gaussian_curvature(p: SurfaceParams, r):
    if p.is_smooth:
        return gaussian_curvature_smooth(p, r)
    return gaussian_curvature_general(p, r)
