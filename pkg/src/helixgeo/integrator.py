"""Geodesic equations, launch data and adaptive integration with events.

The coordinate second-order system is integrated directly (not the reduced
first-order radial equation), so turning points need no special treatment.
Conserved quantities are monitored but never projected back.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import _kernel
from .dynamics import ConservedPair
from .errors import EventStorm, StepFailure, ZeroSpeed
from .surface import SurfaceParams, christoffel, embed, metric_at, sincospi

EVENT_TURNING = "turning"
EVENT_OUTER = "outer_equator"
EVENT_INNER = "inner_equator"
EVENT_KINDS = (EVENT_TURNING, EVENT_OUTER, EVENT_INNER)

#: Floor of the momentum normalisation, as a fraction of sqrt(2E) M(r0).
ELL_FLOOR = 1e-2


@dataclass(frozen=True)
class GeodesicState:
    lam: float
    r: float
    phi: float
    ur: float
    uphi: float

    def as_array(self) -> np.ndarray:
        return np.array([self.r, self.phi, self.ur, self.uphi])

    def orthonormal(self, p: SurfaceParams) -> tuple[float, float]:
        """Components ``(U^rhat, U^phihat)`` on the orthonormal frame."""
        g = metric_at(p, self.r)
        return (
            float(np.sqrt(g.gamma_rr) * self.ur),
            float(g.M * (self.uphi + g.M_r * self.ur)),
        )

    def conserved(self, p: SurfaceParams) -> ConservedPair:
        return conserved_quantities(p, self)

    def reversed(self) -> "GeodesicState":
        return GeodesicState(self.lam, self.r, self.phi, -self.ur, -self.uphi)


def conserved_quantities(p: SurfaceParams, state: GeodesicState) -> ConservedPair:
    g = metric_at(p, state.r)
    ur, up = state.ur, state.uphi
    ell = g.g_phiphi * up + g.g_phir * ur
    E = 0.5 * (g.g_phiphi * up * up + 2.0 * g.g_phir * up * ur + g.g_rr * ur * ur)
    return ConservedPair(float(ell), float(E))


@dataclass(frozen=True)
class LaunchSpec:
    """Initial data: position plus either a launch angle or coordinate velocities.

    ``beta`` is measured from the direction orthogonal to the parallels, so
    ``beta = pi/2`` launches along the parallel through ``r0``.
    """

    r0: float = 0.0
    phi0: float = 0.0
    beta: float | None = 0.0
    E: float = 0.5
    ur0: float | None = None
    uphi0: float | None = None

    def __post_init__(self):
        explicit = self.ur0 is not None or self.uphi0 is not None
        if explicit and (self.ur0 is None or self.uphi0 is None):
            raise ValueError("explicit launch needs both ur0 and uphi0")
        if not explicit and self.beta is None:
            raise ValueError("launch needs beta or (ur0, uphi0)")
        if self.E < 0:
            raise ValueError(f"energy must be non-negative, got {self.E}")


def launch(p: SurfaceParams, spec: LaunchSpec, lam0: float = 0.0) -> GeodesicState:
    if spec.ur0 is not None:
        return GeodesicState(lam0, spec.r0, spec.phi0, float(spec.ur0), float(spec.uphi0))
    g = metric_at(p, spec.r0)
    speed = math.sqrt(2.0 * spec.E)
    # exact zeros at multiples of pi/2, so parallel launches have ur == 0
    s_beta, c_beta = sincospi(spec.beta / math.pi)
    u_r = speed * c_beta
    u_p = speed * s_beta
    sg = math.sqrt(g.gamma_rr)
    ur = u_r / sg
    uphi = u_p / float(g.M) - float(g.M_r) * u_r / sg
    return GeodesicState(lam0, spec.r0, spec.phi0, ur, uphi)


def state_beta(p: SurfaceParams, state: GeodesicState) -> float:
    """Launch-angle equivalent ``atan2(U^phihat, U^rhat)`` of a state."""
    u_r, u_p = state.orthonormal(p)
    if u_r == 0.0 and u_p == 0.0:
        raise ZeroSpeed("beta is undefined for a zero velocity")
    return math.atan2(u_p, u_r)


def rhs_explicit_smooth(p: SurfaceParams, r, ur, uphi):
    """Accelerations ``(d2r, d2phi)`` on the smooth tube, written out in full.

    With ``R = a + b cos(r/b)`` and ``D = R^2 + c^2 sin^2(r/b)``::

        D r''   = -(c^2/b) cos sin ur^2 - 2 c R cos sin ur uphi - (R^2 + c^2) R sin uphi^2
        D phi'' =  (c/b) sin ur^2 + 2 R sin ur uphi + c R cos sin uphi^2
    """
    if not p.is_smooth:
        raise ValueError("rhs_explicit_smooth requires d == 0")
    a, b, c = p.a, p.b, p.c
    s, co = sincospi(np.asarray(r, dtype=float) / (b * np.pi))
    ur = np.asarray(ur, dtype=float)
    uphi = np.asarray(uphi, dtype=float)
    R = a + b * co
    D = R * R + c * c * s * s
    d2r = -(
        (c * c / b) * co * s * ur * ur
        + 2.0 * c * co * R * s * ur * uphi
        + (R * R + c * c) * R * s * uphi * uphi
    ) / D
    d2phi = (
        (c / b) * s * ur * ur
        + 2.0 * R * s * ur * uphi
        + c * co * R * s * uphi * uphi
    ) / D
    return d2r, d2phi


def rhs_general(p: SurfaceParams, r, ur, uphi):
    """Accelerations ``-Gamma^i_jk u^j u^k`` for any member of the family."""
    gam = christoffel(p, r)
    u = np.stack(np.broadcast_arrays(np.asarray(ur, float), np.asarray(uphi, float)), axis=-1)
    acc = -np.einsum("...ijk,...j,...k->...i", gam, u, u)
    return acc[..., 0], acc[..., 1]


@dataclass(frozen=True)
class IntegrateOptions:
    rtol: float = 1e-10
    atol: float = 1e-12
    max_step: float = math.inf
    max_steps: int = 2_000_000
    max_events: int = 10_000
    event_tol: float = 1e-12
    events: tuple[str, ...] = EVENT_KINDS


@dataclass(frozen=True)
class Event:
    kind: str
    lam: float
    state: GeodesicState


@dataclass(frozen=True, eq=False)
class GeodesicTrace:
    """One integrated geodesic, sampled at every accepted step.

    ``y`` rows are ``(r, phi, ur, uphi)``; ``ell_dev`` and ``E_dev`` are the
    per-sample relative deviations of the invariants from their initial values.
    """

    params: SurfaceParams
    lam: np.ndarray
    y: np.ndarray
    dense: np.ndarray = field(repr=False)
    events: list[Event]
    ell: np.ndarray = field(repr=False)
    E: np.ndarray = field(repr=False)
    ell_dev: np.ndarray = field(repr=False)
    E_dev: np.ndarray = field(repr=False)

    def __len__(self):
        return self.lam.size

    @property
    def r(self):
        return self.y[:, 0]

    @property
    def phi(self):
        return self.y[:, 1]

    @property
    def ur(self):
        return self.y[:, 2]

    @property
    def uphi(self):
        return self.y[:, 3]

    @cached_property
    def xyz(self) -> np.ndarray:
        return embed(self.params, self.r / self.params.b, self.phi)

    @property
    def drift_ell(self) -> float:
        return float(self.ell_dev.max())

    @property
    def drift_E(self) -> float:
        return float(self.E_dev.max())

    @property
    def drift(self) -> float:
        return max(self.drift_ell, self.drift_E)

    @property
    def conserved(self) -> ConservedPair:
        return ConservedPair(float(self.ell[0]), float(self.E[0]))

    def state(self, i: int) -> GeodesicState:
        r, phi, ur, uphi = self.y[i]
        return GeodesicState(float(self.lam[i]), float(r), float(phi), float(ur), float(uphi))

    @property
    def start(self) -> GeodesicState:
        return self.state(0)

    @property
    def end(self) -> GeodesicState:
        return self.state(-1)

    def events_of(self, kind: str) -> list[Event]:
        return [e for e in self.events if e.kind == kind]

    def at(self, lam: float) -> GeodesicState:
        """Dense-output state at any ``lam`` inside the trace."""
        if not self.lam[0] <= lam <= self.lam[-1]:
            raise ValueError(f"lambda = {lam} outside [{self.lam[0]}, {self.lam[-1]}]")
        k = min(int(np.searchsorted(self.lam, lam, side="right")) - 1, self.dense.shape[0] - 1)
        if k < 0:
            return self.start
        h = self.lam[k + 1] - self.lam[k]
        yv = _kernel.dense_eval(self.dense[k], self.y[k], (lam - self.lam[k]) / h)
        return GeodesicState(float(lam), *map(float, yv))


def _event_functions(p: SurfaceParams):
    twopib = 2.0 * math.pi * p.b
    return {
        EVENT_TURNING: lambda y: y[..., 2],
        # zeros of sin(pi x), cos(pi x) with x = r / (2 pi b)
        EVENT_OUTER: lambda y: sincospi(y[..., 0] / twopib)[0],
        EVENT_INNER: lambda y: sincospi(y[..., 0] / twopib)[1],
    }


def _locate(fn, F_step, y_old, t_old, h, tol):
    x_lo, x_hi = 0.0, 1.0
    g_lo = fn(y_old)
    while (x_hi - x_lo) * h > tol:
        x = 0.5 * (x_lo + x_hi)
        g = fn(_kernel.dense_eval(F_step, y_old, x))
        if (g < 0) == (g_lo < 0) and g != 0.0:
            x_lo = x
        else:
            x_hi = x
    x = 0.5 * (x_lo + x_hi)
    return t_old + x * h, _kernel.dense_eval(F_step, y_old, x)


def _find_events(p, ts, ys, F, opts):
    fns = _event_functions(p)
    found = []
    for kind in opts.events:
        fn = fns[kind]
        g = fn(ys)
        g0, g1 = g[:-1], g[1:]
        steps = np.flatnonzero((g0 * g1 < 0) | ((g1 == 0) & (g0 != 0)))
        if len(found) + steps.size > opts.max_events:
            raise EventStorm(f"more than {opts.max_events} events")
        for k in steps:
            h = ts[k + 1] - ts[k]
            if g1[k] == 0:
                lam, yv = ts[k + 1], ys[k + 1]
            else:
                lam, yv = _locate(fn, F[k], ys[k], ts[k], h, opts.event_tol)
            found.append(Event(kind, float(lam), GeodesicState(float(lam), *map(float, yv))))
    found.sort(key=lambda e: (e.lam, EVENT_KINDS.index(e.kind)))
    return found


def integrate(
    p: SurfaceParams,
    start: GeodesicState,
    lambda_end: float,
    opts: IntegrateOptions | None = None,
) -> GeodesicTrace:
    """Integrate the geodesic through ``start`` up to ``lambda_end``.

    Raises
    ------
    StepFailure
        The step size collapsed or the step budget ran out.
    EventStorm
        More than ``opts.max_events`` events were detected.
    """
    opts = opts or IntegrateOptions()
    if not lambda_end > start.lam:
        raise ValueError(f"lambda_end = {lambda_end} must exceed start lambda {start.lam}")
    m = float(p.m)
    ts, ys, F, n, status = _kernel.dop853(
        start.as_array(), float(start.lam), float(lambda_end),
        p.a, p.b, p.c, p.d, m,
        opts.rtol, opts.atol, opts.max_step, opts.max_steps,
        _kernel.A, _kernel.B, _kernel.E3, _kernel.E5, _kernel.D,
    )
    if status == _kernel.STATUS_STEP_TOO_SMALL:
        raise StepFailure(f"step size underflow at lambda = {ts[-1]:.17g}")
    if status == _kernel.STATUS_MAX_STEPS:
        raise StepFailure(f"step budget of {opts.max_steps} exhausted at lambda = {ts[-1]:.17g}")

    ell, E = _kernel.invariant_series(ys, p.a, p.b, p.c, p.d, m)
    ell0, E0 = ell[0], E[0]
    M0 = float(metric_at(p, start.r).M)
    ell_scale = max(abs(ell0), ELL_FLOOR * math.sqrt(2.0 * E0) * M0)
    ell_dev = np.abs(ell - ell0) / ell_scale if ell_scale > 0 else np.zeros_like(ell)
    E_dev = np.abs(E - E0) / E0 if E0 > 0 else np.zeros_like(E)
    events = _find_events(p, ts, ys, F, opts) if opts.events else []
    return GeodesicTrace(p, ts, ys, F, events, ell, E, ell_dev, E_dev)


def integrate_many(
    p: SurfaceParams,
    starts,
    lambda_end: float,
    opts: IntegrateOptions | None = None,
    workers: int | None = None,
) -> list[GeodesicTrace]:
    """Integrate independent geodesics concurrently; results keep input order."""
    starts = list(starts)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda s: integrate(p, s, lambda_end, opts), starts))
