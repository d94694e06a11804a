import math

import numpy as np
import pytest
import sympy as sp
from numpy.testing import assert_allclose

from helixgeo import (
    GeodesicState,
    IntegrateOptions,
    LaunchSpec,
    SurfaceParams,
    conserved_quantities,
    integrate,
    integrate_many,
    launch,
    metric_at,
    rhs_explicit_smooth,
    rhs_general,
    state_beta,
    turning_points,
)
from helixgeo import _kernel
from helixgeo.errors import EventStorm, StepFailure, ZeroSpeed


def _euler_lagrange(p):
    """Accelerations from the Lagrangian g_ij u^i u^j / 2, derived symbolically."""
    r, ur, up = sp.symbols("r u_r u_phi", real=True)
    chi = r / p.b
    R = p.a + p.b * sp.cos(chi) + p.d * sp.cos(p.m * chi)
    S = p.b * sp.cos(chi) + p.d * p.m * sp.cos(p.m * chi)
    T = p.b * sp.sin(chi) + p.d * p.m * sp.sin(p.m * chi)
    gpp, gpr, grr = R**2 + p.c**2, p.c * S / p.b, (S**2 + T**2) / p.b**2
    L = (gpp * up**2 + 2 * gpr * up * ur + grr * ur**2) / 2
    ar, ap = sp.symbols("a_r a_phi")
    # d/dlam dL/du^i = dL/dx^i, with d/dlam = ur d/dr + ar d/dur + ap d/duphi
    eqs = []
    for u, x_is_r in ((ur, True), (up, False)):
        P = L.diff(u)
        total = P.diff(r) * ur + P.diff(ur) * ar + P.diff(up) * ap
        eqs.append(total - (L.diff(r) if x_is_r else 0))
    sol = sp.solve(eqs, [ar, ap], dict=True)[0]
    return sp.lambdify((r, ur, up), (sol[ar], sol[ap]), "numpy")


def _random_states(rng, n, scale=10.0):
    return rng.uniform(-scale, scale, n), rng.normal(size=n), rng.normal(size=n)


class TestRightHandSides:
    def test_explicit_vs_general(self, smooth, rng):
        r, ur, up = _random_states(rng, 10_000)
        ex = np.stack(rhs_explicit_smooth(smooth, r, ur, up))
        ge = np.stack(rhs_general(smooth, r, ur, up))
        scale = np.maximum(np.abs(ge), 1.0)
        assert np.max(np.abs(ex - ge) / scale) < 1e-10

    @pytest.mark.parametrize("params", [(2.0, 1.0, 0.8), (1.5, 1.0, 0.8, 0.05, 10), (2.0, 0.5, -1.5, 0.04, 7)])
    def test_general_vs_euler_lagrange(self, params, rng):
        p = SurfaceParams(*params)
        el = _euler_lagrange(p)
        r, ur, up = _random_states(rng, 200)
        ref = np.stack(el(r, ur, up))
        got = np.stack(rhs_general(p, r, ur, up))
        assert_allclose(got, ref, rtol=1e-11, atol=1e-11)

    def test_compiled_kernel_matches(self, cavatappi, rng):
        p = cavatappi
        r, ur, up = _random_states(rng, 200)
        ref = np.stack(rhs_general(p, r, ur, up))
        got = np.array([_kernel.accel(*s, p.a, p.b, p.c, p.d, float(p.m)) for s in zip(r, ur, up)]).T
        assert_allclose(got, ref, rtol=1e-12, atol=1e-13)

    def test_explicit_requires_smooth(self, cavatappi):
        with pytest.raises(ValueError):
            rhs_explicit_smooth(cavatappi, 0.0, 1.0, 1.0)

    def test_equators_are_geodesics(self, smooth, cavatappi):
        for p in (smooth, cavatappi):
            for r0 in (0.0, p.b * math.pi, -p.b * math.pi, 2 * p.b * math.pi):
                acc = rhs_general(p, r0, 0.0, 0.9)
                assert acc[0] == 0.0 and acc[1] == 0.0
        assert rhs_explicit_smooth(smooth, 0.0, 0.0, 0.9) == (0.0, 0.0)

    def test_reflection(self, cavatappi, rng):
        r, ur, up = _random_states(rng, 100)
        a = np.stack(rhs_general(cavatappi, r, ur, up))
        b = np.stack(rhs_general(cavatappi, -r, -ur, -up))
        assert_allclose(b, -a, rtol=1e-13, atol=1e-14)


class TestLaunch:
    def test_parallel_launch(self, cavatappi):
        s = launch(cavatappi, LaunchSpec(beta=math.pi / 2))
        cp = s.conserved(cavatappi)
        assert abs(s.ur) < 1e-16
        assert_allclose(cp.ell, metric_at(cavatappi, 0.0).M, rtol=1e-15)

    def test_meridian_launch_still_turns(self, cavatappi):
        s = launch(cavatappi, LaunchSpec(r0=0.3, beta=0.0))
        g = metric_at(cavatappi, 0.3)
        assert abs(s.conserved(cavatappi).ell) < 1e-15
        assert s.uphi != 0.0
        assert_allclose(s.uphi, -g.M_r * s.ur, rtol=1e-15)

    @pytest.mark.parametrize("beta", [-2.0, -0.3, 0.0, 0.7, 1.5, 3.0])
    def test_velocity_relation(self, cavatappi, beta):
        spec = LaunchSpec(r0=1.1, beta=beta, E=0.8)
        s = launch(cavatappi, spec)
        cp = conserved_quantities(cavatappi, s)
        M = metric_at(cavatappi, 1.1).M
        assert_allclose(cp.E, 0.8, rtol=1e-14)
        assert_allclose(cp.ell, math.sqrt(1.6) * M * math.sin(beta), rtol=1e-13, atol=1e-15)
        assert_allclose(state_beta(cavatappi, s), beta, atol=1e-14)
        u_r, u_p = s.orthonormal(cavatappi)
        assert_allclose(cp.ell, M * u_p, rtol=1e-14, atol=1e-15)
        assert_allclose(2 * cp.E, u_r**2 + u_p**2, rtol=1e-14)

    def test_arclength(self, cavatappi):
        s = launch(cavatappi, LaunchSpec(r0=-2.0, beta=0.4))
        assert_allclose(s.conserved(cavatappi).speed, 1.0, rtol=1e-14)

    def test_explicit_velocities(self, cavatappi):
        s = launch(cavatappi, LaunchSpec(r0=0.2, phi0=1.0, ur0=0.1, uphi0=-0.3))
        assert (s.r, s.phi, s.ur, s.uphi) == (0.2, 1.0, 0.1, -0.3)
        with pytest.raises(ValueError):
            LaunchSpec(ur0=0.1)

    def test_zero_speed(self, cavatappi):
        with pytest.raises(ZeroSpeed):
            state_beta(cavatappi, GeodesicState(0.0, 0.0, 0.0, 0.0, 0.0))


class TestIntegrate:
    def test_outer_equator(self, smooth):
        tr = integrate(smooth, launch(smooth, LaunchSpec(beta=math.pi / 2)), 100.0)
        assert np.max(np.abs(tr.r)) < 1e-8
        omega = tr.uphi[0]
        assert_allclose(tr.phi, omega * tr.lam, rtol=1e-8, atol=1e-14)

    def test_inner_equator(self, smooth):
        r0 = smooth.b * math.pi
        tr = integrate(smooth, launch(smooth, LaunchSpec(r0=r0, beta=math.pi / 2)), 10.0)
        assert np.max(np.abs(tr.r - r0)) < 1e-8
        assert_allclose(tr.phi, tr.uphi[0] * tr.lam, rtol=1e-8, atol=1e-14)

    def test_inner_equator_is_unstable(self, smooth):
        r0 = smooth.b * math.pi
        s = GeodesicState(0.0, r0 + 1e-9, 0.0, 0.0, launch(smooth, LaunchSpec(r0=r0, beta=math.pi / 2)).uphi)
        tr = integrate(smooth, s, 60.0)
        assert np.max(np.abs(tr.r - r0)) > 1e-3

    def test_turning_events_alternate(self, smooth):
        s = launch(smooth, LaunchSpec(beta=1.2))
        tr = integrate(smooth, s, 60.0)
        tp = turning_points(smooth, tr.conserved)
        turns = tr.events_of("turning")
        assert len(turns) >= 8
        r = np.array([e.state.r for e in turns])
        assert np.all(np.sign(r[1:]) == -np.sign(r[:-1]))
        assert_allclose(np.abs(r), tp.r_plus, atol=1e-9)
        for e in turns:
            assert abs(abs(state_beta(smooth, e.state)) - math.pi / 2) < 1e-9

    def test_equator_crossing_events(self, cavatappi):
        tr = integrate(cavatappi, launch(cavatappi, LaunchSpec(beta=0.2)), 40.0)
        P = cavatappi.period
        outer = tr.events_of("outer_equator")
        inner = tr.events_of("inner_equator")
        assert outer and inner
        for e in outer:
            k = round(e.state.r / P)
            assert abs(e.state.r - k * P) < 1e-9
        for e in inner:
            k = round((e.state.r - P / 2) / P)
            assert abs(e.state.r - P / 2 - k * P) < 1e-9
        lams = [e.lam for e in tr.events]
        assert lams == sorted(lams)

    def test_conservation(self, cavatappi, rng):
        for beta in rng.uniform(-math.pi, math.pi, 8):
            s = launch(cavatappi, LaunchSpec(r0=rng.uniform(-3, 3), beta=beta))
            tr = integrate(cavatappi, s, 100.0)
            assert tr.drift_ell < 1e-8 and tr.drift_E < 1e-8

    def test_clairaut(self, cavatappi):
        tr = integrate(cavatappi, launch(cavatappi, LaunchSpec(r0=0.4, beta=0.9)), 50.0)
        cp = tr.conserved
        M = metric_at(cavatappi, tr.r).M
        u_p = M * (tr.uphi + metric_at(cavatappi, tr.r).M_r * tr.ur)
        u_r = np.sqrt(metric_at(cavatappi, tr.r).gamma_rr) * tr.ur
        sin_beta = np.sin(np.arctan2(u_p, u_r))
        assert_allclose(M * sin_beta, cp.ell / cp.speed, rtol=1e-8)

    def test_time_reversal(self, cavatappi):
        s = launch(cavatappi, LaunchSpec(r0=0.3, phi0=0.2, beta=1.1))
        fwd = integrate(cavatappi, s, 30.0)
        back = integrate(cavatappi, fwd.end.reversed(), 60.0)
        assert abs(back.end.r - s.r) < 1e-6 and abs(back.end.phi - s.phi) < 1e-6

    def test_momentum_reflection(self, cavatappi):
        s = launch(cavatappi, LaunchSpec(beta=0.8))
        a = integrate(cavatappi, s, 20.0)
        b = integrate(cavatappi, s.reversed(), 20.0)
        assert_allclose(b.conserved.ell, -a.conserved.ell, rtol=1e-15)
        for lam in np.linspace(0, 20, 41):
            sa, sb = a.at(lam), b.at(lam)
            assert_allclose([sb.r, sb.phi], [-sa.r, -sa.phi], atol=1e-8)

    def test_torus_meridians_close(self, torus):
        tr = integrate(torus, launch(torus, LaunchSpec(r0=0.2, beta=0.0)), 2 * math.pi * torus.b)
        assert np.max(np.abs(tr.phi)) < 1e-8
        assert_allclose(tr.end.r, 0.2 + torus.period, rtol=1e-10)

    def test_dense_output(self, cavatappi):
        s = launch(cavatappi, LaunchSpec(beta=0.7))
        tr = integrate(cavatappi, s, 20.0)
        fine = integrate(cavatappi, s, 20.0, IntegrateOptions(rtol=1e-13, atol=1e-15))
        for lam in np.linspace(0.05, 19.95, 37):
            a, b = tr.at(lam), fine.at(lam)
            assert_allclose([a.r, a.phi, a.ur, a.uphi], [b.r, b.phi, b.ur, b.uphi], atol=1e-8)
        k = len(tr) // 2
        assert_allclose(tr.at(tr.lam[k]).as_array(), tr.y[k], atol=1e-15)
        with pytest.raises(ValueError):
            tr.at(21.0)

    def test_samples_increasing(self, cavatappi):
        tr = integrate(cavatappi, launch(cavatappi, LaunchSpec(beta=0.5)), 10.0)
        assert np.all(np.diff(tr.lam) > 0)
        assert tr.lam[-1] == 10.0
        assert tr.xyz.shape == (len(tr), 3)

    def test_errors(self, cavatappi):
        s = launch(cavatappi, LaunchSpec(beta=0.2))
        with pytest.raises(ValueError):
            integrate(cavatappi, s, 0.0)
        with pytest.raises(EventStorm):
            integrate(cavatappi, s, 50.0, IntegrateOptions(max_events=3))
        with pytest.raises(StepFailure):
            integrate(cavatappi, s, 50.0, IntegrateOptions(max_steps=5))

    def test_event_selection(self, cavatappi):
        s = launch(cavatappi, LaunchSpec(beta=0.2))
        tr = integrate(cavatappi, s, 20.0, IntegrateOptions(events=("inner_equator",)))
        assert {e.kind for e in tr.events} == {"inner_equator"}
        assert integrate(cavatappi, s, 20.0, IntegrateOptions(events=())).events == []

    def test_many_matches_sequential(self, cavatappi):
        starts = [launch(cavatappi, LaunchSpec(beta=b)) for b in np.linspace(0.1, 1.5, 6)]
        many = integrate_many(cavatappi, starts, 10.0, workers=3)
        for s, tr in zip(starts, many):
            one = integrate(cavatappi, s, 10.0)
            assert np.array_equal(one.y, tr.y)
