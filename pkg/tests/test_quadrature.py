import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from helixgeo import (
    ConservedPair,
    LaunchSpec,
    RadialSpeedFn,
    SurfaceParams,
    effective_potential,
    integrate,
    lambda_of_r,
    launch,
    metric_at,
    phi_of_r_zero_momentum,
    surface_area,
    turning_points,
    zero_momentum_loop,
)
from helixgeo.errors import ForbiddenRegion


def _bound_pair(p, beta, r0=0.0):
    return launch(p, LaunchSpec(r0=r0, beta=beta)).conserved(p)


class TestRadialSpeed:
    def test_vanishes_at_turning_points(self, smooth):
        cp = _bound_pair(smooth, 1.2)
        tp = turning_points(smooth, cp)
        f = RadialSpeedFn(smooth, cp)
        assert f(tp.r_plus) < 1e-7 and f(tp.r_minus) < 1e-7
        assert f.allowed(0.0) and not f.allowed(tp.r_plus + 0.1)

    def test_matches_launch_speed(self, cavatappi):
        s = launch(cavatappi, LaunchSpec(r0=0.3, beta=0.6))
        f = RadialSpeedFn(cavatappi, s.conserved(cavatappi))
        assert_allclose(f(0.3), abs(s.ur), rtol=1e-13)

    def test_even(self, cavatappi):
        f = RadialSpeedFn(cavatappi, ConservedPair(0.5, 0.5))
        r = np.linspace(0, 5, 51)
        assert_allclose(f(r), f(-r), rtol=1e-14)


class TestLambdaOfR:
    def test_empty_interval(self, smooth):
        assert lambda_of_r(smooth, ConservedPair(1.0, 0.5), 0.3, 0.3) == 0.0

    @pytest.mark.parametrize("beta", [0.6, 1.2, 1.5])
    def test_half_period_matches_events(self, smooth, beta):
        s = launch(smooth, LaunchSpec(beta=beta))
        tr = integrate(smooth, s, 40.0)
        turns = tr.events_of("turning")
        cp = tr.conserved
        tp = turning_points(smooth, cp)
        half = lambda_of_r(smooth, cp, tp.r_minus, tp.r_plus)
        for e0, e1 in zip(turns[:-1], turns[1:]):
            assert_allclose(e1.lam - e0.lam, half, rtol=1e-6)
        assert_allclose(turns[0].lam, lambda_of_r(smooth, cp, 0.0, tp.r_plus), rtol=1e-6)

    def test_ridged_half_period(self, cavatappi):
        s = launch(cavatappi, LaunchSpec(beta=1.0))
        tr = integrate(cavatappi, s, 30.0)
        turns = tr.events_of("turning")
        tp = turning_points(cavatappi, tr.conserved)
        half = lambda_of_r(cavatappi, tr.conserved, tp.r_minus, tp.r_plus)
        assert_allclose(turns[1].lam - turns[0].lam, half, rtol=1e-6)

    def test_interior_points_match_dense_output(self, cavatappi):
        s = launch(cavatappi, LaunchSpec(beta=0.3))
        tr = integrate(cavatappi, s, 3.0)
        cp = tr.conserved
        for lam in (0.5, 1.5, 2.5):
            assert_allclose(lambda_of_r(cavatappi, cp, 0.0, tr.at(lam).r), lam, rtol=1e-8)

    def test_additive(self, cavatappi):
        cp = _bound_pair(cavatappi, 1.0)
        tp = turning_points(cavatappi, cp)
        a, b, c = tp.r_minus, 0.1, tp.r_plus
        whole = lambda_of_r(cavatappi, cp, a, c)
        assert abs(lambda_of_r(cavatappi, cp, a, b) + lambda_of_r(cavatappi, cp, b, c) - whole) < 1e-10
        assert lambda_of_r(cavatappi, cp, c, a) == whole

    def test_forbidden(self, smooth):
        cp = _bound_pair(smooth, 1.2)
        tp = turning_points(smooth, cp)
        with pytest.raises(ForbiddenRegion):
            lambda_of_r(smooth, cp, 0.0, tp.r_plus + 0.5)


class TestZeroMomentum:
    def test_vanishes_without_pitch(self, torus):
        assert phi_of_r_zero_momentum(torus, -1.0, 4.0) == 0.0
        assert zero_momentum_loop(torus) == 0.0

    def test_loop_nonzero(self, cavatappi, smooth):
        assert abs(zero_momentum_loop(cavatappi)) > 1e-3
        assert abs(zero_momentum_loop(smooth)) > 1e-3

    def test_period_shift(self, cavatappi):
        P, b = cavatappi.period, cavatappi.b
        assert_allclose(zero_momentum_loop(cavatappi),
                        phi_of_r_zero_momentum(cavatappi, -b * math.pi, b * math.pi), rtol=1e-12)
        assert_allclose(phi_of_r_zero_momentum(cavatappi, 0.0, 3 * P), 3 * zero_momentum_loop(cavatappi), rtol=1e-11)

    def test_odd_in_interval(self, cavatappi):
        assert_allclose(phi_of_r_zero_momentum(cavatappi, 0.0, 1.3),
                        -phi_of_r_zero_momentum(cavatappi, 1.3, 0.0), rtol=1e-14)

    def test_matches_meridian_launch(self, cavatappi):
        s = launch(cavatappi, LaunchSpec(r0=0.0, beta=0.0))
        tr = integrate(cavatappi, s, 12.0)
        lap = [e for e in tr.events_of("outer_equator") if abs(e.state.r - cavatappi.period) < 1e-6][0]
        assert_allclose(lap.state.phi, zero_momentum_loop(cavatappi), atol=1e-6)

    def test_along_trace(self, cavatappi):
        tr = integrate(cavatappi, launch(cavatappi, LaunchSpec(r0=0.4, beta=0.0)), 5.0)
        for k in (10, len(tr) // 2, len(tr) - 1):
            assert_allclose(tr.phi[k], phi_of_r_zero_momentum(cavatappi, 0.4, tr.r[k]), atol=1e-8)


class TestArea:
    def test_torus(self, torus):
        assert_allclose(surface_area(torus), 4 * math.pi**2 * torus.a * torus.b, rtol=1e-8)

    def test_linear_in_span(self, cavatappi):
        assert_allclose(surface_area(cavatappi, 5 * math.pi), 2.5 * surface_area(cavatappi), rtol=1e-14)

    def test_monte_carlo(self, cavatappi, rng):
        r = rng.uniform(0, cavatappi.period, 1_000_000)
        mc = 2 * math.pi * cavatappi.period * np.mean(metric_at(cavatappi, r).area_density)
        assert_allclose(surface_area(cavatappi), mc, rtol=1e-3)

    def test_pitch_increases_area(self):
        areas = [surface_area(SurfaceParams(2.0, 1.0, c)) for c in (0.0, 0.5, 1.0)]
        assert areas[0] < areas[1] < areas[2]

    def test_bad_span(self, cavatappi):
        with pytest.raises(ValueError):
            surface_area(cavatappi, 0.0)

    def test_density_positive(self, cavatappi):
        r = np.linspace(-20, 20, 20001)
        assert np.all(metric_at(cavatappi, r).area_density > 0)
