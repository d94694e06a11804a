"""Compiled inner loop: geodesic right-hand side and a DOP853 stepper.

State layout is ``y = (r, phi, ur, uphi)``. The tableau is Hairer's DOP853 as
tabulated by scipy; step control, dense output storage and the error scale
are local.
"""

import math

import numpy as np
from numba import njit
from scipy.integrate._ivp import dop853_coefficients as _dc

N_STAGES = _dc.N_STAGES
A = np.ascontiguousarray(_dc.A)
B = np.ascontiguousarray(_dc.B)
E3 = np.ascontiguousarray(_dc.E3)
E5 = np.ascontiguousarray(_dc.E5)
D = np.ascontiguousarray(_dc.D)

STATUS_OK = 0
STATUS_MAX_STEPS = 1
STATUS_STEP_TOO_SMALL = 2

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 10.0
PI_BETA = 0.04
PI_ALPHA = 1.0 / 8.0 - 0.2 * PI_BETA


@njit(cache=True)
def sincospi(x):
    y = x - 2.0 * math.floor(0.5 * x + 0.5)
    if y > 0.5:
        ys = 1.0 - y
    elif y < -0.5:
        ys = -1.0 - y
    else:
        ys = y
    return math.sin(math.pi * ys), math.sin(math.pi * (0.5 - abs(y)))


@njit(cache=True)
def accel(r, ur, uphi, a, b, c, d, m):
    """Geodesic accelerations ``(d2r, d2phi)`` from the lowered Christoffels."""
    x = r / (b * math.pi)
    s1, c1 = sincospi(x)
    sm, cm = sincospi(m * x)
    R = a + b * c1 + d * cm
    S = b * c1 + d * m * cm
    T = b * s1 + d * m * sm
    dR = -T / b
    dS = -(b * s1 + d * m * m * sm) / b
    dT = (b * c1 + d * m * m * cm) / b
    b2 = b * b
    gpp = R * R + c * c
    gpr = c * S / b
    grr = (S * S + T * T) / b2
    dgpp = 2.0 * R * dR
    dgpr = c * dS / b
    dgrr = 2.0 * (S * dS + T * dT) / b2
    det = gpp * grr - gpr * gpr
    # Gamma_{l jk} u^j u^k for l = r, phi
    low_r = -0.5 * dgpp * uphi * uphi + 0.5 * dgrr * ur * ur
    low_p = dgpp * uphi * ur + dgpr * ur * ur
    acc_r = -(gpp * low_r - gpr * low_p) / det
    acc_p = -(grr * low_p - gpr * low_r) / det
    return acc_r, acc_p


@njit(cache=True)
def _rhs(y, out, a, b, c, d, m):
    ar, ap = accel(y[0], y[2], y[3], a, b, c, d, m)
    out[0] = y[2]
    out[1] = y[3]
    out[2] = ar
    out[3] = ap


@njit(cache=True)
def invariants(y, a, b, c, d, m):
    """``(ell, E)`` of a state."""
    x = y[0] / (b * math.pi)
    s1, c1 = sincospi(x)
    sm, cm = sincospi(m * x)
    R = a + b * c1 + d * cm
    S = b * c1 + d * m * cm
    T = b * s1 + d * m * sm
    gpp = R * R + c * c
    gpr = c * S / b
    grr = (S * S + T * T) / (b * b)
    ur = y[2]
    up = y[3]
    ell = gpp * up + gpr * ur
    E = 0.5 * (gpp * up * up + 2.0 * gpr * up * ur + grr * ur * ur)
    return ell, E


@njit(cache=True)
def _scale(y0, y1, rtol, atol, period, sc):
    for i in range(4):
        u = abs(y0[i])
        v = abs(y1[i])
        if i == 0:
            # r is a lifted angle; measure it from the nearest period copy
            u = abs(y0[0] - period * math.floor(y0[0] / period + 0.5))
            v = abs(y1[0] - period * math.floor(y1[0] / period + 0.5))
        sc[i] = atol + rtol * max(u, v)


@njit(cache=True)
def _norm(v, sc):
    s = 0.0
    for i in range(4):
        s += (v[i] / sc[i]) ** 2
    return math.sqrt(s / 4.0)


@njit(cache=True)
def _initial_step(y0, f0, rtol, atol, period, a, b, c, d, m, h_max):
    sc = np.empty(4)
    _scale(y0, y0, rtol, atol, period, sc)
    d0 = _norm(y0, sc)
    d1 = _norm(f0, sc)
    if d0 < 1e-5 or d1 < 1e-5 or not d0 < math.inf or not d1 < math.inf:
        h0 = 1e-6
    else:
        h0 = 0.01 * d0 / d1
    h0 = min(h0, h_max)
    y1 = y0 + h0 * f0
    f1 = np.empty(4)
    _rhs(y1, f1, a, b, c, d, m)
    d2 = _norm(f1 - f0, sc) / h0
    if (d1 <= 1e-15 and d2 <= 1e-15) or not max(d1, d2) < math.inf:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1.0 / 8.0)
    return min(100.0 * h0, h1, h_max)


@njit(cache=True, nogil=True)
def dop853(y0, t0, t1, a, b, c, d, m, rtol, atol, h_max, max_steps, A, B, E3, E5, D):
    """Integrate from ``t0`` to ``t1 > t0``.

    Returns ``(ts, ys, F, n_accepted, status)``; ``F[k]`` holds the seven
    interpolation coefficient rows of step ``k`` (``ts[k] -> ts[k+1]``).
    """
    period = 2.0 * math.pi * b
    cap = 1024
    ts = np.empty(cap)
    ys = np.empty((cap, 4))
    F = np.empty((cap, 7, 4))
    ts[0] = t0
    ys[0] = y0
    K = np.zeros((16, 4))
    sc = np.empty(4)
    y = y0.copy()
    ytmp = np.empty(4)
    y_new = np.empty(4)
    f = np.empty(4)
    _rhs(y, f, a, b, c, d, m)
    t = t0
    h = _initial_step(y, f, rtol, atol, period, a, b, c, d, m, min(h_max, t1 - t0))
    err_old = 1e-4
    factor = 1.0
    n = 0
    status = STATUS_OK
    while t < t1:
        if n >= max_steps:
            status = STATUS_MAX_STEPS
            break
        h_min = 10.0 * np.finfo(np.float64).eps * max(abs(t), 1.0)
        rejected = False
        while True:
            if not h >= h_min:  # also catches nan
                status = STATUS_STEP_TOO_SMALL
                break
            if t + h > t1:
                h = t1 - t
            for i in range(4):
                K[0, i] = f[i]
            for s in range(1, N_STAGES):
                for i in range(4):
                    acc = 0.0
                    for j in range(s):
                        acc += A[s, j] * K[j, i]
                    ytmp[i] = y[i] + h * acc
                _rhs(ytmp, K[s], a, b, c, d, m)
            for i in range(4):
                acc = 0.0
                for j in range(N_STAGES):
                    acc += B[j] * K[j, i]
                y_new[i] = y[i] + h * acc
            _rhs(y_new, K[N_STAGES], a, b, c, d, m)
            _scale(y, y_new, rtol, atol, period, sc)
            # componentwise DOP853 estimate, worst component (not RMS)
            err = 0.0
            for i in range(4):
                s5 = 0.0
                s3 = 0.0
                for j in range(N_STAGES + 1):
                    s5 += E5[j] * K[j, i]
                    s3 += E3[j] * K[j, i]
                s5 /= sc[i]
                s3 /= sc[i]
                # h s5^2 / sqrt(s5^2 + 0.01 s3^2) without squaring overflow
                if s5 != 0.0:
                    q = s3 / s5
                    e_i = h * abs(s5) / math.sqrt(1.0 + 0.01 * q * q)
                    if not e_i <= math.inf:
                        e_i = math.inf  # nan
                    err = max(err, e_i)
            if err <= 1.0:
                if err == 0.0:
                    factor = MAX_FACTOR
                else:
                    factor = min(
                        MAX_FACTOR,
                        SAFETY * err ** (-PI_ALPHA) * err_old ** PI_BETA,
                    )
                    factor = max(factor, MIN_FACTOR)
                if rejected:
                    factor = min(factor, 1.0)
                err_old = max(err, 1e-4)
                break
            if err < math.inf:
                h *= max(MIN_FACTOR, SAFETY * err ** (-1.0 / 8.0))
            else:
                h *= MIN_FACTOR
            rejected = True
        if status != STATUS_OK:
            break

        # extra stages for the dense interpolant
        for s in range(N_STAGES + 1, 16):
            for i in range(4):
                acc = 0.0
                for j in range(s):
                    acc += A[s, j] * K[j, i]
                ytmp[i] = y[i] + h * acc
            _rhs(ytmp, K[s], a, b, c, d, m)
        if n + 1 >= cap:
            cap *= 2
            ts2 = np.empty(cap)
            ys2 = np.empty((cap, 4))
            F2 = np.empty((cap, 7, 4))
            ts2[: n + 1] = ts[: n + 1]
            ys2[: n + 1] = ys[: n + 1]
            F2[:n] = F[:n]
            ts, ys, F = ts2, ys2, F2
        for i in range(4):
            dy = y_new[i] - y[i]
            F[n, 0, i] = dy
            F[n, 1, i] = h * K[0, i] - dy
            F[n, 2, i] = 2.0 * dy - h * (K[N_STAGES, i] + K[0, i])
            for k in range(4):
                acc = 0.0
                for j in range(16):
                    acc += D[k, j] * K[j, i]
                F[n, 3 + k, i] = h * acc
        t = t + h if t + h < t1 else t1
        for i in range(4):
            y[i] = y_new[i]
            f[i] = K[N_STAGES, i]
        n += 1
        ts[n] = t
        ys[n] = y
        h = min(h * factor, h_max)
    return ts[: n + 1].copy(), ys[: n + 1].copy(), F[:n].copy(), n, status


@njit(cache=True)
def dense_eval(F_step, y_old, x):
    """Interpolated state at fraction ``x`` of a step."""
    out = np.zeros(4)
    for i in range(7):
        row = F_step[6 - i]
        for k in range(4):
            out[k] += row[k]
        if i % 2 == 0:
            for k in range(4):
                out[k] *= x
        else:
            for k in range(4):
                out[k] *= 1.0 - x
    for k in range(4):
        out[k] += y_old[k]
    return out


@njit(cache=True)
def invariant_series(ys, a, b, c, d, m):
    n = ys.shape[0]
    ell = np.empty(n)
    E = np.empty(n)
    for k in range(n):
        ell[k], E[k] = invariants(ys[k], a, b, c, d, m)
    return ell, E
