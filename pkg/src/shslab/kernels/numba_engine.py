"""Numba-compiled engine: scalar loops fused over the full time stepping.

Semantics must match ``numpy_engine`` exactly: same update rules, same
recording layout, same failure reporting.  Keep the two files in sync.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

MS = 0
THR = 1
TAB = 2

PEAK_W_FRACTION = 1e-3

_NAN = float("nan")


@njit(cache=True)
def _eval_g_scalar(z, variant, eps, kappa, theta_bar, tz, tg, clamp):
    if variant == TAB:
        return np.interp(z, tz, tg), 0
    if variant == MS:
        if z <= -1.0:
            return 0.0, 0
        expo = (1.0 - 1.0 / (z + 1.0)) / eps
    else:
        if z <= theta_bar - 1.0:
            return 0.0, 0
        expo = (z / (kappa * z + 1.0)) / eps
    clamped = 0
    if expo > clamp:
        expo = clamp
        clamped = 1
    elif expo < -clamp:
        expo = -clamp
        clamped = 1
    return math.exp(expo), clamped


@njit(cache=True)
def _eval_g_array(z, out, variant, eps, kappa, theta_bar, tz, tg, clamp):
    n_clamped = 0
    for i in range(z.size):
        g, c = _eval_g_scalar(z[i], variant, eps, kappa, theta_bar, tz, tg, clamp)
        out[i] = g
        n_clamped += c
    return n_clamped


def eval_g(z: np.ndarray, kin: tuple) -> tuple[np.ndarray, int]:
    """Rate g at each z; returns (values, number of clamped exponents)."""
    z = np.ascontiguousarray(z, dtype=np.float64)
    out = np.empty_like(z)
    n_clamped = _eval_g_array(z, out, *kin)
    return out, int(n_clamped)


@njit(cache=True)
def _reaction(u, w, d, v0, dt, variant, eps, kappa, theta_bar, tz, tg, clamp):
    n_clamped = 0
    for i in range(u.size):
        g, c = _eval_g_scalar(u[i], variant, eps, kappa, theta_bar, tz, tg, clamp)
        n_clamped += c
        wn = w[i] + dt * g
        dn = math.exp(-wn / eps)
        u[i] = u[i] + v0[i] * (d[i] - dn)
        w[i] = wn
        d[i] = dn
    return n_clamped


@njit(cache=True)
def _depletion(w, eps, out):
    for i in range(w.size):
        out[i] = math.exp(-w[i] / eps)


def depletion(w, eps):
    """exp(-w/eps) through the same scalar-exp path the run loops use."""
    w = np.ascontiguousarray(w, dtype=np.float64)
    out = np.empty_like(w)
    _depletion(w, float(eps), out)
    return out


def reaction_apply(u, w, d, v0, dt, kin) -> int:
    """Exact-exponential reactant update with u frozen; in place.

    w' = w + dt*g(u); u gains v0*(exp(-w/eps) - exp(-w'/eps)), so u + v
    is conserved node-wise.  ``d`` caches exp(-w/eps).
    """
    return int(_reaction(u, w, d, v0, float(dt), *kin))


def make_diffusion(n: int, r: float):
    """Thomas factorization of I - r*Lap_h with mirror Neumann closure."""
    lower = np.full(n, -r)
    diag = np.full(n, 1.0 + 2.0 * r)
    upper = np.full(n, -r)
    lower[0] = 0.0
    upper[0] = -2.0 * r
    lower[n - 1] = -2.0 * r
    upper[n - 1] = 0.0
    cp = np.empty(n)
    dinv = np.empty(n)
    dinv[0] = 1.0 / diag[0]
    cp[0] = upper[0] * dinv[0]
    for i in range(1, n):
        denom = diag[i] - lower[i] * cp[i - 1]
        dinv[i] = 1.0 / denom
        cp[i] = upper[i] * dinv[i]
    return lower, cp, dinv


@njit(cache=True)
def _thomas(lower, cp, dinv, b, scratch):
    n = b.size
    scratch[0] = b[0] * dinv[0]
    for i in range(1, n):
        scratch[i] = (b[i] - lower[i] * scratch[i - 1]) * dinv[i]
    b[n - 1] = scratch[n - 1]
    for i in range(n - 2, -1, -1):
        b[i] = scratch[i] - cp[i] * b[i + 1]


def diffusion_apply(ctx, u) -> None:
    lower, cp, dinv = ctx
    _thomas(lower, cp, dinv, u, np.empty_like(u))


@njit(cache=True)
def _record_shs(series, s, t, u, w, d, v0, v0max, h, length, eps):
    n = u.size
    mass_u = 0.5 * h * (u[0] + u[n - 1])
    mass_v = 0.5 * h * (v0[0] * d[0] + v0[n - 1] * d[n - 1])
    for i in range(1, n - 1):
        mass_u += h * u[i]
        mass_v += h * v0[i] * d[i]
    umin = u[0]
    umax = u[0]
    for i in range(1, n):
        if u[i] < umin:
            umin = u[i]
        if u[i] > umax:
            umax = u[i]
    front = _NAN
    if v0max > 0.0:
        last = -1
        for i in range(n):
            if d[i] <= 0.5:
                last = i
        if last == n - 1:
            front = length
        elif last >= 0:
            front = last * h + h * (0.5 - d[last]) / (d[last + 1] - d[last])
    peak = _NAN
    w_thr = PEAK_W_FRACTION * eps
    found = False
    for i in range(n):
        if w[i] < w_thr or v0[i] <= 0.0:
            if not found or u[i] > peak:
                peak = u[i]
            found = True
    series[s, 0] = t
    series[s, 1] = front
    series[s, 2] = mass_u
    series[s, 3] = mass_v
    series[s, 4] = umin
    series[s, 5] = umax
    series[s, 6] = peak


@njit(cache=True)
def _locate_nonfinite(u):
    for i in range(u.size):
        if not math.isfinite(u[i]):
            return i
    return -1


@njit(cache=True)
def _run_shs(u, w, d, v0, h, length, dt, n_steps,
             variant, eps, kappa, theta_bar, tz, tg, clamp,
             lower, cp, dinv, snap_steps, snap_u, snap_aux, series):
    n = u.size
    scratch = np.empty(n)
    v0max = v0[0]
    for i in range(1, n):
        if v0[i] > v0max:
            v0max = v0[i]
    clamps = 0
    snap_i = 0
    _record_shs(series, 0, 0.0, u, w, d, v0, v0max, h, length, eps)
    if snap_steps[snap_i] == 0:
        for i in range(n):
            snap_u[snap_i, i] = u[i]
            snap_aux[snap_i, i] = v0[i] * d[i]
        snap_i += 1
    for s in range(1, n_steps + 1):
        clamps += _reaction(u, w, d, v0, dt, variant, eps, kappa, theta_bar,
                            tz, tg, clamp)
        _thomas(lower, cp, dinv, u, scratch)
        _record_shs(series, s, s * dt, u, w, d, v0, v0max, h, length, eps)
        if not math.isfinite(series[s, 2]):
            return 1, clamps, s, _locate_nonfinite(u)
        if snap_i < snap_steps.size and snap_steps[snap_i] == s:
            for i in range(n):
                snap_u[snap_i, i] = u[i]
                snap_aux[snap_i, i] = v0[i] * d[i]
            snap_i += 1
    return 0, clamps, -1, -1


def run_shs_loop(u, w, d, v0, h, length, dt, n_steps, kin, ctx,
                 snap_steps, snap_u, snap_aux, series):
    """Lie splitting: reaction then implicit diffusion, recording as it goes.

    Returns (status, clamp_events, fail_step, fail_node); status 1 means
    a non-finite state was detected at fail_step.
    """
    lower, cp, dinv = ctx
    status, clamps, fs, fn = _run_shs(
        u, w, d, v0, float(h), float(length), float(dt), int(n_steps),
        *kin, lower, cp, dinv, snap_steps, snap_u, snap_aux, series)
    return int(status), int(clamps), int(fs), int(fn)


@njit(cache=True)
def _record_limit(series, s, t, u, chi, v0, h, length):
    n = u.size
    mass_u = 0.5 * h * (u[0] + u[n - 1])
    mass_c = 0.5 * h * (v0[0] * chi[0] + v0[n - 1] * chi[n - 1])
    for i in range(1, n - 1):
        mass_u += h * u[i]
        mass_c += h * v0[i] * chi[i]
    umin = u[0]
    umax = u[0]
    for i in range(1, n):
        if u[i] < umin:
            umin = u[i]
        if u[i] > umax:
            umax = u[i]
    front = _NAN
    last = -1
    for i in range(n - 1):
        if chi[i] != chi[i + 1]:
            last = i
    if last >= 0:
        front = last * h + 0.5 * h
    elif chi[0] == 1.0:
        # uniform chi: fully burned counts as front at the far end
        front = length
    series[s, 0] = t
    series[s, 1] = front
    series[s, 2] = mass_u
    series[s, 3] = mass_c
    series[s, 4] = umin
    series[s, 5] = umax
    series[s, 6] = _NAN


@njit(cache=True)
def _run_limit(u, chi, v0, h, length, dt, n_steps, lower, cp, dinv,
               snap_steps, snap_u, snap_aux, series):
    n = u.size
    scratch = np.empty(n)
    snap_i = 0
    _record_limit(series, 0, 0.0, u, chi, v0, h, length)
    if snap_steps[snap_i] == 0:
        for i in range(n):
            snap_u[snap_i, i] = u[i]
            snap_aux[snap_i, i] = chi[i]
        snap_i += 1
    for s in range(1, n_steps + 1):
        _thomas(lower, cp, dinv, u, scratch)
        for i in range(n):
            if chi[i] < 1.0 and u[i] > 0.0:
                u[i] += v0[i] * (1.0 - chi[i])
                chi[i] = 1.0
        _record_limit(series, s, s * dt, u, chi, v0, h, length)
        if not math.isfinite(series[s, 2]):
            return 1, s, _locate_nonfinite(u)
        if snap_i < snap_steps.size and snap_steps[snap_i] == s:
            for i in range(n):
                snap_u[snap_i, i] = u[i]
                snap_aux[snap_i, i] = chi[i]
            snap_i += 1
    return 0, -1, -1


def run_limit_loop(u, chi, v0, h, length, dt, n_steps, ctx,
                   snap_steps, snap_u, snap_aux, series):
    """Implicit heat step then one irreversible ignition sweep per step."""
    lower, cp, dinv = ctx
    status, fs, fn = _run_limit(u, chi, v0, float(h), float(length),
                                float(dt), int(n_steps), lower, cp, dinv,
                                snap_steps, snap_u, snap_aux, series)
    return int(status), int(fs), int(fn)


@njit(cache=True)
def _record_heat(series, s, t, u, h):
    n = u.size
    mass_u = 0.5 * h * (u[0] + u[n - 1])
    for i in range(1, n - 1):
        mass_u += h * u[i]
    umin = u[0]
    umax = u[0]
    for i in range(1, n):
        if u[i] < umin:
            umin = u[i]
        if u[i] > umax:
            umax = u[i]
    series[s, 0] = t
    series[s, 1] = _NAN
    series[s, 2] = mass_u
    series[s, 3] = 0.0
    series[s, 4] = umin
    series[s, 5] = umax
    series[s, 6] = umax


@njit(cache=True)
def _run_heat(u, h, length, dt, n_steps, lower, cp, dinv,
              snap_steps, snap_u, snap_aux, series):
    n = u.size
    scratch = np.empty(n)
    snap_i = 0
    _record_heat(series, 0, 0.0, u, h)
    if snap_steps[snap_i] == 0:
        for i in range(n):
            snap_u[snap_i, i] = u[i]
            snap_aux[snap_i, i] = 0.0
        snap_i += 1
    for s in range(1, n_steps + 1):
        _thomas(lower, cp, dinv, u, scratch)
        _record_heat(series, s, s * dt, u, h)
        if not math.isfinite(series[s, 2]):
            return 1, s, _locate_nonfinite(u)
        if snap_i < snap_steps.size and snap_steps[snap_i] == s:
            for i in range(n):
                snap_u[snap_i, i] = u[i]
                snap_aux[snap_i, i] = 0.0
            snap_i += 1
    return 0, -1, -1


def run_heat_loop(u, h, length, dt, n_steps, ctx,
                  snap_steps, snap_u, snap_aux, series):
    """Pure Neumann heat evolution (the caloric twin of either solver)."""
    lower, cp, dinv = ctx
    status, fs, fn = _run_heat(u, float(h), float(length), float(dt),
                               int(n_steps), lower, cp, dinv,
                               snap_steps, snap_u, snap_aux, series)
    return int(status), int(fs), int(fn)
