"""Vectorized numpy fallback engine (scipy banded solve for diffusion).

Semantics must match ``numba_engine`` exactly: same update rules, same
recording layout, same failure reporting.  Keep the two files in sync.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_banded

_NAN = float("nan")

# variant codes / column layout; duplicated here so the engine modules
# stay import-independent of the package __init__
MS = 0
THR = 1
TAB = 2

# w below 1e-3*eps (or no reactant at all) counts as unignited for the
# negative-phase peak probe
PEAK_W_FRACTION = 1e-3


def eval_g(z: np.ndarray, kin: tuple) -> tuple[np.ndarray, int]:
    """Rate g at each z; returns (values, number of clamped exponents)."""
    variant, eps, kappa, theta_bar, tz, tg, clamp = kin
    z = np.asarray(z, dtype=np.float64)
    if variant == TAB:
        return np.interp(z, tz, tg), 0
    g = np.zeros_like(z)
    if variant == MS:
        active = z > -1.0
        expo = (1.0 - 1.0 / (z[active] + 1.0)) / eps
    else:
        active = z > theta_bar - 1.0
        za = z[active]
        expo = (za / (kappa * za + 1.0)) / eps
    n_clamped = int(np.count_nonzero(np.abs(expo) > clamp))
    np.clip(expo, -clamp, clamp, out=expo)
    g[active] = np.exp(expo)
    return g, n_clamped


def depletion(w, eps):
    """exp(-w/eps) through the same vectorized-exp path the run loops use."""
    return np.exp(-np.asarray(w, dtype=np.float64) / eps)


def reaction_apply(u, w, d, v0, dt, kin) -> int:
    """Exact-exponential reactant update with u frozen; in place.

    w' = w + dt*g(u); u gains v0*(exp(-w/eps) - exp(-w'/eps)), so u + v
    is conserved node-wise.  ``d`` caches exp(-w/eps).
    """
    eps = kin[1]
    with np.errstate(over="ignore", invalid="ignore"):
        g, n_clamped = eval_g(u, kin)
        w += dt * g
        d_new = np.exp(-w / eps)
        u += v0 * (d - d_new)
        d[:] = d_new
    return n_clamped


def make_diffusion(n: int, r: float):
    """Banded form of I - r*Lap_h with mirror Neumann closure (r = dt/h^2)."""
    ab = np.zeros((3, n))
    ab[1, :] = 1.0 + 2.0 * r
    ab[0, 1:] = -r
    ab[0, 1] = -2.0 * r
    ab[2, :-1] = -r
    ab[2, n - 2] = -2.0 * r
    return ab


def diffusion_apply(ctx, u) -> None:
    u[:] = solve_banded((1, 1), ctx, u, check_finite=False)


def _quad_weights(n: int, h: float) -> np.ndarray:
    qw = np.full(n, h)
    qw[0] *= 0.5
    qw[-1] *= 0.5
    return qw


def _front_from_depletion(h, length, d, v0max) -> float:
    if v0max <= 0.0:
        return _NAN
    burned = np.flatnonzero(d <= 0.5)
    if burned.size == 0:
        return _NAN
    i = int(burned[-1])
    if i == d.size - 1:
        return float(length)
    return float(i * h + h * (0.5 - d[i]) / (d[i + 1] - d[i]))


def _front_from_chi(h, length, chi) -> float:
    trans = np.flatnonzero(chi[:-1] != chi[1:])
    if trans.size == 0:
        # uniform chi: fully burned counts as front at the far end
        return float(length) if chi[0] == 1.0 else _NAN
    return float(trans[-1] * h + 0.5 * h)


def _minmax(u) -> tuple[float, float]:
    return float(np.min(u)), float(np.max(u))


def _locate_nonfinite(u) -> int:
    bad = np.flatnonzero(~np.isfinite(u))
    return int(bad[0]) if bad.size else -1


def _record_shs(series, s, t, u, w, d, v0, v0max, qw, h, length, eps):
    series[s, 0] = t
    series[s, 1] = _front_from_depletion(h, length, d, v0max)
    series[s, 2] = qw @ u
    series[s, 3] = qw @ (v0 * d)
    series[s, 4], series[s, 5] = _minmax(u)
    unignited = (w < PEAK_W_FRACTION * eps) | (v0 <= 0.0)
    series[s, 6] = float(np.max(u[unignited])) if np.any(unignited) else _NAN


def run_shs_loop(u, w, d, v0, h, length, dt, n_steps, kin, ctx,
                 snap_steps, snap_u, snap_aux, series):
    """Lie splitting: reaction then implicit diffusion, recording as it goes.

    Returns (status, clamp_events, fail_step, fail_node); status 1 means
    a non-finite state was detected at fail_step.
    """
    eps = kin[1]
    n = u.size
    qw = _quad_weights(n, h)
    v0max = float(np.max(v0))
    clamps = 0
    snap_i = 0
    with np.errstate(over="ignore", invalid="ignore"):
        _record_shs(series, 0, 0.0, u, w, d, v0, v0max, qw, h, length, eps)
    if snap_steps[snap_i] == 0:
        snap_u[snap_i, :] = u
        snap_aux[snap_i, :] = v0 * d
        snap_i += 1
    for s in range(1, n_steps + 1):
        with np.errstate(over="ignore", invalid="ignore"):
            clamps += reaction_apply(u, w, d, v0, dt, kin)
            diffusion_apply(ctx, u)
            _record_shs(series, s, s * dt, u, w, d, v0, v0max, qw, h, length,
                        eps)
        if not np.isfinite(series[s, 2]):
            return 1, clamps, s, _locate_nonfinite(u)
        if snap_i < snap_steps.size and snap_steps[snap_i] == s:
            snap_u[snap_i, :] = u
            snap_aux[snap_i, :] = v0 * d
            snap_i += 1
    return 0, clamps, -1, -1


def _record_limit(series, s, t, u, chi, v0, qw, h, length):
    series[s, 0] = t
    series[s, 1] = _front_from_chi(h, length, chi)
    series[s, 2] = qw @ u
    series[s, 3] = qw @ (v0 * chi)
    series[s, 4], series[s, 5] = _minmax(u)
    series[s, 6] = _NAN


def run_limit_loop(u, chi, v0, h, length, dt, n_steps, ctx,
                   snap_steps, snap_u, snap_aux, series):
    """Implicit heat step then one irreversible ignition sweep per step."""
    n = u.size
    qw = _quad_weights(n, h)
    snap_i = 0
    with np.errstate(over="ignore", invalid="ignore"):
        _record_limit(series, 0, 0.0, u, chi, v0, qw, h, length)
    if snap_steps[snap_i] == 0:
        snap_u[snap_i, :] = u
        snap_aux[snap_i, :] = chi
        snap_i += 1
    for s in range(1, n_steps + 1):
        with np.errstate(over="ignore", invalid="ignore"):
            diffusion_apply(ctx, u)
            ignite = (chi < 1.0) & (u > 0.0)
            if np.any(ignite):
                u[ignite] += v0[ignite] * (1.0 - chi[ignite])
                chi[ignite] = 1.0
            _record_limit(series, s, s * dt, u, chi, v0, qw, h, length)
        if not np.isfinite(series[s, 2]):
            return 1, s, _locate_nonfinite(u)
        if snap_i < snap_steps.size and snap_steps[snap_i] == s:
            snap_u[snap_i, :] = u
            snap_aux[snap_i, :] = chi
            snap_i += 1
    return 0, -1, -1


def _record_heat(series, s, t, u, qw):
    series[s, 0] = t
    series[s, 1] = _NAN
    series[s, 2] = qw @ u
    series[s, 3] = 0.0
    series[s, 4], series[s, 5] = _minmax(u)
    series[s, 6] = series[s, 5]


def run_heat_loop(u, h, length, dt, n_steps, ctx,
                  snap_steps, snap_u, snap_aux, series):
    """Pure Neumann heat evolution (the caloric twin of either solver)."""
    n = u.size
    qw = _quad_weights(n, h)
    snap_i = 0
    with np.errstate(over="ignore", invalid="ignore"):
        _record_heat(series, 0, 0.0, u, qw)
    if snap_steps[snap_i] == 0:
        snap_u[snap_i, :] = u
        snap_aux[snap_i, :] = 0.0
        snap_i += 1
    for s in range(1, n_steps + 1):
        with np.errstate(over="ignore", invalid="ignore"):
            diffusion_apply(ctx, u)
            _record_heat(series, s, s * dt, u, qw)
        if not np.isfinite(series[s, 2]):
            return 1, s, _locate_nonfinite(u)
        if snap_i < snap_steps.size and snap_steps[snap_i] == s:
            snap_u[snap_i, :] = u
            snap_aux[snap_i, :] = 0.0
            snap_i += 1
    return 0, -1, -1
