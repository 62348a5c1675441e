"""The sharp-interface limit: heat flow coupled to an irreversible
burned-fraction field chi through an enthalpy bookkeeping.

Initial data undergo the jump u(0) = u0 + v0*H(u0) (H = 0 at and below
zero, 1 above).  Each step is an implicit Neumann heat solve followed by
one ignition sweep: every node with chi < 1 whose temperature is
strictly positive releases its remaining latent heat v0*(1 - chi) and
jumps to chi = 1.  The node enthalpy u - v0*chi is untouched by the
sweep, and one pass per step suffices because igniting a node only
raises its own temperature.

The underlying free-boundary problem is ill-posed in general; this
scheme is one selection, and grid-refinement self-convergence is
measured by the experiments, never assumed.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import kernels
from .core import ScalarField, TimeGrid, Trajectory
from .shs import NumericalFailureError, _build_trajectory, _diffusion_context


@dataclass(frozen=True)
class LimitState:
    """(t, u, chi) plus the frozen latent-heat density v0.

    chi values strictly between 0 and 1 can only enter through the
    initial data; ignition sweeps write exact ones.
    """

    t: float
    u: ScalarField
    chi: ScalarField
    v0: ScalarField

    def __post_init__(self) -> None:
        if not (self.u.domain == self.chi.domain == self.v0.domain):
            raise ValueError("u, chi, v0 must share one grid")
        c = self.chi.values
        if np.any(c < 0.0) or np.any(c > 1.0):
            raise ValueError("chi must lie in [0, 1]")
        if np.any(self.v0.values < 0.0):
            raise ValueError("latent heat density v0 must be nonnegative")

    @property
    def enthalpy(self) -> ScalarField:
        return ScalarField(self.u.domain, self.u.values - self.v0.values * self.chi.values)


def apply_initial_jump(u0: ScalarField, v0: ScalarField) -> LimitState:
    """Initial jump u = u0 + v0*H(u0); the scheme selects H(0) = 0.

    Strictly positive nodes start fully burned with the latent heat
    already released; nodes at or below zero start unburned.
    """
    if u0.domain != v0.domain:
        raise ValueError("u0 and v0 must share one grid")
    if np.any(v0.values < 0.0):
        raise ValueError("latent heat density v0 must be nonnegative")
    hot = u0.values > 0.0
    chi = np.where(hot, 1.0, 0.0)
    u = np.where(hot, u0.values + v0.values, u0.values)
    return LimitState(t=0.0, u=ScalarField(u0.domain, u),
                      chi=ScalarField(u0.domain, chi), v0=v0)


def ignition_sweep(state: LimitState) -> LimitState:
    """Ignite every node with chi < 1 and u > 0 (strict); idempotent.

    Each ignited node gains v0*(1 - chi_old) and sets chi = 1, leaving
    its enthalpy u - v0*chi unchanged.
    """
    u = state.u.values.copy()
    chi = state.chi.values.copy()
    ignite = (chi < 1.0) & (u > 0.0)
    if not np.any(ignite):
        return state
    u[ignite] += state.v0.values[ignite] * (1.0 - chi[ignite])
    chi[ignite] = 1.0
    return replace(state, u=ScalarField(state.u.domain, u),
                   chi=ScalarField(state.chi.domain, chi))


def step_limit(state: LimitState, dt: float) -> LimitState:
    """One full step: implicit heat solve, then the ignition sweep."""
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    vals = state.u.values.copy()
    kernels.diffusion_apply(_diffusion_context(state.u.domain, dt), vals)
    if not np.all(np.isfinite(vals)):
        node = int(np.flatnonzero(~np.isfinite(vals))[0])
        raise NumericalFailureError(
            f"non-finite temperature at node {node}, t={state.t + dt}",
            t=state.t + dt, step=-1, node=node)
    moved = replace(state, t=state.t + dt, u=ScalarField(state.u.domain, vals))
    return ignition_sweep(moved)


def _run_limit_arrays(domain, u, chi, v0_arr, timegrid: TimeGrid) -> Trajectory:
    n = domain.nodes
    n_steps = timegrid.n_steps
    ctx = _diffusion_context(domain, timegrid.dt)
    snap_steps = timegrid.snapshot_steps()
    snap_u = np.empty((snap_steps.size, n))
    snap_aux = np.empty_like(snap_u)
    series = np.full((n_steps + 1, kernels.N_SERIES_COLS), np.nan)
    status, fail_step, fail_node = kernels.run_limit_loop(
        u, chi, v0_arr, domain.h, domain.length, timegrid.dt, n_steps,
        ctx, snap_steps, snap_u, snap_aux, series)
    meta = {
        "kind": "limit",
        "engine": kernels.ENGINE,
        "dt": timegrid.dt,
        "record_every": timegrid.record_every,
    }
    return _build_trajectory(domain, "limit", timegrid, snap_steps, snap_u,
                             snap_aux, series, meta, status, fail_step,
                             fail_node)


def run_limit(u0: ScalarField, v0: ScalarField, timegrid: TimeGrid) -> Trajectory:
    """Apply the initial jump, then step to the horizon.

    Records (u, chi) snapshots on the stride and per-step series: front
    position (midpoint of the last chi-transition interval), trapezoid
    masses of u and of v0*chi, and temperature extrema.
    """
    state = apply_initial_jump(u0, v0)
    return _run_limit_arrays(u0.domain, state.u.values.copy(),
                             state.chi.values.copy(), v0.values.copy(),
                             timegrid)


def run_limit_from_state(state: LimitState, timegrid: TimeGrid) -> Trajectory:
    """Step an explicitly constructed state (e.g. fractional initial chi).

    No initial jump is applied; the caller owns the initial condition.
    """
    if state.t != 0.0:
        raise ValueError("run_limit_from_state expects a t=0 state")
    return _run_limit_arrays(state.u.domain, state.u.values.copy(),
                             state.chi.values.copy(), state.v0.values.copy(),
                             timegrid)
