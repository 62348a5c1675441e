"""Time integration of the stiff-kinetics solid-combustion system.

The evolved pair is the temperature u and the accumulated reaction
integral w(t, x) = int_0^t g(u(s, x)) ds; the reactant is always derived
as v = v0 * exp(-w/eps) and never stored, which keeps v nonnegative and
monotone by construction.  One step is a Lie splitting: the reaction
substep integrates the source exactly with u frozen (conserving u + v
node-wise), then an implicit-Euler Neumann heat step diffuses the
released heat within the same step.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import kernels
from .core import Domain1D, ScalarField, TimeGrid, Trajectory
from .kinetics import KineticsFamily


class NumericalFailureError(RuntimeError):
    """A run produced a non-finite state.

    Carries the failure time/step, the first offending node (or -1 when
    only an aggregate overflowed), and the trajectory recorded up to the
    last good step.
    """

    def __init__(self, message: str, *, t: float, step: int, node: int,
                 trajectory: Optional[Trajectory] = None) -> None:
        super().__init__(message)
        self.t = t
        self.step = step
        self.node = node
        self.trajectory = trajectory


@dataclass(frozen=True)
class SHSState:
    """Instantaneous solver state (t, u, w) plus the frozen data v0 and g."""

    t: float
    u: ScalarField
    w: ScalarField
    v0: ScalarField
    kinetics: KineticsFamily

    def __post_init__(self) -> None:
        if not (self.u.domain == self.w.domain == self.v0.domain):
            raise ValueError("u, w, v0 must share one grid")
        if np.any(self.w.values < 0.0):
            raise ValueError("accumulated reaction integral w must be nonnegative")
        if np.any(self.v0.values < 0.0):
            raise ValueError("initial reactant v0 must be nonnegative")

    @property
    def reactant(self) -> ScalarField:
        """Derived reactant v = v0 * exp(-w/eps)."""
        v = self.v0.values * kernels.depletion(self.w.values,
                                               self.kinetics.epsilon)
        return ScalarField(self.u.domain, v)


def initial_state(u0: ScalarField, v0: ScalarField,
                  kinetics: KineticsFamily) -> SHSState:
    w0 = ScalarField.constant(u0.domain, 0.0)
    return SHSState(t=0.0, u=u0, w=w0, v0=v0, kinetics=kinetics)


def reaction_substep(state: SHSState, dt: float) -> SHSState:
    """Advance the reaction over dt with u frozen; exact in the substep.

    w' = w + dt*g(u) and u' = u + v0*(exp(-w/eps) - exp(-w'/eps)) >= 0,
    so u + v is conserved node-wise up to rounding.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    u = state.u.values.copy()
    w = state.w.values.copy()
    d = kernels.depletion(w, state.kinetics.epsilon)
    v0 = np.ascontiguousarray(state.v0.values)
    kernels.reaction_apply(u, w, d, v0, float(dt), state.kinetics.kernel_params())
    if not np.all(np.isfinite(u)):
        node = int(np.flatnonzero(~np.isfinite(u))[0])
        raise NumericalFailureError(
            f"non-finite temperature at node {node}, t={state.t + dt}",
            t=state.t + dt, step=-1, node=node)
    return replace(state, t=state.t + dt,
                   u=ScalarField(state.u.domain, u),
                   w=ScalarField(state.w.domain, w))


def _diffusion_context(domain: Domain1D, dt: float):
    return kernels.make_diffusion(domain.nodes, dt / domain.h ** 2)


def diffusion_substep(u: ScalarField, dt: float) -> ScalarField:
    """One implicit-Euler Neumann heat step, (I - dt*Lap_h) u' = u.

    The mirror-closure Laplacian conserves the trapezoid mass exactly,
    and the system is an M-matrix, so the direct tridiagonal solve
    cannot break down on finite data.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    vals = u.values.copy()
    kernels.diffusion_apply(_diffusion_context(u.domain, dt), vals)
    return ScalarField(u.domain, vals)


def _build_trajectory(domain, kind, timegrid, snap_steps, snap_u, snap_aux,
                      series, meta, status, fail_step, fail_node):
    dt = timegrid.dt
    if status == kernels.STATUS_OK:
        times = snap_steps.astype(np.float64) * dt
        n_rows = series.shape[0]
    else:
        keep = snap_steps < fail_step
        snap_steps = snap_steps[keep]
        snap_u = snap_u[: snap_steps.size]
        snap_aux = snap_aux[: snap_steps.size]
        times = snap_steps.astype(np.float64) * dt
        n_rows = fail_step  # rows 0 .. fail_step-1 are the last good ones
    traj = Trajectory(
        domain=domain,
        kind=kind,
        times=times,
        u=snap_u,
        aux=snap_aux,
        series_t=series[:n_rows, kernels.COL_T],
        front=series[:n_rows, kernels.COL_FRONT],
        mass_u=series[:n_rows, kernels.COL_MASS_U],
        mass_aux=series[:n_rows, kernels.COL_MASS_AUX],
        umin=series[:n_rows, kernels.COL_UMIN],
        umax=series[:n_rows, kernels.COL_UMAX],
        peak_unburned=(series[:n_rows, kernels.COL_PEAK]
                       if kind in ("shs", "heat") else None),
        meta=meta,
    )
    if status != kernels.STATUS_OK:
        raise NumericalFailureError(
            f"non-finite state at step {fail_step} (t={fail_step * dt}), "
            f"node {fail_node}; last good state recorded",
            t=fail_step * dt, step=fail_step, node=fail_node, trajectory=traj)
    return traj


def run_shs(u0: ScalarField, v0: ScalarField, kinetics: KineticsFamily,
            timegrid: TimeGrid) -> Trajectory:
    """Integrate the stiff system and record a Trajectory.

    Scalar series (front via the reactant half-depletion level set,
    trapezoid masses of u and v, extrema, max of u over unignited nodes)
    are recorded every step; full (u, v) snapshots on the record stride.
    """
    if u0.domain != v0.domain:
        raise ValueError("u0 and v0 must share one grid")
    if np.any(v0.values < 0.0):
        raise ValueError("initial reactant v0 must be nonnegative")
    domain = u0.domain
    n = domain.nodes
    n_steps = timegrid.n_steps
    u = u0.values.copy()
    w = np.zeros(n)
    d = np.ones(n)
    v0_arr = v0.values.copy()
    ctx = _diffusion_context(domain, timegrid.dt)
    snap_steps = timegrid.snapshot_steps()
    snap_u = np.empty((snap_steps.size, n))
    snap_aux = np.empty_like(snap_u)
    series = np.full((n_steps + 1, kernels.N_SERIES_COLS), np.nan)
    status, clamps, fail_step, fail_node = kernels.run_shs_loop(
        u, w, d, v0_arr, domain.h, domain.length, timegrid.dt, n_steps,
        kinetics.kernel_params(), ctx, snap_steps, snap_u, snap_aux, series)
    meta = {
        "kind": "shs",
        "engine": kernels.ENGINE,
        "epsilon": kinetics.epsilon,
        "kinetics_variant": kinetics.variant,
        "dt": timegrid.dt,
        "record_every": timegrid.record_every,
        "clamp_events": int(clamps),
    }
    return _build_trajectory(domain, "shs", timegrid, snap_steps, snap_u,
                             snap_aux, series, meta, status, fail_step,
                             fail_node)


def run_heat(u0: ScalarField, timegrid: TimeGrid) -> Trajectory:
    """Pure Neumann heat run: the caloric twin used by the diagnostics."""
    domain = u0.domain
    n = domain.nodes
    n_steps = timegrid.n_steps
    u = u0.values.copy()
    ctx = _diffusion_context(domain, timegrid.dt)
    snap_steps = timegrid.snapshot_steps()
    snap_u = np.empty((snap_steps.size, n))
    snap_aux = np.empty_like(snap_u)
    series = np.full((n_steps + 1, kernels.N_SERIES_COLS), np.nan)
    status, fail_step, fail_node = kernels.run_heat_loop(
        u, domain.h, domain.length, timegrid.dt, n_steps, ctx,
        snap_steps, snap_u, snap_aux, series)
    meta = {
        "kind": "heat",
        "engine": kernels.ENGINE,
        "dt": timegrid.dt,
        "record_every": timegrid.record_every,
    }
    return _build_trajectory(domain, "heat", timegrid, snap_steps, snap_u,
                             snap_aux, series, meta, status, fail_step,
                             fail_node)


def default_dt(domain: Domain1D) -> float:
    """h^2/2: accuracy near the moving front, not stability, sets dt."""
    return 0.5 * domain.h ** 2
