"""Executable forms of the a-priori estimates and scheme invariants.

Each check compares a quantity computed from a recorded trajectory (lhs)
against its analytic bound (rhs) and reports pass/fail with a relative
slack.  Analytic inequalities get 5% slack for quadrature and splitting
error; conservation and comparison properties, which the schemes satisfy
by construction, get absolute budgets of 1e-8 / 1e-10 / 1e-12.

Space-time integrals are discretized with trapezoid weights in space and
right-endpoint weights in time (snapshot j carries t_j - t_{j-1}); the
right-endpoint rule matches the implicit update, so the discrete energy
identity keeps the gradient bound one-sided even when the bound is zero.
All checks are pure functions of their inputs: re-running them on the
same trajectory reproduces identical numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import ScalarField, Trajectory, snapshot_time_weights

CONSERVATION_RTOL = 1e-8
SUPERCALORIC_SLACK = 1e-10
LOWER_BOUND_SLACK = 1e-12
DEFAULT_SLACK = 0.05


@dataclass(frozen=True)
class EstimateReport:
    """One checked inequality: passed iff lhs <= rhs*(1 + tol)."""

    name: str
    lhs: float
    rhs: float
    tol: float
    slack: float = math.nan
    passed: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "slack", self.rhs - self.lhs)
        object.__setattr__(self, "passed", bool(self.lhs <= self.rhs * (1.0 + self.tol)))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "tol": self.tol,
            "passed": self.passed,
        }


def _truncated(traj: Trajectory, horizon: Optional[float]):
    """Snapshot slice covering (0, horizon]; defaults to the full record."""
    times = traj.times
    if horizon is None:
        m = times.shape[0]
    else:
        m = int(np.searchsorted(times, horizon, side="right"))
        if m < 1:
            raise ValueError("horizon precedes the first snapshot")
    return times[:m], traj.u[:m]


def check_l2_bound(
    traj: Trajectory,
    u0: ScalarField,
    reactant_bound: float,
    horizon: Optional[float] = None,
    tol: float = DEFAULT_SLACK,
) -> EstimateReport:
    """Space-time L2 bound: int_0^T int u^2 <= T * int (C + |u0|)^2.

    ``reactant_bound`` is C, the uniform bound on the initial reactant
    (resp. latent heat density).
    """
    times, u = _truncated(traj, horizon)
    wx = traj.domain.quadrature_weights()
    wt = snapshot_time_weights(times)
    lhs = float(wt @ ((u * u) @ wx))
    T = float(times[-1])
    rhs = T * float(wx @ (reactant_bound + np.abs(u0.values)) ** 2)
    return EstimateReport("l2_space_time_bound", lhs, rhs, tol)


def _g_cap(u: np.ndarray, cap: float) -> np.ndarray:
    """Quadratic energy density flattened to linear growth above the cap."""
    return np.where(u < cap, 0.5 * u * u, cap * u - 0.5 * cap * cap)


def check_gradient_bound(
    traj: Trajectory,
    u0: ScalarField,
    reactant_bound: float,
    cap: float = 2.0,
    horizon: Optional[float] = None,
    tol: float = DEFAULT_SLACK,
) -> EstimateReport:
    """Capped energy identity: the change of int G(u) plus the space-time
    Dirichlet energy of min(u, M) is bounded by C*M*|Omega|.

    The discrete gradient uses forward differences on cell edges with
    edge weight h, so the reported lhs is reproducible bit-for-bit.
    """
    if cap < 1.0:
        raise ValueError("cap M must be >= 1")
    times, u = _truncated(traj, horizon)
    wx = traj.domain.quadrature_weights()
    wt = snapshot_time_weights(times)
    h = traj.domain.h
    capped = np.minimum(u, cap)
    dirichlet = np.sum(np.diff(capped, axis=1) ** 2, axis=1) / h
    lhs = float(
        wx @ (_g_cap(u[-1], cap) - _g_cap(u0.values, cap)) + wt @ dirichlet
    )
    rhs = reactant_bound * cap * traj.domain.length
    return EstimateReport("capped_gradient_bound", lhs, rhs, tol)


def check_conservation(traj: Trajectory, kind: Optional[str] = None) -> EstimateReport:
    """Drift of the conserved integral along the per-step series.

    epsilon_level: int(u + v); limit_level: int(u - v0*chi).  Heat runs
    fall under epsilon_level with v identically zero.
    """
    if kind is None:
        kind = "limit_level" if traj.kind == "limit" else "epsilon_level"
    if kind == "epsilon_level":
        e = traj.mass_u + traj.mass_aux
    elif kind == "limit_level":
        e = traj.mass_u - traj.mass_aux
    else:
        raise ValueError(f"unknown conservation kind {kind!r}")
    lhs = float(np.max(np.abs(e - e[0])))
    rhs = CONSERVATION_RTOL * (1.0 + abs(float(e[0])))
    return EstimateReport(f"conservation_{kind}", lhs, rhs, 0.0)


def check_supercaloric(traj: Trajectory, heat_twin: Trajectory) -> EstimateReport:
    """Node-wise comparison with the heat-only twin: u >= u_heat - 1e-10.

    Both runs must share the grid and snapshot schedule.  The companion
    lower bound (min u never drops below min u0) is check_lower_bound.
    """
    traj.require_compatible(heat_twin)
    lhs = float(np.max(heat_twin.u - traj.u))
    return EstimateReport("supercaloric", lhs, SUPERCALORIC_SLACK, 0.0)


def check_lower_bound(traj: Trajectory, u0: ScalarField) -> EstimateReport:
    """Uniform bound from below: the run never undercuts min(u0)."""
    lhs = float(np.min(u0.values) - np.min(traj.umin))
    return EstimateReport("uniform_lower_bound", lhs, LOWER_BOUND_SLACK, 0.0)


def check_hysteresis_consistency(traj: Trajectory) -> EstimateReport:
    """Burned-fraction semantics on a limit trajectory, as violation counts.

    Checks, over all recorded snapshots: chi never decreases; chi takes
    only {0, 1} or its own initial value at each node; and chi equals 1
    exactly at nodes whose recorded temperature history exceeded 0.
    """
    if traj.kind != "limit":
        raise ValueError("hysteresis check applies to limit trajectories")
    chi = traj.aux
    u = traj.u
    violations = int(np.count_nonzero(np.diff(chi, axis=0) < 0.0))
    allowed = (chi == 0.0) | (chi == 1.0) | (chi == chi[0])
    violations += int(np.count_nonzero(~allowed))
    hist_max = np.maximum.accumulate(u, axis=0)
    violations += int(np.count_nonzero((chi == 1.0) != (hist_max > 0.0)))
    return EstimateReport("hysteresis_semantics", float(violations), 0.0, 0.0)


def standard_suite(
    traj: Trajectory,
    u0: ScalarField,
    reactant_bound: float,
    cap: float = 2.0,
    heat_twin: Optional[Trajectory] = None,
    tol: float = DEFAULT_SLACK,
) -> list[EstimateReport]:
    """The checks every experiment attaches to each of its runs."""
    reports = [
        check_conservation(traj),
        check_lower_bound(traj, u0),
        check_l2_bound(traj, u0, reactant_bound, tol=tol),
        check_gradient_bound(traj, u0, reactant_bound, cap=cap, tol=tol),
    ]
    if heat_twin is not None:
        reports.append(check_supercaloric(traj, heat_twin))
    if traj.kind == "limit":
        reports.append(check_hysteresis_consistency(traj))
    return reports


def conservation_ok(reports: list[EstimateReport]) -> bool:
    """Experiments may not report a verdict off a run that failed this."""
    return all(r.passed for r in reports if r.name.startswith("conservation"))
