"""Shared spatial grid, scalar fields, quadrature, and space-time norms.

Everything downstream (both solvers, the diagnostics, the experiment
harness) works on a uniform 1D grid with homogeneous Neumann boundaries.
Fields and trajectories are immutable once constructed so they can be
shared freely between runs and diagnostics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np


class GridMismatchError(ValueError):
    """Two objects that must share a grid / snapshot schedule do not."""


def _readonly(a: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(a, dtype=np.float64)
    if out is a:
        out = out.copy()
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Domain1D:
    """Uniform grid on the interval (0, length) with Neumann ends.

    Nodes sit at x_i = i*h, h = length/(nodes-1).  There is no other
    boundary option: both solvers assume the mirror (ghost-node) closure.
    """

    length: float
    nodes: int

    def __post_init__(self) -> None:
        if not (math.isfinite(self.length) and self.length > 0.0):
            raise ValueError("domain length must be positive and finite")
        if int(self.nodes) != self.nodes or self.nodes < 3:
            raise ValueError("nodes must be an integer >= 3")
        object.__setattr__(self, "nodes", int(self.nodes))

    @property
    def h(self) -> float:
        return self.length / (self.nodes - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(0.0, self.length, self.nodes)

    def quadrature_weights(self) -> np.ndarray:
        """Composite trapezoid weights: h inside, h/2 at the two ends."""
        w = np.full(self.nodes, self.h)
        w[0] *= 0.5
        w[-1] *= 0.5
        return w


@dataclass(frozen=True)
class ScalarField:
    """Nodal values of a scalar quantity on a Domain1D.

    Values are stored read-only; non-finite entries are rejected at
    construction (NaN/inf anywhere downstream is a numerical failure,
    never a representable state).
    """

    domain: Domain1D
    values: np.ndarray

    def __post_init__(self) -> None:
        v = _readonly(np.asarray(self.values))
        if v.ndim != 1 or v.shape[0] != self.domain.nodes:
            raise ValueError(
                f"field has {v.shape} values for a {self.domain.nodes}-node grid"
            )
        if not np.all(np.isfinite(v)):
            raise ValueError("field values must all be finite")
        object.__setattr__(self, "values", v)

    @classmethod
    def constant(cls, domain: Domain1D, value: float) -> "ScalarField":
        return cls(domain, np.full(domain.nodes, float(value)))

    @classmethod
    def from_callable(cls, domain: Domain1D, fn) -> "ScalarField":
        return cls(domain, np.asarray([fn(x) for x in domain.x], dtype=np.float64))

    @classmethod
    def step(
        cls,
        domain: Domain1D,
        left_value: float,
        right_value: float,
        split_fraction: float,
    ) -> "ScalarField":
        """left_value on x <= split_fraction*length, right_value beyond."""
        if not 0.0 <= split_fraction <= 1.0:
            raise ValueError("split_fraction must lie in [0, 1]")
        xs = domain.x
        split = split_fraction * domain.length
        vals = np.where(xs <= split, float(left_value), float(right_value))
        return cls(domain, vals)

    @classmethod
    def cosine(
        cls, domain: Domain1D, mean: float, amplitude: float, period: float
    ) -> "ScalarField":
        if period <= 0.0:
            raise ValueError("cosine period must be positive")
        vals = mean + amplitude * np.cos(2.0 * np.pi * domain.x / period)
        return cls(domain, vals)


@dataclass(frozen=True)
class TimeGrid:
    """Fixed-step schedule: dt, horizon, and the snapshot stride."""

    dt: float
    horizon: float
    record_every: int = 1

    def __post_init__(self) -> None:
        if not (math.isfinite(self.dt) and self.dt > 0.0):
            raise ValueError("dt must be positive and finite")
        if not (math.isfinite(self.horizon) and self.horizon > 0.0):
            raise ValueError("horizon must be positive and finite")
        if self.dt > self.horizon:
            raise ValueError("dt must not exceed the horizon")
        if int(self.record_every) != self.record_every or self.record_every < 1:
            raise ValueError("record_every must be a positive integer")
        object.__setattr__(self, "record_every", int(self.record_every))

    @property
    def n_steps(self) -> int:
        return int(math.ceil(self.horizon / self.dt))

    def snapshot_steps(self) -> np.ndarray:
        """Step indices recorded as full snapshots: 0, k, 2k, ..., n_steps."""
        steps = list(range(0, self.n_steps + 1, self.record_every))
        if steps[-1] != self.n_steps:
            steps.append(self.n_steps)
        return np.asarray(steps, dtype=np.int64)


def integrate(f: ScalarField) -> float:
    """Composite trapezoid of a nodal field; exact for affine node data."""
    return float(np.dot(f.domain.quadrature_weights(), f.values))


@dataclass(frozen=True)
class Trajectory:
    """Recorded output of a run: snapshots on the record stride plus
    per-step scalar series.

    ``u`` holds one snapshot per row.  ``aux`` is the companion field:
    reactant v for the stiff-kinetics runs, burned fraction chi for the
    limit runs, zeros for heat-only runs.  The scalar series (front
    position, trapezoid masses, extrema) are recorded at every step.
    """

    domain: Domain1D
    kind: str  # "shs" | "limit" | "heat"
    times: np.ndarray  # snapshot times, shape (m,)
    u: np.ndarray  # snapshots, shape (m, nodes)
    aux: np.ndarray  # v (shs), chi (limit), zeros (heat)
    series_t: np.ndarray  # per-step times, shape (n_steps+1,)
    front: np.ndarray
    mass_u: np.ndarray
    mass_aux: np.ndarray  # integral of v (shs) or of v0*chi (limit)
    umin: np.ndarray
    umax: np.ndarray
    peak_unburned: Optional[np.ndarray] = None  # shs runs only
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        for name in ("times", "u", "aux", "series_t", "front", "mass_u",
                     "mass_aux", "umin", "umax"):
            object.__setattr__(self, name, _readonly(getattr(self, name)))
        if self.peak_unburned is not None:
            object.__setattr__(self, "peak_unburned", _readonly(self.peak_unburned))
        if self.u.shape != (self.times.shape[0], self.domain.nodes):
            raise ValueError("snapshot array shape does not match times/grid")
        if self.aux.shape != self.u.shape:
            raise ValueError("aux snapshots must match u snapshots in shape")

    @property
    def n_snapshots(self) -> int:
        return int(self.times.shape[0])

    def snapshot_field(self, i: int) -> ScalarField:
        return ScalarField(self.domain, self.u[i])

    def require_compatible(self, other: "Trajectory") -> None:
        if self.domain != other.domain:
            raise GridMismatchError(
                "trajectories recorded on different grids; re-run on a shared "
                "grid (no interpolation is performed)"
            )
        if self.times.shape != other.times.shape or not np.array_equal(
            self.times, other.times
        ):
            raise GridMismatchError(
                "trajectories recorded at different snapshot times; re-run on "
                "a shared schedule (no interpolation is performed)"
            )


def snapshot_time_weights(times: np.ndarray) -> np.ndarray:
    """Right-endpoint time weights: snapshot j >= 1 carries t_j - t_{j-1}.

    The weight of the initial snapshot is zero, matching the implicit
    update (each recorded state accounts for the interval that produced
    it) and making space-time integrals over (0, T) insensitive to the
    instantaneous jump at t = 0 in the limit problem.
    """
    w = np.zeros_like(times)
    w[1:] = np.diff(times)
    return w


def lp_space_time_distance(a: Trajectory, b: Trajectory, p: float = 1.0) -> float:
    """Discrete L^p((0,T) x Omega) distance between the u-snapshots.

    Both trajectories must share the grid and snapshot times; callers
    needing a comparison must re-run on a common schedule.
    """
    if p < 1.0:
        raise ValueError("p must be >= 1")
    a.require_compatible(b)
    wx = a.domain.quadrature_weights()
    wt = snapshot_time_weights(a.times)
    diff = np.abs(a.u - b.u) ** p
    total = float(wt @ (diff @ wx))
    return total ** (1.0 / p)
