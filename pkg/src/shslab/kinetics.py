"""Reaction-rate families g and executable validators for their structure.

Two built-in families are provided:

* ``matkowsky_sivashinsky`` -- g(z) = exp((1 - 1/(z+1))/eps) for z > -1,
  zero at and below -1.
* ``threshold`` -- g(z) = exp((z/(kappa*z + 1))/eps) for z > theta_bar - 1,
  zero at and below the cutoff.  ``kappa`` is stored per instance; sweeps
  construct one instance per (eps, kappa) pair.

A ``tabulated`` variant accepts a piecewise-linear table (constant
extension outside its range) so user-supplied rates can run through the
same validators and solvers.

All exponent evaluations are clamped at ``exp_clamp`` (default 700,
below the double-precision overflow threshold); every clamp event is
counted.  Families are immutable after construction except for that
counter, so they can be shared across concurrent runs as long as each
run keeps its own event count (the solvers do; they never touch the
family counter).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import kernels

MATKOWSKY_SIVASHINSKY = "matkowsky_sivashinsky"
THRESHOLD = "threshold"
TABULATED = "tabulated"

_VARIANT_CODES = {
    MATKOWSKY_SIVASHINSKY: kernels.MS,
    THRESHOLD: kernels.THR,
    TABULATED: kernels.TAB,
}

DEFAULT_EXP_CLAMP = 700.0


@dataclass(frozen=True)
class KineticsFamily:
    """One member of a reaction-rate family, at a fixed steepness eps."""

    variant: str
    epsilon: float
    kappa: float = 1.0  # threshold variant only
    theta_bar: float = 0.5  # threshold variant only
    table: Optional[tuple[np.ndarray, np.ndarray]] = None  # tabulated only
    exp_clamp: float = DEFAULT_EXP_CLAMP
    _clamps: list = field(default_factory=lambda: [0], repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.variant not in _VARIANT_CODES:
            raise ValueError(f"unknown kinetics variant {self.variant!r}")
        if not (math.isfinite(self.epsilon) and self.epsilon > 0.0):
            raise ValueError("epsilon must be positive and finite")
        if self.variant == THRESHOLD:
            if not 0.0 < self.kappa <= 1.0:
                raise ValueError("kappa must lie in (0, 1]")
            if not 0.0 < self.theta_bar < 1.0:
                raise ValueError("theta_bar must lie in (0, 1)")
        if not (math.isfinite(self.exp_clamp) and self.exp_clamp > 0.0):
            raise ValueError("exp_clamp must be positive and finite")
        if self.variant == TABULATED:
            if self.table is None:
                raise ValueError("tabulated variant requires a table")
            tz = np.ascontiguousarray(self.table[0], dtype=np.float64)
            tg = np.ascontiguousarray(self.table[1], dtype=np.float64)
            if tz.ndim != 1 or tz.shape != tg.shape or tz.size < 2:
                raise ValueError("table must be two equal-length 1D arrays (>= 2 points)")
            if not np.all(np.diff(tz) > 0.0):
                raise ValueError("table abscissae must be strictly increasing")
            if not (np.all(np.isfinite(tz)) and np.all(np.isfinite(tg))):
                raise ValueError("table entries must be finite")
            if np.any(tg < 0.0):
                raise ValueError("rate table must be nonnegative")
            tz.setflags(write=False)
            tg.setflags(write=False)
            object.__setattr__(self, "table", (tz, tg))
        elif self.table is not None:
            raise ValueError("only the tabulated variant takes a table")

    # -- structure ---------------------------------------------------------

    @property
    def jump_point(self) -> Optional[float]:
        """The single admissible jump/cutoff location z0, if any."""
        if self.variant == MATKOWSKY_SIVASHINSKY:
            return -1.0
        if self.variant == THRESHOLD:
            return self.theta_bar - 1.0
        return None

    def linear_growth_bound(self) -> float:
        """A constant C with g(z) <= C*(1 + |z|) everywhere.

        Both built-in families are bounded, so the reported constant is
        simply their supremum (exp(1/eps), resp. exp(1/(kappa*eps)));
        no attempt is made at a tighter bound.
        """
        if self.variant == MATKOWSKY_SIVASHINSKY:
            return float(np.exp(1.0 / self.epsilon))
        if self.variant == THRESHOLD:
            return float(np.exp(1.0 / (self.kappa * self.epsilon)))
        return float(np.max(self.table[1]))

    def with_epsilon(self, epsilon: float) -> "KineticsFamily":
        """Same family shape at a different steepness (fresh clamp counter)."""
        return KineticsFamily(
            variant=self.variant,
            epsilon=epsilon,
            kappa=self.kappa,
            theta_bar=self.theta_bar,
            table=self.table,
            exp_clamp=self.exp_clamp,
        )

    def kernel_params(self) -> tuple:
        """Parameter pack consumed by the compute kernels."""
        if self.table is not None:
            tz, tg = self.table
        else:
            tz = tg = np.empty(0)
        return (
            _VARIANT_CODES[self.variant],
            float(self.epsilon),
            float(self.kappa),
            float(self.theta_bar),
            tz,
            tg,
            float(self.exp_clamp),
        )

    # -- evaluation --------------------------------------------------------

    @property
    def clamp_count(self) -> int:
        """Clamp events observed through eval_g on this instance."""
        return self._clamps[0]

    def reset_clamp_count(self) -> None:
        self._clamps[0] = 0

    def eval_g(self, z):
        """Evaluate the rate; never overflows (exponents are clamped).

        Accepts a scalar or an array, returns the same shape.
        """
        zs = np.atleast_1d(np.asarray(z, dtype=np.float64))
        if not np.all(np.isfinite(zs)):
            raise ValueError("eval_g requires finite input")
        g, n_clamped = kernels.eval_g(zs, self.kernel_params())
        self._clamps[0] += int(n_clamped)
        if np.isscalar(z) or np.ndim(z) == 0:
            return float(g[0])
        return g


@dataclass(frozen=True)
class AssumptionReport:
    """Outcome of one structural-assumption check over an eps sequence."""

    name: str
    window: tuple[float, float]
    eps_values: tuple[float, ...]
    values: tuple[float, ...]
    tol: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "window": list(self.window),
            "eps_values": list(self.eps_values),
            "values": list(self.values),
            "tol": self.tol,
            "passed": self.passed,
        }


# Both built-in families are monotone, so endpoints would suffice; dense
# sampling keeps tabulated families honest.
_N_SAMPLES = 1000


def _check_eps_sequence(eps_sequence: Sequence[float]) -> tuple[float, ...]:
    eps = tuple(float(e) for e in eps_sequence)
    if len(eps) == 0:
        raise ValueError("eps_sequence must be non-empty")
    if any(e <= 0.0 or not math.isfinite(e) for e in eps):
        raise ValueError("eps_sequence entries must be positive and finite")
    if any(b >= a for a, b in zip(eps, eps[1:])):
        raise ValueError("eps_sequence must be strictly decreasing")
    return eps


def _window_samples(window: tuple[float, float]) -> np.ndarray:
    a, b = float(window[0]), float(window[1])
    if not (math.isfinite(a) and math.isfinite(b)) or a > b:
        raise ValueError("window must be a finite interval [a, b] with a <= b")
    return np.linspace(a, b, _N_SAMPLES)


def verify_assumption_cold(
    family: KineticsFamily,
    eps_sequence: Sequence[float],
    window: tuple[float, float],
    tol: float = 1e-2,
) -> AssumptionReport:
    """Check g_eps/eps -> 0 on a compact window strictly below zero.

    For each eps, s_eps is the sampled maximum of g(z)/eps over the
    window.  Passes iff the final s_eps is below tol and the last three
    entries are non-increasing.
    """
    eps = _check_eps_sequence(eps_sequence)
    if window[1] >= 0.0:
        raise ValueError("cold window must lie compactly inside (-inf, 0)")
    zs = _window_samples(window)
    sups = []
    for e in eps:
        fam = family.with_epsilon(e)
        sups.append(float(np.max(fam.eval_g(zs)) / e))
    tail = sups[-3:]
    passed = sups[-1] < tol and all(a >= b for a, b in zip(tail, tail[1:]))
    return AssumptionReport(
        name="cold_rate_vanishes",
        window=(float(window[0]), float(window[1])),
        eps_values=eps,
        values=tuple(sups),
        tol=float(tol),
        passed=bool(passed),
    )


def verify_assumption_hot(
    family: KineticsFamily,
    eps_sequence: Sequence[float],
    window: tuple[float, float],
    c_window: float = 1.0,
    tol: float = 1e-2,
) -> AssumptionReport:
    """Check min(g_eps, c) -> c uniformly on a compact window above zero.

    For each eps, d_eps is the sampled maximum of c - min(g(z), c) over
    the window.  Passes iff the final d_eps is below tol.
    """
    eps = _check_eps_sequence(eps_sequence)
    if window[0] <= 0.0:
        raise ValueError("hot window must lie compactly inside (0, +inf)")
    if c_window < 0.0:
        raise ValueError("c_window must be nonnegative")
    zs = _window_samples(window)
    gaps = []
    for e in eps:
        fam = family.with_epsilon(e)
        g = fam.eval_g(zs)
        gaps.append(float(np.max(c_window - np.minimum(g, c_window))))
    passed = gaps[-1] < tol
    return AssumptionReport(
        name="hot_rate_saturates",
        window=(float(window[0]), float(window[1])),
        eps_values=eps,
        values=tuple(gaps),
        tol=float(tol),
        passed=bool(passed),
    )
