"""Strict JSON run configuration.

Unknown keys anywhere, duplicate keys, and out-of-range values are all
rejected at parse time with the offending key named.  Documented
defaults: dt = h^2/2, p = 1, estimate slack 0.05.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from .core import Domain1D, ScalarField, TimeGrid
from .kinetics import KineticsFamily

EXPERIMENTS = (
    "simulate-shs",
    "simulate-limit",
    "converge",
    "ode-select",
    "wave",
    "pulsate",
    "peak-probe",
    "validate-assumptions",
)

# experiments that run on a grid (the others may omit domain/initial)
_GRIDLESS = ("ode-select", "validate-assumptions")


class ConfigError(ValueError):
    """Configuration rejected; the message names the offending key."""


def _reject_duplicates(pairs):
    out = {}
    for key, value in pairs:
        if key in out:
            raise ConfigError(f"duplicate key {key!r}")
        out[key] = value
    return out


def _section(raw: dict, name: str, required: bool) -> Optional[dict]:
    if name not in raw:
        if required:
            raise ConfigError(f"missing required section {name!r}")
        return None
    value = raw[name]
    if not isinstance(value, dict):
        raise ConfigError(f"section {name!r} must be an object")
    return dict(value)


def _pop_number(d: dict, key: str, default=None, *, where: str):
    if key not in d:
        if default is None:
            raise ConfigError(f"missing key {where}.{key}")
        return default
    value = d.pop(key)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}.{key} must be a number")
    if not math.isfinite(value):
        raise ConfigError(f"{where}.{key} must be finite")
    return float(value)


def _pop_int(d: dict, key: str, default=None, *, where: str):
    if key not in d:
        if default is None:
            raise ConfigError(f"missing key {where}.{key}")
        return default
    value = d.pop(key)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where}.{key} must be an integer")
    return int(value)


def _reject_leftovers(d: dict, where: str) -> None:
    if d:
        key = sorted(d)[0]
        raise ConfigError(f"unknown key {where}.{key}")


@dataclass(frozen=True)
class FieldSpec:
    """Initial-data recipe usable on any grid (tables pin the node count)."""

    kind: str
    params: dict

    def build(self, domain: Domain1D) -> ScalarField:
        p = self.params
        if self.kind == "constant":
            return ScalarField.constant(domain, p["value"])
        if self.kind == "step":
            return ScalarField.step(domain, p["left_value"], p["right_value"],
                                    p["split_fraction"])
        if self.kind == "cosine":
            return ScalarField.cosine(domain, p["mean"], p["amplitude"],
                                      p["period"])
        values = np.asarray(p["values"], dtype=np.float64)
        if values.size != domain.nodes:
            raise ConfigError(
                f"table field has {values.size} values for a "
                f"{domain.nodes}-node grid")
        return ScalarField(domain, values)


def _parse_field_spec(raw: Any, where: str, nonnegative: bool) -> FieldSpec:
    if not isinstance(raw, dict):
        raise ConfigError(f"{where} must be an object with a 'kind'")
    d = dict(raw)
    kind = d.pop("kind", None)
    if kind == "constant":
        params = {"value": _pop_number(d, "value", where=where)}
    elif kind == "step":
        params = {
            "left_value": _pop_number(d, "left_value", where=where),
            "right_value": _pop_number(d, "right_value", where=where),
            "split_fraction": _pop_number(d, "split_fraction", where=where),
        }
        if not 0.0 <= params["split_fraction"] <= 1.0:
            raise ConfigError(f"{where}.split_fraction must lie in [0, 1]")
    elif kind == "cosine":
        params = {
            "mean": _pop_number(d, "mean", where=where),
            "amplitude": _pop_number(d, "amplitude", where=where),
            "period": _pop_number(d, "period", where=where),
        }
        if params["period"] <= 0.0:
            raise ConfigError(f"{where}.period must be positive")
    elif kind == "table":
        values = d.pop("values", None)
        if not isinstance(values, list) or not values:
            raise ConfigError(f"{where}.values must be a non-empty list")
        for v in values:
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ConfigError(f"{where}.values must contain numbers")
        params = {"values": [float(v) for v in values]}
    else:
        raise ConfigError(
            f"{where}.kind must be one of constant|step|cosine|table")
    _reject_leftovers(d, where)
    if nonnegative:
        spec = FieldSpec(kind, params)
        lows = {
            "constant": lambda: params["value"],
            "step": lambda: min(params["left_value"], params["right_value"]),
            "cosine": lambda: params["mean"] - abs(params["amplitude"]),
            "table": lambda: min(params["values"]),
        }
        if lows[kind]() < 0.0:
            raise ConfigError(f"{where} must be nonnegative")
        return spec
    return FieldSpec(kind, params)


@dataclass(frozen=True)
class KineticsSpec:
    variant: str
    epsilon: Optional[float]
    eps_list: Optional[tuple[float, ...]]
    kappa: float
    theta_bar: float
    exp_clamp: float
    table: Optional[tuple]

    def family(self, epsilon: Optional[float] = None) -> KineticsFamily:
        eps = epsilon if epsilon is not None else self.epsilon
        if eps is None:
            raise ConfigError("kinetics.epsilon is required for this experiment")
        table = None
        if self.table is not None:
            table = (np.asarray(self.table[0]), np.asarray(self.table[1]))
        return KineticsFamily(self.variant, epsilon=eps, kappa=self.kappa,
                              theta_bar=self.theta_bar, table=table,
                              exp_clamp=self.exp_clamp)

    def require_eps_list(self) -> tuple[float, ...]:
        if not self.eps_list:
            raise ConfigError("kinetics.eps_list is required for this experiment")
        return self.eps_list


_VARIANT_ALIASES = {
    "matkowsky_sivashinsky": "matkowsky_sivashinsky",
    "threshold": "threshold",
    "tabulated": "tabulated",
}


def _parse_kinetics(raw: dict) -> KineticsSpec:
    d = dict(raw)
    variant = d.pop("variant", None)
    if variant not in _VARIANT_ALIASES:
        raise ConfigError(
            "kinetics.variant must be one of "
            "matkowsky_sivashinsky|threshold|tabulated")
    epsilon = None
    if "epsilon" in d:
        epsilon = _pop_number(d, "epsilon", where="kinetics")
        if epsilon <= 0.0:
            raise ConfigError("kinetics.epsilon must be positive")
    eps_list = None
    if "eps_list" in d:
        lst = d.pop("eps_list")
        if not isinstance(lst, list) or not lst:
            raise ConfigError("kinetics.eps_list must be a non-empty list")
        vals = []
        for v in lst:
            if isinstance(v, bool) or not isinstance(v, (int, float)) or v <= 0:
                raise ConfigError("kinetics.eps_list entries must be positive numbers")
            vals.append(float(v))
        if any(b >= a for a, b in zip(vals, vals[1:])):
            raise ConfigError("kinetics.eps_list must be strictly decreasing")
        eps_list = tuple(vals)
    kappa = _pop_number(d, "kappa", default=1.0, where="kinetics")
    if not 0.0 < kappa <= 1.0:
        raise ConfigError("kinetics.kappa must lie in (0, 1]")
    theta_bar = _pop_number(d, "theta_bar", default=0.5, where="kinetics")
    if not 0.0 < theta_bar < 1.0:
        raise ConfigError("kinetics.theta_bar must lie in (0, 1)")
    exp_clamp = _pop_number(d, "exp_clamp", default=700.0, where="kinetics")
    if exp_clamp <= 0.0:
        raise ConfigError("kinetics.exp_clamp must be positive")
    table = None
    if "table" in d:
        t = d.pop("table")
        if not isinstance(t, dict) or set(t) != {"z", "g"}:
            raise ConfigError("kinetics.table must be an object with keys z and g")
        table = (tuple(float(v) for v in t["z"]), tuple(float(v) for v in t["g"]))
    if variant == "tabulated" and table is None:
        raise ConfigError("kinetics.table is required for the tabulated variant")
    _reject_leftovers(d, "kinetics")
    return KineticsSpec(variant=variant, epsilon=epsilon, eps_list=eps_list,
                        kappa=kappa, theta_bar=theta_bar, exp_clamp=exp_clamp,
                        table=table)


_TOLERANCE_DEFAULTS = {
    "estimate_slack": 0.05,
    "p": 1.0,
    "bound_cap": 2.0,
    "assumption_tol": 1e-2,
    "c_hot": 1.0,
}

_OPTION_DEFAULTS = {
    "fit_start_frac": 1.0 / 3.0,
    "fit_end_frac": 2.0 / 3.0,
    "plateau_lo_frac": 0.75,
    "plateau_hi_frac": 0.9,
    "smooth_period_fraction": 0.05,
    "event_rel_drop": 0.2,
    "seed_value": 0.2,
    "seed_fraction": 0.02,
}


def _parse_window(d: dict, key: str, default, *, where: str):
    if key not in d:
        return tuple(default)
    value = d.pop(key)
    if (not isinstance(value, list) or len(value) != 2
            or any(isinstance(v, bool) or not isinstance(v, (int, float))
                   for v in value)):
        raise ConfigError(f"{where}.{key} must be a two-number interval [a, b]")
    return float(value[0]), float(value[1])


@dataclass(frozen=True)
class RunConfig:
    experiment: str
    domain: Optional[Domain1D]
    dt: Optional[float]
    horizon: float
    record_every: Optional[int]
    kinetics: Optional[KineticsSpec]
    u0_spec: Optional[FieldSpec]
    v0_spec: Optional[FieldSpec]
    tolerances: dict
    options: dict
    k_cold: tuple[float, float]
    k_hot: tuple[float, float]
    refinements: tuple[int, ...]
    output_dir: Optional[str]
    raw: dict = field(repr=False, default_factory=dict)

    def timegrid(self) -> TimeGrid:
        if self.domain is None:
            raise ConfigError("this experiment requires a domain section")
        dt = self.dt if self.dt is not None else 0.5 * self.domain.h ** 2
        record = self.record_every
        if record is None:
            n_steps = int(math.ceil(self.horizon / dt))
            record = max(1, n_steps // 200)
        return TimeGrid(dt=dt, horizon=self.horizon, record_every=record)

    def fields(self) -> tuple[ScalarField, ScalarField]:
        if self.domain is None or self.u0_spec is None or self.v0_spec is None:
            raise ConfigError("this experiment requires domain and initial sections")
        return self.u0_spec.build(self.domain), self.v0_spec.build(self.domain)


def parse_config(text: str, experiment: Optional[str] = None) -> RunConfig:
    """Parse and validate a JSON configuration document.

    ``experiment`` (from the CLI subcommand) must agree with the
    document's own "experiment" key when both are present.
    """
    raw = json.loads(text, object_pairs_hook=_reject_duplicates)
    if not isinstance(raw, dict):
        raise ConfigError("configuration root must be an object")
    work = dict(raw)

    doc_exp = work.pop("experiment", None)
    if doc_exp is None and experiment is None:
        raise ConfigError("missing key experiment")
    if doc_exp is not None and doc_exp not in EXPERIMENTS:
        raise ConfigError(f"experiment must be one of {'|'.join(EXPERIMENTS)}")
    if doc_exp is not None and experiment is not None and doc_exp != experiment:
        raise ConfigError(
            f"config experiment {doc_exp!r} does not match subcommand "
            f"{experiment!r}")
    exp = experiment if experiment is not None else doc_exp

    gridless = exp in _GRIDLESS

    domain = None
    dom_sec = _section(work, "domain", required=not gridless)
    work.pop("domain", None)
    if dom_sec is not None:
        length = _pop_number(dom_sec, "length", where="domain")
        nodes = _pop_int(dom_sec, "nodes", where="domain")
        _reject_leftovers(dom_sec, "domain")
        if length <= 0.0:
            raise ConfigError("domain.length must be positive")
        if nodes < 3:
            raise ConfigError("domain.nodes must be at least 3")
        domain = Domain1D(length=length, nodes=nodes)

    dt = None
    horizon = 2.0
    record_every = None
    time_sec = _section(work, "time", required=False)
    work.pop("time", None)
    if time_sec is not None:
        if "dt" in time_sec:
            dt = _pop_number(time_sec, "dt", where="time")
            if dt <= 0.0:
                raise ConfigError("time.dt must be positive")
        horizon = _pop_number(time_sec, "horizon", default=2.0, where="time")
        if horizon <= 0.0:
            raise ConfigError("time.horizon must be positive")
        if "record_every" in time_sec:
            record_every = _pop_int(time_sec, "record_every", where="time")
            if record_every < 1:
                raise ConfigError("time.record_every must be a positive integer")
        _reject_leftovers(time_sec, "time")

    kinetics = None
    kin_required = exp != "simulate-limit"
    kin_sec = _section(work, "kinetics", required=kin_required)
    work.pop("kinetics", None)
    if kin_sec is not None:
        kinetics = _parse_kinetics(kin_sec)

    u0_spec = v0_spec = None
    init_sec = _section(work, "initial", required=not gridless)
    work.pop("initial", None)
    if init_sec is not None:
        if "u0" not in init_sec:
            raise ConfigError("missing key initial.u0")
        if "v0" not in init_sec:
            raise ConfigError("missing key initial.v0")
        u0_spec = _parse_field_spec(init_sec.pop("u0"), "initial.u0",
                                    nonnegative=False)
        v0_spec = _parse_field_spec(init_sec.pop("v0"), "initial.v0",
                                    nonnegative=True)
        _reject_leftovers(init_sec, "initial")

    tolerances = dict(_TOLERANCE_DEFAULTS)
    k_cold = (-0.9, -0.1)
    k_hot = (0.1, 1.0)
    tol_sec = _section(work, "tolerances", required=False)
    work.pop("tolerances", None)
    if tol_sec is not None:
        k_cold = _parse_window(tol_sec, "k_cold", k_cold, where="tolerances")
        k_hot = _parse_window(tol_sec, "k_hot", k_hot, where="tolerances")
        for key in list(tol_sec):
            if key not in _TOLERANCE_DEFAULTS:
                raise ConfigError(f"unknown key tolerances.{key}")
            tolerances[key] = _pop_number(tol_sec, key, where="tolerances")
        if tolerances["p"] < 1.0:
            raise ConfigError("tolerances.p must be >= 1")
        if tolerances["bound_cap"] < 1.0:
            raise ConfigError("tolerances.bound_cap must be >= 1")

    options = dict(_OPTION_DEFAULTS)
    refinements = (101, 201, 401)
    opt_sec = _section(work, "options", required=False)
    work.pop("options", None)
    if opt_sec is not None:
        if "refinements" in opt_sec:
            lst = opt_sec.pop("refinements")
            if (not isinstance(lst, list) or not lst
                    or any(isinstance(v, bool) or not isinstance(v, int)
                           for v in lst)):
                raise ConfigError("options.refinements must be a list of integers")
            refinements = tuple(int(v) for v in lst)
        for key in list(opt_sec):
            if key not in _OPTION_DEFAULTS:
                raise ConfigError(f"unknown key options.{key}")
            options[key] = _pop_number(opt_sec, key, where="options")

    output_dir = None
    if "output_dir" in work:
        value = work.pop("output_dir")
        if not isinstance(value, str):
            raise ConfigError("output_dir must be a string")
        output_dir = value

    _reject_leftovers(work, "config")

    return RunConfig(
        experiment=exp,
        domain=domain,
        dt=dt,
        horizon=horizon,
        record_every=record_every,
        kinetics=kinetics,
        u0_spec=u0_spec,
        v0_spec=v0_spec,
        tolerances=tolerances,
        options=options,
        k_cold=k_cold,
        k_hot=k_hot,
        refinements=refinements,
        output_dir=output_dir,
        raw=raw,
    )


def load_config(path: str, experiment: Optional[str] = None) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read(), experiment=experiment)
