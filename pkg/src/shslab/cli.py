"""Command-line entry points.

Subcommands: simulate-shs, simulate-limit, converge, ode-select, wave,
pulsate, peak-probe, validate-assumptions.  Each takes --config <path>
and --out <dir>; --strict turns diagnostic/verdict failures into exit
code 3.

Exit codes: 0 success, 1 configuration error, 2 numerical failure
(non-finite state), 3 invariant/diagnostic failure under --strict.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, diagnostics, experiments, kernels
from .config import EXPERIMENTS, ConfigError, RunConfig, load_config
from .outputs import emit_run, write_manifest
from .shs import NumericalFailureError, run_heat, run_shs
from .stefan import run_limit
from .kinetics import verify_assumption_cold, verify_assumption_hot

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_DIAGNOSTIC = 3


def _manifest_skeleton(cfg: RunConfig) -> dict:
    return {
        "tool": {"name": "shslab", "version": __version__,
                 "engine": kernels.ENGINE},
        "experiment": cfg.experiment,
        "config": cfg.raw,
        "wall_clock_seconds": None,
        "runs": {},
        "report": None,
        "passed": None,
    }


def _run_entry(traj, diag_reports) -> dict:
    return {
        "meta": traj.meta,
        "diagnostics": [r.to_dict() for r in diag_reports],
    }


def _all_passed(manifest: dict) -> bool:
    ok = True
    for entry in manifest["runs"].values():
        ok = ok and all(d["passed"] for d in entry["diagnostics"])
    report = manifest.get("report") or {}
    verdict = report.get("verdict")
    if verdict is False:
        ok = False
    for diag_map in (report.get("diagnostics_by_run") or {}).values():
        ok = ok and all(d["passed"] for d in diag_map)
    for rep in report.get("assumption_reports", []):
        ok = ok and rep["passed"]
    return ok


def _exec_simulate(cfg: RunConfig, outdir: Path, limit: bool) -> dict:
    u0, v0 = cfg.fields()
    tg = cfg.timegrid()
    bound = float(np.max(v0.values))
    cap = cfg.tolerances["bound_cap"]
    slack = cfg.tolerances["estimate_slack"]
    manifest = _manifest_skeleton(cfg)
    if limit:
        traj = run_limit(u0, v0, tg)
        twin = run_heat(traj.snapshot_field(0), tg)
        diag = diagnostics.standard_suite(traj, traj.snapshot_field(0), bound,
                                          cap=cap, heat_twin=twin, tol=slack)
    else:
        traj = run_shs(u0, v0, cfg.kinetics.family(), tg)
        twin = run_heat(u0, tg)
        diag = diagnostics.standard_suite(traj, u0, bound, cap=cap,
                                          heat_twin=twin, tol=slack)
    emit_run(outdir, traj)
    manifest["runs"]["main"] = _run_entry(traj, diag)
    return manifest


def _exec_converge(cfg: RunConfig, outdir: Path) -> dict:
    u0, v0 = cfg.fields()
    tg = cfg.timegrid()
    eps_list = cfg.kinetics.require_eps_list()
    result, trajectories = experiments.convergence_study(
        u0, v0, cfg.kinetics.family(eps_list[0]), eps_list, tg,
        p=cfg.tolerances["p"], cap=cfg.tolerances["bound_cap"])
    manifest = _manifest_skeleton(cfg)
    for label, traj in trajectories.items():
        emit_run(outdir / label, traj)
        manifest["runs"][label] = {"meta": traj.meta, "diagnostics": []}
    manifest["report"] = result.to_dict()
    return manifest


def _exec_ode_select(cfg: RunConfig, outdir: Path) -> dict:
    if cfg.kinetics is None or cfg.kinetics.kappa is None:
        raise ConfigError("ode-select requires kinetics.kappa")
    if cfg.kinetics.variant != "matkowsky_sivashinsky":
        raise ConfigError("ode-select is defined for the "
                          "matkowsky_sivashinsky family only")
    kappa = cfg.kinetics.kappa
    if not 0.0 < kappa < 1.0:
        raise ConfigError("kinetics.kappa must lie in (0, 1) for ode-select")
    dt = cfg.dt if cfg.dt is not None else 1e-3
    result = experiments.ode_selection(
        kappa, cfg.kinetics.require_eps_list(), horizon=cfg.horizon, dt=dt)
    manifest = _manifest_skeleton(cfg)
    manifest["report"] = result.to_dict()
    return manifest


def _exec_wave(cfg: RunConfig, outdir: Path) -> dict:
    if cfg.u0_spec.kind != "step" or cfg.v0_spec.kind != "constant":
        raise ConfigError("wave requires a step initial.u0 (seed | ambient) "
                          "and a constant initial.v0")
    opts = cfg.options
    report, traj = experiments.traveling_wave_study(
        cfg.kinetics.family(),
        u_infinity=cfg.u0_spec.params["right_value"],
        v0_const=cfg.v0_spec.params["value"],
        domain=cfg.domain,
        timegrid=cfg.timegrid(),
        seed_value=cfg.u0_spec.params["left_value"],
        seed_fraction=cfg.u0_spec.params["split_fraction"],
        fit_start_frac=opts["fit_start_frac"],
        fit_end_frac=opts["fit_end_frac"],
        plateau_lo_frac=opts["plateau_lo_frac"],
        plateau_hi_frac=opts["plateau_hi_frac"],
        cap=cfg.tolerances["bound_cap"],
    )
    emit_run(outdir, traj)
    manifest = _manifest_skeleton(cfg)
    manifest["runs"]["main"] = {"meta": traj.meta, "diagnostics": []}
    manifest["report"] = report.to_dict()
    return manifest


def _exec_pulsate(cfg: RunConfig, outdir: Path) -> dict:
    if cfg.u0_spec.kind != "step" or cfg.v0_spec.kind != "cosine":
        raise ConfigError("pulsate requires a step initial.u0 and a cosine "
                          "initial.v0")
    opts = cfg.options
    p = cfg.v0_spec.params
    report, trajectories = experiments.pulsating_wave_study(
        cfg.kinetics.family(),
        u_infinity=cfg.u0_spec.params["right_value"],
        v0_mean=p["mean"],
        v0_amplitude=p["amplitude"],
        v0_period=p["period"],
        domain=cfg.domain,
        timegrid=cfg.timegrid(),
        seed_value=cfg.u0_spec.params["left_value"],
        seed_fraction=cfg.u0_spec.params["split_fraction"],
        fit_start_frac=opts["fit_start_frac"],
        fit_end_frac=opts["fit_end_frac"],
        smooth_period_fraction=opts["smooth_period_fraction"],
        event_rel_drop=opts["event_rel_drop"],
        cap=cfg.tolerances["bound_cap"],
    )
    manifest = _manifest_skeleton(cfg)
    for label, traj in trajectories.items():
        emit_run(outdir / label, traj)
        manifest["runs"][label] = {"meta": traj.meta, "diagnostics": []}
    manifest["report"] = report.to_dict()
    return manifest


def _exec_peak_probe(cfg: RunConfig, outdir: Path) -> dict:
    u0_spec, v0_spec = cfg.u0_spec, cfg.v0_spec
    if u0_spec.kind == "table" or v0_spec.kind == "table":
        raise ConfigError("peak-probe rebuilds initial data per grid; "
                          "table fields cannot be used")

    def build_initial(domain):
        return u0_spec.build(domain), v0_spec.build(domain)

    result, trajectories = experiments.peaking_probe(
        build_initial, cfg.kinetics.family(), cfg.domain.length,
        cfg.refinements, cfg.horizon,
        record_every=cfg.record_every or 1,
        cap=cfg.tolerances["bound_cap"])
    manifest = _manifest_skeleton(cfg)
    for label, traj in trajectories.items():
        emit_run(outdir / label, traj)
        manifest["runs"][label] = {"meta": traj.meta, "diagnostics": []}
    manifest["report"] = result.to_dict()
    return manifest


def _exec_validate_assumptions(cfg: RunConfig, outdir: Path) -> dict:
    spec = cfg.kinetics
    eps_list = spec.require_eps_list()
    family = spec.family(eps_list[0])
    tol = cfg.tolerances["assumption_tol"]
    cold = verify_assumption_cold(family, eps_list, cfg.k_cold, tol=tol)
    hot = verify_assumption_hot(family, eps_list, cfg.k_hot,
                                c_window=cfg.tolerances["c_hot"], tol=tol)
    manifest = _manifest_skeleton(cfg)
    manifest["report"] = {
        "assumption_reports": [cold.to_dict(), hot.to_dict()],
        "linear_growth_bound": family.linear_growth_bound(),
        "verdict": bool(cold.passed and hot.passed),
    }
    return manifest


_EXECUTORS = {
    "simulate-shs": lambda cfg, out: _exec_simulate(cfg, out, limit=False),
    "simulate-limit": lambda cfg, out: _exec_simulate(cfg, out, limit=True),
    "converge": _exec_converge,
    "ode-select": _exec_ode_select,
    "wave": _exec_wave,
    "pulsate": _exec_pulsate,
    "peak-probe": _exec_peak_probe,
    "validate-assumptions": _exec_validate_assumptions,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shslab",
        description="solid-combustion simulation lab (stiff kinetics and "
                    "its sharp-interface limit)")
    parser.add_argument("--version", action="version",
                        version=f"shslab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", required=True, help="JSON configuration file")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--strict", action="store_true",
                       help="diagnostic failures exit with code 3")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, experiment=args.command)
    except json.JSONDecodeError as exc:
        print(f"config syntax error: line {exc.lineno}, column {exc.colno}: "
              f"{exc.msg}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConfigError, OSError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    outdir = Path(args.out)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"config error: cannot create output directory: {exc}",
              file=sys.stderr)
        return EXIT_CONFIG

    started = time.perf_counter()
    try:
        manifest = _EXECUTORS[cfg.experiment](cfg, outdir)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalFailureError as exc:
        manifest = _manifest_skeleton(cfg)
        manifest["passed"] = False
        manifest["numerical_failure"] = {
            "t": exc.t, "step": exc.step, "node": exc.node,
            "message": str(exc),
        }
        if exc.trajectory is not None:
            emit_run(outdir, exc.trajectory)
        manifest["wall_clock_seconds"] = time.perf_counter() - started
        write_manifest(outdir, manifest)
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    manifest["wall_clock_seconds"] = time.perf_counter() - started
    manifest["passed"] = _all_passed(manifest)
    write_manifest(outdir, manifest)
    if args.strict and not manifest["passed"]:
        print("diagnostic failure (strict mode)", file=sys.stderr)
        return EXIT_DIAGNOSTIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
