"""Acceptance criteria, one test per criterion, each printing a verdict
line.  Tolerances and runtime budgets are pinned here; the kernel JIT is
warmed by the session fixture so budgets measure the algorithms."""

import json
import time
from pathlib import Path

import numpy as np
import pytest

import shslab
from shslab import (
    Domain1D,
    ScalarField,
    TimeGrid,
    run_heat,
    run_limit,
    run_shs,
)
from shslab.cli import main
from shslab.config import load_config
from shslab.diagnostics import (
    check_gradient_bound,
    check_hysteresis_consistency,
    check_l2_bound,
    check_lower_bound,
    check_supercaloric,
)
from shslab.experiments import (
    convergence_study,
    ode_selection,
    pulsating_wave_study,
    traveling_wave_study,
)

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


def report(criterion: str, detail: str) -> None:
    print(f"[acceptance] {criterion}: PASS ({detail})")


def config_fields(name):
    cfg = load_config(str(CONFIG_DIR / name))
    u0, v0 = cfg.fields()
    return cfg, u0, v0


def test_criterion_1_conservation(reference_setup):
    dom, u0, v0, kin, tg = reference_setup
    t0 = time.perf_counter()
    shs = run_shs(u0, v0, kin, tg)
    t_shs = time.perf_counter() - t0
    t0 = time.perf_counter()
    limit = run_limit(u0, v0, tg)
    t_limit = time.perf_counter() - t0

    e_shs = shs.mass_u + shs.mass_aux
    drift_shs = np.max(np.abs(e_shs - e_shs[0])) / (1.0 + abs(e_shs[0]))
    e_lim = limit.mass_u - limit.mass_aux
    drift_lim = np.max(np.abs(e_lim - e_lim[0])) / (1.0 + abs(e_lim[0]))
    assert drift_shs < 1e-8
    assert drift_lim < 1e-8
    assert t_shs < 10.0 and t_limit < 10.0
    report("1-conservation",
           f"shs drift {drift_shs:.2e} in {t_shs:.2f}s, "
           f"limit drift {drift_lim:.2e} in {t_limit:.2f}s")


def test_criterion_2_proof_estimate_suite(reference_runs):
    r = reference_runs
    cases = []

    def add_case(label, traj, u0_field, bound, twin):
        cases.append((label, [
            check_l2_bound(traj, u0_field, bound, tol=0.05),
            check_gradient_bound(traj, u0_field, bound, cap=2.0, tol=0.05),
            check_supercaloric(traj, twin),
            check_lower_bound(traj, u0_field),
        ]))

    add_case("reference-shs", r["shs"], r["u0"], 1.0, r["heat"])
    add_case("reference-limit", r["limit"], r["limit"].snapshot_field(0),
             1.0, r["heat_limit"])

    for name in ("heat_only.json", "dormant.json"):
        cfg, u0, v0 = config_fields(name)
        tg = cfg.timegrid()
        traj = run_shs(u0, v0, cfg.kinetics.family(), tg)
        twin = run_heat(u0, tg)
        add_case(name, traj, u0, float(np.max(v0.values)), twin)

    failures = [(label, rep.name) for label, reps in cases
                for rep in reps if not rep.passed]
    assert not failures, failures
    report("2-proof-estimates",
           f"{sum(len(reps) for _, reps in cases)} checks over "
           f"{len(cases)} configurations, 5% slack")


def test_criterion_3_hysteresis_semantics(reference_runs):
    matrix = [reference_runs["limit"]]

    dom = Domain1D(4.0, 201)
    v0 = ScalarField.constant(dom, 1.0)
    tg = TimeGrid(dt=2e-4, horizon=0.05, record_every=10)
    matrix.append(run_limit(ScalarField.step(dom, 0.5, -0.5, 0.125), v0, tg))
    matrix.append(run_limit(ScalarField.constant(dom, -0.4), v0, tg))
    matrix.append(run_limit(ScalarField.constant(dom, 0.2),
                            ScalarField.constant(dom, 0.5), tg))
    varying = ScalarField.cosine(dom, 0.75, 0.25, 1.0)
    matrix.append(run_limit(ScalarField.step(dom, 0.5, -0.5, 0.25),
                            varying, tg))

    total_checks = 0
    for traj in matrix:
        chi = traj.aux
        assert np.all(np.diff(chi, axis=0) >= 0.0)  # never decreases
        assert np.all((chi == 0.0) | (chi == 1.0))  # binary after t = 0
        rep = check_hysteresis_consistency(traj)
        assert rep.passed and rep.lhs == 0.0
        total_checks += chi.size
    report("3-hysteresis", f"{len(matrix)} limit runs, "
           f"{total_checks} node-time samples, zero violations")


def test_criterion_4_ode_selection():
    t0 = time.perf_counter()
    res = ode_selection(0.5, [0.2, 0.1, 0.05], horizon=2.0, dt=1e-3)
    elapsed = time.perf_counter() - t0
    d = res.deviations
    assert d[0] > d[1] > d[2], d
    assert d[-1] < 1e-2
    assert res.verdict is True
    assert elapsed < 1.0
    report("4-ode-selection",
           f"deviations {d[0]:.2e} > {d[1]:.2e} > {d[2]:.2e}, {elapsed:.2f}s")


def test_criterion_5_convergence():
    cfg, u0, v0 = config_fields("converge.json")
    eps_list = cfg.kinetics.require_eps_list()
    t0 = time.perf_counter()
    res, _ = convergence_study(u0, v0, cfg.kinetics.family(eps_list[0]),
                               eps_list, cfg.timegrid(), p=1.0)
    elapsed = time.perf_counter() - t0
    d = res.distances
    assert d[-3] >= d[-2] >= d[-1], d
    assert res.verdict is True
    assert elapsed < 120.0
    report("5-convergence",
           "L1 distances " + " >= ".join(f"{x:.4f}" for x in d)
           + f", {elapsed:.1f}s")


def test_criterion_6_traveling_wave():
    cfg, u0, v0 = config_fields("wave.json")
    assert cfg.domain.nodes == 801
    t0 = time.perf_counter()
    rep, _ = traveling_wave_study(
        cfg.kinetics.family(),
        u_infinity=cfg.u0_spec.params["right_value"],
        v0_const=cfg.v0_spec.params["value"],
        domain=cfg.domain,
        timegrid=cfg.timegrid(),
        seed_value=cfg.u0_spec.params["left_value"],
        seed_fraction=cfg.u0_spec.params["split_fraction"])
    elapsed = time.perf_counter() - t0
    assert rep.steady
    assert rep.burned_temp == pytest.approx(0.5, rel=0.02)
    assert elapsed < 30.0
    report("6-traveling-wave",
           f"plateau {rep.burned_temp:.4f} vs 0.5, speed {rep.speed:.2f}, "
           f"{elapsed:.1f}s")


def test_criterion_7_pulsating_wave():
    cfg, u0, v0 = config_fields("pulsate.json")
    p = cfg.v0_spec.params
    t0 = time.perf_counter()
    rep, _ = pulsating_wave_study(
        cfg.kinetics.family(),
        u_infinity=cfg.u0_spec.params["right_value"],
        v0_mean=p["mean"], v0_amplitude=p["amplitude"],
        v0_period=p["period"], domain=cfg.domain, timegrid=cfg.timegrid(),
        seed_value=cfg.u0_spec.params["left_value"],
        seed_fraction=cfg.u0_spec.params["split_fraction"])
    elapsed = time.perf_counter() - t0
    expected = rep.expected_period
    assert abs(rep.oscillation_period - expected) <= 0.1 * expected
    assert rep.control_relative_speed_std < 0.02
    assert rep.verdict is True
    assert elapsed < 60.0
    report("7-pulsating-wave",
           f"period {rep.oscillation_period:.4f} vs {expected:.4f}, "
           f"control std {rep.control_relative_speed_std:.2%}, {elapsed:.1f}s")


def test_criterion_8_determinism_and_formats(tmp_path):
    # byte-identical reruns of one configuration
    doc = {
        "experiment": "simulate-shs",
        "domain": {"length": 4.0, "nodes": 101},
        "time": {"horizon": 0.25, "record_every": 25},
        "kinetics": {"variant": "matkowsky_sivashinsky", "epsilon": 0.05},
        "initial": {
            "u0": {"kind": "step", "left_value": 0.5, "right_value": -0.25,
                    "split_fraction": 0.25},
            "v0": {"kind": "constant", "value": 1.0},
        },
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(doc))
    assert main(["simulate-shs", "--config", str(cfg_path),
                 "--out", str(tmp_path / "a")]) == 0
    assert main(["simulate-shs", "--config", str(cfg_path),
                 "--out", str(tmp_path / "b")]) == 0
    for name in ("series.csv", "snapshots.csv"):
        assert (tmp_path / "a" / name).read_bytes() == \
            (tmp_path / "b" / name).read_bytes()

    # config gate
    bad_v0 = json.loads(json.dumps(doc))
    bad_v0["initial"]["v0"] = {"kind": "constant", "value": -0.5}
    (tmp_path / "bad1.json").write_text(json.dumps(bad_v0))
    assert main(["simulate-shs", "--config", str(tmp_path / "bad1.json"),
                 "--out", str(tmp_path / "x")]) == 1
    bad_theta = json.loads(json.dumps(doc))
    bad_theta["kinetics"] = {"variant": "threshold", "epsilon": 0.05,
                             "theta_bar": 1.5}
    (tmp_path / "bad2.json").write_text(json.dumps(bad_theta))
    assert main(["simulate-shs", "--config", str(tmp_path / "bad2.json"),
                 "--out", str(tmp_path / "y")]) == 1

    # assumption validators for both built-in families
    for name in ("validate_ms.json", "validate_threshold.json"):
        out = tmp_path / name.replace(".json", "")
        assert main(["validate-assumptions",
                     "--config", str(CONFIG_DIR / name),
                     "--out", str(out), "--strict"]) == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["passed"] is True
        for rep in manifest["report"]["assumption_reports"]:
            assert rep["passed"]
    report("8-determinism-formats",
           "byte-identical reruns, gates reject bad v0/theta_bar, "
           "both families validated")


def test_criterion_9_peaking_probe(tmp_path):
    out = tmp_path / "probe"
    assert main(["peak-probe", "--config",
                 str(CONFIG_DIR / "peak_probe.json"),
                 "--out", str(out)]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    rep = manifest["report"]
    assert rep["grids"] == [101, 201, 401]
    assert len(rep["series"]) == 3
    for series in rep["series"]:
        assert len(series["t"]) == len(series["peak"]) > 0
    assert isinstance(rep["grows_under_refinement"], bool)

    # reproducibility of the emitted probe report (the criterion is the
    # presence and stability of the series, never a pass/fail judgement)
    out2 = tmp_path / "probe2"
    assert main(["peak-probe", "--config",
                 str(CONFIG_DIR / "peak_probe.json"),
                 "--out", str(out2)]) == 0
    rep2 = json.loads((out2 / "manifest.json").read_text())["report"]
    assert json.dumps(rep) == json.dumps(rep2)
    report("9-peaking-probe",
           f"3 refinements, max peaks {rep['max_peaks']}, "
           f"grows={rep['grows_under_refinement']}")
