import numpy as np
import pytest

import shslab
from shslab import Domain1D, ScalarField, TimeGrid, run_heat, run_limit, run_shs
from shslab.diagnostics import (
    EstimateReport,
    check_conservation,
    check_gradient_bound,
    check_hysteresis_consistency,
    check_l2_bound,
    check_lower_bound,
    check_supercaloric,
    conservation_ok,
    standard_suite,
)

from test_core import make_trajectory


class TestEstimateReport:
    def test_pass_iff_within_slack(self):
        assert EstimateReport("x", 1.0, 1.0, 0.05).passed
        assert EstimateReport("x", 1.04, 1.0, 0.05).passed
        assert not EstimateReport("x", 1.06, 1.0, 0.05).passed
        assert EstimateReport("x", -1.0, 0.0, 0.0).passed
        assert not EstimateReport("x", 1e-12, 0.0, 0.0).passed

    def test_slack_field(self):
        rep = EstimateReport("x", 1.0, 3.0, 0.05)
        assert rep.slack == 2.0


class TestL2Bound:
    def test_zero_solution(self):
        dom = Domain1D(1.0, 21)
        tg = TimeGrid(dt=1e-3, horizon=1.0, record_every=100)
        traj = run_heat(ScalarField.constant(dom, 0.0), tg)
        rep = check_l2_bound(traj, ScalarField.constant(dom, 0.0), 1.0)
        assert rep.lhs == 0.0
        assert rep.rhs == pytest.approx(1.0, rel=1e-12)  # T * C^2 * L
        assert rep.passed

    def test_dormant_closed_form(self):
        # constant solution u = -0.5 on T = L = 1 with C = 1:
        # lhs = 0.25, rhs = (1.5)^2 = 2.25
        dom = Domain1D(1.0, 51)
        tg = TimeGrid(dt=1e-3, horizon=1.0, record_every=100)
        u0 = ScalarField.constant(dom, -0.5)
        traj = run_heat(u0, tg)
        rep = check_l2_bound(traj, u0, 1.0)
        assert rep.lhs == pytest.approx(0.25, rel=1e-10)
        assert rep.rhs == pytest.approx(2.25, rel=1e-12)
        assert rep.passed

    def test_heat_cosine_with_zero_reactant_bound(self):
        dom = Domain1D(1.0, 33)
        tg = TimeGrid(dt=1e-3, horizon=0.5, record_every=25)
        u0 = ScalarField(dom, np.cos(np.pi * dom.x))
        traj = run_heat(u0, tg)
        rep = check_l2_bound(traj, u0, 0.0)
        assert rep.passed  # decaying energy always under T*int(u0^2)

    def test_truncation_passes_at_every_horizon(self, reference_runs):
        r = reference_runs
        for horizon in (0.5, 1.0, 1.5, 2.0):
            rep = check_l2_bound(r["shs"], r["u0"], 1.0, horizon=horizon)
            assert rep.passed, horizon


class TestGradientBound:
    def test_constant_dormant_is_zero(self):
        dom = Domain1D(2.0, 21)
        tg = TimeGrid(dt=1e-3, horizon=0.2, record_every=20)
        u0 = ScalarField.constant(dom, -0.5)
        traj = run_heat(u0, tg)
        rep = check_gradient_bound(traj, u0, 1.0, cap=2.0)
        assert rep.lhs == pytest.approx(0.0, abs=1e-12)
        assert rep.passed

    def test_heat_cosine_matches_dense_oracle(self):
        # independent evolution: dense implicit Euler at n = 17, identical
        # right-endpoint time rule and forward-difference Dirichlet energy
        dom = Domain1D(1.0, 17)
        dt, n_steps, stride = 2e-3, 40, 4
        n, h = dom.nodes, dom.h
        r = dt / h ** 2
        A = np.zeros((n, n))
        for i in range(n):
            A[i, i] = 1.0 + 2.0 * r
            if i > 0:
                A[i, i - 1] = -r
            if i < n - 1:
                A[i, i + 1] = -r
        A[0, 1] = -2.0 * r
        A[n - 1, n - 2] = -2.0 * r
        u0 = np.cos(np.pi * dom.x)
        states = [u0.copy()]
        u = u0.copy()
        for _ in range(n_steps):
            u = np.linalg.solve(A, u)
            states.append(u.copy())
        snaps = states[::stride]
        wx = dom.quadrature_weights()
        expected = float(wx @ (snaps[-1] ** 2 / 2.0 - u0 ** 2 / 2.0))
        for j in range(1, len(snaps)):
            dirichlet = np.sum(np.diff(snaps[j]) ** 2) / h
            expected += stride * dt * dirichlet

        tg = TimeGrid(dt=dt, horizon=n_steps * dt, record_every=stride)
        traj = run_heat(ScalarField(dom, u0), tg)
        rep = check_gradient_bound(traj, ScalarField(dom, u0), 0.0, cap=2.0)
        assert rep.lhs == pytest.approx(expected, abs=1e-12)
        assert rep.lhs <= 0.0  # implicit Euler dissipates
        assert rep.passed  # rhs = 0 with lhs <= 0

    def test_cap_must_be_at_least_one(self, reference_runs):
        with pytest.raises(ValueError):
            check_gradient_bound(reference_runs["shs"], reference_runs["u0"],
                                 1.0, cap=0.5)

    def test_truncation_passes_at_every_horizon(self, reference_runs):
        r = reference_runs
        for horizon in (0.5, 1.0, 1.5, 2.0):
            rep = check_gradient_bound(r["shs"], r["u0"], 1.0, cap=2.0,
                                       horizon=horizon)
            assert rep.passed, horizon


class TestConservation:
    def test_heat_run_is_exact(self):
        dom = Domain1D(2.0, 41)
        tg = TimeGrid(dt=1e-3, horizon=0.5, record_every=50)
        rng = np.random.default_rng(1)
        traj = run_heat(ScalarField(dom, rng.normal(size=dom.nodes)), tg)
        rep = check_conservation(traj)
        assert rep.lhs <= 1e-12
        assert rep.passed

    def test_reaction_run(self):
        dom = Domain1D(4.0, 101)
        u0 = ScalarField.step(dom, 0.5, -0.25, 0.25)
        v0 = ScalarField.constant(dom, 1.0)
        kin = shslab.KineticsFamily("matkowsky_sivashinsky", epsilon=0.05)
        tg = TimeGrid(dt=shslab.default_dt(dom), horizon=0.5, record_every=50)
        rep = check_conservation(run_shs(u0, v0, kin, tg))
        assert rep.passed

    def test_limit_run(self):
        dom = Domain1D(4.0, 101)
        u0 = ScalarField.step(dom, 0.5, -0.5, 0.25)
        v0 = ScalarField.constant(dom, 1.0)
        tg = TimeGrid(dt=2e-4, horizon=0.05, record_every=10)
        rep = check_conservation(run_limit(u0, v0, tg))
        assert rep.name == "conservation_limit_level"
        assert rep.passed

    def test_violation_detected(self):
        dom = Domain1D(1.0, 5)
        times = np.array([0.0, 1.0])
        traj = make_trajectory(dom, times, np.zeros((2, 5)))
        drifting = shslab.Trajectory(
            domain=dom, kind="shs", times=times, u=traj.u, aux=traj.aux,
            series_t=times, front=np.zeros(2),
            mass_u=np.array([1.0, 2.0]), mass_aux=np.zeros(2),
            umin=np.zeros(2), umax=np.zeros(2))
        assert not check_conservation(drifting).passed

    def test_unknown_kind_rejected(self, reference_runs):
        with pytest.raises(ValueError):
            check_conservation(reference_runs["shs"], kind="bogus")


class TestSupercaloricAndLowerBound:
    def test_self_comparison_is_zero(self, reference_runs):
        heat = reference_runs["heat"]
        rep = check_supercaloric(heat, heat)
        assert rep.lhs == 0.0
        assert rep.passed

    def test_violation_detected(self):
        dom = Domain1D(1.0, 5)
        times = np.array([0.0, 1.0])
        low = make_trajectory(dom, times, np.zeros((2, 5)))
        high = make_trajectory(dom, times, np.full((2, 5), 1e-8))
        assert not check_supercaloric(low, high).passed
        assert check_supercaloric(high, low).passed

    def test_lower_bound_on_reference(self, reference_runs):
        rep = check_lower_bound(reference_runs["shs"], reference_runs["u0"])
        assert rep.passed


class TestHysteresisConsistency:
    def test_reference_limit_run_clean(self, reference_runs):
        rep = check_hysteresis_consistency(reference_runs["limit"])
        assert rep.passed and rep.lhs == 0.0

    def test_violations_counted(self):
        dom = Domain1D(1.0, 5)
        times = np.array([0.0, 1.0])
        u = np.zeros((2, 5))
        u[1, 2] = 0.5  # history max > 0 at node 2 but chi stays 0
        chi = np.zeros((2, 5))
        bad = shslab.Trajectory(
            domain=dom, kind="limit", times=times, u=u, aux=chi,
            series_t=times, front=np.zeros(2), mass_u=np.zeros(2),
            mass_aux=np.zeros(2), umin=np.zeros(2), umax=np.zeros(2))
        rep = check_hysteresis_consistency(bad)
        assert not rep.passed
        assert rep.lhs >= 1.0

    def test_wrong_kind_rejected(self, reference_runs):
        with pytest.raises(ValueError):
            check_hysteresis_consistency(reference_runs["shs"])


class TestSuite:
    def test_reference_configuration_all_pass(self, reference_runs):
        r = reference_runs
        shs_reports = standard_suite(r["shs"], r["u0"], 1.0,
                                     heat_twin=r["heat"])
        lim_reports = standard_suite(r["limit"],
                                     r["limit"].snapshot_field(0), 1.0,
                                     heat_twin=r["heat_limit"])
        for rep in shs_reports + lim_reports:
            assert rep.passed, rep

    def test_deterministic_reevaluation(self, reference_runs):
        r = reference_runs
        a = [rep.to_dict() for rep in
             standard_suite(r["shs"], r["u0"], 1.0, heat_twin=r["heat"])]
        b = [rep.to_dict() for rep in
             standard_suite(r["shs"], r["u0"], 1.0, heat_twin=r["heat"])]
        assert a == b

    def test_conservation_gate(self):
        good = EstimateReport("conservation_epsilon_level", 0.0, 1e-8, 0.0)
        bad = EstimateReport("conservation_epsilon_level", 1.0, 1e-8, 0.0)
        other = EstimateReport("supercaloric", 1.0, 0.0, 0.0)  # failing, not gating
        assert conservation_ok([good, other])
        assert not conservation_ok([bad])
