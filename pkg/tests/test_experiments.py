import math

import numpy as np
import pytest

import shslab
from shslab import Domain1D, KineticsFamily, ScalarField, TimeGrid
from shslab.experiments import (
    autocorrelation_period,
    convergence_study,
    deceleration_events,
    ode_selection,
    peaking_probe,
    pulsating_wave_study,
    traveling_wave_study,
)


def ms(eps):
    return KineticsFamily("matkowsky_sivashinsky", epsilon=eps)


class TestOdeSelection:
    def test_deviation_matches_first_order_bound(self):
        # at eps = 0.1 the depletion bound (T/eps)*exp(-1/eps) ~ 9.1e-4
        res = ode_selection(0.5, [0.1], horizon=2.0, dt=1e-3)
        assert 5e-4 < res.deviations[0] < 1e-3

    def test_strictly_decreasing_with_verdict(self):
        res = ode_selection(0.5, [0.2, 0.1, 0.05], horizon=2.0, dt=1e-3)
        d = res.deviations
        assert d[0] > d[1] > d[2]
        assert d[-1] < 1e-2
        assert res.verdict is True
        assert all(dr <= 1e-12 for dr in res.conserved_drift)

    def test_positive_start_releases_fully(self):
        # outside the kappa family the full unit of reactant converts
        res = ode_selection(0.5, [1e-3], horizon=2.0, dt=1e-3, u_start=0.5)
        assert res.final_values[0] == pytest.approx(1.5, abs=1e-9)
        assert res.verdict is None  # probe mode carries no verdict

    @pytest.mark.parametrize("kappa", [0.0, 1.0, -0.5, 1.5])
    def test_kappa_domain(self, kappa):
        with pytest.raises(ValueError):
            ode_selection(kappa, [0.1])

    def test_deterministic(self):
        a = ode_selection(0.5, [0.2, 0.1], horizon=1.0, dt=1e-3)
        b = ode_selection(0.5, [0.2, 0.1], horizon=1.0, dt=1e-3)
        assert a.deviations == b.deviations


class TestConvergenceStudy:
    def small_setup(self):
        dom = Domain1D(4.0, 101)
        u0 = ScalarField.step(dom, 0.5, -0.25, 0.25)
        v0 = ScalarField.constant(dom, 1.0)
        tg = TimeGrid(dt=shslab.default_dt(dom), horizon=1.0, record_every=10)
        return dom, u0, v0, tg

    def test_zero_reactant_distances_vanish(self):
        dom, u0, _, tg = self.small_setup()
        zero = ScalarField.constant(dom, 0.0)
        res, _ = convergence_study(u0, zero, ms(0.1), [0.1, 0.05], tg)
        assert res.distances == (0.0, 0.0)

    def test_duplicate_eps_gives_zero_cauchy(self):
        dom, u0, v0, tg = self.small_setup()
        res, _ = convergence_study(u0, v0, ms(0.1), [0.05, 0.05], tg)
        assert res.cauchy_distances == (0.0,)

    def test_monotone_distances_and_verdict(self):
        dom, u0, v0, tg = self.small_setup()
        res, trajs = convergence_study(u0, v0, ms(0.1),
                                       [0.1, 0.05, 0.025], tg)
        d = res.distances
        assert d[0] >= d[1] >= d[2]
        assert res.verdict is True
        assert set(trajs) == {"limit", "eps_0.1", "eps_0.05", "eps_0.025"}
        assert res.caveat  # subsequence caveat always attached

    def test_diagnostics_attached_for_every_run(self):
        dom, u0, v0, tg = self.small_setup()
        res, _ = convergence_study(u0, v0, ms(0.1), [0.1, 0.05], tg)
        assert set(res.diagnostics_by_run) == {"limit", "eps_0.1", "eps_0.05"}
        for reports in res.diagnostics_by_run.values():
            assert any(r["name"].startswith("conservation") for r in reports)
            assert all(r["passed"] for r in reports)

    def test_deterministic(self):
        dom, u0, v0, tg = self.small_setup()
        a, _ = convergence_study(u0, v0, ms(0.1), [0.1, 0.05], tg)
        b, _ = convergence_study(u0, v0, ms(0.1), [0.1, 0.05], tg)
        assert a.distances == b.distances


class TestTravelingWave:
    def setup_wave(self, nodes=401):
        dom = Domain1D(24.0, nodes)
        tg = TimeGrid(dt=shslab.default_dt(dom), horizon=2.0, record_every=50)
        return dom, tg, ms(0.1)

    def test_burned_plateau_matches_conservation(self):
        dom, tg, kin = self.setup_wave()
        report, _ = traveling_wave_study(kin, -0.5, 1.0, dom, tg)
        assert report.steady
        assert not report.degenerate
        assert report.burned_temp == pytest.approx(0.5, rel=0.02)
        assert report.speed > 0.0

    def test_no_reactant_means_no_wave(self):
        dom, tg, kin = self.setup_wave()
        report, _ = traveling_wave_study(kin, -0.5, 0.0, dom, tg)
        assert not report.steady
        assert "no steady wave" in report.reason

    def test_degenerate_point_flagged(self):
        dom, tg, kin = self.setup_wave()
        report, _ = traveling_wave_study(kin, -1.0, 1.0, dom, tg)
        assert report.degenerate
        assert report.expected_burned_temp == 0.0

    def test_negative_reactant_rejected(self):
        dom, tg, kin = self.setup_wave()
        with pytest.raises(ValueError):
            traveling_wave_study(kin, -0.5, -1.0, dom, tg)


class TestPulsatingWave:
    def test_period_tracks_reactant_modulation(self):
        dom = Domain1D(24.0, 801)
        tg = TimeGrid(dt=shslab.default_dt(dom), horizon=4.0,
                      record_every=100)
        report, _ = pulsating_wave_study(ms(0.1), -0.5, 0.75, 0.25, 2.0,
                                         dom, tg)
        assert report.verdict is True
        expected = report.expected_period
        assert abs(report.oscillation_period - expected) <= 0.1 * expected
        assert report.control_relative_speed_std < 0.02
        assert report.relative_speed_std > report.control_relative_speed_std

    def test_single_bump_yields_one_deceleration_event(self):
        dom = Domain1D(24.0, 801)
        x = dom.x
        vals = 0.75 - 0.3 * np.exp(-((x - 10.0) / 0.6) ** 2)
        v0_field = ScalarField(dom, vals)
        tg = TimeGrid(dt=shslab.default_dt(dom), horizon=4.0,
                      record_every=100)
        report, trajs = pulsating_wave_study(
            ms(0.1), -0.5, 0.75, 0.0, 2.0, dom, tg, v0_field=v0_field)
        assert len(report.events) == 1
        event = report.events[0]
        t = trajs["main"].series_t
        f = trajs["main"].front
        i = int(np.searchsorted(t, event["t_min_speed"]))
        assert 8.5 <= f[min(i, f.size - 1)] <= 11.5

    def test_amplitude_bounds_validated(self):
        dom = Domain1D(24.0, 401)
        tg = TimeGrid(dt=shslab.default_dt(dom), horizon=1.0)
        with pytest.raises(ValueError):
            pulsating_wave_study(ms(0.1), -0.5, 0.5, 0.5, 2.0, dom, tg)
        with pytest.raises(ValueError):
            pulsating_wave_study(ms(0.1), -0.5, 0.75, 0.25, 4 * dom.h, dom, tg)


class TestPeakingProbe:
    def test_dormant_probe_equals_heat_maximum(self):
        def build(dom):
            return (ScalarField.constant(dom, -0.5),
                    ScalarField.constant(dom, 1.0))

        result, trajs = peaking_probe(build, ms(0.02), 4.0, [51, 101], 0.2)
        for series in result.series:
            peaks = np.asarray(series["peak"])
            assert np.allclose(peaks, -0.5, rtol=0, atol=1e-6)

    def test_zero_reactant_probe_is_global_heat_max(self):
        def build(dom):
            return (ScalarField.cosine(dom, 0.0, 1.0, 8.0),
                    ScalarField.constant(dom, 0.0))

        result, trajs = peaking_probe(build, ms(0.05), 4.0, [51, 101], 0.2)
        for label, traj in trajs.items():
            heat = shslab.run_heat(traj.snapshot_field(0),
                                   TimeGrid(dt=traj.meta["dt"], horizon=0.2,
                                            record_every=traj.meta["record_every"]))
            assert np.array_equal(traj.peak_unburned, heat.umax)

    def test_three_refinements_report(self):
        def build(dom):
            return (ScalarField.step(dom, 0.5, -0.25, 0.25),
                    ScalarField.constant(dom, 1.0))

        result, _ = peaking_probe(build, ms(0.02), 4.0, [51, 101, 201], 0.2)
        assert result.grids == (51, 101, 201)
        assert len(result.series) == 3
        assert len(result.max_peaks) == 3
        assert isinstance(result.grows_under_refinement, bool)
        for series in result.series:
            assert len(series["t"]) == len(series["peak"])
        assert set(result.diagnostics_by_run) == {"nodes_51", "nodes_101",
                                                  "nodes_201"}

    def test_deterministic(self):
        def build(dom):
            return (ScalarField.step(dom, 0.5, -0.25, 0.25),
                    ScalarField.constant(dom, 1.0))

        a, _ = peaking_probe(build, ms(0.02), 4.0, [51, 101], 0.1)
        b, _ = peaking_probe(build, ms(0.02), 4.0, [51, 101], 0.1)
        assert a.grids == b.grids
        assert a.diagnostics_by_run == b.diagnostics_by_run
        for sa, sb in zip(a.series, b.series):
            assert sa["t"] == sb["t"]
            # peak series contains NaN once every node has ignited
            assert np.array_equal(np.asarray(sa["peak"]),
                                  np.asarray(sb["peak"]), equal_nan=True)


class TestSignalHelpers:
    def test_autocorrelation_recovers_known_period(self):
        t = np.linspace(0.0, 10.0, 2001)
        s = np.sin(2 * np.pi * t / 1.25)
        period = autocorrelation_period(t, s)
        assert period == pytest.approx(1.25, rel=0.02)

    def test_autocorrelation_flat_signal(self):
        t = np.linspace(0.0, 1.0, 101)
        assert math.isnan(autocorrelation_period(t, np.ones_like(t)))

    def test_deceleration_events_on_synthetic_dip(self):
        t = np.linspace(0.0, 1.0, 501)
        s = np.full_like(t, 4.0)
        s[200:240] = 2.0
        events = deceleration_events(t, s, rel_drop=0.2)
        assert len(events) == 1
        assert 0.39 <= events[0]["t_min_speed"] <= 0.49
