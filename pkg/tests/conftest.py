import numpy as np
import pytest

import shslab


@pytest.fixture(scope="session", autouse=True)
def warm_engines():
    """Compile/warm the kernels once so timed tests never pay JIT cost."""
    dom = shslab.Domain1D(1.0, 11)
    u0 = shslab.ScalarField.step(dom, 0.5, -0.5, 0.3)
    v0 = shslab.ScalarField.constant(dom, 1.0)
    kin = shslab.KineticsFamily("matkowsky_sivashinsky", epsilon=0.1)
    tg = shslab.TimeGrid(dt=1e-3, horizon=5e-3, record_every=1)
    shslab.run_shs(u0, v0, kin, tg)
    shslab.run_limit(u0, v0, tg)
    shslab.run_heat(u0, tg)
    kin.eval_g(np.linspace(-2.0, 2.0, 5))


@pytest.fixture(scope="session")
def reference_setup():
    """The frozen reference ignition configuration shipped in configs/."""
    from pathlib import Path

    from shslab.config import load_config

    path = Path(__file__).resolve().parent.parent / "configs" / "reference_shs.json"
    cfg = load_config(str(path))
    u0, v0 = cfg.fields()
    assert cfg.domain.nodes == 401 and cfg.domain.length == 4.0
    return cfg.domain, u0, v0, cfg.kinetics.family(), cfg.timegrid()


@pytest.fixture(scope="session")
def reference_runs(reference_setup):
    """Reference trajectories shared across diagnostics/acceptance tests."""
    dom, u0, v0, kin, tg = reference_setup
    shs = shslab.run_shs(u0, v0, kin, tg)
    limit = shslab.run_limit(u0, v0, tg)
    heat = shslab.run_heat(u0, tg)
    heat_limit = shslab.run_heat(limit.snapshot_field(0), tg)
    return {
        "domain": dom, "u0": u0, "v0": v0, "kinetics": kin, "timegrid": tg,
        "shs": shs, "limit": limit, "heat": heat, "heat_limit": heat_limit,
    }
