#!/usr/bin/env python3
"""Side-by-side benchmark of the numba and numpy kernel engines.

Runs the shipped reference ignition configuration (stiff solver, limit
solver, heat twin) under each engine in a subprocess (engine selection
is bound at import time via SHSLAB_DISABLE_NUMBA), reports wall times,
and cross-checks that both engines produce the same physics.

Usage: python benchmarks/bench_engines.py [--nodes N] [--horizon T] [--repeats K]
"""

import argparse
import json
import os
import subprocess
import sys

DRIVER = r"""
import json, sys, time
import numpy as np
import shslab
from shslab import kernels

nodes, horizon, repeats = int(sys.argv[1]), float(sys.argv[2]), int(sys.argv[3])
dom = shslab.Domain1D(4.0, nodes)
u0 = shslab.ScalarField.step(dom, 0.5, -0.25, 0.25)
v0 = shslab.ScalarField.constant(dom, 1.0)
kin = shslab.KineticsFamily("matkowsky_sivashinsky", epsilon=0.02)
tg = shslab.TimeGrid(dt=shslab.default_dt(dom), horizon=horizon, record_every=200)

# warm the JIT (or numpy caches) outside the timed region
warm = shslab.TimeGrid(dt=tg.dt, horizon=50 * tg.dt, record_every=10)
shslab.run_shs(u0, v0, kin, warm)
shslab.run_limit(u0, v0, warm)
shslab.run_heat(u0, warm)

def best(fn):
    times = []
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out

t_shs, shs = best(lambda: shslab.run_shs(u0, v0, kin, tg))
t_lim, lim = best(lambda: shslab.run_limit(u0, v0, tg))
t_heat, _ = best(lambda: shslab.run_heat(u0, tg))

print(json.dumps({
    "engine": kernels.ENGINE,
    "n_steps": tg.n_steps,
    "shs_seconds": t_shs,
    "limit_seconds": t_lim,
    "heat_seconds": t_heat,
    "shs_final_u": shs.u[-1].tolist(),
    "limit_final_u": lim.u[-1].tolist(),
}))
"""


def run_engine(disable_numba: bool, nodes: int, horizon: float, repeats: int) -> dict:
    env = dict(os.environ)
    env["SHSLAB_DISABLE_NUMBA"] = "1" if disable_numba else ""
    proc = subprocess.run(
        [sys.executable, "-c", DRIVER, str(nodes), str(horizon), str(repeats)],
        env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--nodes", type=int, default=401)
    ap.add_argument("--horizon", type=float, default=2.0)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    print(f"reference ignition config: nodes={args.nodes} horizon={args.horizon}")
    numba = run_engine(False, args.nodes, args.horizon, args.repeats)
    numpy_ = run_engine(True, args.nodes, args.horizon, args.repeats)
    if numba["engine"] != "numba":
        print("note: numba unavailable, both rows ran the numpy engine")

    print(f"{'solver':>8}  {'numba (s)':>10}  {'numpy (s)':>10}  {'speedup':>8}")
    print("-" * 44)
    for key, label in (("shs_seconds", "shs"), ("limit_seconds", "limit"),
                       ("heat_seconds", "heat")):
        a, b = numba[key], numpy_[key]
        print(f"{label:>8}  {a:>10.3f}  {b:>10.3f}  {b / a:>7.1f}x")

    import numpy as np
    for key in ("shs_final_u", "limit_final_u"):
        da = np.asarray(numba[key])
        db = np.asarray(numpy_[key])
        gap = float(np.max(np.abs(da - db)))
        status = "ok" if gap < 1e-9 else "MISMATCH"
        print(f"cross-engine max |du| ({key}): {gap:.2e}  {status}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
