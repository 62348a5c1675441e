"""Reproducible output artifacts: CSV series/snapshots and a JSON manifest.

All doubles are written with shortest round-trip formatting, so parsing
an emitted file reproduces the in-memory values exactly and identical
configs yield byte-identical CSV files.  Files are written atomically
(temp file + rename) into the run directory.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

from .core import Trajectory

SERIES_HEADER = "t,front,mass_u,mass_v_or_chi,umin,umax"
SNAPSHOTS_HEADER = "t,x,u,aux"


def format_double(x: float) -> str:
    """Shortest decimal string that round-trips the double exactly."""
    return repr(float(x))


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)


def write_series_csv(outdir: Path, traj: Trajectory) -> Path:
    rows = [SERIES_HEADER]
    for i in range(traj.series_t.shape[0]):
        rows.append(",".join((
            format_double(traj.series_t[i]),
            format_double(traj.front[i]),
            format_double(traj.mass_u[i]),
            format_double(traj.mass_aux[i]),
            format_double(traj.umin[i]),
            format_double(traj.umax[i]),
        )))
    path = Path(outdir) / "series.csv"
    _atomic_write(path, "\n".join(rows) + "\n")
    return path


def write_snapshots_csv(outdir: Path, traj: Trajectory) -> Path:
    xs = [format_double(x) for x in traj.domain.x]
    rows = [SNAPSHOTS_HEADER]
    for j in range(traj.n_snapshots):
        t = format_double(traj.times[j])
        u = traj.u[j]
        aux = traj.aux[j]
        for i in range(traj.domain.nodes):
            rows.append(f"{t},{xs[i]},{format_double(u[i])},{format_double(aux[i])}")
    path = Path(outdir) / "snapshots.csv"
    _atomic_write(path, "\n".join(rows) + "\n")
    return path


def emit_run(outdir: Path, traj: Trajectory) -> None:
    write_series_csv(outdir, traj)
    write_snapshots_csv(outdir, traj)


def write_manifest(outdir: Path, manifest: dict) -> Path:
    path = Path(outdir) / "manifest.json"
    _atomic_write(path, json.dumps(manifest, indent=2) + "\n")
    return path


def read_series_csv(path) -> dict[str, list[float]]:
    """Parse a series.csv back into float columns (used by the tests)."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        cols: dict[str, list[float]] = {name: [] for name in header}
        for line in fh:
            for name, piece in zip(header, line.strip().split(",")):
                cols[name].append(float(piece))
    return cols
