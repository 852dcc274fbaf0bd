"""Machine-readable run outputs: energy trace, field snapshots, verification
report, resolved config. All floats go through repr-faithful decimal
formatting (17 significant digits) so files round-trip bit-exactly and rerun
diffs are meaningful.
"""

from __future__ import annotations

import json
import math
import os

import numpy as np

from .errors import ParseError

FLOAT_FMT = "%.17g"


def fmt(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    return FLOAT_FMT % x


def write_energy_trace(path, traj, h: float):
    """One row per snapshot; step 0 carries the initial energy and a nan
    residual (no solve produced it)."""
    e0 = traj.energies[0]
    lines = [
        "step,time,energy,displacement_sq,cumulative_dissipation,"
        "inequality_lhs,inequality_rhs,step_residual"
    ]
    cum = 0.0
    lines.append(
        f"0,{fmt(0.0)},{fmt(e0)},{fmt(0.0)},{fmt(0.0)},{fmt(e0)},{fmt(e0)},nan"
    )
    for k in range(1, traj.n_steps + 1):
        disp = traj.displacement_sq[k - 1]
        cum += disp / (2.0 * h)
        ek = traj.energies[k]
        lines.append(
            f"{k},{fmt(k * h)},{fmt(ek)},{fmt(disp)},{fmt(cum)},"
            f"{fmt(ek + cum)},{fmt(e0)},{fmt(traj.residuals[k - 1])}"
        )
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def write_snapshot(path, grid, field):
    vals = field.values
    n_comp = vals.shape[1]
    header = ["cell_index"]
    header += [f"x{a}" for a in range(grid.n)]
    header += [f"v{c}" for c in range(n_comp)]
    lines = [",".join(header)]
    for i in range(grid.n_cells):
        parts = [str(i)]
        parts += [fmt(grid.centers[i, a]) for a in range(grid.n)]
        parts += [fmt(vals[i, c]) for c in range(n_comp)]
        lines.append(",".join(parts))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_snapshot(path) -> np.ndarray:
    """Read back the value columns of a snapshot file."""
    with open(path) as fh:
        rows = [line.strip() for line in fh if line.strip()]
    if not rows:
        raise ParseError(f"{path}: empty snapshot file")
    header = rows[0].split(",")
    vcols = [i for i, name in enumerate(header) if name.startswith("v")]
    if not vcols:
        raise ParseError(f"{path}: no value columns in header {header}")
    try:
        data = [
            [float(parts[i]) for i in vcols]
            for parts in (row.split(",") for row in rows[1:])
        ]
    except (ValueError, IndexError) as e:
        raise ParseError(f"{path}: malformed snapshot row: {e}") from None
    return np.asarray(data, dtype=float)


def write_verify_report(path, checks: list):
    payload = {
        "all_pass": all(c["pass"] for c in checks),
        "checks": checks,
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_resolved_config(path, resolved: dict):
    with open(path, "w") as fh:
        json.dump(resolved, fh, indent=2, sort_keys=True)
        fh.write("\n")


def ensure_out_dir(out_dir: str) -> str:
    os.makedirs(os.path.join(out_dir, "snapshots"), exist_ok=True)
    return out_dir
