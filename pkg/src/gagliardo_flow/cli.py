"""Batch front end.

    gagliardo-flow run    --config cfg.json [--threads N] [--deterministic] [--out DIR]
    gagliardo-flow verify --config cfg.json
    gagliardo-flow oracle --case <name>

Every RunConfig key has a flag of the same name that overrides the file
value; precedence is flags > environment (GFLOW_OUT) > file > defaults.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import _kernels as kernels
from .config import BOUNDARY_MODES, load_config, validate_config
from .energy import Field, gagliardo_energy
from .errors import (
    GagliardoFlowError,
    InnerSolverStalled,
    InvalidExponent,
    InvalidGeometry,
    OutsideTubularNeighbourhood,
    ParseError,
    PresetUnavailable,
    ValidationError,
)
from .flow import ArmijoBacktracking, FlowConfig, Free, PinnedCollar, run_flow
from .grid import build_grid, build_kernel
from .manifold import Sphere, make_target
from .runio import (
    ensure_out_dir,
    fmt,
    read_snapshot,
    write_energy_trace,
    write_resolved_config,
    write_snapshot,
    write_verify_report,
)
from .verify import algebraic_checks, trajectory_checks

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CODES = {
    ParseError: 2,
    ValidationError: 3,
    InvalidGeometry: 4,
    InvalidExponent: 5,
    OutsideTubularNeighbourhood: 6,
    InnerSolverStalled: 7,
    PresetUnavailable: 8,
}
EXIT_PACKAGE_ERROR = 9
EXIT_UNEXPECTED = 10

EXIT_DOC = """\
exit codes:
  0   run completed, all verification checks passed
  1   run completed, at least one verification check failed
  2   config file unreadable or not valid JSON
  3   config value missing or out of range
  4   unusable grid geometry
  5   kernel exponents out of range
  6   point left the projection neighbourhood
  7   inner solver stalled
  8   initial-data preset unavailable for this target/domain
  9   other package error
  10  unexpected internal error

environment:
  GFLOW_OUT      overrides the configured output directory (flags win)
  GFLOW_BACKEND  kernel backend: numba (default) or numpy
"""


def make_initial(preset: str, grid, target, seed: int) -> Field:
    """Build the initial field named by `preset` on `grid` with rows on
    `target`. Presets: constant, half_equator (1D sphere), random_uniform,
    snapshot:<path>."""
    n_cells = grid.n_cells
    L = target.ambient_dim
    if preset == "constant":
        row = np.zeros(L)
        if target.kind == "torus2":
            row[0] = 1.0
            row[2] = 1.0
        else:
            row[0] = 1.0
        vals = np.tile(row, (n_cells, 1))
    elif preset == "half_equator":
        if grid.n != 1 or not isinstance(target, Sphere):
            raise PresetUnavailable(
                "half_equator needs a 1D domain and a sphere target"
            )
        x = grid.centers[:, 0]
        vals = np.zeros((n_cells, L))
        vals[:, 0] = np.cos(np.pi * x)
        vals[:, 1] = np.sin(np.pi * x)
    elif preset == "random_uniform":
        vals = target.random_rows(n_cells, np.random.default_rng(seed))
    elif preset.startswith("snapshot:"):
        path = preset[len("snapshot:"):]
        vals = read_snapshot(path)
        if vals.shape != (n_cells, L):
            raise ValidationError(
                "init",
                f"snapshot shape {vals.shape} does not match grid/target"
                f" ({n_cells}, {L})",
            )
        if not target.on_manifold(vals, tol=1e-9):
            raise ValidationError("init", "snapshot rows are not on the target")
    else:
        raise PresetUnavailable(f"unknown preset {preset!r}")
    return Field(vals, constrained=True)


def _add_config_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", required=True, help="path to a JSON config file")
    p.add_argument("--n", type=int, help="spatial dimension (1 or 2)")
    p.add_argument("--s", type=float, help="fractional order, in (0,1)")
    p.add_argument("--p", type=float, help="integrability exponent, in (1,inf)")
    p.add_argument("--target", help="sphere<L> or torus2")
    p.add_argument(
        "--cells-per-axis", dest="cells_per_axis",
        help="cells per axis, e.g. 32 or 16,16",
    )
    p.add_argument("--box", help="domain corners as JSON, e.g. [[0,0],[1,1]]")
    p.add_argument("--h", type=float, help="time step")
    p.add_argument("--steps", type=int, help="number of flow steps")
    p.add_argument("--collar-width", dest="collar_width", type=float,
                   help="boundary collar width")
    p.add_argument("--inner-tol", dest="inner_tol", type=float,
                   help="inner solver residual tolerance")
    p.add_argument("--inner-max-iters", dest="inner_max_iters", type=int,
                   help="inner solver iteration budget")
    p.add_argument("--boundary-mode", dest="boundary_mode",
                   choices=BOUNDARY_MODES)
    p.add_argument("--init", help="initial data preset or snapshot:<path>")
    p.add_argument("--seed", type=int, help="seed for random presets")
    p.add_argument("--out", "--out-dir", dest="out_dir", help="output directory")
    p.add_argument("--threads", type=int, default=1,
                   help="worker threads for pair reductions")
    p.add_argument(
        "--deterministic", action="store_true",
        help="force sequential reductions (bitwise-reproducible outputs)",
    )


def _config_from_args(args) -> "RunConfig":
    try:
        with open(args.config) as fh:
            raw = json.load(fh)
    except OSError as e:
        raise ParseError(f"cannot read config {args.config}: {e}") from None
    except json.JSONDecodeError as e:
        raise ParseError(
            f"{args.config}: line {e.lineno}, column {e.colno}: {e.msg}"
        ) from None
    if not isinstance(raw, dict):
        raise ValidationError("<root>", "config must be a JSON object")

    env_out = os.environ.get("GFLOW_OUT")
    if env_out:
        raw["out_dir"] = env_out

    for key in ("n", "s", "p", "target", "h", "steps", "collar_width",
                "inner_tol", "inner_max_iters", "boundary_mode", "init",
                "seed", "out_dir"):
        val = getattr(args, key, None)
        if val is not None:
            raw[key] = val
    if args.cells_per_axis is not None:
        try:
            raw["cells_per_axis"] = [
                int(c) for c in str(args.cells_per_axis).split(",")
            ]
        except ValueError:
            raise ValidationError(
                "cells_per_axis", "flag must be comma-separated integers"
            ) from None
    if args.box is not None:
        try:
            raw["box"] = json.loads(args.box)
        except json.JSONDecodeError:
            raise ValidationError("box", "flag must be valid JSON") from None

    return validate_config(raw)


def _build(cfg):
    grid = build_grid(cfg.box, cfg.cells_per_axis, cfg.collar_width)
    K = build_kernel(grid, cfg.s, cfg.p)
    target = make_target(cfg.target)
    return grid, K, target


def _print_checks(checks):
    for c in checks:
        status = "pass" if c["pass"] else "FAIL"
        print(
            f"[{status}] {c['name']}: measured={fmt(c['measured'])}"
            f" tolerance={fmt(c['tolerance'])}"
        )


def cmd_run(args) -> int:
    cfg = _config_from_args(args)
    kernels.configure(args.threads, args.deterministic)
    kernels.warmup()
    grid, K, target = _build(cfg)
    u0 = make_initial(cfg.init, grid, target, cfg.seed)

    if cfg.boundary_mode == "pinned_collar":
        mode = PinnedCollar(u1=u0.copy())
    else:
        mode = Free()
    fcfg = FlowConfig(
        h=cfg.h, steps=cfg.steps, inner_tol=cfg.inner_tol,
        inner_max_iters=cfg.inner_max_iters, boundary_mode=mode,
        step_rule=ArmijoBacktracking(),
    )
    traj = run_flow(u0, fcfg, K, target)

    out = ensure_out_dir(cfg.out_dir)
    write_resolved_config(os.path.join(out, "config.resolved"), cfg.resolved())
    write_energy_trace(os.path.join(out, "energy_trace.csv"), traj, cfg.h)
    for k, snap in enumerate(traj.snapshots):
        write_snapshot(os.path.join(out, "snapshots", f"u_{k}.csv"), grid, snap)

    checks = algebraic_checks(target, cfg.s, cfg.p, seed=cfg.seed)
    checks += trajectory_checks(traj, fcfg, K, target, seed=cfg.seed)
    write_verify_report(os.path.join(out, "verify.json"), checks)

    _print_checks(checks)
    n_fail = sum(not c["pass"] for c in checks)
    print(
        f"run complete: {traj.n_steps} steps, final energy"
        f" {fmt(traj.energies[-1])}, outputs in {out}"
    )
    return EXIT_OK if n_fail == 0 else EXIT_CHECK_FAILED


def cmd_verify(args) -> int:
    cfg = _config_from_args(args)
    kernels.configure(args.threads, args.deterministic)
    target = make_target(cfg.target)
    checks = algebraic_checks(target, cfg.s, cfg.p, seed=cfg.seed)
    out = ensure_out_dir(cfg.out_dir)
    write_verify_report(os.path.join(out, "verify.json"), checks)
    _print_checks(checks)
    return EXIT_OK if all(c["pass"] for c in checks) else EXIT_CHECK_FAILED


# -- oracle cases ----------------------------------------------------------


def _oracle_kernel_weight():
    from .grid import build_grid, build_kernel

    grid = build_grid((0.0, 1.0), 2, 0.0)
    K = build_kernel(grid, 0.5, 2.0)
    print(f"two-cell pair weight (s=0.5, p=2, centers 0.25/0.75):"
          f" {fmt(K.weights[0, 1])}")


def _oracle_two_cell_energy():
    from .grid import build_grid, build_kernel

    grid = build_grid((0.0, 2.0), 2, 0.0)   # centers 0.5, 1.5: distance 1, mu 1
    u = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    for s, p in ((0.5, 2.0), (0.25, 4.0)):
        K = build_kernel(grid, s, p)
        print(f"two-cell energy (s={s}, p={p}): {fmt(gagliardo_energy(u, K))}")


def _oracle_gradient_two_cell():
    from .energy import energy_gradient
    from .grid import build_grid, build_kernel

    grid = build_grid((0.0, 2.0), 2, 0.0)
    K = build_kernel(grid, 0.5, 2.0)
    u = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    g = energy_gradient(u, K).values
    print(f"two-cell gradient rows: {g[0].tolist()} {g[1].tolist()}")


def _oracle_torus_projection():
    from .oracles import torus_nearest_point_search

    v = np.array([2.0, 0.0, 0.0, 3.0])
    dense = torus_nearest_point_search(v, 4000)
    blockwise = make_target("torus2").project(v).coords
    print(f"dense search nearest point:  {dense.tolist()}")
    print(f"blockwise normalization:     {blockwise.tolist()}")
    print(f"difference: {fmt(np.abs(dense - blockwise).max())}")


def _oracle_half_equator():
    grid = build_grid((0.0, 1.0), 4, 0.0)
    u = make_initial("half_equator", grid, Sphere(3), 0)
    for i in range(grid.n_cells):
        print(f"x={fmt(grid.centers[i, 0])}: {u.values[i].tolist()}")


def _oracle_fd_gradient():
    from .energy import energy_gradient
    from .oracles import fd_gradient

    rng = np.random.default_rng(7)
    grid = build_grid((0.0, 1.0), 8, 0.0)
    worst = 0.0
    for p in (2.0, 3.0, 4.0):
        K = build_kernel(grid, 0.5, p)
        u = rng.uniform(-1.0, 1.0, (grid.n_cells, 3))
        g = energy_gradient(u, K).values
        ref = fd_gradient(u, K)
        rel = np.abs(g - ref).max() / np.abs(ref).max()
        worst = max(worst, rel)
        print(f"p={p}: max relative gradient error vs central differences:"
              f" {fmt(rel)}")
    print(f"worst: {fmt(worst)}")


def _oracle_single_cell_step():
    from .flow import minimizing_movement_step
    from .oracles import fibonacci_sphere, single_cell_step_bruteforce

    grid = build_grid((0.0, 1.0), 3, 0.2)
    K = build_kernel(grid, 0.5, 2.0)
    target = Sphere(3)
    prev = np.tile(np.array([1.0, 0.0, 0.0]), (3, 1))
    prev[1] = np.array([0.0, 1.0, 0.0])
    fcfg = FlowConfig(h=0.5, steps=1, inner_tol=1e-12,
                      boundary_mode=PinnedCollar(u1=Field(prev.copy(), True)))
    nxt, diag = minimizing_movement_step(Field(prev.copy(), True), fcfg, K, target)
    cands = fibonacci_sphere(10000)
    best, best_obj = single_cell_step_bruteforce(prev, 1, fcfg.h, K, cands)
    dist = float(np.linalg.norm(nxt.values[1] - best))
    print(f"solver point:      {nxt.values[1].tolist()}")
    print(f"brute-force point: {best.tolist()}")
    print(f"ambient distance:  {fmt(dist)}")
    print(f"solver iterations: {diag.iterations}, residual {fmt(diag.residual)}")


def _oracle_interpolant_gap():
    from .flow import l2_closeness
    from .oracles import interpolant_gap_quadrature

    grid = build_grid((0.0, 1.0), 8, 0.0)
    K = build_kernel(grid, 0.5, 2.0)
    target = Sphere(3)
    u0 = make_initial("half_equator", grid, target, 0)
    fcfg = FlowConfig(h=0.25, steps=4)
    traj = run_flow(u0, fcfg, K, target)
    T = fcfg.steps * fcfg.h
    quad = interpolant_gap_quadrature(
        traj.snapshots, fcfg.h, T, grid.cell_measure, n_quad=20000
    )
    lhs, rhs = l2_closeness(traj, fcfg.h, T)
    print(f"quadrature integral:  {fmt(quad)}")
    print(f"closed form (h/3 sum): {fmt(lhs)}")
    print(f"bound (2/3) h^2 E0:    {fmt(rhs)}")


ORACLE_CASES = {
    "kernel-weight": _oracle_kernel_weight,
    "two-cell-energy": _oracle_two_cell_energy,
    "gradient-two-cell": _oracle_gradient_two_cell,
    "torus-projection": _oracle_torus_projection,
    "half-equator": _oracle_half_equator,
    "fd-gradient": _oracle_fd_gradient,
    "single-cell-step": _oracle_single_cell_step,
    "interpolant-gap": _oracle_interpolant_gap,
}


def cmd_oracle(args) -> int:
    kernels.configure(1, True)
    ORACLE_CASES[args.case]()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gagliardo-flow",
        description="Minimizing-movement flows for nonlocal pair energies"
                    " into spheres and tori, with verification.",
        epilog=EXIT_DOC,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser(
        "run", help="execute a flow and write trace/snapshots/verify.json",
        epilog=EXIT_DOC, formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    _add_config_flags(p_run)
    p_run.set_defaults(func=cmd_run)

    p_ver = sub.add_parser(
        "verify", help="run the algebraic verification suite only (no flow)",
        epilog=EXIT_DOC, formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    _add_config_flags(p_ver)
    p_ver.set_defaults(func=cmd_verify)

    p_or = sub.add_parser(
        "oracle", help="run a brute-force reference computation and print it",
    )
    p_or.add_argument("--case", required=True, choices=sorted(ORACLE_CASES))
    p_or.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GagliardoFlowError as e:
        print(f"error: {e}", file=sys.stderr)
        for klass, code in EXIT_CODES.items():
            if isinstance(e, klass):
                return code
        return EXIT_PACKAGE_ERROR
    except Exception as e:   # pragma: no cover - last-resort mapping
        print(f"unexpected error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_UNEXPECTED


if __name__ == "__main__":
    sys.exit(main())
