"""Shared fixtures: the reference run and its variants, built once per session."""

import time
from dataclasses import dataclass

import numpy as np
import pytest

import gagliardo_flow as gf
from gagliardo_flow import _kernels as kernels
from gagliardo_flow.cli import make_initial


@pytest.fixture(scope="session", autouse=True)
def _deterministic_kernels():
    kernels.configure(threads=1, deterministic=True)
    kernels.warmup()


@dataclass
class Run:
    grid: object
    K: object
    M: object
    u0: object
    cfg: object
    traj: object
    runtime: float


def _run(grid, K, M, u0, cfg):
    t0 = time.perf_counter()
    traj = gf.run_flow(u0, cfg, K, M)
    return Run(grid, K, M, u0, cfg, traj, time.perf_counter() - t0)


@pytest.fixture(scope="session")
def reference_run(_deterministic_kernels):
    """Half-equator start: 1D, 32 cells, unit sphere in R^3, s=0.5, p=2."""
    grid = gf.build_grid((0.0, 1.0), 32, 0.0)
    K = gf.build_kernel(grid, 0.5, 2.0)
    M = gf.Sphere(3)
    u0 = make_initial("half_equator", grid, M, 0)
    cfg = gf.FlowConfig(h=0.05, steps=40)
    return _run(grid, K, M, u0, cfg)


@pytest.fixture(scope="session")
def half_h_run(reference_run):
    """Same start, half the time step, twice the steps (same final time)."""
    r = reference_run
    cfg = gf.FlowConfig(h=0.025, steps=80)
    return _run(r.grid, r.K, r.M, r.u0, cfg)


@pytest.fixture(scope="session")
def torus_run(_deterministic_kernels):
    """Double-winding start on the flat 2-torus in R^4."""
    grid = gf.build_grid((0.0, 1.0), 24, 0.0)
    K = gf.build_kernel(grid, 0.5, 2.0)
    M = gf.Torus2()
    x = grid.centers[:, 0]
    vals = M.project_rows(np.stack(
        [np.cos(2 * np.pi * x), np.sin(2 * np.pi * x),
         np.cos(4 * np.pi * x), np.sin(4 * np.pi * x)], axis=1))
    u0 = gf.Field(vals, constrained=True)
    cfg = gf.FlowConfig(h=0.05, steps=20)
    return _run(grid, K, M, u0, cfg)
