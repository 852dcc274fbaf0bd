"""Distributional certification of computed trajectories.

A converged trajectory should annihilate, up to the inner-solver tolerance,
the discrete residual

    R = sum_k h [ <(u^k - u^(k-1))/h, zeta^k>_L2 + pairing(u^k, zeta^k) ]

for every admissible test field zeta built from collar-vanishing test
functions. Three constructions of zeta are provided:

  * sphere form (ambient dim 3): zeta = u x psi for ambient psi;
  * generator form: zeta_i = eta_i X_alpha(u_i) for scalar eta, one alpha;
  * projector form: zeta_i = sum_alpha X_alpha(u_i) <Y_alpha(u_i), phi_i>,
    which reconstructs the tangent part of an ambient phi.

Each form also has an algebraically rewritten evaluation path, used to
cross-check the direct one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as kernels
from .energy import field_values, l2_inner, pairing
from .errors import (
    DimensionMismatch,
    NotTangent,
    SupportViolation,
    UnsupportedAmbientDim,
)

TANGENCY_TOL = 1e-10


@dataclass(frozen=True)
class TestFunction:
    """Cell-wise test values, (n_cells,) scalar or (n_cells, L) vector;
    rows on collar cells must be exactly zero."""

    values: np.ndarray


def check_support(values, grid):
    vals = np.asarray(values)
    collar = grid.collar_mask
    if collar.any():
        block = vals[collar] if vals.ndim == 1 else vals[collar, :]
        if np.any(block != 0.0):
            raise SupportViolation("test function is nonzero on the collar")


def _per_step(tf, n_steps: int, grid, n_components=None) -> list:
    """Normalize a TestFunction / array / per-step sequence to one array per
    flow step, with support and shape checks."""
    if isinstance(tf, (list, tuple)):
        if len(tf) != n_steps:
            raise DimensionMismatch(
                f"need one test function per step ({n_steps}), got {len(tf)}"
            )
        items = list(tf)
    else:
        items = [tf] * n_steps
    out = []
    for item in items:
        vals = np.asarray(getattr(item, "values", item), dtype=float)
        if vals.ndim == 2 and vals.shape[1] == 1 and n_components is None:
            vals = vals[:, 0]
        if vals.shape[0] != grid.n_cells:
            raise DimensionMismatch(
                f"test function has {vals.shape[0]} rows, grid has"
                f" {grid.n_cells} cells"
            )
        if n_components is not None and (
            vals.ndim != 2 or vals.shape[1] != n_components
        ):
            raise DimensionMismatch(
                f"test function must have {n_components} components"
            )
        check_support(vals, grid)
        out.append(vals)
    return out


def test_norm(tf, cell_measure: float) -> float:
    """L2 norm of a test function; for a per-step sequence, the max over steps."""
    if isinstance(tf, (list, tuple)):
        return max(test_norm(item, cell_measure) for item in tf)
    vals = np.asarray(getattr(tf, "values", tf), dtype=float)
    return float(np.sqrt(cell_measure * np.sum(vals * vals)))


# -- algebraic building blocks -------------------------------------------


def cancellation_identity_check(a, b, psi1, psi2):
    """Both sides of <a-b, a x psi1 - b x psi2> = <(a-b) x a, psi1 - psi2>.

    The rewrite discards the (a-b) x (a-b) term; it is what turns the
    sphere-form pairing into a difference of test values only.
    """
    a = np.asarray(getattr(a, "coords", a), dtype=float)
    b = np.asarray(getattr(b, "coords", b), dtype=float)
    psi1 = np.asarray(psi1, dtype=float)
    psi2 = np.asarray(psi2, dtype=float)
    if not (a.shape == b.shape == psi1.shape == psi2.shape == (3,)):
        raise UnsupportedAmbientDim("cross-product identities need ambient dim 3")
    d = a - b
    lhs = float(d @ (np.cross(a, psi1) - np.cross(b, psi2)))
    rhs = float(np.cross(d, a) @ (psi1 - psi2))
    return lhs, rhs


def tangent_recovery(u, phi) -> TestFunction:
    """Given tangent phi on a sphere-valued field u, return psi = -u x phi,
    the test function whose cross with u reproduces phi."""
    u_vals = field_values(u)
    phi_vals = np.asarray(getattr(phi, "values", phi), dtype=float)
    if u_vals.shape[1] != 3 or phi_vals.shape != u_vals.shape:
        raise UnsupportedAmbientDim("tangent recovery needs ambient dim 3")
    normal_part = np.abs(np.sum(u_vals * phi_vals, axis=1))
    if normal_part.max(initial=0.0) > TANGENCY_TOL:
        raise NotTangent(
            f"max normal component {normal_part.max():.3g} exceeds"
            f" {TANGENCY_TOL:g}"
        )
    psi = -np.cross(u_vals, phi_vals)
    recovered = np.cross(u_vals, psi)
    gap = np.abs(recovered - phi_vals).max()
    assert gap <= 1e-12, f"recovery defect {gap:.3g}; is u on the unit sphere?"
    return TestFunction(psi)


# -- trajectory residuals --------------------------------------------------


def sphere_weak_residual(traj, psi, h: float, K, via: str = "direct") -> float:
    """Residual of the sphere-form weak equation over the trajectory.

    via="direct" feeds u x psi straight into the pairing; via="rewrite"
    uses the cancellation identity to move all test differences onto psi.
    The two agree to roundoff and are computed by disjoint code paths.
    """
    n_steps = traj.n_steps
    if traj.snapshots[0].n_components != 3:
        raise UnsupportedAmbientDim("sphere form needs ambient dim 3")
    psi_steps = _per_step(psi, n_steps, K.grid, n_components=3)
    mu = K.grid.cell_measure
    if via not in ("direct", "rewrite"):
        raise ValueError(f"unknown evaluation path {via!r}")

    total = 0.0
    for k in range(1, n_steps + 1):
        u = traj.snapshots[k].values
        dudt = (u - traj.snapshots[k - 1].values) / h
        psik = psi_steps[k - 1]
        if via == "direct":
            zeta = np.cross(u, psik)
            term = l2_inner(dudt, zeta, mu) + pairing(u, zeta, K)
        else:
            zeta = np.cross(u, psik)
            term = l2_inner(dudt, zeta, mu) + kernels.cross_pair_sum(
                K.weights, u, psik, K.p
            )
        total += h * term
    return total


def killing_weak_residual(traj, eta, alpha: int, h: float, K, M) -> float:
    """Residual of the generator-form weak equation for one generator index.

    The pairing term uses the rewrite with differences on eta only, valid
    because generator fields satisfy <X(p) - X(q), p - q> = 0.
    """
    n_steps = traj.n_steps
    eta_steps = _per_step(eta, n_steps, K.grid)
    mu = K.grid.cell_measure

    total = 0.0
    for k in range(1, n_steps + 1):
        u = traj.snapshots[k].values
        dudt = (u - traj.snapshots[k - 1].values) / h
        etak = eta_steps[k - 1]
        if etak.ndim != 1:
            raise DimensionMismatch("generator-form test functions are scalar")
        x = M.killing_field_rows(u, alpha)
        term = l2_inner(dudt, etak[:, None] * x, mu) + kernels.killing_pair_sum(
            K.weights, u, x, etak, K.p
        )
        total += h * term
    return total


def generator_test_field(u_vals, eta, alpha: int, M) -> np.ndarray:
    """The ambient test field eta_i X_alpha(u_i) (direct, un-rewritten form)."""
    x = M.killing_field_rows(u_vals, alpha)
    return np.asarray(eta, dtype=float)[:, None] * x


def projector_weak_residual(traj, phi, h: float, K, M) -> float:
    """Residual with the test field sum_alpha X_alpha(u) <Y_alpha(u), phi>,
    i.e. the tangent projection of an ambient phi assembled through the
    generator family."""
    n_steps = traj.n_steps
    L = traj.snapshots[0].n_components
    phi_steps = _per_step(phi, n_steps, K.grid, n_components=L)
    mu = K.grid.cell_measure

    total = 0.0
    for k in range(1, n_steps + 1):
        u = traj.snapshots[k].values
        dudt = (u - traj.snapshots[k - 1].values) / h
        phik = phi_steps[k - 1]
        zeta = np.zeros_like(phik)
        for alpha in range(M.killing_count):
            x = M.killing_field_rows(u, alpha)
            y = M.dual_field_rows(u, alpha)
            zeta += np.sum(y * phik, axis=1, keepdims=True) * x
        total += h * (l2_inner(dudt, zeta, mu) + pairing(u, zeta, K))
    return total


# -- test-function factories ----------------------------------------------


def _neighbor_average(arr: np.ndarray) -> np.ndarray:
    """One smoothing pass: average each cell with its axis neighbors."""
    acc = arr.copy()
    cnt = np.ones_like(arr)
    for ax in range(arr.ndim):
        lo = [slice(None)] * arr.ndim
        hi = [slice(None)] * arr.ndim
        lo[ax] = slice(None, -1)
        hi[ax] = slice(1, None)
        acc[tuple(hi)] += arr[tuple(lo)]
        cnt[tuple(hi)] += 1
        acc[tuple(lo)] += arr[tuple(hi)]
        cnt[tuple(lo)] += 1
    return acc / cnt


def _smooth_interior(raw: np.ndarray, grid) -> np.ndarray:
    sm = _neighbor_average(raw.reshape(grid.cells_per_axis)).reshape(-1)
    sm[grid.collar_mask] = 0.0
    return sm


def cell_bump(grid, cell_index: int) -> TestFunction:
    """Indicator of one interior cell smoothed over its one-cell ring."""
    if not grid.interior_mask[cell_index]:
        raise SupportViolation(f"cell {cell_index} lies on the collar")
    raw = np.zeros(grid.n_cells)
    raw[cell_index] = 1.0
    return TestFunction(_smooth_interior(raw, grid))


def random_bumps(grid, count: int = 20, n_components: int = 1, seed: int = 0):
    """Random combinations of smoothed interior bumps; vector-valued members
    put the scalar profile on one coordinate direction at a time."""
    rng = np.random.default_rng(seed)
    out = []
    for m in range(count):
        raw = np.zeros(grid.n_cells)
        raw[grid.interior_mask] = rng.uniform(
            -1.0, 1.0, int(grid.interior_mask.sum())
        )
        sm = _smooth_interior(raw, grid)
        if n_components == 1:
            out.append(TestFunction(sm))
        else:
            vals = np.zeros((grid.n_cells, n_components))
            vals[:, m % n_components] = sm
            out.append(TestFunction(vals))
    return out
