"""Slow, independent reference computations backing the test suite.

Everything here is deliberately naive: dense loops, finite differences,
brute-force searches. None of it shares code paths with the fast kernels,
so agreement is meaningful evidence.
"""

from __future__ import annotations

import numpy as np

from .energy import field_values, gagliardo_energy, l2_norm_sq


def energy_reference(u, K) -> float:
    """Double-loop evaluation of the pair energy, no kernel module involved."""
    vals = field_values(u)
    w = K.weights
    total = 0.0
    n = vals.shape[0]
    for i in range(n):
        for j in range(n):
            if i != j:
                d = np.linalg.norm(vals[i] - vals[j])
                total += w[i, j] * d ** K.p
    return total / K.p


def pairing_reference(v, phi, K) -> float:
    vals = field_values(v)
    tst = field_values(phi)
    w = K.weights
    total = 0.0
    n = vals.shape[0]
    for i in range(n):
        for j in range(n):
            if i != j:
                dv = vals[i] - vals[j]
                nrm = np.linalg.norm(dv)
                if nrm > 0.0:
                    total += w[i, j] * nrm ** (K.p - 2.0) * float(
                        dv @ (tst[i] - tst[j])
                    )
    return total


def fd_gradient(u, K, step: float = 1e-6) -> np.ndarray:
    """Central finite differences of the energy, entry by entry."""
    vals = field_values(u).copy()
    g = np.zeros_like(vals)
    for i in range(vals.shape[0]):
        for a in range(vals.shape[1]):
            keep = vals[i, a]
            vals[i, a] = keep + step
            ep = gagliardo_energy(vals, K)
            vals[i, a] = keep - step
            em = gagliardo_energy(vals, K)
            vals[i, a] = keep
            g[i, a] = (ep - em) / (2.0 * step)
    return g


def fd_pairing(v, phi, K, step: float = 1e-6) -> float:
    """Central finite difference of t -> energy(v + t phi) at t = 0."""
    vals = field_values(v)
    tst = field_values(phi)
    ep = gagliardo_energy(vals + step * tst, K)
    em = gagliardo_energy(vals - step * tst, K)
    return (ep - em) / (2.0 * step)


def sphere_projector_matrix(p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    return np.eye(p.size) - np.outer(p, p)


def torus_projector_matrix(p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    out = np.zeros((4, 4))
    for lo in (0, 2):
        b = p[lo:lo + 2]
        out[lo:lo + 2, lo:lo + 2] = np.eye(2) - np.outer(b, b)
    return out


def fibonacci_sphere(count: int) -> np.ndarray:
    """Near-uniform lattice of `count` points on S^2 (golden-angle spiral)."""
    i = np.arange(count, dtype=float)
    z = 1.0 - 2.0 * (i + 0.5) / count
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    theta = np.pi * (3.0 - np.sqrt(5.0)) * i
    return np.column_stack([r * np.cos(theta), r * np.sin(theta), z])


def torus_nearest_point_search(v, angles_per_circle: int = 2000) -> np.ndarray:
    """Nearest point of the embedded flat torus by dense parameter search."""
    v = np.asarray(v, dtype=float)
    t = np.linspace(0.0, 2.0 * np.pi, angles_per_circle, endpoint=False)
    circle = np.column_stack([np.cos(t), np.sin(t)])
    out = np.empty(4)
    for lo in (0, 2):
        d2 = np.sum((circle - v[lo:lo + 2]) ** 2, axis=1)
        out[lo:lo + 2] = circle[np.argmin(d2)]
    return out


def proximal_objective_reference(v, u_prev, h: float, K) -> float:
    vals = field_values(v)
    prev = field_values(u_prev)
    mu = K.grid.cell_measure
    return energy_reference(vals, K) + mu / (2.0 * h) * float(
        np.sum((vals - prev) ** 2)
    )


def single_cell_step_bruteforce(u_prev, free_index: int, h: float, K,
                                candidates: np.ndarray):
    """Exhaustive single-free-cell proximal minimization over `candidates`.

    Returns (best point, best objective). Every other cell stays fixed at
    its u_prev value.
    """
    prev = field_values(u_prev)
    best = None
    best_obj = np.inf
    vals = prev.copy()
    for cand in candidates:
        vals[free_index] = cand
        obj = proximal_objective_reference(vals, prev, h, K)
        if obj < best_obj:
            best_obj = obj
            best = cand.copy()
    return best, best_obj


def interpolant_gap_quadrature(snapshots, h: float, T: float, mu: float,
                               n_quad: int = 2000) -> float:
    """Midpoint-rule approximation of the time integral of
    |piecewise-constant - piecewise-linear interpolant|^2 in L2."""
    vals = [field_values(s) for s in snapshots]
    n_steps = len(vals) - 1
    ts = (np.arange(n_quad) + 0.5) * (T / n_quad)
    total = 0.0
    for t in ts:
        k = min(int(t / h), n_steps - 1)
        lam = (t - k * h) / h
        const = vals[k]
        lin = vals[k] + lam * (vals[k + 1] - vals[k])
        total += l2_norm_sq(const - lin, mu)
    return total * (T / n_quad)
