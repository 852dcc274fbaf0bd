"""Numba implementations of the O(n_cells^2) pair reductions.

Sequential kernels visit each unordered pair once and accumulate in a fixed
order, so reruns are bit-identical. The *_par variants distribute rows over
prange and may reassociate sums; use them only when reproducibility is not
required.
"""

import numba
import numpy as np
from numba import njit, prange

NAME = "numba"


def set_num_threads(n):
    numba.set_num_threads(max(1, min(int(n), numba.config.NUMBA_NUM_THREADS)))


@njit(cache=True)
def weights_table(centers, mu, expo):
    n_c = centers.shape[0]
    n_dim = centers.shape[1]
    w = np.zeros((n_c, n_c))
    mu2 = mu * mu
    for i in range(n_c):
        for j in range(i + 1, n_c):
            d2 = 0.0
            for a in range(n_dim):
                diff = centers[i, a] - centers[j, a]
                d2 += diff * diff
            wij = mu2 * d2 ** (-0.5 * expo)
            w[i, j] = wij
            w[j, i] = wij
    return w


@njit(cache=True)
def energy_sum(w, u, p):
    """Sum over ordered pairs i != j of w_ij |u_i - u_j|^p."""
    n, ncomp = u.shape
    half = 0.5 * p
    acc = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            d2 = 0.0
            for a in range(ncomp):
                diff = u[i, a] - u[j, a]
                d2 += diff * diff
            if d2 > 0.0:
                acc += w[i, j] * d2 ** half
    return 2.0 * acc


@njit(cache=True, parallel=True)
def energy_sum_par(w, u, p):
    n, ncomp = u.shape
    half = 0.5 * p
    acc = 0.0
    for i in prange(n):
        row = 0.0
        for j in range(n):
            if j != i:
                d2 = 0.0
                for a in range(ncomp):
                    diff = u[i, a] - u[j, a]
                    d2 += diff * diff
                if d2 > 0.0:
                    row += w[i, j] * d2 ** half
        acc += row
    return acc


@njit(cache=True)
def pairing_sum(w, v, phi, p):
    """Sum over ordered pairs of w_ij |v_i-v_j|^(p-2) <v_i-v_j, phi_i-phi_j>.

    Pairs with v_i = v_j contribute zero for every p (the 0^(p-2)*0 := 0
    convention that keeps p < 2 well defined).
    """
    n, ncomp = v.shape
    em1 = 0.5 * p - 1.0
    acc = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            d2 = 0.0
            dot = 0.0
            for a in range(ncomp):
                diff = v[i, a] - v[j, a]
                d2 += diff * diff
                dot += diff * (phi[i, a] - phi[j, a])
            if d2 > 0.0:
                acc += w[i, j] * d2 ** em1 * dot
    return 2.0 * acc


@njit(cache=True, parallel=True)
def pairing_sum_par(w, v, phi, p):
    n, ncomp = v.shape
    em1 = 0.5 * p - 1.0
    acc = 0.0
    for i in prange(n):
        row = 0.0
        for j in range(n):
            if j != i:
                d2 = 0.0
                dot = 0.0
                for a in range(ncomp):
                    diff = v[i, a] - v[j, a]
                    d2 += diff * diff
                    dot += diff * (phi[i, a] - phi[j, a])
                if d2 > 0.0:
                    row += w[i, j] * d2 ** em1 * dot
        acc += row
    return acc


@njit(cache=True)
def gradient(w, u, p):
    """g_i = 2 sum_j w_ij |u_i - u_j|^(p-2) (u_i - u_j)."""
    n, ncomp = u.shape
    em1 = 0.5 * p - 1.0
    g = np.zeros((n, ncomp))
    for i in range(n):
        for j in range(i + 1, n):
            d2 = 0.0
            for a in range(ncomp):
                diff = u[i, a] - u[j, a]
                d2 += diff * diff
            if d2 > 0.0:
                coef = 2.0 * w[i, j] * d2 ** em1
                for a in range(ncomp):
                    t = coef * (u[i, a] - u[j, a])
                    g[i, a] += t
                    g[j, a] -= t
    return g


@njit(cache=True, parallel=True)
def gradient_par(w, u, p):
    n, ncomp = u.shape
    em1 = 0.5 * p - 1.0
    g = np.zeros((n, ncomp))
    for i in prange(n):
        for j in range(n):
            if j != i:
                d2 = 0.0
                for a in range(ncomp):
                    diff = u[i, a] - u[j, a]
                    d2 += diff * diff
                if d2 > 0.0:
                    coef = 2.0 * w[i, j] * d2 ** em1
                    for a in range(ncomp):
                        g[i, a] += coef * (u[i, a] - u[j, a])
    return g


@njit(cache=True)
def min_pair_normsq(u):
    """Smallest |u_i - u_j|^2 over unordered pairs (degeneracy probe)."""
    n, ncomp = u.shape
    best = np.inf
    for i in range(n):
        for j in range(i + 1, n):
            d2 = 0.0
            for a in range(ncomp):
                diff = u[i, a] - u[j, a]
                d2 += diff * diff
            if d2 < best:
                best = d2
    return best


@njit(cache=True)
def killing_pair_sum(w, u, x, eta, p):
    """Pairing term of the generator-field weak form, differences on eta only.

    Sum over ordered pairs of w_ij |du|^(p-2) <du, x_j> (eta_i - eta_j) with
    du = u_i - u_j; the ordered sum collapses to <du, x_i + x_j> per
    unordered pair.
    """
    n, ncomp = u.shape
    em1 = 0.5 * p - 1.0
    acc = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            d2 = 0.0
            dot = 0.0
            for a in range(ncomp):
                diff = u[i, a] - u[j, a]
                d2 += diff * diff
                dot += diff * (x[i, a] + x[j, a])
            if d2 > 0.0:
                acc += w[i, j] * d2 ** em1 * dot * (eta[i] - eta[j])
    return acc


@njit(cache=True)
def cross_pair_sum(w, u, psi, p):
    """Cross-product rewrite of the sphere pairing term (ambient dim 3).

    Sum over ordered pairs of w_ij |du|^(p-2) <du x u_i, psi_i - psi_j>;
    grouping the (i,j) and (j,i) terms yields <du x (u_i + u_j), dpsi>.
    """
    n = u.shape[0]
    em1 = 0.5 * p - 1.0
    acc = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            d0 = u[i, 0] - u[j, 0]
            d1 = u[i, 1] - u[j, 1]
            d2c = u[i, 2] - u[j, 2]
            nrm2 = d0 * d0 + d1 * d1 + d2c * d2c
            if nrm2 > 0.0:
                s0 = u[i, 0] + u[j, 0]
                s1 = u[i, 1] + u[j, 1]
                s2 = u[i, 2] + u[j, 2]
                c0 = d1 * s2 - d2c * s1
                c1 = d2c * s0 - d0 * s2
                c2 = d0 * s1 - d1 * s0
                dot = (
                    c0 * (psi[i, 0] - psi[j, 0])
                    + c1 * (psi[i, 1] - psi[j, 1])
                    + c2 * (psi[i, 2] - psi[j, 2])
                )
                acc += w[i, j] * nrm2 ** em1 * dot
    return acc


def warmup():
    """Trigger JIT compilation of every kernel on toy inputs."""
    c = np.array([[0.25], [0.75]])
    w = weights_table(c, 0.5, 2.0)
    u = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    eta = np.array([1.0, 0.0])
    energy_sum(w, u, 2.0)
    energy_sum_par(w, u, 2.0)
    pairing_sum(w, u, u, 2.0)
    pairing_sum_par(w, u, u, 2.0)
    gradient(w, u, 2.0)
    gradient_par(w, u, 2.0)
    min_pair_normsq(u)
    killing_pair_sum(w, u, u, eta, 2.0)
    cross_pair_sum(w, u, u, 2.0)
