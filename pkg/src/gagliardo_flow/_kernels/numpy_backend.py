"""Pure-numpy twins of the pair-reduction kernels.

Same signatures and semantics as the numba backend, built on dense
broadcasting. Memory is O(n_cells^2 * n_components), fine for the grid
sizes this package targets.
"""

import numpy as np

NAME = "numpy"


def set_num_threads(n):
    # numpy threading is BLAS-level and not controlled here
    pass


def weights_table(centers, mu, expo):
    diff = centers[:, None, :] - centers[None, :, :]
    d2 = np.einsum("ija,ija->ij", diff, diff)
    np.fill_diagonal(d2, 1.0)
    w = (mu * mu) * d2 ** (-0.5 * expo)
    np.fill_diagonal(w, 0.0)
    return w


def _pair_d2(u):
    diff = u[:, None, :] - u[None, :, :]
    return diff, np.einsum("ija,ija->ij", diff, diff)


def _pair_coef(d2, expo):
    mask = d2 > 0.0
    coef = np.zeros_like(d2)
    coef[mask] = d2[mask] ** expo
    return coef


def energy_sum(w, u, p):
    _, d2 = _pair_d2(u)
    return float(np.sum(w * _pair_coef(d2, 0.5 * p)))


def pairing_sum(w, v, phi, p):
    dv, d2 = _pair_d2(v)
    dphi = phi[:, None, :] - phi[None, :, :]
    dot = np.einsum("ija,ija->ij", dv, dphi)
    return float(np.sum(w * _pair_coef(d2, 0.5 * p - 1.0) * dot))


def gradient(w, u, p):
    du, d2 = _pair_d2(u)
    return 2.0 * np.einsum("ij,ija->ia", w * _pair_coef(d2, 0.5 * p - 1.0), du)


def min_pair_normsq(u):
    n = u.shape[0]
    if n < 2:
        return np.inf
    _, d2 = _pair_d2(u)
    np.fill_diagonal(d2, np.inf)
    return float(d2.min())


def killing_pair_sum(w, u, x, eta, p):
    # ordered-pair form: sum_{i != j} w |du|^(p-2) <du_ij, x_j> (eta_i - eta_j)
    du, d2 = _pair_d2(u)
    dot = np.einsum("ija,ja->ij", du, x)
    deta = eta[:, None] - eta[None, :]
    return float(np.sum(w * _pair_coef(d2, 0.5 * p - 1.0) * dot * deta))


def cross_pair_sum(w, u, psi, p):
    # ordered-pair form: sum_{i != j} w |du|^(p-2) <du_ij x u_i, psi_i - psi_j>
    du, d2 = _pair_d2(u)
    crs = np.cross(du, np.broadcast_to(u[:, None, :], du.shape))
    dpsi = psi[:, None, :] - psi[None, :, :]
    dot = np.einsum("ija,ija->ij", crs, dpsi)
    return float(np.sum(w * _pair_coef(d2, 0.5 * p - 1.0) * dot))


# parallel variants alias the serial ones; numpy is already vectorized
energy_sum_par = energy_sum
pairing_sum_par = pairing_sum
gradient_par = gradient


def warmup():
    pass
