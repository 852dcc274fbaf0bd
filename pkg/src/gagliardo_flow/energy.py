"""Nonlocal pair energy, its first variation, and the ambient gradient.

Conventions, for a cell field u and weight table w:

    energy(u)        = (1/p) sum_{i != j} w_ij |u_i - u_j|^p
    pairing(v, phi)  =       sum_{i != j} w_ij |v_i - v_j|^(p-2) <v_i - v_j, phi_i - phi_j>
    gradient(u)_i    =     2 sum_{j != i} w_ij |u_i - u_j|^(p-2) (u_i - u_j)

so pairing(v, phi) = d/dt energy(v + t phi) at t = 0, pairing(v, v) equals
p * energy(v), and sum_i <gradient(u)_i, phi_i> = pairing(u, phi). The 1/p
prefactor lives in the energy alone; pairing and gradient carry none.
"""

from __future__ import annotations

import numpy as np

from . import _kernels as kernels
from .errors import DegenerateIncrement, DimensionMismatch
from .grid import KernelTable

# increments shorter than this make |t|^(p-2) t non-differentiable for p < 2
DEGENERACY_NORM = 1e-14


class Field:
    """Cell-wise ambient values, one row per grid cell.

    constrained=True asserts every row lies on the target manifold; the flag
    is bookkeeping only, enforcement happens where fields are produced.
    """

    __slots__ = ("values", "constrained")

    def __init__(self, values, constrained: bool = False):
        self.values = np.ascontiguousarray(values, dtype=float)
        if self.values.ndim != 2:
            raise DimensionMismatch(
                f"field values must be 2-d (cells x components), got shape"
                f" {self.values.shape}"
            )
        self.constrained = bool(constrained)

    @property
    def n_cells(self) -> int:
        return self.values.shape[0]

    @property
    def n_components(self) -> int:
        return self.values.shape[1]

    def copy(self) -> "Field":
        return Field(self.values.copy(), self.constrained)


def field_values(u) -> np.ndarray:
    """Accept a Field or a bare (n_cells, L) array."""
    vals = getattr(u, "values", u)
    return np.ascontiguousarray(np.asarray(vals, dtype=float))


def _check_cells(K: KernelTable, *arrays):
    for a in arrays:
        if a.ndim != 2 or a.shape[0] != K.n_cells:
            raise DimensionMismatch(
                f"field has {a.shape[0] if a.ndim == 2 else '?'} rows,"
                f" kernel table expects {K.n_cells}"
            )
    if len({a.shape[1] for a in arrays}) > 1:
        raise DimensionMismatch(
            f"component counts differ: {[a.shape[1] for a in arrays]}"
        )


def gagliardo_energy(u, K: KernelTable) -> float:
    vals = field_values(u)
    _check_cells(K, vals)
    return kernels.energy_sum(K.weights, vals, K.p) / K.p


def pairing(v, phi, K: KernelTable) -> float:
    """First variation of the energy at v in direction phi.

    Total for every p in (1,inf): pairs with v_i = v_j contribute zero
    (the |0|^(p-2) * 0 := 0 convention).
    """
    v_vals = field_values(v)
    phi_vals = field_values(phi)
    _check_cells(K, v_vals, phi_vals)
    return kernels.pairing_sum(K.weights, v_vals, phi_vals, K.p)


def energy_gradient(u, K: KernelTable) -> Field:
    """Ambient gradient g with sum_i <g_i, phi_i> = pairing(u, phi).

    For p < 2 the gradient blows up on vanishing increments; fields with a
    pair closer than DEGENERACY_NORM are refused.
    """
    vals = field_values(u)
    _check_cells(K, vals)
    if K.p < 2.0:
        if kernels.min_pair_normsq(vals) < DEGENERACY_NORM**2:
            raise DegenerateIncrement(
                f"p = {K.p} < 2 with a pairwise increment below"
                f" {DEGENERACY_NORM:g}"
            )
    return Field(kernels.gradient(K.weights, vals, K.p))


def l2_inner(a, b, cell_measure: float) -> float:
    """Discrete L2 inner product mu * sum_i <a_i, b_i>."""
    a = field_values(a)
    b = field_values(b)
    return cell_measure * float(np.sum(a * b))


def l2_norm_sq(a, cell_measure: float) -> float:
    a = field_values(a)
    return cell_measure * float(np.sum(a * a))


def l2_norm(a, cell_measure: float) -> float:
    return float(np.sqrt(l2_norm_sq(a, cell_measure)))
