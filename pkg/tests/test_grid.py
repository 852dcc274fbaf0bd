"""Grids and kernel tables."""

import numpy as np
import pytest

import gagliardo_flow as gf
from gagliardo_flow.errors import InvalidExponent, InvalidGeometry


def test_1d_grid_midpoints():
    g = gf.build_grid((0.0, 1.0), 4, 0.0)
    assert g.n == 1
    assert np.allclose(g.centers[:, 0], (0.125, 0.375, 0.625, 0.875))
    assert g.cell_measure == 0.25
    assert np.all(g.interior_mask)
    assert g.n_cells == 4


def test_1d_collar_masks():
    g = gf.build_grid((0.0, 1.0), 4, 0.3)
    inside = g.centers[g.interior_mask, 0]
    assert np.allclose(sorted(inside), (0.375, 0.625))
    assert np.count_nonzero(g.collar_mask) == 2


def test_2d_grid():
    g = gf.build_grid(((0.0, 0.0), (1.0, 1.0)), 2, 0.0)
    assert g.n == 2
    assert g.n_cells == 4
    assert g.cell_measure == 0.25
    want = {(0.25, 0.25), (0.25, 0.75), (0.75, 0.25), (0.75, 0.75)}
    got = {tuple(row) for row in g.centers}
    assert got == want


def test_2d_rectangular_box():
    g = gf.build_grid(((0.0, 0.0), (2.0, 1.0)), (4, 2), 0.0)
    assert g.n_cells == 8
    assert np.isclose(g.cell_measure, 0.25)
    assert np.allclose(g.spacing, (0.5, 0.5))


def test_collar_swallows_everything():
    with pytest.raises(InvalidGeometry):
        gf.build_grid((0.0, 1.0), 4, 0.6)


def test_bad_geometry():
    with pytest.raises(InvalidGeometry):
        gf.build_grid((1.0, 0.0), 4, 0.0)      # hi < lo
    with pytest.raises(InvalidGeometry):
        gf.build_grid((0.0, 1.0), 1, 0.0)      # fewer than 2 cells
    with pytest.raises(InvalidGeometry):
        gf.build_grid((0.0, 1.0), 4, -0.1)     # negative collar


def test_boundary_distance():
    g = gf.build_grid((0.0, 1.0), 4, 0.0)
    assert np.allclose(g.boundary_distance(), (0.125, 0.375, 0.375, 0.125))


def test_kernel_two_cell_pinned_value():
    g = gf.build_grid((0.0, 1.0), 2, 0.0)
    K = gf.build_kernel(g, 0.5, 2.0)
    assert K.weights[0, 1] == 1.0
    assert K.weights[1, 0] == 1.0
    assert K.weights[0, 0] == 0.0 and K.weights[1, 1] == 0.0


def test_kernel_weights_symmetric_bitwise():
    g = gf.build_grid(((0.0, 0.0), (1.0, 1.0)), 5, 0.0)
    K = gf.build_kernel(g, 0.75, 3.0)
    assert np.array_equal(K.weights, K.weights.T)
    assert np.all(np.isfinite(K.weights))


def test_kernel_distance_homogeneity():
    # doubling all pairwise distances divides each weight by 2^(n+sp) = 4
    a = gf.build_kernel(gf.build_grid((0.0, 1.0), 6, 0.0), 0.5, 2.0)
    b = gf.build_kernel(gf.build_grid((0.0, 2.0), 6, 0.0), 0.5, 2.0)
    # cell measure also doubles: w = mu^2 |dx|^-2 picks up 4 / 4
    ratio_centers = 2.0 ** (1.0 + 0.5 * 2.0)
    mu_gain = (b.grid.cell_measure / a.grid.cell_measure) ** 2
    off = ~np.eye(6, dtype=bool)
    assert np.allclose(b.weights[off], a.weights[off] * mu_gain / ratio_centers,
                       rtol=1e-12)


def test_kernel_exponent_validation():
    g = gf.build_grid((0.0, 1.0), 4, 0.0)
    for s, p in ((0.0, 2.0), (1.0, 2.0), (-0.5, 2.0), (0.5, 1.0),
                 (0.5, 0.5), (float("nan"), 2.0), (0.5, float("inf"))):
        with pytest.raises(InvalidExponent):
            gf.build_kernel(g, s, p)


def test_quadrature_consistency_on_smooth_map():
    # discrete energy of f(x) = x is Cauchy under grid doubling, each
    # difference shrinking by well over the 1.8 factor required
    energies = {}
    for n in (16, 32, 64, 128):
        grid = gf.build_grid((0.0, 1.0), n, 0.0)
        K = gf.build_kernel(grid, 0.25, 2.0)
        energies[n] = gf.gagliardo_energy(grid.centers[:, :1].copy(), K)
    d = [abs(energies[32] - energies[16]),
         abs(energies[64] - energies[32]),
         abs(energies[128] - energies[64])]
    assert d[0] / d[1] >= 1.8
    assert d[1] / d[2] >= 1.8
