"""Target manifolds: projections, tangent projectors, generator frames."""

import numpy as np
import pytest

from gagliardo_flow import Sphere, Torus2, make_target
from gagliardo_flow.errors import (
    IndexOutOfRange,
    OutsideTubularNeighbourhood,
    UnsupportedAmbientDim,
)
from gagliardo_flow.oracles import (
    sphere_projector_matrix,
    torus_nearest_point_search,
    torus_projector_matrix,
)

SQ2 = np.sqrt(2.0)


def test_sphere_projection_points():
    M = Sphere(3)
    assert np.allclose(M.project((2.0, 0.0, 0.0)).coords, (1.0, 0.0, 0.0))
    assert np.allclose(M.project((0.6, 0.8, 0.0)).coords, (0.6, 0.8, 0.0))
    with pytest.raises(OutsideTubularNeighbourhood):
        M.project((0.2, 0.2, 0.2))


def test_torus_projection_points():
    T = Torus2()
    assert np.allclose(T.project((2.0, 0.0, 0.0, 3.0)).coords,
                       (1.0, 0.0, 0.0, 1.0))
    on = np.array([1.0, 0.0, 0.0, 1.0]) / 1.0
    assert np.allclose(T.project(on).coords, on)
    with pytest.raises(OutsideTubularNeighbourhood):
        T.project((0.1, 0.1, 1.0, 0.0))


def test_torus_projection_vs_search_oracle():
    T = Torus2()
    rng = np.random.default_rng(0)
    pts = T.random_rows(30, rng) + rng.normal(scale=0.15, size=(30, 4))
    proj = T.project_rows(pts)
    for q, p in zip(pts, proj):
        brute = torus_nearest_point_search(q, 4000)
        assert np.linalg.norm(p - brute) <= 2e-3


def test_sphere_killing_frame_pinned():
    M = Sphere(3)
    fields = M.killing_fields(np.array([1.0, 0.0, 0.0]))
    assert len(fields) == 3
    assert np.allclose(fields[0], (0.0, -1.0, 0.0))
    assert np.allclose(fields[1], (0.0, 0.0, -1.0))
    assert np.allclose(fields[2], (0.0, 0.0, 0.0))


def test_torus_killing_frame_pinned():
    T = Torus2()
    fields = T.killing_fields(np.array([1.0, 0.0, 1.0, 0.0]))
    assert len(fields) == 2
    assert np.allclose(fields[0], (0.0, 1.0, 0.0, 0.0))
    assert np.allclose(fields[1], (0.0, 0.0, 0.0, 1.0))


@pytest.mark.parametrize("M", [Sphere(3), Sphere(4), Torus2()])
def test_projector_idempotent_symmetric(M):
    rng = np.random.default_rng(1)
    for p in M.random_rows(50, rng):
        P = M.projector_matrix(p)
        assert np.allclose(P @ P, P, atol=1e-13)
        assert np.allclose(P, P.T, atol=1e-15)


def test_projector_matrix_vs_oracle():
    rng = np.random.default_rng(2)
    M = Sphere(3)
    for p in M.random_rows(20, rng):
        assert np.allclose(M.projector_matrix(p), sphere_projector_matrix(p),
                           atol=1e-14)
    T = Torus2()
    for p in T.random_rows(20, rng):
        assert np.allclose(T.projector_matrix(p), torus_projector_matrix(p),
                           atol=1e-14)


@pytest.mark.parametrize("M", [Sphere(3), Sphere(5), Torus2()])
def test_killing_displacement_orthogonality(M):
    # <X(p) - X(q), p - q> = 0 for every generator
    rng = np.random.default_rng(3)
    ps = M.random_rows(200, rng)
    qs = M.random_rows(200, rng)
    for alpha in range(M.killing_count):
        xp = M.killing_field_rows(ps, alpha)
        xq = M.killing_field_rows(qs, alpha)
        vals = np.einsum("ij,ij->i", xp - xq, ps - qs)
        assert np.max(np.abs(vals)) <= 1e-12


@pytest.mark.parametrize("M", [Sphere(3), Sphere(4), Torus2()])
def test_frame_reconstructs_tangent_vectors(M):
    rng = np.random.default_rng(4)
    pts = M.random_rows(100, rng)
    raw = rng.normal(size=pts.shape)
    tang = M.tangent_project_rows(pts, raw)
    rebuilt = np.zeros_like(tang)
    for alpha in range(M.killing_count):
        x = M.killing_field_rows(pts, alpha)
        y = M.dual_field_rows(pts, alpha)
        rebuilt += np.einsum("ij,ij->i", x, tang)[:, None] * y
    assert np.max(np.abs(rebuilt - tang)) <= 1e-12


@pytest.mark.parametrize("M", [Sphere(3), Torus2()])
def test_frame_projector_identity(M):
    # sum_alpha X_alpha Y_alpha^T equals the tangent projector
    rng = np.random.default_rng(5)
    for p in M.random_rows(50, rng):
        acc = np.zeros((M.ambient_dim, M.ambient_dim))
        for x, y in zip(M.killing_fields(p), M.dual_fields(p)):
            acc += np.outer(x, y)
        assert np.allclose(acc, M.projector_matrix(p), atol=1e-13)


def test_sphere_killing_count_scales():
    assert Sphere(3).killing_count == 3
    assert Sphere(4).killing_count == 6
    assert Sphere(5).killing_count == 10


def test_random_rows_on_manifold():
    rng = np.random.default_rng(6)
    for M in (Sphere(3), Sphere(4), Torus2()):
        rows = M.random_rows(500, rng)
        assert M.on_manifold(rows)
        assert np.max(np.abs(M.constraint_residual_rows(rows))) <= 1e-12


def test_alpha_bounds_checked():
    M = Sphere(3)
    p = np.array([[0.0, 0.0, 1.0]])
    with pytest.raises(IndexOutOfRange):
        M.killing_field_rows(p, 3)
    with pytest.raises(IndexOutOfRange):
        M.killing_field_rows(p, -1)


def test_make_target():
    assert isinstance(make_target("sphere3"), Sphere)
    assert make_target("sphere4").ambient_dim == 4
    assert isinstance(make_target("torus2"), Torus2)
    with pytest.raises(ValueError):
        make_target("klein")
    with pytest.raises((ValueError, UnsupportedAmbientDim)):
        make_target("sphere1")


def test_projection_derivative_is_tangent_projector():
    # directional FD of the nearest-point projection equals P at the point
    rng = np.random.default_rng(7)
    t = 1e-6
    for M in (Sphere(3), Torus2()):
        for p in M.random_rows(10, rng):
            v = rng.normal(size=p.shape)
            plus = M.project_rows((p + t * v)[None, :])[0]
            minus = M.project_rows((p - t * v)[None, :])[0]
            fd = (plus - minus) / (2 * t)
            assert np.allclose(fd, M.tangent_projector(p, v), atol=1e-6)
