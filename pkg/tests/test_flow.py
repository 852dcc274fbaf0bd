"""Proximal stepping, trajectories, interpolants."""

import numpy as np
import pytest

import gagliardo_flow as gf
from gagliardo_flow.energy import l2_norm
from gagliardo_flow.errors import DegenerateIncrement, OutOfRange
from gagliardo_flow.oracles import proximal_objective_reference


def _setup(cells=8, s=0.5, p=2.0, seed=20):
    grid = gf.build_grid((0.0, 1.0), cells, 0.0)
    K = gf.build_kernel(grid, s, p)
    M = gf.Sphere(3)
    rng = np.random.default_rng(seed)
    u = M.random_rows(cells, rng)
    return grid, K, M, u


def test_proximal_objective_at_start_is_energy():
    _, K, _, u = _setup()
    assert gf.proximal_objective(u, u, 0.1, K) == gf.gagliardo_energy(u, K)


def test_proximal_objective_matches_reference():
    grid, K, M, u = _setup()
    rng = np.random.default_rng(21)
    v = M.random_rows(grid.n_cells, rng)
    got = gf.proximal_objective(v, u, 0.3, K)
    want = proximal_objective_reference(v, u, 0.3, K)
    assert np.isclose(got, want, rtol=1e-12)


def test_constant_field_is_a_fixed_point():
    grid, K, M, _ = _setup()
    u = np.tile((0.0, 1.0, 0.0), (grid.n_cells, 1))
    cfg = gf.FlowConfig(h=0.1, steps=1)
    nxt, diag = gf.minimizing_movement_step(gf.Field(u, constrained=True),
                                            cfg, K, M)
    assert np.array_equal(nxt.values, u)
    assert diag.converged and diag.iterations == 0


def test_step_satisfies_comparison_property():
    grid, K, M, u = _setup(seed=22)
    cfg = gf.FlowConfig(h=0.05, steps=1)
    nxt, diag = gf.minimizing_movement_step(gf.Field(u, constrained=True),
                                            cfg, K, M)
    assert gf.proximal_objective(nxt.values, u, cfg.h, K) <= \
        gf.gagliardo_energy(u, K)
    assert diag.converged
    assert M.on_manifold(nxt.values)


def test_displacement_shrinks_with_h():
    grid, K, M, u = _setup(seed=23)
    prev = gf.Field(u, constrained=True)
    norms = []
    for h in (1.0, 0.1, 0.01):
        cfg = gf.FlowConfig(h=h, steps=1)
        nxt, _ = gf.minimizing_movement_step(prev, cfg, K, M)
        norms.append(l2_norm(nxt.values - u, K.grid.cell_measure))
    assert norms[0] > norms[1] > norms[2]


def test_stationarity_bounds_weak_defect():
    # a converged step tests to inner_tol against any tangent field
    grid, K, M, u = _setup(seed=24)
    cfg = gf.FlowConfig(h=0.05, steps=1, inner_tol=1e-10)
    nxt, diag = gf.minimizing_movement_step(gf.Field(u, constrained=True),
                                            cfg, K, M)
    assert diag.converged
    mu = grid.cell_measure
    rng = np.random.default_rng(25)
    g = gf.energy_gradient(nxt.values, K).values
    for _ in range(10):
        phi = M.tangent_project_rows(nxt.values, rng.normal(size=u.shape))
        defect = mu * np.sum((g / mu + (nxt.values - u) / cfg.h) * phi)
        assert abs(defect) <= cfg.inner_tol * l2_norm(phi, mu) * (1 + 1e-9)


def test_pinned_collar_freezes_boundary():
    grid = gf.build_grid((0.0, 1.0), 10, 0.25)
    K = gf.build_kernel(grid, 0.5, 2.0)
    M = gf.Sphere(3)
    x = grid.centers[:, 0]
    u = np.stack([np.cos(np.pi * x), np.sin(np.pi * x), np.zeros_like(x)], 1)
    cfg = gf.FlowConfig(h=0.05, steps=3,
                        boundary_mode=gf.PinnedCollar(u1=u.copy()))
    traj = gf.run_flow(gf.Field(u, constrained=True), cfg, K, M)
    collar = grid.collar_mask
    assert collar.sum() > 0
    for snap in traj.snapshots:
        assert np.array_equal(snap.values[collar], u[collar])
    moved = traj.snapshots[-1].values[~collar] - u[~collar]
    assert np.max(np.abs(moved)) > 1e-6


def test_pinned_collar_mismatch_rejected():
    grid = gf.build_grid((0.0, 1.0), 10, 0.25)
    K = gf.build_kernel(grid, 0.5, 2.0)
    M = gf.Sphere(3)
    rng = np.random.default_rng(26)
    u = M.random_rows(10, rng)
    other = M.random_rows(10, rng)
    cfg = gf.FlowConfig(h=0.05, steps=1,
                        boundary_mode=gf.PinnedCollar(u1=other))
    with pytest.raises(gf.GagliardoFlowError):
        gf.minimizing_movement_step(gf.Field(u, constrained=True), cfg, K, M)


def test_fixed_step_rule_descends():
    grid, K, M, u = _setup(seed=27)
    cfg = gf.FlowConfig(h=0.1, steps=1, inner_tol=1e-6, inner_max_iters=2000,
                        step_rule=gf.FixedStep(eta=0.01))
    nxt, diag = gf.minimizing_movement_step(gf.Field(u, constrained=True),
                                            cfg, K, M)
    assert diag.objective < diag.objective_start
    assert not diag.stalled


def test_fixed_step_too_long_stalls_without_ascending():
    grid, K, M, u = _setup(seed=28)
    cfg = gf.FlowConfig(h=0.1, steps=1, step_rule=gf.FixedStep(eta=1e6))
    nxt, diag = gf.minimizing_movement_step(gf.Field(u, constrained=True),
                                            cfg, K, M)
    assert diag.stalled and not diag.converged
    assert diag.objective <= diag.objective_start
    assert M.on_manifold(nxt.values)


def test_run_flow_constant_trajectory():
    grid, K, M, _ = _setup()
    u = np.tile((1.0, 0.0, 0.0), (grid.n_cells, 1))
    cfg = gf.FlowConfig(h=0.1, steps=4)
    traj = gf.run_flow(gf.Field(u, constrained=True), cfg, K, M)
    assert traj.n_steps == 4
    assert all(e == 0.0 for e in traj.energies)
    for snap in traj.snapshots:
        assert np.array_equal(snap.values, u)
    assert np.allclose(traj.displacement_sq, 0.0)


def test_run_flow_energy_inequality(reference_run):
    traj = reference_run.traj
    h = reference_run.cfg.h
    e0 = traj.energies[0]
    dissip = np.cumsum(traj.displacement_sq) / (2 * h)
    for k in range(1, traj.n_steps + 1):
        assert traj.energies[k] + dissip[k - 1] <= e0


def test_run_flow_strict_decrease_until_tolerance(reference_run):
    e = np.array(reference_run.traj.energies)
    assert np.all(np.diff(e) < 0)


def test_same_inequality_at_halved_h(reference_run, half_h_run):
    for run in (reference_run, half_h_run):
        traj, h = run.traj, run.cfg.h
        lhs_terms = np.cumsum(traj.displacement_sq) / (2 * h)
        assert np.all(np.array(traj.energies[1:]) + lhs_terms
                      <= traj.energies[0])


def test_run_flow_rejects_off_manifold_start():
    grid, K, M, u = _setup()
    cfg = gf.FlowConfig(h=0.1, steps=1)
    with pytest.raises(ValueError):
        gf.run_flow(gf.Field(u * 1.5), cfg, K, M)


def test_run_flow_prefixes_step_errors():
    grid = gf.build_grid((0.0, 1.0), 4, 0.0)
    K = gf.build_kernel(grid, 0.5, 1.5)
    M = gf.Sphere(3)
    u = np.tile((1.0, 0.0, 0.0), (4, 1))
    u[1] = (0.0, 1.0, 0.0)   # two coincident pairs remain
    cfg = gf.FlowConfig(h=0.1, steps=1)
    with pytest.raises(DegenerateIncrement, match="step 1:"):
        gf.run_flow(gf.Field(u, constrained=True), cfg, K, M)


def test_flow_config_validation():
    for kwargs in (dict(h=0.0, steps=1), dict(h=-1.0, steps=1),
                   dict(h=0.1, steps=-1), dict(h=0.1, steps=1, inner_tol=0.0),
                   dict(h=0.1, steps=1, inner_max_iters=0)):
        with pytest.raises((ValueError, gf.GagliardoFlowError)):
            gf.FlowConfig(**kwargs)


def test_interpolants_endpoints_and_midpoint(reference_run):
    traj, h = reference_run.traj, reference_run.cfg.h
    for k in (0, 3, 40):
        if k < traj.n_steps:
            u_h, v_h = gf.interpolants(traj, h, k * h)
            assert np.array_equal(u_h.values, traj.snapshots[k].values)
            assert np.array_equal(v_h.values, traj.snapshots[k].values)
    u_h, v_h = gf.interpolants(traj, h, 2 * h + h / 2)
    mid = 0.5 * (traj.snapshots[2].values + traj.snapshots[3].values)
    assert np.array_equal(u_h.values, traj.snapshots[2].values)
    assert np.allclose(v_h.values, mid, rtol=0.0, atol=1e-15)


def test_interpolants_range_checks(reference_run):
    traj, h = reference_run.traj, reference_run.cfg.h
    with pytest.raises(OutOfRange):
        gf.interpolants(traj, h, -1e-9 - 1e-12)
    with pytest.raises(OutOfRange):
        gf.interpolants(traj, h, traj.n_steps * h * (1 + 1e-6))


def test_l2_closeness_constant_flow():
    grid, K, M, _ = _setup()
    u = np.tile((1.0, 0.0, 0.0), (grid.n_cells, 1))
    cfg = gf.FlowConfig(h=0.1, steps=3)
    traj = gf.run_flow(gf.Field(u, constrained=True), cfg, K, M)
    lhs, rhs = gf.l2_closeness(traj, cfg.h, 0.3)
    assert lhs == 0.0 and rhs == 0.0


def test_l2_closeness_single_step():
    grid, K, M, u = _setup(seed=29)
    cfg = gf.FlowConfig(h=0.05, steps=1)
    traj = gf.run_flow(gf.Field(u, constrained=True), cfg, K, M)
    lhs, rhs = gf.l2_closeness(traj, cfg.h, cfg.h)
    assert np.isclose(lhs, (cfg.h / 3) * traj.displacement_sq[0], rtol=1e-14)
    assert lhs <= rhs


def test_l2_closeness_range(reference_run):
    traj, h = reference_run.traj, reference_run.cfg.h
    with pytest.raises(OutOfRange):
        gf.l2_closeness(traj, h, traj.n_steps * h * 1.01)
    with pytest.raises(OutOfRange):
        gf.l2_closeness(traj, h, -0.1)


def test_trajectory_determinism():
    grid, K, M, u = _setup(seed=30)
    cfg = gf.FlowConfig(h=0.05, steps=5)
    t1 = gf.run_flow(gf.Field(u, constrained=True), cfg, K, M)
    t2 = gf.run_flow(gf.Field(u, constrained=True), cfg, K, M)
    for a, b in zip(t1.snapshots, t2.snapshots):
        assert np.array_equal(a.values, b.values)
    assert t1.energies == t2.energies


def test_diagnostics_fields(reference_run):
    for d in reference_run.traj.diagnostics:
        assert d.converged
        assert not d.stalled
        assert d.residual <= reference_run.cfg.inner_tol
        assert d.objective <= d.objective_start
