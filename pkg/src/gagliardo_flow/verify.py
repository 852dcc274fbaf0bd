"""Invariant checks, each returning {name, paper_ref, measured, tolerance,
pass}. `measured` is a worst-case deviation; a check passes when it does not
exceed `tolerance` (inequality checks use signed slack and tolerance 0).

algebraic_checks quantifies identities over random samples on a small fixed
grid; trajectory_checks audits one computed flow.
"""

from __future__ import annotations

import numpy as np

from .energy import energy_gradient, gagliardo_energy, pairing
from .flow import interpolants, proximal_objective
from .grid import build_grid, build_kernel
from .manifold import Sphere
from .oracles import fd_gradient
from .weakform import (
    killing_weak_residual,
    projector_weak_residual,
    random_bumps,
    sphere_weak_residual,
    tangent_recovery,
    test_norm,
)


def _check(name, ref, measured, tol):
    measured = float(measured)
    return {
        "name": name,
        "paper_ref": ref,
        "measured": measured,
        "tolerance": float(tol),
        "pass": bool(measured <= tol),
    }


def algebraic_checks(target, s: float, p: float, seed: int = 0,
                     samples: int = 10000) -> list:
    """Identity checks quantified over `samples` random draws."""
    rng = np.random.default_rng(seed)
    L = target.ambient_dim
    checks = []

    # projector algebra, generator family, reconstruction: vectorized draws
    pts = target.random_rows(samples, rng)
    vecs = rng.uniform(-1.0, 1.0, (samples, L))
    wecs = rng.uniform(-1.0, 1.0, (samples, L))

    pv = target.tangent_project_rows(pts, vecs)
    ppv = target.tangent_project_rows(pts, pv)
    checks.append(_check(
        "projector-idempotent",
        "tangent projector squares to itself",
        np.abs(ppv - pv).max(), 1e-12,
    ))

    sym_gap = np.abs(
        np.sum(pv * wecs, axis=1)
        - np.sum(vecs * target.tangent_project_rows(pts, wecs), axis=1)
    ).max()
    checks.append(_check(
        "projector-symmetric",
        "tangent projector is self-adjoint",
        sym_gap, 1e-12,
    ))

    qts = target.random_rows(samples, rng)
    kill_gap = 0.0
    for alpha in range(target.killing_count):
        xp = target.killing_field_rows(pts, alpha)
        xq = target.killing_field_rows(qts, alpha)
        kill_gap = max(
            kill_gap, np.abs(np.sum((xp - xq) * (pts - qts), axis=1)).max()
        )
    checks.append(_check(
        "generator-displacement-orthogonality",
        "<X(p) - X(q), p - q> = 0 for every generator",
        kill_gap, 1e-12,
    ))

    recon = np.zeros_like(pv)
    proj_mat_gap = 0.0
    frame = np.zeros((samples, L, L))
    for alpha in range(target.killing_count):
        x = target.killing_field_rows(pts, alpha)
        y = target.dual_field_rows(pts, alpha)
        recon += np.sum(x * pv, axis=1, keepdims=True) * y
        frame += x[:, :, None] * y[:, None, :]
    checks.append(_check(
        "tangent-reconstruction",
        "v = sum_a <X_a, v> Y_a for tangent v",
        np.abs(recon - pv).max(), 1e-12,
    ))
    eye = np.eye(L)
    pmat = np.stack([
        target.tangent_project_rows(np.repeat(pt[None, :], L, axis=0), eye).T
        for pt in pts[: min(samples, 2000)]
    ])
    proj_mat_gap = np.abs(frame[: pmat.shape[0]] - pmat).max()
    checks.append(_check(
        "frame-projector-identity",
        "sum_a X_a Y_a^T equals the tangent projector",
        proj_mat_gap, 1e-12,
    ))

    # nearest-point projection linearizes to the tangent projector
    t = 1e-5
    sub = pts[: min(samples, 2000)]
    subv = vecs[: sub.shape[0]]
    fd = (target.project_rows(sub + t * subv)
          - target.project_rows(sub - t * subv)) / (2.0 * t)
    pfd = target.tangent_project_rows(sub, subv)
    rel = np.abs(fd - pfd).max() / max(np.abs(pfd).max(), 1e-30)
    checks.append(_check(
        "projection-derivative-consistency",
        "derivative of nearest-point projection is the tangent projector",
        rel, 1e-6,
    ))

    # cross-product cancellation rewrite (ambient dim 3 identity)
    s2 = Sphere(3)
    a = s2.random_rows(samples, rng)
    b = s2.random_rows(samples, rng)
    p1 = rng.uniform(-1.0, 1.0, (samples, 3))
    p2 = rng.uniform(-1.0, 1.0, (samples, 3))
    d = a - b
    lhs = np.sum(d * (np.cross(a, p1) - np.cross(b, p2)), axis=1)
    rhs = np.sum(np.cross(d, a) * (p1 - p2), axis=1)
    checks.append(_check(
        "cross-cancellation-identity",
        "<a-b, a x p1 - b x p2> = <(a-b) x a, p1 - p2>",
        np.abs(lhs - rhs).max(), 1e-14,
    ))

    # pairing and gradient conventions on a small fixed grid
    grid = build_grid((0.0, 1.0), 6, 0.0)
    K = build_kernel(grid, s, p)
    homo_gap = 0.0
    n_fields = max(200, samples // 50)
    for _ in range(n_fields):
        v = rng.uniform(-1.0, 1.0, (grid.n_cells, L))
        homo_gap = max(
            homo_gap, abs(pairing(v, v, K) - K.p * gagliardo_energy(v, K))
        )
    checks.append(_check(
        "pairing-energy-homogeneity",
        "pairing(v, v) = p * energy(v)",
        homo_gap, 1e-12,
    ))

    adj_gap = 0.0
    fd_rel = 0.0
    for _ in range(20):
        v = rng.uniform(-1.0, 1.0, (grid.n_cells, L))
        phi = rng.uniform(-1.0, 1.0, (grid.n_cells, L))
        g = energy_gradient(v, K).values
        pr = pairing(v, phi, K)
        adj_gap = max(adj_gap, abs(float(np.sum(g * phi)) - pr) / (1.0 + abs(pr)))
        ref = fd_gradient(v, K)
        fd_rel = max(
            fd_rel, np.abs(g - ref).max() / max(np.abs(ref).max(), 1e-30)
        )
    checks.append(_check(
        "gradient-pairing-adjoint",
        "sum_i <grad_i, phi_i> = pairing(u, phi)",
        adj_gap, 1e-12,
    ))
    checks.append(_check(
        "gradient-finite-difference",
        "analytic gradient matches central differences of the energy",
        fd_rel, 1e-6,
    ))
    return checks


def trajectory_checks(traj, flow_cfg, K, M, seed: int = 0,
                      n_test_functions: int = 20) -> list:
    """Audit one computed trajectory against its guaranteed inequalities and
    the weak-form certification."""
    checks = []
    h = flow_cfg.h
    mu = K.grid.cell_measure
    E0 = traj.energies[0]
    n_steps = traj.n_steps

    cum = traj.cumulative_dissipation(h)
    lhs = np.asarray(traj.energies[1:]) + cum
    ineq_slack = float((lhs - E0).max()) if n_steps else 0.0
    checks.append(_check(
        "energy-inequality",
        "energy plus accumulated dissipation never exceeds the initial energy",
        ineq_slack, 0.0,
    ))

    comp_slack = -np.inf
    for k in range(1, n_steps + 1):
        obj = proximal_objective(traj.snapshots[k], traj.snapshots[k - 1], h, K)
        comp_slack = max(comp_slack, obj - traj.energies[k - 1])
    checks.append(_check(
        "per-step-comparison",
        "each proximal objective is at most the previous energy",
        comp_slack if n_steps else 0.0, 0.0,
    ))

    cons = max(
        float(M.constraint_residual_rows(s.values).max())
        for s in traj.snapshots
    )
    checks.append(_check(
        "constraint-preservation",
        "every snapshot stays on the target",
        cons, 1e-12,
    ))

    res = float(np.max(traj.residuals)) if traj.residuals else 0.0
    checks.append(_check(
        "step-stationarity",
        "final projected-gradient residual of every step within tolerance",
        res, flow_cfg.inner_tol,
    ))

    if n_steps:
        ts = np.linspace(0.0, n_steps * h, 100, endpoint=False)
        e_slack = -np.inf
        norm_excess = -np.inf
        is_sphere = M.kind.startswith("sphere")
        for t in ts:
            _, v_h = interpolants(traj, h, t)
            e_slack = max(e_slack, gagliardo_energy(v_h, K) - E0)
            if is_sphere:
                norms = np.linalg.norm(v_h.values, axis=1)
                norm_excess = max(norm_excess, float(norms.max()) - 1.0)
        checks.append(_check(
            "interpolant-energy-bound",
            "linear interpolant energy stays below the initial energy",
            e_slack, 0.0,
        ))
        if is_sphere:
            checks.append(_check(
                "interpolant-norm-bound",
                "linear interpolant stays inside the unit ball",
                norm_excess, 1e-12,
            ))

        gap_lhs = (h / 3.0) * float(np.sum(traj.displacement_sq))
        gap_rhs = (2.0 / 3.0) * h * h * E0
        checks.append(_check(
            "interpolant-gap-bound",
            "time-integrated interpolant gap within (2/3) h^2 E0",
            gap_lhs - gap_rhs, 0.0,
        ))

    # weak-form certification
    tol = 10.0 * flow_cfg.inner_tol
    if M.kind == "sphere3" and n_steps:
        psis = random_bumps(K.grid, n_test_functions, n_components=3, seed=seed)
        worst = 0.0
        rewrite_gap = 0.0
        for psi in psis:
            nrm = test_norm(psi, mu)
            if nrm == 0.0:
                continue
            direct = sphere_weak_residual(traj, psi, h, K, via="direct")
            rewrite = sphere_weak_residual(traj, psi, h, K, via="rewrite")
            worst = max(worst, abs(direct) / nrm)
            rewrite_gap = max(rewrite_gap, abs(direct - rewrite))
        checks.append(_check(
            "weak-residual-sphere",
            "cross-product weak residual within 10x inner tolerance",
            worst, tol,
        ))
        checks.append(_check(
            "weak-rewrite-agreement",
            "direct and rewritten sphere residuals coincide",
            rewrite_gap, 1e-12,
        ))

        # projector form against sphere form on per-step tangent fields
        phis = random_bumps(K.grid, 5, n_components=3, seed=seed + 1)
        equiv_gap = 0.0
        for phi in phis:
            tangent_steps = [
                M.tangent_project_rows(traj.snapshots[k].values, phi.values)
                for k in range(1, n_steps + 1)
            ]
            psi_steps = [
                tangent_recovery(traj.snapshots[k].values, tangent_steps[k - 1]).values
                for k in range(1, n_steps + 1)
            ]
            r_sphere = sphere_weak_residual(traj, psi_steps, h, K)
            r_proj = projector_weak_residual(traj, tangent_steps, h, K, M)
            equiv_gap = max(equiv_gap, abs(r_sphere - r_proj))
        checks.append(_check(
            "formulation-equivalence",
            "cross-product and generator-projector residuals agree",
            equiv_gap, 1e-10,
        ))
    elif n_steps:
        etas = random_bumps(K.grid, n_test_functions, n_components=1, seed=seed)
        worst = 0.0
        for eta in etas:
            nrm = test_norm(eta, mu)
            if nrm == 0.0:
                continue
            for alpha in range(M.killing_count):
                r = killing_weak_residual(traj, eta, alpha, h, K, M)
                worst = max(worst, abs(r) / nrm)
        checks.append(_check(
            "weak-residual-generators",
            "generator-form weak residual within 10x inner tolerance",
            worst, tol,
        ))
    return checks
