"""Minimizing-movement time discretization of the constrained flow.

Each step solves, over fields v with every row on the target,

    minimize  E(v) + (mu / 2h) sum_i |v_i - u_prev_i|^2

by projected gradient descent with retraction: ambient gradient, tangent
projection, step, nearest-point projection back onto the target. The solve
starts at u_prev, accepts only certified objective decreases while those are
resolvable in floating point, and switches to guarded residual descent once
they are not (see minimizing_movement_step); either way the returned field
never ends above its starting objective, so the chain

    E(u^k) + |u^k - u^(k-1)|^2_L2 / 2h  <=  E(u^(k-1))

holds step by step in floating point, and telescopes to the discrete energy
inequality with respect to u^0.

The stopping residual is the L2 norm of the cell-wise tangent component of
the L2-preconditioned objective gradient,

    res = sqrt( mu sum_i |P(v_i)(g_i / mu + (v_i - u_prev_i) / h)|^2 ),

free cells only. Stopping at res <= inner_tol bounds the weak-form defect of
the step by inner_tol times the test function's L2 norm, which is what the
trajectory-level certification relies on.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .energy import (
    Field,
    energy_gradient,
    field_values,
    gagliardo_energy,
    l2_norm_sq,
)
from .errors import (
    GagliardoFlowError,
    InnerSolverStalled,
    OutOfRange,
    OutsideTubularNeighbourhood,
)
from .grid import KernelTable
from .manifold import TargetManifold

# an Armijo step below this means no usable descent direction remains
MIN_TRIAL_STEP = 1e-16

# objective differences below this relative size are rounding noise, not
# signal; the line search stops trusting them at that point
OBJECTIVE_RESOLUTION = 8.0 * np.finfo(float).eps


@dataclass(frozen=True)
class FixedStep:
    eta: float = 1.0


@dataclass(frozen=True)
class ArmijoBacktracking:
    eta0: float = 1.0
    beta: float = 0.5
    c: float = 1e-4


@dataclass(frozen=True)
class Free:
    pass


@dataclass(frozen=True)
class PinnedCollar:
    """Dirichlet-type variant: collar cells frozen at the rows of u1."""

    u1: Field


@dataclass(frozen=True)
class FlowConfig:
    h: float
    steps: int
    inner_tol: float = 1e-8
    inner_max_iters: int = 5000
    boundary_mode: object = Free()
    step_rule: object = ArmijoBacktracking()

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError("time step h must be positive")
        if not self.inner_tol > 0:
            raise ValueError("inner_tol must be positive")
        if self.steps < 0:
            raise ValueError("steps must be >= 0")
        if self.inner_max_iters < 1:
            raise ValueError("inner_max_iters must be >= 1")


@dataclass
class StepDiagnostics:
    iterations: int
    residual: float
    converged: bool
    stalled: bool
    objective: float
    objective_start: float


@dataclass
class FlowTrajectory:
    snapshots: list          # Fields u^0 .. u^K
    energies: list           # E(u^k)
    displacement_sq: list    # |u^k - u^(k-1)|^2_L2, k = 1..K
    residuals: list          # final inner residual per step
    diagnostics: list = dc_field(default_factory=list)

    @property
    def n_steps(self) -> int:
        return len(self.snapshots) - 1

    def cumulative_dissipation(self, h: float) -> np.ndarray:
        """Partial sums of displacement_sq / 2h, one entry per step."""
        d = np.asarray(self.displacement_sq)
        return np.cumsum(d) / (2.0 * h)


def proximal_objective(v, u_prev, h: float, K: KernelTable) -> float:
    """E(v) plus the proximal penalty (mu/2h) sum |v_i - u_prev_i|^2."""
    vals = field_values(v)
    prev = field_values(u_prev)
    mu = K.grid.cell_measure
    pen = (mu / (2.0 * h)) * float(np.sum((vals - prev) ** 2))
    return gagliardo_energy(vals, K) + pen


def _free_mask(cfg: FlowConfig, K: KernelTable) -> np.ndarray:
    if isinstance(cfg.boundary_mode, PinnedCollar):
        return K.grid.interior_mask.copy()
    return np.ones(K.grid.n_cells, dtype=bool)


def _check_pinned(cfg: FlowConfig, u_prev_vals, M: TargetManifold, K):
    mode = cfg.boundary_mode
    if not isinstance(mode, PinnedCollar):
        return
    pin = field_values(mode.u1)
    if pin.shape != u_prev_vals.shape:
        raise GagliardoFlowError(
            f"pinned field shape {pin.shape} differs from state shape"
            f" {u_prev_vals.shape}"
        )
    collar = K.grid.collar_mask
    if collar.any():
        if not M.on_manifold(pin[collar]):
            raise GagliardoFlowError(
                "pinned collar values must lie on the target"
            )
        if not np.allclose(pin[collar], u_prev_vals[collar], rtol=0.0, atol=1e-12):
            raise GagliardoFlowError(
                "state collar disagrees with the pinned boundary values"
            )


def _residual_norm(v, prev, g, free, h, mu, M) -> tuple:
    """Projected, L2-preconditioned gradient of the proximal objective.

    Returns (per-cell direction array with collar rows zeroed, L2 norm).
    """
    raw = g / mu + (v - prev) / h
    r = M.tangent_project_rows(v, raw)
    r[~free] = 0.0
    return r, float(np.sqrt(mu * np.sum(r * r)))


def minimizing_movement_step(u_prev, cfg: FlowConfig, K: KernelTable,
                             M: TargetManifold):
    """One proximal step. Returns (Field, StepDiagnostics).

    The returned field always satisfies objective(u_next) <= E(u_prev); if
    the iteration budget runs out above tolerance the diagnostics say so.

    Descent runs in two phases.  While the Armijo sufficient-decrease demand
    c*eta*res^2 is large enough to be representable next to the objective,
    ordinary backtracking applies (the first trial step is warm-started from
    the previously accepted step).  Once the demand falls below the
    objective's rounding resolution, objective comparisons certify nothing:
    near the minimizer the true per-step decrease is many orders below one
    ulp of the objective, and retraction rounding noise makes trial
    objectives land above or below the current one at random.  From there
    the solver descends the projected-gradient norm directly with a guarded
    fixed step, which stays accurate long after objective differences have
    degenerated.
    """
    prev = field_values(u_prev)
    _check_pinned(cfg, prev, M, K)
    free = _free_mask(cfg, K)
    mu = K.grid.cell_measure
    h = cfg.h
    rule = cfg.step_rule

    v = prev.copy()
    obj = proximal_objective(v, prev, h, K)   # equals E(u_prev): zero penalty
    obj_start = obj

    converged = False
    stalled = False
    iters = 0
    eta_warm = rule.eta0 if isinstance(rule, ArmijoBacktracking) else None

    g = energy_gradient(v, K).values
    direction, res = _residual_norm(v, prev, g, free, h, mu, M)

    while True:
        if res <= cfg.inner_tol:
            converged = True
            break
        if iters >= cfg.inner_max_iters:
            break

        if isinstance(rule, ArmijoBacktracking):
            decrease_rate = res * res   # = mu sum |direction|^2
            if rule.c * eta_warm * decrease_rate <= OBJECTIVE_RESOLUTION * abs(obj):
                v, direction, res, iters, converged, stalled = _residual_descent(
                    v, direction, res, eta_warm, prev, free, h, K, M,
                    cfg.inner_tol, cfg.inner_max_iters, iters, rule.eta0)
                obj = proximal_objective(v, prev, h, K)
                break
            iters += 1
            eta = eta_warm
            accepted = False
            while eta >= MIN_TRIAL_STEP:
                trial, trial_obj = _try_step(v, direction, eta, free, prev, h, K, M)
                if trial is not None and trial_obj <= obj - rule.c * eta * decrease_rate:
                    accepted = True
                    break
                eta *= rule.beta
            if not accepted:
                stalled = True
                break
            eta_warm = min(rule.eta0, eta / rule.beta)
        else:
            iters += 1
            trial, trial_obj = _try_step(v, direction, rule.eta, free, prev, h, K, M)
            if trial is None or not trial_obj < obj:
                stalled = True   # fixed step cannot decrease: stop where we are
                break
        v = trial
        obj = trial_obj
        g = energy_gradient(v, K).values
        direction, res = _residual_norm(v, prev, g, free, h, mu, M)

    if obj > obj_start:
        # cannot happen with the accept rules above; guards future edits
        raise InnerSolverStalled(
            f"inner solve ended above its starting objective ({obj} >"
            f" {obj_start})"
        )

    diag = StepDiagnostics(
        iterations=iters,
        residual=res,
        converged=converged,
        stalled=stalled,
        objective=obj,
        objective_start=obj_start,
    )
    return Field(v, constrained=True), diag


def _try_step(v, direction, eta, free, prev, h, K, M):
    """Retract v - eta * direction on the free cells; None if it leaves the
    projection's domain."""
    trial = v.copy()
    try:
        trial[free] = M.project_rows(v[free] - eta * direction[free])
    except OutsideTubularNeighbourhood:
        return None, np.inf
    return trial, proximal_objective(trial, prev, h, K)


def _residual_descent(v, direction, res, eta, prev, free, h, K, M,
                      inner_tol, max_iters, iters, eta_cap):
    """Fixed-step descent on the residual norm, for the regime where the
    objective can no longer resolve progress.

    Accepts a step when the new residual stays within twice the best seen;
    a rejected step halves eta and also caps future growth there. Returns
    the best-residual iterate.
    """
    mu = K.grid.cell_measure
    best_v, best_dir, best_res = v, direction, res
    converged = False
    stalled = False
    while iters < max_iters:
        iters += 1
        trial = v.copy()
        try:
            trial[free] = M.project_rows(v[free] - eta * direction[free])
        except OutsideTubularNeighbourhood:
            trial = None
        if trial is not None:
            g = energy_gradient(trial, K).values
            t_dir, t_res = _residual_norm(trial, prev, g, free, h, mu, M)
        if trial is None or t_res > 2.0 * best_res:
            eta *= 0.5
            eta_cap = eta
            if eta < MIN_TRIAL_STEP:
                stalled = True
                break
            v, direction = best_v, best_dir
            continue
        v, direction, res = trial, t_dir, t_res
        if res < best_res:
            best_v, best_dir, best_res = v, direction, res
        if res <= inner_tol:
            converged = True
            break
        eta = min(eta * 1.25, eta_cap)
    return best_v, best_dir, best_res, iters, converged, stalled


def run_flow(u0, cfg: FlowConfig, K: KernelTable, M: TargetManifold) -> FlowTrajectory:
    """Iterate the proximal step from u0 for cfg.steps steps."""
    u0_vals = field_values(u0)
    if not M.on_manifold(u0_vals):
        raise ValueError("initial field must lie on the target manifold")

    mu = K.grid.cell_measure
    traj = FlowTrajectory(
        snapshots=[Field(u0_vals.copy(), constrained=True)],
        energies=[gagliardo_energy(u0_vals, K)],
        displacement_sq=[],
        residuals=[],
    )
    current = traj.snapshots[0]
    for k in range(1, cfg.steps + 1):
        try:
            nxt, diag = minimizing_movement_step(current, cfg, K, M)
        except GagliardoFlowError as e:
            raise type(e)(f"step {k}: {e}") from e
        traj.snapshots.append(nxt)
        traj.energies.append(gagliardo_energy(nxt, K))
        traj.displacement_sq.append(
            l2_norm_sq(nxt.values - current.values, mu)
        )
        traj.residuals.append(diag.residual)
        traj.diagnostics.append(diag)
        current = nxt
    return traj


def _snap_index(q: float) -> int:
    """floor(q) hardened against values a few ulp below an integer."""
    r = round(q)
    if abs(q - r) <= 1e-9 * max(1.0, abs(q)):
        return int(r)
    return int(np.floor(q))


def interpolants(traj: FlowTrajectory, h: float, t: float):
    """Piecewise-constant and piecewise-linear reconstructions at time t.

    Valid for 0 <= t < n_steps * h; the constant one holds u^k on
    [kh, (k+1)h), the linear one joins consecutive snapshots.
    """
    n_steps = traj.n_steps
    if t < 0:
        raise OutOfRange(f"t = {t} is negative")
    k = _snap_index(t / h)
    if k >= n_steps:
        raise OutOfRange(f"t = {t} not covered by {n_steps} steps of h = {h}")
    lam = min(max((t - k * h) / h, 0.0), 1.0)
    uk = traj.snapshots[k].values
    uk1 = traj.snapshots[k + 1].values
    u_h = Field(uk.copy(), constrained=True)
    v_h = Field(uk + lam * (uk1 - uk))
    return u_h, v_h


def l2_closeness(traj: FlowTrajectory, h: float, T: float):
    """Exact time integral of |u^h - v^h|^2_L2 over the full intervals in
    [0, T], against its a-priori bound (2/3) h^2 E(u^0).

    On each interval the gap is lam * (u^(k+1) - u^k) with lam running over
    [0, 1), and the lam^2 integral contributes h/3; summing and applying the
    energy inequality gives the bound. Returns (lhs, rhs) and asserts
    lhs <= rhs.
    """
    n_steps = traj.n_steps
    if T < 0 or T > n_steps * h * (1.0 + 1e-9):
        raise OutOfRange(f"T = {T} not covered by {n_steps} steps of h = {h}")
    m = min(_snap_index(T / h), n_steps)
    lhs = (h / 3.0) * float(np.sum(traj.displacement_sq[:m]))
    rhs = (2.0 / 3.0) * h * h * traj.energies[0]
    assert lhs <= rhs, f"interpolant gap {lhs} exceeds bound {rhs}"
    return lhs, rhs
