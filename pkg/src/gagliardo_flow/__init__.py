"""Minimizing-movement flows for nonlocal pair energies into spheres and
tori, plus the verification suite certifying the discrete inequalities and
weak forms the construction guarantees."""

from ._kernels import BACKEND_NAME, configure
from .energy import Field, energy_gradient, gagliardo_energy, pairing
from .errors import (
    DegenerateIncrement,
    DimensionMismatch,
    GagliardoFlowError,
    IndexOutOfRange,
    InnerSolverStalled,
    InvalidExponent,
    InvalidGeometry,
    NotTangent,
    OutOfRange,
    OutsideTubularNeighbourhood,
    ParseError,
    PresetUnavailable,
    SupportViolation,
    UnsupportedAmbientDim,
    ValidationError,
)
from .flow import (
    ArmijoBacktracking,
    FixedStep,
    FlowConfig,
    FlowTrajectory,
    Free,
    PinnedCollar,
    interpolants,
    l2_closeness,
    minimizing_movement_step,
    proximal_objective,
    run_flow,
)
from .grid import Grid, KernelTable, build_grid, build_kernel
from .manifold import ManifoldPoint, Sphere, TargetManifold, Torus2, make_target
from .weakform import (
    TestFunction,
    cancellation_identity_check,
    killing_weak_residual,
    projector_weak_residual,
    sphere_weak_residual,
    tangent_recovery,
)

__version__ = "0.1.0"

__all__ = [
    "ArmijoBacktracking", "BACKEND_NAME", "DegenerateIncrement",
    "DimensionMismatch", "Field", "FixedStep", "FlowConfig", "FlowTrajectory",
    "Free", "GagliardoFlowError", "Grid", "IndexOutOfRange",
    "InnerSolverStalled", "InvalidExponent", "InvalidGeometry", "KernelTable",
    "ManifoldPoint", "NotTangent", "OutOfRange", "OutsideTubularNeighbourhood",
    "ParseError", "PinnedCollar", "PresetUnavailable", "Sphere",
    "SupportViolation", "TargetManifold", "TestFunction", "Torus2",
    "UnsupportedAmbientDim", "ValidationError", "build_grid", "build_kernel",
    "cancellation_identity_check", "configure", "energy_gradient",
    "gagliardo_energy", "interpolants", "killing_weak_residual",
    "l2_closeness", "make_target", "minimizing_movement_step", "pairing",
    "projector_weak_residual", "proximal_objective", "run_flow",
    "sphere_weak_residual", "tangent_recovery",
]
