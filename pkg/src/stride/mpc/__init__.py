"""
Sequential convex centroidal MPC
"""

from .params import (
    MpcWeights,
    SolverTolerances,
    WrenchBounds,
    MpcParams,
    PROFILES,
)
from .trajectory import (
    STEP_SIZE,
    SearchDirections,
    ControlTrajectory,
    foot_groups,
)
from .linearize import (
    LinearizedStep,
    linearize_dynamics,
)
from .bounds import (
    FootBounds,
    foot_bounds,
    relax_bounds,
)
from .subproblem import (
    FootGroup,
    VariableLayout,
    CmpcSubproblem,
    assemble_subproblem,
)
from .sequential import (
    MpcDiagnostics,
    MpcResult,
    SolverContext,
    sequential_solve,
    mid_step_solve,
)

__all__ = [
    "MpcWeights",
    "SolverTolerances",
    "WrenchBounds",
    "MpcParams",
    "PROFILES",
    "STEP_SIZE",
    "SearchDirections",
    "ControlTrajectory",
    "foot_groups",
    "LinearizedStep",
    "linearize_dynamics",
    "FootBounds",
    "foot_bounds",
    "relax_bounds",
    "FootGroup",
    "VariableLayout",
    "CmpcSubproblem",
    "assemble_subproblem",
    "MpcDiagnostics",
    "MpcResult",
    "SolverContext",
    "sequential_solve",
    "mid_step_solve",
]
