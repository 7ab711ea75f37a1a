"""
Dense QP solver and the SQP driver built on it
"""

from .problem import (
    QpStatus,
    QuadraticProgram,
    QpSolution,
)
from .admm import (
    QpSettings,
    solve_qp,
)
from .sqp import (
    NonlinearProgram,
    SqpOptions,
    SqpResult,
    SqpStatus,
    solve_sqp,
)

__all__ = [
    "QpStatus",
    "QuadraticProgram",
    "QpSolution",
    "QpSettings",
    "solve_qp",
    "NonlinearProgram",
    "SqpOptions",
    "SqpResult",
    "SqpStatus",
    "solve_sqp",
]
