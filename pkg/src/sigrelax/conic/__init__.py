"""Conic optimization over nonnegative-orthant and exponential-cone blocks."""

from .cones import (
    EXP_INIT,
    exp_dual_violation,
    exp_primal_violation,
    relative_entropy,
)
from .program import (
    EXP,
    FREE,
    NONNEG,
    BuildError,
    ConeBlock,
    ConicProgram,
    ConicSolution,
    ProgramBuilder,
    SolverOptions,
    Status,
)
from .solver import solve

__all__ = [
    "EXP",
    "EXP_INIT",
    "FREE",
    "NONNEG",
    "BuildError",
    "ConeBlock",
    "ConicProgram",
    "ConicSolution",
    "ProgramBuilder",
    "SolverOptions",
    "Status",
    "exp_dual_violation",
    "exp_primal_violation",
    "relative_entropy",
    "solve",
]
