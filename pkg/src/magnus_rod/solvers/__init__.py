from .collocation import (
    RodSolution,
    assemble_residual,
    evaluate_solution,
    make_residual_function,
    reconstruct_poses,
    residual_vector,
    solve_collocation,
)
from .lm import LMResult, NonConvergenceError, SolverConfig, fd_jacobian, levenberg_marquardt
from .shooting import ShootingSolution, solve_shooting

__all__ = [
    "LMResult",
    "NonConvergenceError",
    "RodSolution",
    "ShootingSolution",
    "SolverConfig",
    "assemble_residual",
    "evaluate_solution",
    "fd_jacobian",
    "levenberg_marquardt",
    "make_residual_function",
    "reconstruct_poses",
    "residual_vector",
    "solve_collocation",
    "solve_shooting",
]
