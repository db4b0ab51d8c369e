"""Cosserat rod statics by Chebyshev collocation on curvature and Magnus-expansion integration."""

from .magnus import MagnusOrder, magnus_step, max_step
from .rod import RodProperties, TipWrench
from .solvers import SolverConfig, solve_collocation, solve_shooting
from .spectral import CollocationGrid, make_grid

__all__ = [
    "CollocationGrid",
    "MagnusOrder",
    "RodProperties",
    "SolverConfig",
    "TipWrench",
    "magnus_step",
    "make_grid",
    "max_step",
    "solve_collocation",
    "solve_shooting",
]
