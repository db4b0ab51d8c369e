"""Levenberg-Marquardt for square residual systems with batched finite-difference Jacobians."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class NonConvergenceError(RuntimeError):
    """Raised when a result that must be converged is not."""


@dataclass(frozen=True)
class SolverConfig:
    residual_tolerance: float = 1e-9
    max_iterations: int = 200
    finite_difference_step: float = 1e-7
    damping_initial: float = 1e-3
    damping_up: float = 10.0
    damping_down: float = 0.1
    damping_max: float = 1e12
    # shooting integrator tolerances
    rtol: float = 1e-10
    atol: float = 1e-10

    def __post_init__(self):
        for name, value in vars(self).items():
            if not value > 0:
                raise ValueError(f"{name} must be positive, got {value}")
        if self.damping_up <= 1 or self.damping_down >= 1:
            raise ValueError("damping_up must exceed 1 and damping_down must be below 1")


@dataclass
class LMResult:
    x: np.ndarray
    residual: np.ndarray
    iterations: int
    converged: bool
    message: str

    @property
    def residual_norm(self) -> float:
        return float(np.max(np.abs(self.residual))) if self.residual.size else 0.0


def fd_jacobian(fun_batch, x, config: SolverConfig):
    """Forward differences; base point and perturbations share one batched call.

    Returns ``(J, e)`` where ``e`` is the residual at ``x`` from the same batch.
    """
    h = config.finite_difference_step * np.maximum(np.abs(x), 1.0)
    batch = np.vstack([x, x + np.diag(h)])
    out = fun_batch(batch)
    e = out[0]
    J = (out[1:] - e).T / h
    return J, e


def levenberg_marquardt(fun_batch, x0, config: SolverConfig) -> LMResult:
    """Drive ``fun_batch(x[None])[0]`` to zero in the infinity norm.

    ``fun_batch`` maps a ``(B, P)`` array of parameter vectors to ``(B, M)`` residuals.
    """
    x = np.array(x0, dtype=float)
    e = fun_batch(x[None])[0]
    cost = float(e @ e)
    lam = config.damping_initial
    tol = config.residual_tolerance
    for it in range(1, config.max_iterations + 1):
        if np.max(np.abs(e)) < tol:
            return LMResult(x, e, it - 1, True, "converged")
        J, _ = fd_jacobian(fun_batch, x, config)
        H = J.T @ J
        g = J.T @ e
        scale = np.diag(H).copy()
        scale[scale == 0] = 1.0
        while True:
            try:
                step = np.linalg.solve(H + lam * np.diag(scale), -g)
            except np.linalg.LinAlgError:
                step = None
            if step is not None and np.all(np.isfinite(step)):
                e_new = fun_batch((x + step)[None])[0]
                cost_new = float(e_new @ e_new)
                if np.isfinite(cost_new) and cost_new < cost:
                    x = x + step
                    e, cost = e_new, cost_new
                    lam = max(lam * config.damping_down, 1e-15)
                    break
            lam *= config.damping_up
            if lam > config.damping_max:
                converged = bool(np.max(np.abs(e)) < tol)
                return LMResult(x, e, it, converged, "damping limit reached")
    converged = bool(np.max(np.abs(e)) < tol)
    return LMResult(x, e, config.max_iterations, converged, "iteration limit reached")
