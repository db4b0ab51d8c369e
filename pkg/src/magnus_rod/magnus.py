"""Magnus-expansion steps for the body-frame equation ``T' = T X`` on SE(3).

A step over ``[a, a + h]`` takes ``nu`` samples ``X_k = h * X(a + t_k h)`` at
shifted Gauss-Legendre nodes and returns a single twist ``Psi`` with
``T(a + h) = T(a) @ exp(Psi)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .liegroup import bracket, hat6, vee6


class MagnusOrder(enum.Enum):
    FOURTH = 4
    SIXTH = 6

    @property
    def min_nu(self) -> int:
        return 2 if self is MagnusOrder.FOURTH else 3

    @property
    def default_nu(self) -> int:
        return self.min_nu

    @classmethod
    def parse(cls, value) -> "MagnusOrder":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        table = {"4": cls.FOURTH, "fourth": cls.FOURTH, "6": cls.SIXTH, "sixth": cls.SIXTH}
        if key not in table:
            raise ValueError(f"unknown Magnus order {value!r}")
        return table[key]


def legendre_points(nu: int):
    """Zeros of the degree-``nu`` Legendre polynomial shifted to ``[0, 1]``."""
    if nu == 2:
        d = 0.5 / np.sqrt(3.0)
        return np.array([0.5 - d, 0.5 + d])
    if nu == 3:
        d = 0.5 * np.sqrt(0.6)
        return np.array([0.5 - d, 0.5, 0.5 + d])
    raise ValueError(f"only nu in (2, 3) is supported, got {nu}")


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    nu: int
    t: np.ndarray
    V: np.ndarray
    V_inv: np.ndarray


@lru_cache(maxsize=None)
def quadrature_rule(nu: int) -> QuadratureRule:
    t = legendre_points(nu)
    V = np.vander(t - 0.5, nu, increasing=True)
    V_inv = np.linalg.inv(V)
    for a in (t, V, V_inv):
        a.setflags(write=False)
    return QuadratureRule(nu=nu, t=t, V=V, V_inv=V_inv)


def basis_change(X_k, rule: QuadratureRule):
    """Solve ``sum_i (t_k - 1/2)^(i-1) Y_i = X_k`` for the ``Y_i``.

    ``X_k`` has the sample axis at position -2 for twist vectors ``(..., nu, 6)``
    or at -3 for se(3) matrices ``(..., nu, 4, 4)``.
    """
    X_k = np.asarray(X_k, dtype=float)
    axis = -3 if X_k.shape[-2:] == (4, 4) else -2
    if X_k.shape[axis] != rule.nu:
        raise ValueError(f"expected {rule.nu} samples, got {X_k.shape[axis]}")
    moved = np.moveaxis(X_k, axis, -1)
    return np.moveaxis(moved @ rule.V_inv.T, -1, axis)


def _psi_from_basis(Y, order: MagnusOrder):
    Y1, Y2 = Y[..., 0, :], Y[..., 1, :]
    c12 = bracket(Y1, Y2)
    if order is MagnusOrder.FOURTH:
        psi = Y1 + c12 / 12.0
        if Y.shape[-2] >= 3:
            psi = psi + Y[..., 2, :] / 12.0
        return psi
    Y3 = Y[..., 2, :]
    # body-frame signs; the world-frame rule flips the even-degree commutator terms
    return (
        Y1
        + Y3 / 12.0
        + c12 / 12.0
        - bracket(Y2, Y3) / 240.0
        + bracket(Y1, bracket(Y1, Y3)) / 360.0
        - bracket(Y2, c12) / 240.0
        - bracket(Y1, bracket(Y1, c12)) / 720.0
    )


def magnus_step(X_samples, order: MagnusOrder):
    """One Magnus step from ``nu`` step-scaled samples.

    Accepts twist vectors ``(..., nu, 6)`` or se(3) matrices ``(..., nu, 4, 4)``
    and returns ``Psi`` in the same representation.
    """
    order = MagnusOrder.parse(order)
    X = np.asarray(X_samples, dtype=float)
    as_matrix = X.shape[-2:] == (4, 4)
    if as_matrix:
        X = vee6(X)
    nu = X.shape[-2]
    if nu < order.min_nu:
        raise ValueError(f"{order.name.lower()} order Magnus step needs nu >= {order.min_nu}, got {nu}")
    Y = basis_change(X, quadrature_rule(nu))
    psi = _psi_from_basis(Y, order)
    return hat6(psi) if as_matrix else psi


def max_step(beta: float) -> float:
    """Largest step (m) for which the Magnus series is guaranteed to converge when ``|u_i| <= beta``."""
    if beta < 0:
        raise ValueError("curvature bound must be non-negative")
    return float(np.pi / np.sqrt(6.0 * beta * beta + 1.0))


@dataclass(frozen=True)
class ConvergenceReport:
    h_max: float
    widths: np.ndarray
    flagged: np.ndarray

    @property
    def ok(self) -> bool:
        return not bool(self.flagged.any())


def check_convergence_bound(grid, beta: float) -> ConvergenceReport:
    """Flag segments of ``grid`` at least as wide as ``max_step(beta)``. Advisory only."""
    h = max_step(beta)
    widths = np.asarray(grid.widths)
    return ConvergenceReport(h_max=h, widths=widths, flagged=widths >= h)
