"""Static Cosserat rod model: stiffness, curvature ODE and tip boundary condition.

The rod is unshearable and inextensible with no distributed load and no
pre-curvature. Tip wrenches are given in the world frame.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .liegroup import E3, cross

NITINOL_E = 60e9
NITINOL_POISSON = 0.3


@dataclass(frozen=True, eq=False)
class RodProperties:
    L: float
    K: np.ndarray
    base_pose: np.ndarray = field(default_factory=lambda: np.eye(4))
    radius: float | None = None

    def __post_init__(self):
        K = np.asarray(self.K, dtype=float)
        if self.L <= 0:
            raise ValueError("rod length must be positive")
        if K.shape != (3, 3) or np.any(K != np.diag(np.diag(K))):
            raise ValueError("stiffness must be a 3x3 diagonal matrix")
        d = np.diag(K)
        if np.any(d <= 0):
            raise ValueError("stiffness entries must be positive")
        if d[0] != d[1]:
            raise ValueError("bending stiffnesses EI must be equal")
        object.__setattr__(self, "K", K)
        object.__setattr__(self, "base_pose", np.asarray(self.base_pose, dtype=float))

    @classmethod
    def from_material(
        cls,
        L: float = 0.2,
        radius: float = 1e-3,
        E: float = NITINOL_E,
        poisson: float = NITINOL_POISSON,
        base_pose=None,
    ) -> "RodProperties":
        """Solid circular rod; defaults are a 2 mm diameter, 200 mm Nitinol rod."""
        G = E / (2.0 * (1.0 + poisson))
        I = np.pi * radius**4 / 4.0
        J = 2.0 * I
        K = np.diag([E * I, E * I, G * J])
        return cls(L=L, K=K, base_pose=np.eye(4) if base_pose is None else base_pose, radius=radius)

    @property
    def EI(self) -> float:
        return float(self.K[0, 0])

    @property
    def K_inv_diag(self) -> np.ndarray:
        return 1.0 / np.diag(self.K)


@dataclass(frozen=True, eq=False)
class TipWrench:
    force: np.ndarray = field(default_factory=lambda: np.zeros(3))
    moment: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        f = np.asarray(self.force, dtype=float).reshape(3)
        m = np.asarray(self.moment, dtype=float).reshape(3)
        if not (np.all(np.isfinite(f)) and np.all(np.isfinite(m))):
            raise ValueError("wrench entries must be finite")
        object.__setattr__(self, "force", f)
        object.__setattr__(self, "moment", m)

    @classmethod
    def from_vector(cls, w) -> "TipWrench":
        w = np.asarray(w, dtype=float)
        return cls(w[:3], w[3:])

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.force, self.moment])

    def scaled(self, factor: float) -> "TipWrench":
        return TipWrench(self.force * factor, self.moment * factor)


def curvature_rhs(u, R, props: RodProperties, wrench: TipWrench):
    """``u' = -K^-1 (u x K u + e3 x R^T f_e)``; broadcasts over leading dimensions."""
    u = np.asarray(u, dtype=float)
    R = np.asarray(R, dtype=float)
    k = np.diag(props.K)
    f_local = np.einsum("...ji,j->...i", R, wrench.force)
    return -(cross(u, k * u) + cross(np.broadcast_to(E3, f_local.shape), f_local)) / k


def boundary_target(R_L, props: RodProperties, wrench: TipWrench):
    """Tip curvature ``K^-1 R(L)^T m_e`` demanded by the applied moment."""
    R_L = np.asarray(R_L, dtype=float)
    return np.einsum("...ji,j->...i", R_L, wrench.moment) * props.K_inv_diag


def internal_moment(u, R, props: RodProperties):
    """World-frame internal moment ``R K u``."""
    u = np.asarray(u, dtype=float)
    R = np.asarray(R, dtype=float)
    return (R @ (np.diag(props.K) * u)[..., None])[..., 0]


def strain_limited_curvature(radius: float, strain: float = 0.05) -> float:
    """Curvature bound ``strain / radius`` for a rod that must stay below a bending strain."""
    return strain / radius
