"""Chebyshev collocation on ``[0, L]``: nodes, differentiation matrix and interpolation operators."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .magnus import legendre_points


def to_unit(s, L):
    """Affine map from arc length on ``[0, L]`` to ``[-1, 1]``."""
    return (2.0 * np.asarray(s, dtype=float) - L) / L


def chebyshev_eval(k: int, s, L: float):
    """``T_k`` evaluated at arc length ``s`` via the three-term recurrence."""
    s = np.asarray(s, dtype=float)
    if np.any(s < 0.0) or np.any(s > L):
        raise ValueError(f"arc length outside [0, {L}]")
    return _chebyshev_table(k, to_unit(s, L))[..., k]


def _chebyshev_table(n: int, x):
    """Array ``[..., i] = T_i(x)`` for ``i = 0..n``."""
    x = np.asarray(x, dtype=float)
    out = np.empty(x.shape + (n + 1,))
    out[..., 0] = 1.0
    if n >= 1:
        out[..., 1] = x
    for i in range(2, n + 1):
        out[..., i] = 2.0 * x * out[..., i - 1] - out[..., i - 2]
    return out


def chebyshev_zeros(n: int, L: float):
    """The ``n + 1`` zeros of ``T_{n+1}`` mapped to ``[0, L]``, ascending."""
    k = np.arange(n + 1)
    x = np.sort(np.cos((2 * k + 1) * np.pi / (2 * (n + 1))))
    return 0.5 * L * (1.0 + x)


def _cheb_derivatives(N: int, x):
    """First and second x-derivatives of ``T_N`` at interior points, trigonometric form."""
    theta = np.arccos(x)
    sin_t = np.sin(theta)
    d1 = N * np.sin(N * theta) / sin_t
    d2 = (x * d1 - N * N * np.cos(N * theta)) / sin_t**2
    return d1, d2


def differentiation_matrix(n: int, L: float):
    """Full ``(n+1) x (n+1)`` matrix mapping values at the Chebyshev zeros to derivatives there."""
    N = n + 1
    x = to_unit(chebyshev_zeros(n, L), L)
    d1, d2 = _cheb_derivatives(N, x)
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    D = d1[:, None] / (diff * d1[None, :])
    np.fill_diagonal(D, 0.5 * d2 / d1)
    return (2.0 / L) * D


def modal_rows(n: int, s, L: float):
    """Rows ``[T_0/2, T_1, ..., T_n]`` at ``s``; multiply by ``B`` to get interpolation weights."""
    rows = _chebyshev_table(n, to_unit(s, L))
    rows[..., 0] *= 0.5
    return rows


@dataclass(frozen=True, eq=False)
class CollocationGrid:
    """Precomputed collocation operators for one ``(n, L, nu)`` combination.

    ``A`` and ``B`` follow the half-weighted leading mode convention, so
    ``A @ B`` maps collocation values to quadrature values. Quadrature points are
    ordered segment by segment: ``[0, c_0], [c_0, c_1], ..., [c_n, L]``.
    """

    n: int
    L: float
    nu: int
    c: np.ndarray
    D_full: np.ndarray
    D_reduced: np.ndarray
    A: np.ndarray
    B: np.ndarray
    q: np.ndarray
    boundary_row: np.ndarray
    edges: np.ndarray
    widths: np.ndarray
    t: np.ndarray
    AB: np.ndarray = field(repr=False)

    @property
    def m(self) -> int:
        return self.q.size

    @property
    def max_spacing(self) -> float:
        return float(self.widths.max())

    def interpolation_weights(self, s):
        """Weights ``w`` such that ``w @ U_c`` is the interpolant at ``s``."""
        s = np.asarray(s, dtype=float)
        if np.any(s < 0.0) or np.any(s > self.L):
            raise ValueError(f"arc length outside [0, {self.L}]")
        return modal_rows(self.n, s, self.L) @ self.B


def make_grid(n: int, L: float, nu: int = 3) -> CollocationGrid:
    if n < 1:
        raise ValueError("polynomial order n must be >= 1")
    if L <= 0:
        raise ValueError("length must be positive")
    if nu not in (2, 3):
        raise ValueError(f"nu must be 2 or 3, got {nu}")
    c = chebyshev_zeros(n, L)
    D = differentiation_matrix(n, L)
    edges = np.concatenate([[0.0], c, [L]])
    widths = np.diff(edges)
    t = legendre_points(nu)
    q = (edges[:-1, None] + widths[:, None] * t[None, :]).ravel()
    A = modal_rows(n, q, L)
    B = (2.0 / (n + 1)) * _chebyshev_table(n, to_unit(c, L)).T
    boundary_row = modal_rows(n, L, L) @ B
    arrays = dict(
        c=c, D_full=D, D_reduced=D[:-1].copy(), A=A, B=B, q=q,
        boundary_row=boundary_row, edges=edges, widths=widths, t=t, AB=A @ B,
    )
    for a in arrays.values():
        a.setflags(write=False)
    return CollocationGrid(n=n, L=float(L), nu=nu, **arrays)


def differentiate(grid: CollocationGrid, values):
    values = np.asarray(values, dtype=float)
    if values.shape[0] != grid.n + 1:
        raise ValueError(f"expected {grid.n + 1} samples, got {values.shape[0]}")
    return grid.D_full @ values


def values_at_quadrature(grid: CollocationGrid, U_c):
    U_c = np.asarray(U_c, dtype=float)
    if U_c.shape[-2:] != (grid.n + 1, 3):
        raise ValueError(f"U_c must be ({grid.n + 1}, 3), got {U_c.shape}")
    return grid.AB @ U_c


def value_at_tip(grid: CollocationGrid, U_c):
    U_c = np.asarray(U_c, dtype=float)
    if U_c.shape[-2:] != (grid.n + 1, 3):
        raise ValueError(f"U_c must be ({grid.n + 1}, 3), got {U_c.shape}")
    return grid.boundary_row @ U_c
