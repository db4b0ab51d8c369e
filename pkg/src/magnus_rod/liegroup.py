"""SE(3) / se(3) primitives.

Twists are 6-vectors stored as ``(angular; linear)``. Every function accepts
arbitrary leading batch dimensions, so ``hat6`` of a ``(B, 6)`` array returns a
``(B, 4, 4)`` array, and so on. Poses are plain 4x4 homogeneous matrices.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

import numpy as np

SMALL_ANGLE = 1e-8
MAX_SERIES_TERMS = 20

E3 = np.array([0.0, 0.0, 1.0])


def cross(a, b):
    """Cross product over the last axis; avoids the axis bookkeeping of ``np.cross``."""
    a0, a1, a2 = a[..., 0], a[..., 1], a[..., 2]
    b0, b1, b2 = b[..., 0], b[..., 1], b[..., 2]
    return np.stack([a1 * b2 - a2 * b1, a2 * b0 - a0 * b2, a0 * b1 - a1 * b0], axis=-1)


def hat3(u):
    """Map a 3-vector to its skew-symmetric matrix, so ``hat3(u) @ w == u x w``."""
    u = np.asarray(u, dtype=float)
    out = np.zeros(u.shape[:-1] + (3, 3))
    out[..., 0, 1] = -u[..., 2]
    out[..., 0, 2] = u[..., 1]
    out[..., 1, 0] = u[..., 2]
    out[..., 1, 2] = -u[..., 0]
    out[..., 2, 0] = -u[..., 1]
    out[..., 2, 1] = u[..., 0]
    return out


def vee3(m):
    m = np.asarray(m, dtype=float)
    return np.stack([m[..., 2, 1], m[..., 0, 2], m[..., 1, 0]], axis=-1)


def hat6(xi):
    """Twist ``(w; v)`` -> 4x4 matrix ``[[hat3(w), v], [0, 0]]``."""
    xi = np.asarray(xi, dtype=float)
    out = np.zeros(xi.shape[:-1] + (4, 4))
    out[..., :3, :3] = hat3(xi[..., :3])
    out[..., :3, 3] = xi[..., 3:]
    return out


def vee6(m):
    m = np.asarray(m, dtype=float)
    return np.concatenate([vee3(m[..., :3, :3]), m[..., :3, 3]], axis=-1)


def rod_twist(u):
    """Body twist ``(u; e3)`` of an unshearable, inextensible rod."""
    u = np.asarray(u, dtype=float)
    return np.concatenate([u, np.broadcast_to(E3, u.shape)], axis=-1)


def bracket(a, b):
    """Lie bracket of two twists in vector form; ``hat6(bracket(a, b)) == commutator(hat6(a), hat6(b))``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    wa, va = a[..., :3], a[..., 3:]
    wb, vb = b[..., :3], b[..., 3:]
    return np.concatenate([cross(wa, wb), cross(wa, vb) - cross(wb, va)], axis=-1)


def commutator(a, b):
    """Matrix commutator ``a b - b a``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return a @ b - b @ a


def adjoint(psi):
    """6x6 adjoint matrix ``[[hat(w), 0], [hat(v), hat(w)]]`` of a twist, so ``adjoint(a) @ b == bracket(a, b)``."""
    psi = np.asarray(psi, dtype=float)
    out = np.zeros(psi.shape[:-1] + (6, 6))
    w_hat = hat3(psi[..., :3])
    out[..., :3, :3] = w_hat
    out[..., 3:, 3:] = w_hat
    out[..., 3:, :3] = hat3(psi[..., 3:])
    return out


def _so3_coefficients(theta):
    # sin(t)/t, (1 - cos t)/t^2, (t - sin t)/t^3 with series fallbacks
    small = theta < SMALL_ANGLE
    safe = np.where(small, 1.0, theta)
    t2 = theta * theta
    a = np.where(small, 1.0 - t2 / 6.0, np.sin(safe) / safe)
    b = np.where(small, 0.5 - t2 / 24.0, 2.0 * np.sin(0.5 * safe) ** 2 / safe**2)
    # t - sin t cancels badly well above SMALL_ANGLE, so the series covers more range
    mid = theta < 1e-2
    safe_c = np.where(mid, 1.0, theta)
    c = np.where(
        mid,
        1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0,
        (safe_c - np.sin(safe_c)) / safe_c**3,
    )
    return a, b, c


def exp_se3(psi):
    """Closed-form exponential of a twist, returned as a 4x4 homogeneous pose."""
    psi = np.asarray(psi, dtype=float)
    w, v = psi[..., :3], psi[..., 3:]
    theta = np.linalg.norm(w, axis=-1)
    a, b, c = _so3_coefficients(theta)
    W = hat3(w)
    W2 = W @ W
    eye = np.eye(3)
    R = eye + a[..., None, None] * W + b[..., None, None] * W2
    V = eye + b[..., None, None] * W + c[..., None, None] * W2
    out = np.zeros(psi.shape[:-1] + (4, 4))
    out[..., :3, :3] = R
    out[..., :3, 3] = (V @ v[..., None])[..., 0]
    out[..., 3, 3] = 1.0
    return out


def exp_series(m, terms=20, squarings=8):
    """Scaled-and-squared truncated power series of a square matrix (reference only)."""
    m = np.asarray(m, dtype=float) / 2.0**squarings
    eye = np.broadcast_to(np.eye(m.shape[-1]), m.shape)
    term = eye.copy()
    total = eye.copy()
    for k in range(1, terms):
        term = term @ m / k
        total = total + term
    for _ in range(squarings):
        total = total @ total
    return total


def pose_inverse(T):
    T = np.asarray(T, dtype=float)
    out = np.zeros_like(T)
    Rt = np.swapaxes(T[..., :3, :3], -1, -2)
    out[..., :3, :3] = Rt
    out[..., :3, 3] = -(Rt @ T[..., :3, 3, None])[..., 0]
    out[..., 3, 3] = 1.0
    return out


def rotation_angle(R):
    """Geodesic angle of a rotation matrix in radians.

    Uses ``atan2(sin, cos)`` so angles near zero keep full precision; the plain
    arccos of the trace bottoms out around 1e-8 rad.
    """
    R = np.asarray(R, dtype=float)
    cos = (np.trace(R, axis1=-2, axis2=-1) - 1.0) / 2.0
    sin = 0.5 * np.linalg.norm(vee3(R - np.swapaxes(R, -1, -2)), axis=-1)
    return np.arctan2(sin, cos)


def project_to_so3(R):
    """Nearest rotation matrix in the Frobenius norm."""
    U, _, Vt = np.linalg.svd(np.asarray(R, dtype=float))
    D = np.ones(U.shape[:-1])
    D[..., -1] = np.sign(np.linalg.det(U @ Vt))
    return (U * D[..., None, :]) @ Vt


@lru_cache(maxsize=None)
def bernoulli_numbers(count: int) -> tuple[Fraction, ...]:
    """First ``count`` Bernoulli numbers as exact fractions, with B1 = -1/2."""
    B: list[Fraction] = []
    for m in range(count):
        if m == 0:
            B.append(Fraction(1))
            continue
        s = sum(comb(m + 1, k) * B[k] for k in range(m))
        B.append(-s / (m + 1))
    return tuple(B)


def dexp_inv_series(psi, x, terms: int):
    """Truncated series ``sum_i B_i / i! ad_psi^i (x)`` on 4x4 se(3) matrices.

    Only used as a reference; the Magnus quadrature rules avoid it entirely.
    """
    if terms < 1:
        raise ValueError("terms must be >= 1")
    if terms > MAX_SERIES_TERMS:
        raise ValueError(f"terms must be <= {MAX_SERIES_TERMS}")
    psi = np.asarray(psi, dtype=float)
    x = np.asarray(x, dtype=float)
    coeffs = [float(b / factorial(i)) for i, b in enumerate(bernoulli_numbers(terms))]
    total = x.copy()
    term = x
    for i in range(1, terms):
        term = commutator(psi, term)
        if coeffs[i] != 0.0:
            total = total + coeffs[i] * term
    return total
