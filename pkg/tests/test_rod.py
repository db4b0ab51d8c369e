import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from magnus_rod.rod import (
    RodProperties,
    TipWrench,
    boundary_target,
    curvature_rhs,
    internal_moment,
    strain_limited_curvature,
)

from oracles import random_rotation

PROPS = RodProperties.from_material()
EI = PROPS.EI
unit = st.floats(-1, 1, allow_nan=False)


def test_material_constants():
    I = np.pi * 1e-12 / 4
    assert PROPS.EI == pytest.approx(60e9 * I)
    G = 60e9 / 2.6
    assert PROPS.K[2, 2] == pytest.approx(G * 2 * I)
    assert PROPS.L == 0.2 and PROPS.radius == 1e-3
    np.testing.assert_array_equal(PROPS.base_pose, np.eye(4))


def test_rod_properties_validation():
    with pytest.raises(ValueError):
        RodProperties(L=0.0, K=np.eye(3))
    with pytest.raises(ValueError):
        RodProperties(L=1.0, K=np.ones((3, 3)))
    with pytest.raises(ValueError):
        RodProperties(L=1.0, K=np.diag([1.0, 2.0, 1.0]))
    with pytest.raises(ValueError):
        RodProperties(L=1.0, K=np.diag([1.0, 1.0, -1.0]))


def test_wrench_round_trip_and_validation():
    w = TipWrench.from_vector([1, 2, 3, 4, 5, 6])
    np.testing.assert_array_equal(w.as_vector(), [1, 2, 3, 4, 5, 6])
    np.testing.assert_array_equal(w.scaled(0.5).moment, [2, 2.5, 3])
    with pytest.raises(ValueError):
        TipWrench([np.nan, 0, 0], [0, 0, 0])


def test_curvature_rhs_examples():
    zero = TipWrench()
    assert np.array_equal(curvature_rhs(np.zeros(3), np.eye(3), PROPS, zero), np.zeros(3))
    iso = RodProperties(L=1.0, K=np.eye(3) * 2.0)
    np.testing.assert_array_equal(curvature_rhs([3.0, 0, 0], np.eye(3), iso, zero), np.zeros(3))
    F = 0.7
    g = curvature_rhs(np.zeros(3), np.eye(3), PROPS, TipWrench([0, F, 0], [0, 0, 0]))
    np.testing.assert_allclose(g, [F / EI, 0, 0], rtol=1e-14)


def test_curvature_rhs_gyroscopic_term():
    # bending about x with twist about z couples through the unequal torsional stiffness
    u = np.array([2.0, 0.0, 5.0])
    k = np.diag(PROPS.K)
    g = curvature_rhs(u, np.eye(3), PROPS, TipWrench())
    expected = -np.cross(u, k * u) / k
    np.testing.assert_allclose(g, expected, rtol=1e-14)
    assert g[1] != 0


def test_curvature_rhs_broadcasts():
    rng = np.random.default_rng(0)
    u = rng.normal(size=(4, 5, 3))
    R = np.stack([[random_rotation(rng) for _ in range(5)] for _ in range(4)])
    w = TipWrench(rng.normal(size=3), rng.normal(size=3))
    batch = curvature_rhs(u, R, PROPS, w)
    for i in range(4):
        for j in range(5):
            np.testing.assert_allclose(batch[i, j], curvature_rhs(u[i, j], R[i, j], PROPS, w), rtol=1e-13)


@settings(max_examples=50)
@given(arrays(float, 3, elements=st.floats(-50, 50)), arrays(float, 3, elements=unit), st.integers(0, 2**31))
def test_curvature_rhs_force_equivariance(u, f, seed):
    rng = np.random.default_rng(seed)
    R, Q = random_rotation(rng), random_rotation(rng)
    g1 = curvature_rhs(u, R, PROPS, TipWrench(f, np.zeros(3)))
    g2 = curvature_rhs(u, Q @ R, PROPS, TipWrench(Q @ f, np.zeros(3)))
    np.testing.assert_allclose(g2, g1, rtol=1e-9, atol=1e-9 * max(1.0, np.abs(g1).max()))


def test_boundary_target_examples():
    assert np.array_equal(boundary_target(np.eye(3), PROPS, TipWrench()), np.zeros(3))
    m = 0.3
    np.testing.assert_allclose(boundary_target(np.eye(3), PROPS, TipWrench(np.zeros(3), [0, m, 0])), [0, m / EI, 0])


def test_boundary_target_identity_random():
    rng = np.random.default_rng(1)
    for _ in range(20):
        R = random_rotation(rng)
        m = rng.uniform(-0.5, 0.5, size=3)
        target = boundary_target(R, PROPS, TipWrench(np.zeros(3), m))
        np.testing.assert_allclose(PROPS.K @ target, R.T @ m, atol=1e-12)


def test_internal_moment_examples():
    assert np.array_equal(internal_moment(np.zeros(3), np.eye(3), PROPS), np.zeros(3))
    kappa = 4.0
    np.testing.assert_allclose(internal_moment([kappa, 0, 0], np.eye(3), PROPS), [EI * kappa, 0, 0])


@settings(max_examples=50)
@given(arrays(float, 3, elements=st.floats(-50, 50)), st.integers(0, 2**31))
def test_internal_moment_norm_invariant(u, seed):
    R = random_rotation(np.random.default_rng(seed))
    norm = np.linalg.norm(np.diag(PROPS.K) * u)
    assert np.linalg.norm(internal_moment(u, R, PROPS)) == pytest.approx(norm, rel=1e-12, abs=1e-300)


def test_boundary_and_internal_moment_are_inverse():
    rng = np.random.default_rng(2)
    R = random_rotation(rng)
    m = rng.normal(size=3)
    u_L = boundary_target(R, PROPS, TipWrench(np.zeros(3), m))
    np.testing.assert_allclose(internal_moment(u_L, R, PROPS), m, atol=1e-13)


def test_zero_wrench_fixed_point():
    # u = 0 is stationary for g, and any nonzero u is not a solution of the unloaded BVP
    rng = np.random.default_rng(3)
    for _ in range(10):
        R = random_rotation(rng)
        assert np.array_equal(curvature_rhs(np.zeros(3), R, PROPS, TipWrench()), np.zeros(3))
        assert np.array_equal(boundary_target(R, PROPS, TipWrench()), np.zeros(3))
    # unloaded rod keeps |K u| constant along s, so a nonzero start never reaches u(L) = 0
    u = np.array([1.0, -2.0, 0.5])
    g = curvature_rhs(u, np.eye(3), PROPS, TipWrench())
    k = np.diag(PROPS.K)
    assert (k * u) @ (k * g) == pytest.approx(0.0, abs=1e-12 * np.linalg.norm(k * u) ** 2)


def test_strain_limited_curvature():
    assert strain_limited_curvature(1e-3) == pytest.approx(50.0)
    assert strain_limited_curvature(4e-3, 0.05) == pytest.approx(12.5)
