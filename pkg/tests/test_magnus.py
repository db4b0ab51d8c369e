import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from magnus_rod.liegroup import exp_se3, hat6, rod_twist, vee6
from magnus_rod.magnus import (
    MagnusOrder,
    basis_change,
    check_convergence_bound,
    legendre_points,
    magnus_step,
    max_step,
    quadrature_rule,
)
from magnus_rod.spectral import make_grid

from oracles import loglog_slope, magnus_reference, pose_reference, rod_matrix

FOURTH, SIXTH = MagnusOrder.FOURTH, MagnusOrder.SIXTH

U0 = np.array([3.0, -2.0, 1.5])
U1 = np.array([-5.0, 4.0, 2.0])


def linear_family(s):
    return rod_matrix(U0 + U1 * s)


def samples(X, h, nu):
    return np.stack([h * vee6(X(t * h)) for t in legendre_points(nu)])


def test_legendre_points():
    np.testing.assert_allclose(legendre_points(2), [0.5 - 1 / (2 * np.sqrt(3)), 0.5 + 1 / (2 * np.sqrt(3))], atol=1e-15)
    np.testing.assert_allclose(legendre_points(3), [0.5 - np.sqrt(0.6) / 2, 0.5, 0.5 + np.sqrt(0.6) / 2], atol=1e-15)
    for nu in (2, 3):
        t = legendre_points(nu)
        assert np.all(np.diff(t) > 0)
        assert t[0] + t[-1] - 1 == pytest.approx(0, abs=1e-14)
        # they are the roots of the shifted Legendre polynomial
        roots = np.polynomial.legendre.Legendre.basis(nu).roots()
        np.testing.assert_allclose(t, (np.sort(roots) + 1) / 2, atol=1e-14)
    with pytest.raises(ValueError):
        legendre_points(4)


@pytest.mark.parametrize("nu", [2, 3])
def test_quadrature_rule_vandermonde(nu):
    rule = quadrature_rule(nu)
    V = np.array([[(ti - 0.5) ** j for j in range(nu)] for ti in rule.t])
    np.testing.assert_allclose(V @ rule.V_inv, np.eye(nu), atol=1e-12)


def test_basis_change_constant_and_linear():
    rule = quadrature_rule(3)
    Xbar = np.array([0.3, -0.2, 0.1, 0.0, 0.0, 0.05])
    Y = basis_change(np.tile(Xbar, (3, 1)), rule)
    np.testing.assert_allclose(Y[0], Xbar, atol=1e-15)
    np.testing.assert_allclose(Y[1:], 0.0, atol=1e-15)
    slope = np.array([1.0, 2.0, -1.0, 0.5, 0.0, 0.0])
    X = np.stack([Xbar + (t - 0.5) * slope for t in rule.t])
    Y = basis_change(X, rule)
    np.testing.assert_allclose(Y[0], Xbar, atol=1e-14)
    np.testing.assert_allclose(Y[1], slope, atol=1e-14)
    np.testing.assert_allclose(Y[2], 0.0, atol=1e-14)


@pytest.mark.parametrize("nu", [2, 3])
def test_basis_change_reconstructs_samples(nu):
    rule = quadrature_rule(nu)
    X = hat6(np.random.default_rng(nu).normal(size=(nu, 6)))
    Y = basis_change(X, rule)
    for k, t in enumerate(rule.t):
        rebuilt = sum((t - 0.5) ** i * Y[i] for i in range(nu))
        np.testing.assert_allclose(rebuilt, X[k], atol=1e-12)
    with pytest.raises(ValueError):
        basis_change(X[:1], rule)


@pytest.mark.parametrize("order", [FOURTH, SIXTH])
def test_constant_twist_is_exact(order):
    Xbar = np.array([0.7, -0.4, 0.2, 0.0, 0.0, 0.03])
    psi = magnus_step(np.tile(Xbar, (order.min_nu, 1)), order)
    np.testing.assert_allclose(psi, Xbar, rtol=0, atol=1e-16)


def test_matrix_and_vector_forms_agree():
    X = np.random.default_rng(0).normal(size=(3, 6))
    np.testing.assert_allclose(magnus_step(hat6(X), SIXTH), hat6(magnus_step(X, SIXTH)), atol=1e-15)


def test_incompatible_order_rejected():
    with pytest.raises(ValueError):
        magnus_step(np.zeros((2, 6)), SIXTH)


def test_order_parse():
    assert MagnusOrder.parse("6") is SIXTH and MagnusOrder.parse(4) is FOURTH
    assert MagnusOrder.parse("Fourth") is FOURTH
    with pytest.raises(ValueError):
        MagnusOrder.parse(5)


@settings(max_examples=50)
@given(arrays(float, (3, 6), elements=st.floats(-3, 3)), st.sampled_from([FOURTH, SIXTH]))
def test_step_result_is_in_se3(X, order):
    psi = magnus_step(hat6(X[: order.min_nu]), order)
    assert np.all(psi[3] == 0)
    np.testing.assert_allclose(psi[:3, :3], -psi[:3, :3].T, atol=1e-12)


HS = [0.1, 0.07, 0.05, 0.035, 0.025]


def local_errors(order, X, hs=HS):
    nu = order.min_nu
    return [np.abs(hat6(magnus_step(samples(X, h, nu), order)) - magnus_reference(X, h)).max() for h in hs]


def test_fourth_order_local_error_slope():
    errs = local_errors(FOURTH, linear_family)
    assert loglog_slope(HS, errs) == pytest.approx(5.0, abs=0.3)
    # halving the step cuts the local error by about 2^5
    e1, e2 = local_errors(FOURTH, linear_family, [0.05, 0.025])
    assert 32 / 1.5 < e1 / e2 < 32 * 1.5


def test_sixth_order_local_error_slope():
    errs = local_errors(SIXTH, linear_family)
    assert loglog_slope(HS, errs) == pytest.approx(7.0, abs=0.3)
    e1, e2 = local_errors(SIXTH, linear_family, [0.05, 0.025])
    assert 128 / 1.5 < e1 / e2 < 128 * 1.5


def test_quadratic_family_slopes():
    U2 = np.array([6.0, 3.0, -4.0])
    X = lambda s: rod_matrix(U0 + U1 * s + U2 * s * s)  # noqa: E731
    hs = [0.05, 0.035, 0.025, 0.018, 0.0125]
    assert loglog_slope(hs, local_errors(FOURTH, X, hs)) == pytest.approx(5.0, abs=0.3)
    assert loglog_slope(hs, local_errors(SIXTH, X, hs)) == pytest.approx(7.0, abs=0.3)


def test_fourth_order_with_three_points_keeps_order():
    hs = [0.05, 0.035, 0.025, 0.018]
    U2 = np.array([6.0, 3.0, -4.0])
    X = lambda s: rod_matrix(U0 + U1 * s + U2 * s * s)  # noqa: E731
    errs = [np.abs(hat6(magnus_step(samples(X, h, 3), FOURTH)) - magnus_reference(X, h)).max() for h in hs]
    assert loglog_slope(hs, errs) > 4.7


def test_step_integrates_body_frame_equation():
    # exp(Psi) must match T' = T X, and must not match T' = X T
    h = 0.1
    T_body = pose_reference(linear_family, np.eye(4), 0.0, h, steps=2000)
    T_world = np.eye(4)
    ds = h / 2000
    for i in range(2000):
        s = i * ds
        f = lambda s, T: linear_family(s) @ T  # noqa: E731
        k1 = f(s, T_world)
        k2 = f(s + ds / 2, T_world + ds / 2 * k1)
        k3 = f(s + ds / 2, T_world + ds / 2 * k2)
        k4 = f(s + ds, T_world + ds * k3)
        T_world = T_world + ds / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    T = exp_se3(magnus_step(samples(linear_family, h, 3), SIXTH))
    assert np.abs(T - T_body).max() < 1e-7
    assert np.abs(T - T_world).max() > 1e-3


def test_max_step_values():
    assert max_step(50) * 1e3 == pytest.approx(25.65, abs=0.01)
    assert max_step(12.5) * 1e3 == pytest.approx(102.54, abs=0.01)
    assert max_step(0.0) == pytest.approx(np.pi)
    with pytest.raises(ValueError):
        max_step(-1.0)


def test_convergence_bound_check():
    report = check_convergence_bound(make_grid(10, 0.2, 3), 50.0)
    assert report.flagged.any() and not report.ok
    np.testing.assert_array_equal(report.flagged, report.widths >= max_step(50.0))
    assert check_convergence_bound(make_grid(10, 3.0, 3), 0.0).ok
    report = check_convergence_bound(make_grid(2, 0.2, 3), 25.0)
    widest = np.argmax(report.widths)
    assert report.widths[widest] * 1e3 == pytest.approx(86.60, abs=0.01)
    assert report.flagged[widest]


def test_rod_twist_linear_part_is_e3():
    xi = rod_twist(np.random.default_rng(0).normal(size=(5, 3)))
    assert np.array_equal(xi[:, 3:], np.tile([0.0, 0.0, 1.0], (5, 1)))
