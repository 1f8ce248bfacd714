import numpy as np
import pytest

from multitw.collocation import Boundary, Mesh, solve_bvp
from multitw.lenard import get_table
from multitw.odes import ODE, XPoly, background_equation, painleve2_equation, string_equation
from multitw.diffpoly import DiffPoly

u = DiffPoly.var


def test_mesh_derivative_and_integral_exact_for_polynomials():
    m = Mesh.uniform(-2.0, 3.0, 1.0, p=8)
    x = m.nodes()
    v = x**5 - 2 * x**2
    assert np.allclose(m.diff(v), 5 * x**4 - 4 * x, atol=1e-10)
    assert np.isclose(m.integrate(v), (3**6 - 2**6) / 6 - 2 * (27 + 8) / 3, rtol=1e-13)
    assert np.isclose(m.integrate(v, -1.0, 1.0), -4 / 3, rtol=1e-13)
    with pytest.raises(ValueError):
        m.integrate(v, -0.5, 1.0)


def test_integrate_from_and_evaluate():
    m = Mesh.uniform(0.0, 4.0, 0.5, p=12)
    x = m.nodes()
    v = np.exp(-x)
    assert np.isclose(m.integrate_from(v, 1.3), np.exp(-1.3) - np.exp(-4.0), rtol=1e-12)
    xs = np.array([0.1, 1.77, 3.99])
    assert np.allclose(m.evaluate(v, xs), np.exp(-xs), rtol=1e-12)


def test_linear_bvp():
    # u'' = -u, u(0) = 0, u(pi/2) = 1  ->  sin x
    m = Mesh.uniform(0.0, np.pi / 2, np.pi / 8, p=12)

    def rhs(x, Y):
        return -Y[0], np.stack([-np.ones_like(x), np.zeros_like(x)])

    Y0 = np.zeros((2,) + m.nodes().shape)
    res = solve_bvp(rhs, 2, m, [Boundary("left", 0, 0.0), Boundary("right", 0, 1.0)], Y0)
    assert res.converged
    assert np.max(np.abs(res.Y[0] - np.sin(res.x))) < 1e-12


def test_nonlinear_bvp_bratu():
    # u'' + exp(u) = 0 on [0, 1], u = 0 at both ends; lower branch u(1/2) = 0.1405...
    m = Mesh.uniform(0.0, 1.0, 0.25, p=14)

    def rhs(x, Y):
        e = np.exp(Y[0])
        return -e, np.stack([-e, np.zeros_like(x)])

    res = solve_bvp(rhs, 2, m, [Boundary("left", 0, 0.0), Boundary("right", 0, 0.0)], np.zeros((2,) + m.nodes().shape))
    # closed form u = -2 log(cosh((x-1/2) th/2) / cosh(th/4)), th = 1.5171645990507543
    th = 1.5171645990507543
    exact = -2 * np.log(np.cosh((res.x - 0.5) * th / 2) / np.cosh(th / 4))
    assert np.max(np.abs(res.Y[0] - exact)) < 1e-12


def test_no_solution_reports_failure():
    m = Mesh.uniform(0.0, 1.0, 0.5, p=6)

    def rhs(x, Y):  # u'' + 4 exp(u) = 0 is past the fold of the Bratu branch
        e = np.exp(Y[0])
        return -4 * e, np.stack([-4 * e, np.zeros_like(x)])

    Y0 = np.zeros((2,) + m.nodes().shape)
    res = solve_bvp(rhs, 2, m, [Boundary("left", 0, 0.0), Boundary("right", 0, 0.0)], Y0, max_iter=30)
    assert not res.converged


def test_shape_mismatch():
    m = Mesh.uniform(0.0, 1.0, 0.5, p=6)
    with pytest.raises(ValueError):
        solve_bvp(lambda x, Y: (Y[0], Y[:1]), 1, m, [Boundary("left", 0, 0.0)], np.zeros((1, 3, 3)))


def test_ode_explicit_form_and_jet_extension():
    ode = ODE(painleve2_equation())
    assert ode.order == 2
    x = np.array([0.3, -1.2])
    Y = np.array([[0.4, 0.9], [0.1, -0.2]])
    F, dF = ode.rhs(x, Y)
    assert np.allclose(F, 2 * Y[0] ** 3 + x * Y[0])
    assert np.allclose(dF[0], 6 * Y[0] ** 2 + x)
    jet = ode.extend_jet(x, Y, 4)
    # differentiate q'' = 2q^3 + x q by hand
    q, q1, q2 = jet[0], jet[1], jet[2]
    q3 = 6 * q**2 * q1 + q + x * q1
    q4 = 12 * q * q1**2 + 6 * q**2 * q2 + 2 * q1 + x * q2
    assert np.allclose(jet[3], q3) and np.allclose(jet[4], q4)


def test_ode_rejects_nonlinear_top():
    with pytest.raises(ValueError):
        ODE(XPoly(u(2) ** 2, DiffPoly()))


def test_string_and_background_equations():
    t = get_table(3)
    eq = string_equation(t, 1, 0.5)
    # u''' + 6 u u' - 2 u' - x u' - 2u + 1
    x = np.array([0.7])
    jet = np.array([[0.2], [0.3], [0.1], [-0.4]])
    want = -0.4 + 6 * 0.2 * 0.3 - 2 * 0.3 - 0.7 * 0.3 - 0.4 + 1.0
    assert np.allclose(eq.eval(x, jet), want)
    bg = background_equation(t, 1)
    assert np.allclose(bg.eval(x, jet[:1]), 0.2 - 0.35)
