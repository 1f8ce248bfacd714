import math

import mpmath
import numpy as np
import pytest

from multitw.errors import NonIntegrableWeight, ValidationError
from multitw.finite_n import (
    Potential,
    ScalingMap,
    build_lax_matrices_and_check,
    direct_quadrature_oracle,
    gap_probability_finite_n,
    gue_sample_maxeig,
    stieltjes_recurrence,
    verify_infinite_wall_string,
    verify_recurrence_identities,
)
from multitw.finite_n.identities import jacobi_matrix, matrix_poly
from multitw.finite_n.sampling import max_eigenvalue_sturm
from multitw.finite_n.stieltjes import gap_ratio_finite_n, infinity_wall

GAUSS = Potential.gaussian(1.0)


def test_potential_basics():
    q = Potential.quartic(-1.0, 1.0, 2.0)
    x = np.array([-1.3, 0.2, 2.0])
    assert np.allclose(q.V(x), -(x**2) / 2 + x**4 / 4)
    h = 1e-6
    assert np.allclose(q.dV(x), (q.V(x + h) - q.V(x - h)) / (2 * h), atol=1e-8)
    assert q.degree == 4 and not q.is_gaussian and GAUSS.is_gaussian
    with pytest.raises(ValidationError):
        Potential((0.0, 0.0))
    with pytest.raises(ValidationError):
        Potential((0.0, 2.0), alpha_hat=0.0)


def test_integrability():
    cubic = Potential((0.0, 0.0, -1.0))  # V = -l^3/3 decays left only
    cubic.check_integrable(y_infinite=False)
    with pytest.raises(NonIntegrableWeight):
        cubic.check_integrable(y_infinite=True)
    with pytest.raises(NonIntegrableWeight):
        gap_probability_finite_n(cubic, 3, 1.0)
    with pytest.raises(NonIntegrableWeight):
        stieltjes_recurrence(Potential((0.0, -2.0)), 1.0, 5)
    lp, p = gap_ratio_finite_n(cubic, 3, 0.5, 1.0)
    assert lp < 0 and 0 < p < 1


def test_hermite_limit():
    sys = stieltjes_recurrence(GAUSS, 12.0, 30)
    h = [float(v) for v in sys.h]
    r = [float(v) for v in sys.r]
    for n in range(31):
        assert h[n] == pytest.approx(math.factorial(n) * math.sqrt(math.pi) / 2**n, rel=1e-10)
    for n in range(1, 31):
        assert r[n] == pytest.approx(n / 2, rel=1e-10)


def test_hermite_limit_scales_with_alpha():
    sys = stieltjes_recurrence(GAUSS.with_alpha(2.5), 12.0, 12)
    r = sys.as_float("r")
    assert np.allclose(r[1:], np.arange(1, 13) / 5.0, rtol=1e-10)


def test_positivity_orthonormality_and_znorm():
    sys = stieltjes_recurrence(GAUSS, 0.3, 25)
    assert all(v > 0 for v in sys.h) and all(v > 0 for v in sys.r[1:])
    assert sys.gram_error < 10 ** (1 - sys.precision_bits * math.log10(2) / 2)
    with mpmath.workprec(sys.precision_bits):
        assert abs(sys.log_z(20) - sys.log_z_product(20)) < mpmath.mpf(2) ** (-90)


def test_first_moment_against_erf():
    # h_0 = int_{-inf}^y exp(-l^2) = sqrt(pi)/2 (1 + erf y)
    for y in (-1.0, 0.4, 2.0):
        sys = stieltjes_recurrence(GAUSS, y, 2)
        assert float(sys.h[0]) == pytest.approx(math.sqrt(math.pi) / 2 * (1 + math.erf(y)), rel=1e-14)


@pytest.mark.parametrize("y", [-1.5, 0.0, 0.5, 1.0, 2.0, 3.0])
def test_single_eigenvalue_is_erf(y):
    lp, p = gap_probability_finite_n(GAUSS, 1, y)
    assert p == pytest.approx(0.5 * (1 + math.erf(y)), abs=1e-12)
    assert direct_quadrature_oracle(GAUSS, 1, y) == pytest.approx(0.5 * (1 + math.erf(y)), abs=1e-12)


@pytest.mark.parametrize("N,y", [(2, 0.5), (2, -0.3), (3, 0.5), (3, 1.7)])
def test_gap_vs_direct_quadrature(N, y):
    assert gap_probability_finite_n(GAUSS, N, y)[1] == pytest.approx(direct_quadrature_oracle(GAUSS, N, y), abs=1e-10)


def test_quartic_gap_vs_direct_quadrature():
    q = Potential.quartic(-1.0, 1.0, 1.0)
    assert gap_probability_finite_n(q, 2, 0.4)[1] == pytest.approx(direct_quadrature_oracle(q, 2, 0.4), abs=1e-10)


def test_direct_quadrature_monotone_and_bounded():
    vals = [direct_quadrature_oracle(GAUSS, 2, y) for y in np.linspace(-1, 2.5, 8)]
    assert np.all(np.diff(vals) > 0) and 0 < vals[0] and vals[-1] <= 1
    with pytest.raises(ValidationError):
        direct_quadrature_oracle(GAUSS, 4, 0.0)


def test_gap_monotone_in_y():
    assert gap_probability_finite_n(GAUSS, 5, 0.5)[1] < gap_probability_finite_n(GAUSS, 5, 1.5)[1]
    assert gap_probability_finite_n(GAUSS, 5, infinity_wall(GAUSS, 5) + 1) == (0.0, 1.0)


@pytest.mark.parametrize("y", [0.5, 1.0, 2.0])
def test_recurrence_identities(y):
    rep = verify_recurrence_identities(stieltjes_recurrence(GAUSS, y, 30))
    for key in ("string1", "string2", "sn", "Pid", "Pid2"):
        assert rep.residuals[key] < 1e-10, key
    for key in ("snG", "rnG", "Toda"):
        assert rep.residuals[key] < 1e-6
        assert rep.orders[key] == pytest.approx(4.0, abs=0.25)
    assert rep.residuals["yal"] < 1e-7
    assert rep.residuals["rnGSN"] < 1e-9
    assert rep.residuals["rnGSN_flow"] < 1e-7


def test_recurrence_identities_nonunit_alpha():
    rep = verify_recurrence_identities(stieltjes_recurrence(GAUSS.with_alpha(0.7), 1.2, 20))
    assert rep.residuals["string1"] < 1e-10 and rep.residuals["string2"] < 1e-10
    assert rep.residuals["Pid2"] < 1e-10


def test_recurrence_identities_need_gaussian():
    with pytest.raises(ValidationError):
        verify_recurrence_identities(stieltjes_recurrence(Potential.quartic(), 1.0, 10))


@pytest.mark.parametrize("pot", [GAUSS, Potential.quartic(-1.0, 1.0, 1.0), Potential((0.5, 1.0, 0.3, 0.8), 1.3)])
def test_lax_relations(pot):
    rep = build_lax_matrices_and_check(stieltjes_recurrence(pot, 1.0, 40))
    for key in ("stringeqn", "flow", "Hexp", "Hdef", "BA=1", "Aid", "A_strict_lower", "P_antisym", "H_antisym"):
        assert rep.residuals[key] < 1e-9, key
    if pot.is_gaussian:
        assert rep.residuals["flow_pm2"] < 1e-12


def test_infinite_wall_string_equations():
    for pot in (GAUSS, GAUSS.with_alpha(3.0), Potential.quartic(1.0, 1.0, 1.0)):
        rep = verify_infinite_wall_string(pot, 25)
        assert rep.residuals["Zinfstr2_off"] < 1e-9
        assert rep.residuals["Zinfstr2_diag"] < 1e-9


def test_matrix_poly_and_jacobi():
    sys = stieltjes_recurrence(GAUSS, 1.0, 8)
    B = jacobi_matrix(sys)
    assert np.allclose(B, B.T)
    assert np.allclose(matrix_poly([1.0, 0.0, 2.0], B), np.eye(9) + 2 * B @ B)


def test_sturm_bisection_matches_eigvalsh():
    rng = np.random.default_rng(3)
    d = rng.normal(size=(20, 7))
    e = rng.normal(size=(20, 6))
    got = max_eigenvalue_sturm(d, e)
    for i in range(20):
        M = np.diag(d[i]) + np.diag(e[i], 1) + np.diag(e[i], -1)
        assert got[i] == pytest.approx(np.linalg.eigvalsh(M)[-1], abs=1e-12)


def test_sampler_deterministic_and_mergeable():
    a = gue_sample_maxeig(6, 5000, seed=11, shard_size=1000)
    b = gue_sample_maxeig(6, 5000, seed=11, shard_size=1000)
    assert np.array_equal(a.samples, b.samples)
    c = gue_sample_maxeig(6, 5000, seed=12, shard_size=1000)
    assert not np.array_equal(a.samples, c.samples)
    m1, m2 = a.merge(c), c.merge(a)
    assert np.array_equal(m1.samples, m2.samples) and m1.n == 10000


def test_sampler_single_eigenvalue_is_erf():
    emp = gue_sample_maxeig(1, 200000, seed=5)
    ys = np.linspace(-1.5, 1.5, 7)
    p = 0.5 * (1 + np.array([math.erf(y) for y in ys]))
    assert np.all(np.abs(emp.cdf(ys) - p) < 4 * emp.standard_error(p) + 1e-12)


def test_sampler_matches_op_cdf_small_n():
    emp = gue_sample_maxeig(4, 40000, seed=2, alpha_hat=0.8)
    pot = GAUSS.with_alpha(0.8)
    for y in (1.0, 1.8, 2.6):
        p = gap_probability_finite_n(pot, 4, y)[1]
        assert abs(emp.cdf(y) - p) < 4 * emp.standard_error(p)


def test_sampler_validation():
    with pytest.raises(ValidationError):
        gue_sample_maxeig(0, 10, 1)
    with pytest.raises(ValidationError):
        gue_sample_maxeig(501, 10, 1)


def test_scaling_map():
    sm = ScalingMap(50, 1.0)
    assert sm.y_c == pytest.approx(10.0)
    assert sm.t_of_y(sm.y_of_t(-1.7)) == pytest.approx(-1.7)
    s = sm.s_of_t(0.9)
    assert sm.y_of_s(s) == pytest.approx(sm.y_of_t(0.9))
    with pytest.raises(ValidationError):
        ScalingMap(0)
