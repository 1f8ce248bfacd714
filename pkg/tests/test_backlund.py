import numpy as np
import pytest

from multitw import backlund as BK
from multitw import painleve as P
from multitw.errors import ValidationError
from multitw.lenard import backlund_beta, tau


@pytest.fixture(scope="module")
def hm():
    return P.hastings_mcleod()


def _solve(k, svals):
    spec = P.HierarchySpec.make(k)
    bg = P.background_solution(spec, P.make_mesh(spec, max(max(svals), 1.0)))
    return spec, P.continuation(spec, svals, bg)


@pytest.fixture(scope="module")
def k1_chains():
    spec, sols = _solve(1, [-1.0, 0.0, 1.0])
    return [(sol, BK.chain_from_solution(sol, spec.lenard)) for sol in sols]


def test_k1_chain_residuals(k1_chains):
    for sol, ch in k1_chains:
        assert ch.imaginary
        assert 0.2 < ch.kept_fraction <= 1.0
        assert ch.residual_schrodinger < 1e-9
        assert ch.residual_weqn < 1e-8
        assert ch.residual_first_integral < 1e-12
        assert ch.residual_u_relation < 1e-9


def test_k1_shifted_w_is_hm_log_derivative(k1_chains, hm):
    xs = np.linspace(-3, 5, 17)
    ref = BK.hm_logderivative(hm, xs)
    for sol, ch in k1_chains:
        assert np.max(np.abs(BK.shifted_w(ch, sol, xs) - ref)) < 1e-8


def test_k3_chain():
    spec, sols = _solve(3, [0.0, 0.5])
    for sol in sols:
        ch = BK.chain_from_solution(sol, spec.lenard)
        assert ch.residual_schrodinger < 1e-6
        assert ch.residual_weqn < 1e-6


def test_tau_profile():
    assert BK.tau_profile(1, 0.3) == [pytest.approx(2 ** (1 / 3) * 0.3)]
    prof = BK.tau_profile(3, 0.5)
    assert len(prof) == 3
    assert prof[0] == pytest.approx(tau(3, 0)(0.5))
    with pytest.raises(ValidationError):
        BK.tau_profile(0, 1.0)
    assert tau(1, 0)(backlund_beta(1) * 0.25) == pytest.approx(0.5)


def test_leibniz_quotient():
    # K = exp(x^2): W = -K'/(2K) = -x, W' = -1, W'' = 0
    x = np.linspace(-1, 1, 5)
    e = np.exp(x**2)
    K = np.array([e, 2 * x * e, (2 + 4 * x**2) * e, (12 * x + 8 * x**3) * e])
    W = BK._leibniz_quotient(K, 2)
    assert np.allclose(W[0], -x) and np.allclose(W[1], -1) and np.allclose(W[2], 0, atol=1e-12)
