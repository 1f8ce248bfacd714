import math

import mpmath
import numpy as np
import pytest

from multitw import airy
from multitw.errors import NodeCountTooSmall


def _mp_ai(x):
    with mpmath.workdps(40):
        return float(mpmath.airyai(x)), float(mpmath.airyai(x, derivative=1))


@pytest.mark.parametrize("x", [-15.0, -9.9, -7.3, -2.0, -0.3, 0.0, 0.7, 3.3, 9.7, 9.8, 12.5, 20.0])
def test_airy_against_mpmath(x):
    ai, aip, err = airy.airy_arrays(np.array([x]))
    ref, refp = _mp_ai(x)
    assert abs(ai[0] - ref) <= max(err[0], 1e-15 * abs(ref)) + 1e-300
    assert abs(aip[0] - refp) <= max(4 * err[0], 1e-14 * abs(refp)) + 1e-300
    assert abs(ai[0] - ref) < 2e-15 * max(1.0, abs(ref)) or abs(ai[0] - ref) < 1e-14 * abs(ref)


def test_error_estimate_is_honest_on_dense_grid():
    xs = np.linspace(-15, 10, 501)
    ai, aip, err = airy.airy_arrays(xs)
    ref = np.array([_mp_ai(x)[0] for x in xs])
    assert np.all(np.abs(ai - ref) <= err + 1e-300)


def test_wronskian_with_bi():
    # Ai Bi' - Ai' Bi = 1/pi, with Bi from mpmath
    for x in (-4.0, -0.5, 1.0, 3.0):
        a = airy.airy_ai(x)
        bi = float(mpmath.airybi(x))
        bip = float(mpmath.airybi(x, derivative=1))
        assert math.isclose(a.ai * bip - a.ai_prime * bi, 1 / math.pi, rel_tol=1e-13)


def test_switch_point_in_range():
    assert 4.0 <= airy.X_SWITCH <= 14.0
    assert airy.series_error_estimate(airy.X_SWITCH) == pytest.approx(
        airy.asymptotic_error_estimate(airy.X_SWITCH), rel=1.0
    )


def test_double_double_primitives():
    hi, lo = airy.dd_add((1.0, 0.0), (1e-17, 0.0))
    assert hi == 1.0 and lo == 1e-17
    hi, lo = airy.dd_mul((1.0 + 2**-30, 0.0), (1.0 - 2**-30, 0.0))
    assert hi + lo == 1.0 - 2**-60 or (hi, lo) == (1.0, -(2.0**-60))


def test_kernel_diagonal_limit():
    x = 0.37
    a = airy.airy_ai(x)
    diag = a.ai_prime**2 - x * a.ai**2
    assert airy.airy_kernel(x, x) == pytest.approx(diag, rel=1e-13)
    assert airy.airy_kernel(x, x + 1e-7) == pytest.approx(diag, rel=1e-6)


# F2 values fixed by node doubling of the determinant itself
F2_FROZEN = {-2.0: 0.41322414250512146, -1.0: 0.807214241999285, 0.0: 0.9693728283552627}


@pytest.mark.parametrize("s", sorted(F2_FROZEN))
def test_fredholm_frozen_values(s):
    r = airy.fredholm_det_airy(s, 60)
    assert r.f2 == pytest.approx(F2_FROZEN[s], abs=1e-14)
    assert r.self_error < 1e-13


def test_fredholm_limits_and_monotone():
    vals = [airy.fredholm_det_airy(s, 40, False).f2 for s in np.linspace(-8, 4, 25)]
    assert np.all(np.diff(vals) > 0)
    assert vals[0] < 1e-8 and vals[-1] > 1 - 1e-7


def test_too_few_nodes():
    with pytest.raises(NodeCountTooSmall):
        airy.fredholm_det_airy(0.0, 4)


def test_moments_oracle_values():
    mean, var = airy.tw_moments_oracle()
    # in-repo derivation; stable to the quadrature grid
    mean2, var2 = airy.tw_moments_oracle(step=0.025)
    assert abs(mean - mean2) < 1e-6 and abs(var - var2) < 1e-6
    assert mean == pytest.approx(-1.7710868, abs=1e-5)
    assert var == pytest.approx(0.8131947, abs=1e-5)
