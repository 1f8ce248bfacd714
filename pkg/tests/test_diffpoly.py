from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multitw.diffpoly import DiffPoly, monomial_weight
from multitw.errors import JetTooShort, NotExact

u = DiffPoly.var


@st.composite
def polys(draw, max_order=3, max_terms=4):
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        mono = {}
        for _ in range(draw(st.integers(0, 3))):
            j = draw(st.integers(0, max_order))
            mono[j] = mono.get(j, 0) + 1
        key = tuple(sorted(mono.items()))
        terms[key] = Fraction(draw(st.integers(-5, 5)), draw(st.integers(1, 4)))
    return DiffPoly(terms)


def test_zero_coefficients_dropped():
    p = DiffPoly({((0, 1),): 0, ((1, 1),): 2})
    assert len(p) == 1
    assert p.coeff({1: 1}) == 2


def test_text_round_trip():
    p = u(4) + 10 * u(0) * u(2) + 5 * u(1) ** 2 + 10 * u(0) ** 3 - Fraction(1, 3)
    assert DiffPoly.parse(str(p)) == p
    assert DiffPoly.parse("0") == DiffPoly()


def test_pretty():
    assert (u(2) + 3 * u(0) ** 2).pretty() == "u'' + 3*u^2"


@settings(max_examples=60, deadline=None)
@given(polys(), polys())
def test_leibniz(p, q):
    assert (p * q).total_derivative() == p.total_derivative() * q + p * q.total_derivative()


@settings(max_examples=60, deadline=None)
@given(polys())
def test_integrate_inverts_derivative(p):
    p0 = p - p.constant_term()
    assert p0.total_derivative().integrate_exact() == p0


def test_integrate_rejects_non_exact():
    with pytest.raises(NotExact):
        (u(0) * u(2)).integrate_exact()  # u u'' is not a total derivative
    with pytest.raises(NotExact):
        u(0).integrate_exact()


@settings(max_examples=40, deadline=None)
@given(polys(), st.fractions(min_value=-3, max_value=3, max_denominator=5))
def test_shift_is_ring_homomorphism(p, z):
    q = u(0) * u(1) + 2
    assert (p * q).substitute_shift(z) == p.substitute_shift(z) * q.substitute_shift(z)


def test_eval_jet_matches_direct_formula():
    p = u(2) + 3 * u(0) ** 2 - Fraction(1, 2) * u(1) * u(0)
    x = np.linspace(-1, 1, 7)
    jet = np.array([np.sin(x), np.cos(x), -np.sin(x)])
    want = -np.sin(x) + 3 * np.sin(x) ** 2 - 0.5 * np.cos(x) * np.sin(x)
    assert np.allclose(p.eval_jet(jet), want, rtol=0, atol=1e-15)


def test_eval_jet_too_short():
    with pytest.raises(JetTooShort):
        u(3).eval_jet(np.zeros((3, 4)))


def test_derivative_agrees_with_numeric_jet():
    # u = exp(2x): u^(j) = 2^j u
    p = u(1) * u(0) ** 2 + u(3)
    x = np.array([0.1, 0.3])
    jet = np.array([(2.0**j) * np.exp(2 * x) for j in range(5)])
    h = 1e-5
    jp = np.array([(2.0**j) * np.exp(2 * (x + h)) for j in range(5)])
    jm = np.array([(2.0**j) * np.exp(2 * (x - h)) for j in range(5)])
    fd = (p.eval_jet(jp) - p.eval_jet(jm)) / (2 * h)
    assert np.allclose(p.total_derivative().eval_jet(jet), fd, rtol=1e-8)


def test_weight():
    assert monomial_weight(((0, 2), (2, 1))) == 8
    assert (u(2) + 3 * u(0) ** 2).is_homogeneous(4)
