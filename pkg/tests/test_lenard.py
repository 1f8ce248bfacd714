import math
from fractions import Fraction
from pathlib import Path

import pytest
import sympy as sp

from multitw.diffpoly import DiffPoly
from multitw.errors import IndexOutOfRange
from multitw.lenard import (
    LenardTable,
    alpha_direct,
    alpha_row,
    backlund_beta,
    beta,
    build_table,
    get_table,
    tau,
    tau_prefactor,
    verify_shift_identity,
)

GOLDEN = Path(__file__).parent / "golden" / "lenard_k6.txt"
u = DiffPoly.var


# -- independent oracle: undetermined coefficients in sympy -------------------

X = sp.Symbol("x")
U = sp.Function("u")(X)


def _monomials(weight):
    """Monomials prod u^(j)^e with sum e (j+2) = weight, as sympy expressions."""
    out = []

    def rec(rem, jmax, acc):
        if rem == 0:
            out.append(acc)
            return
        for j in range(min(jmax, rem - 2), -1, -1):
            if j + 2 <= rem:
                rec(rem - (j + 2), j, acc * sp.diff(U, X, j))

    rec(weight, weight, sp.Integer(1))
    return out


def _oracle_table(kmax):
    Ls = [sp.Rational(1, 2)]
    for k in range(1, kmax + 1):
        prev = Ls[-1]
        rhs = sp.diff(prev, X, 3) + 4 * U * sp.diff(prev, X) + 2 * sp.diff(U, X) * prev
        monos = _monomials(2 * k)
        cs = sp.symbols(f"c0:{len(monos)}")
        ansatz = sum(c * m for c, m in zip(cs, monos))
        expr = sp.expand(sp.diff(ansatz, X) - rhs)
        derivs = sorted(expr.atoms(sp.Derivative), key=lambda d: -d.derivative_count) + [U]
        syms = sp.symbols(f"d0:{len(derivs)}")
        poly = sp.Poly(expr.subs(dict(zip(derivs, syms))), *syms)
        sol = sp.solve(poly.coeffs(), cs, dict=True)[0]
        Ls.append(sp.expand(ansatz.subs(sol)))
    return Ls


def _to_sympy(p: DiffPoly):
    return sum(
        sp.Rational(c.numerator, c.denominator) * sp.Mul(*[sp.diff(U, X, j) ** e for j, e in m])
        for m, c in p.items()
    )


def test_table_matches_undetermined_coefficient_oracle():
    table = get_table(4)
    for k, want in enumerate(_oracle_table(4)):
        assert sp.expand(_to_sympy(table[k]) - want) == 0, k


def test_low_order_entries():
    t = get_table(3)
    assert t[1] == u(0)
    assert t[2] == u(2) + 3 * u(0) ** 2
    assert t[3] == u(4) + 10 * u(0) * u(2) + 5 * u(1) ** 2 + 10 * u(0) ** 3


def test_golden_text():
    assert build_table(6, cache_dir=None).to_text() == GOLDEN.read_text()
    assert LenardTable.from_text(GOLDEN.read_text()).entries == get_table(6).entries


def test_cache_round_trip(tmp_path):
    a = build_table(3, cache_dir=tmp_path)
    b = build_table(5, cache_dir=tmp_path)
    assert b.entries[:4] == a.entries
    assert (tmp_path / "lenard_table.txt").exists()


@pytest.mark.parametrize("l", range(1, 7))
def test_vanishes_at_zero_and_homogeneous(l):
    p = get_table(6)[l]
    assert p.constant_term() == 0
    assert p.is_homogeneous(2 * l)


@pytest.mark.parametrize("k", range(0, 7))
def test_shift_identity(k):
    for z in [Fraction(1, 3), Fraction(-2, 5), Fraction(7, 2), Fraction(-1), Fraction(5, 11)]:
        ok, res = verify_shift_identity(k, z)
        assert ok, str(res)


def test_alpha_recursion_matches_closed_form():
    for k in range(9):
        assert alpha_row(k) == [alpha_direct(k, j) for j in range(k + 1)]
    assert alpha_row(1) == [Fraction(1, 2), 1]
    assert alpha_row(2) == [Fraction(3, 8), Fraction(3, 2), 1]


@pytest.mark.parametrize("k", range(1, 7))
def test_beta_is_leading_power(k):
    assert get_table(6)[k].coeff({0: k}) == beta(k)


def test_beta_values():
    assert [beta(k) for k in (1, 2, 3, 4)] == [1, 3, 10, 35]


def test_tau_coefficients():
    rat, ex = tau_prefactor(1, 0)
    assert rat == 1 and ex == Fraction(1, 3)
    # tau_0 at the Backlund argument: tau_0(beta s) = 2 s for k = 1
    assert math.isclose(tau(1, 0)(backlund_beta(1) * 0.7), 1.4, rel_tol=1e-14)
    for k in range(1, 5):
        for j in range(k):
            _, ex = tau_prefactor(k, j)
            assert ex == Fraction(2 * k - 4 * j - 1, 2 * k + 1)


def test_index_errors():
    with pytest.raises(IndexOutOfRange):
        alpha_direct(2, 3)
    with pytest.raises(IndexOutOfRange):
        get_table(2).string_lhs(2)
    with pytest.raises(IndexOutOfRange):
        get_table(-1)


def test_string_displays():
    t = get_table(4)
    assert t.string_lhs(1) == u(3) + 6 * u(0) * u(1)
    k2 = t.string_lhs(2)
    assert [k2.coeff(m) for m in ({0: 1, 3: 1}, {1: 1, 2: 1}, {0: 2, 1: 1})] == [10, 20, 30]
    k3 = t.string_lhs(3)
    assert k3.coeff({0: 3, 1: 1}) == 140
    assert k3.coeff({2: 1, 3: 1}) == 70 and k3.coeff({1: 1, 4: 1}) == 42 and k3.coeff({0: 1, 5: 1}) == 14
    s = Fraction(3, 7)
    assert t.string_lhs(2, s) == t.prime(3) - 4 * s * t.prime(2)
