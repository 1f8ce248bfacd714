"""Exact differential polynomials in one dependent variable.

A :class:`DiffPoly` is a polynomial with rational coefficients in the jet
variables ``u, u', u'', ...`` of a single function ``u(x)``.  The ring is
closed under the total derivative ``d/dx`` and carries a grading where
``u^(j)`` has weight ``j + 2``; the Lenard operators are homogeneous for it.

Monomials are stored as sorted tuples of ``(order, exponent)`` pairs so that
equality of polynomials is equality of their term maps.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping, Union

import numpy as np

from .errors import JetTooShort, NotExact

Rational = Fraction
Monomial = tuple  # tuple[tuple[int, int], ...], sorted by derivative order
Scalar = Union[int, Fraction]

ONE: Monomial = ()


def monomial_weight(m: Monomial) -> int:
    return sum(e * (j + 2) for j, e in m)


def monomial_order(m: Monomial) -> int:
    """Highest derivative order present, ``-1`` for the constant monomial."""
    return m[-1][0] if m else -1


def monomial_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def sort_key(m: Monomial):
    # graded lexicographic: weight first, then the expanded list of orders
    expanded = tuple(j for j, e in m for _ in range(e))
    return (monomial_weight(m), len(expanded), expanded)


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    out = dict(a)
    for j, e in b:
        out[j] = out.get(j, 0) + e
    return tuple(sorted(out.items()))


def _mono_from_dict(d: Mapping[int, int]) -> Monomial:
    return tuple(sorted((j, e) for j, e in d.items() if e))


class DiffPoly:
    """Immutable element of Q[u, u', u'', ...]."""

    __slots__ = ("_terms", "_hash", "_plan")

    def __init__(self, terms: Mapping[Monomial, Scalar] | None = None):
        clean = {}
        for m, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                clean[m] = c
        self._terms = clean
        self._hash = None
        self._plan = None

    # -- construction -------------------------------------------------
    @classmethod
    def const(cls, c: Scalar) -> "DiffPoly":
        return cls({ONE: c})

    @classmethod
    def var(cls, order: int = 0, power: int = 1) -> "DiffPoly":
        """The monomial ``(u^(order))**power``."""
        if order < 0 or power < 0:
            raise ValueError("order and power must be non-negative")
        return cls({((order, power),) if power else ONE: 1})

    # -- basic protocol -------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        """Terms in canonical (graded lexicographic) order."""
        return sorted(self._terms.items(), key=lambda kv: sort_key(kv[0]))

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = DiffPoly.const(other)
        if not isinstance(other, DiffPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def coeff(self, monomial: Monomial | Mapping[int, int]) -> Fraction:
        if isinstance(monomial, Mapping):
            monomial = _mono_from_dict(monomial)
        return self._terms.get(tuple(monomial), Fraction(0))

    # -- ring operations ------------------------------------------------
    @staticmethod
    def _lift(x) -> "DiffPoly":
        if isinstance(x, DiffPoly):
            return x
        if isinstance(x, (int, Fraction)):
            return DiffPoly.const(x)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out.get(m, 0) + c
        return DiffPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return DiffPoly({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, DiffPoly):
            return NotImplemented
        out: dict = {}
        for ma, ca in self._terms.items():
            for mb, cb in other._terms.items():
                m = _mono_mul(ma, mb)
                out[m] = out.get(m, 0) + ca * cb
        return DiffPoly(out)

    __rmul__ = __mul__

    def scale(self, c: Scalar) -> "DiffPoly":
        c = Fraction(c)
        return DiffPoly({m: c * v for m, v in self._terms.items()})

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers")
        out = DiffPoly.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- gradings ---------------------------------------------------------
    def max_order(self) -> int:
        return max((monomial_order(m) for m in self._terms), default=-1)

    def weights(self) -> set:
        return {monomial_weight(m) for m in self._terms}

    def is_homogeneous(self, weight: int | None = None) -> bool:
        w = self.weights()
        if weight is None:
            return len(w) <= 1
        return w <= {weight}

    def constant_term(self) -> Fraction:
        return self._terms.get(ONE, Fraction(0))

    # -- calculus -----------------------------------------------------------
    def partial(self, order: int) -> "DiffPoly":
        """Partial derivative with respect to the jet variable ``u^(order)``."""
        out: dict = {}
        for m, c in self._terms.items():
            d = dict(m)
            e = d.get(order, 0)
            if not e:
                continue
            d[order] = e - 1
            key = _mono_from_dict(d)
            out[key] = out.get(key, 0) + c * e
        return DiffPoly(out)

    def total_derivative(self) -> "DiffPoly":
        """``d/dx`` acting through the chain rule, ``d u^(j) = u^(j+1)``."""
        out: dict = {}
        for m, c in self._terms.items():
            d = dict(m)
            for j, e in m:
                nd = dict(d)
                nd[j] -= 1
                nd[j + 1] = nd.get(j + 1, 0) + 1
                key = _mono_from_dict(nd)
                out[key] = out.get(key, 0) + c * e
        return DiffPoly(out)

    def d(self, times: int = 1) -> "DiffPoly":
        p = self
        for _ in range(times):
            p = p.total_derivative()
        return p

    def integrate_exact(self) -> "DiffPoly":
        """Return ``q`` with ``d q = self`` and no constant term.

        Peels the terms of highest derivative order one at a time: a term
        ``c M (u^(m-1))^e u^(m)`` with ``M`` of lower order is the leading
        part of ``d(c M (u^(m-1))^(e+1) / (e+1))``.  Raises :class:`NotExact`
        when the remainder cannot be reduced.
        """
        rem = dict(self._terms)
        acc: dict = {}
        while rem:
            top = max(monomial_order(m) for m in rem)
            if top <= 0:
                raise NotExact(f"remainder {DiffPoly(rem)} has no antiderivative")
            # highest power of u^(top-1) first keeps the peel order deterministic
            cands = [m for m in rem if monomial_order(m) == top]
            m = max(cands, key=lambda mm: (dict(mm).get(top - 1, 0), sort_key(mm)))
            c = rem[m]
            dm = dict(m)
            if dm[top] != 1:
                raise NotExact(f"term {DiffPoly({m: c})} is nonlinear in its top derivative")
            e = dm.get(top - 1, 0)
            del dm[top]
            dm[top - 1] = e + 1
            anti_m = _mono_from_dict(dm)
            anti = DiffPoly({anti_m: c / (e + 1)})
            acc[anti_m] = acc.get(anti_m, 0) + c / (e + 1)
            for mm, cc in anti.total_derivative()._terms.items():
                v = rem.get(mm, 0) - cc
                if v:
                    rem[mm] = v
                else:
                    rem.pop(mm, None)
        return DiffPoly(acc)

    def substitute_shift(self, z: Scalar) -> "DiffPoly":
        """The polynomial ``p[u + z]`` for a constant ``z`` (only ``u`` itself moves)."""
        z = Fraction(z)
        out: dict = {}
        for m, c in self._terms.items():
            d = dict(m)
            e0 = d.pop(0, 0)
            rest = _mono_from_dict(d)
            # binomial expansion of (u + z)^e0
            binom = 1
            for i in range(e0 + 1):
                key = _mono_mul(rest, ((0, e0 - i),) if e0 - i else ONE)
                out[key] = out.get(key, 0) + c * binom * z**i
                binom = binom * (e0 - i) // (i + 1)
        return DiffPoly(out)

    # -- numerics -------------------------------------------------------------
    def eval_jet(self, jet) -> np.ndarray | float:
        """Evaluate on a jet ``(u, u', ..., u^(m))``.

        ``jet`` may be 1-D (one point) or 2-D with shape ``(m+1, npts)``.
        Terms are summed in canonical order so results are reproducible.
        """
        arr = np.asarray(jet, dtype=float)
        need = self.max_order() + 1
        if arr.shape[0] < need:
            raise JetTooShort(f"jet has {arr.shape[0]} entries, polynomial needs {need}")
        if self._plan is None:
            self._plan = [(float(c), m) for m, c in self.items()]
        total = np.zeros(arr.shape[1:]) if arr.ndim > 1 else 0.0
        for c, m in self._plan:
            val = c
            for j, e in m:
                val = val * (arr[j] if e == 1 else arr[j] ** e)
            total = total + val
        return total

    # -- text form --------------------------------------------------------------
    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for m, c in self.items():
            factors = " ".join(f"u^({j})^{e}" for j, e in m)
            parts.append(f"{c} * {factors}" if factors else f"{c}")
        return " + ".join(parts)

    def __repr__(self):
        return f"DiffPoly({self})"

    def pretty(self) -> str:
        """Human notation: ``u'' + 3*u^2``."""
        if not self._terms:
            return "0"
        out = []
        for m, c in self.items():
            fs = []
            for j, e in m:
                name = "u" + ("'" * j if j <= 3 else f"^({j})")
                if j > 3 and e > 1:
                    name = f"({name})"
                fs.append(name + (f"^{e}" if e > 1 else ""))
            body = "*".join(fs)
            if not body:
                out.append(str(c))
            elif c == 1:
                out.append(body)
            elif c == -1:
                out.append("-" + body)
            else:
                out.append(f"{c}*{body}")
        return " + ".join(out).replace("+ -", "- ")

    def to_json(self) -> list:
        return [[str(c), [[j, e] for j, e in m]] for m, c in self.items()]

    @classmethod
    def from_json(cls, data: Iterable) -> "DiffPoly":
        return cls({tuple((int(j), int(e)) for j, e in m): Fraction(c) for c, m in data})

    _TERM = re.compile(r"^\s*(-?\d+(?:/\d+)?)\s*(?:\*\s*(.*))?$")
    _FACT = re.compile(r"u\^\((\d+)\)\^(\d+)")

    @classmethod
    def parse(cls, text: str) -> "DiffPoly":
        """Inverse of ``str``."""
        text = text.strip()
        if text == "0":
            return cls()
        out: dict = {}
        for chunk in text.split(" + "):
            mt = cls._TERM.match(chunk)
            if mt is None:
                raise ValueError(f"cannot parse term {chunk!r}")
            c = Fraction(mt.group(1))
            m = _mono_from_dict({int(j): int(e) for j, e in cls._FACT.findall(mt.group(2) or "")})
            out[m] = out.get(m, 0) + c
        return cls(out)


u = DiffPoly.var
