"""Scalar ODEs ``P[u] + x Q[u] = 0`` with differential-polynomial coefficients.

Every equation solved in the package has this shape: the background
equation ``L_k[u] - x/2 = 0``, the string equation of the XXXIV hierarchy and
Painleve II.  The shape is closed under ``d/dx`` because
``d(P + xQ) = (dP + Q) + x dQ``, which is how jets are extended beyond the
order of the equation without numerical differentiation.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .diffpoly import DiffPoly, u
from .lenard import LenardTable


@dataclass(frozen=True)
class XPoly:
    """``P + x Q`` with ``P, Q`` differential polynomials."""

    P: DiffPoly
    Q: DiffPoly = field(default_factory=DiffPoly)

    def derivative(self) -> "XPoly":
        return XPoly(self.P.total_derivative() + self.Q, self.Q.total_derivative())

    def partial(self, j: int) -> "XPoly":
        return XPoly(self.P.partial(j), self.Q.partial(j))

    def max_order(self) -> int:
        return max(self.P.max_order(), self.Q.max_order())

    def eval(self, x, jet) -> np.ndarray:
        out = self.P.eval_jet(jet)
        if self.Q:
            out = out + np.asarray(x) * self.Q.eval_jet(jet)
        return out


class ODE:
    """Explicit form ``u^(m) = F(x, u, ..., u^(m-1))`` of ``E = 0``.

    ``E`` must be linear in its highest derivative with a constant coefficient,
    and that derivative must not appear in ``Q``.
    """

    def __init__(self, eq: XPoly):
        m = eq.max_order()
        if m < 1:
            raise ValueError("equation has no derivatives")
        lead = eq.partial(m)
        if lead.Q or lead.P.max_order() >= 0:
            raise ValueError("equation must be linear in u^(m) with a constant coefficient")
        self.order = m
        self.eq = eq
        self.lead = float(lead.P.constant_term())
        self._rest = XPoly(eq.P - u(m).scale(lead.P.constant_term()), eq.Q)
        self._dparts = [self._rest.partial(j) for j in range(m)]
        self._derivs = [eq]

    def rhs(self, x, Y):
        """``(F, dF)`` for :func:`multitw.collocation.solve_bvp`."""
        F = -self._rest.eval(x, Y) / self.lead
        dF = np.empty((self.order,) + np.shape(F))
        for j, part in enumerate(self._dparts):
            dF[j] = -part.eval(x, Y) / self.lead
        return F, dF

    def residual(self, x, jet) -> np.ndarray:
        return self.eq.eval(x, jet)

    def _derivative(self, n: int) -> XPoly:
        while len(self._derivs) <= n:
            self._derivs.append(self._derivs[-1].derivative())
        return self._derivs[n]

    def extend_jet(self, x, Y, depth: int) -> np.ndarray:
        """Jets ``u, ..., u^(depth)`` from ``Y = (u, ..., u^(m-1))`` using the ODE.

        The ``n``-th derivative of the equation is linear in ``u^(m+n)`` with the
        same constant coefficient, so each new entry is one polynomial evaluation.
        """
        Y = np.asarray(Y, dtype=float)
        m = self.order
        if depth < m:
            return Y[: depth + 1].copy()
        jet = np.concatenate([Y, np.zeros((depth + 1 - m,) + Y.shape[1:])])
        for n in range(depth - m + 1):
            eqn = self._derivative(n)
            top = m + n
            jet[top] = 0.0
            jet[top] = -eqn.eval(x, jet[: top + 1]) / self.lead
        return jet


def background_equation(table: LenardTable, k: int) -> XPoly:
    """``L_k[u] - x/2``."""
    return XPoly(table[k], DiffPoly.const(Fraction(-1, 2)))


def string_equation(table: LenardTable, k: int, s) -> XPoly:
    """``L'_{k+1}[u] - 4 s L'_k[u] - x u' - 2u + 2s`` for a float or rational ``s``."""
    s = Fraction(s)
    P = table.string_lhs(k, s) - 2 * u(0) + 2 * s
    return XPoly(P, -u(1))


def painleve2_equation() -> XPoly:
    """``q'' - 2 q^3 - x q`` (Painleve II, alpha = 0)."""
    return XPoly(u(2) - 2 * u(0, 3), -u(0))
