"""Spectral-element collocation Newton solver for nonlinear ODE boundary-value problems.

The scalar equation ``u^(m) = F(x, u, u', ..., u^(m-1))`` is written as a
first-order system ``Y = (u, u', ..., u^(m-1))``.  Each element carries the
system on ``p + 1`` Chebyshev-Lobatto points; the ODE is collocated at the
``p`` first-kind Chebyshev points of the element (rectangular collocation),
and the missing ``m`` rows per element are continuity conditions at element
interfaces plus the boundary conditions.  Only first-derivative matrices are
ever formed, which keeps round-off growth at ``O(p^2)`` even for the
seventh-order equations of the hierarchy.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .errors import NoConvergence

log = logging.getLogger(__name__)


def _lobatto(p: int) -> np.ndarray:
    return -np.cos(np.pi * np.arange(p + 1) / p)


def _cheb_diff(p: int) -> np.ndarray:
    """First-derivative matrix on ascending Lobatto points."""
    x = _lobatto(p)
    c = np.ones(p + 1)
    c[0] = c[-1] = 2.0
    c *= (-1.0) ** np.arange(p + 1)
    dx = x[:, None] - x[None, :]
    D = np.outer(c, 1.0 / c) / (dx + np.eye(p + 1))
    D -= np.diag(D.sum(axis=1))
    return D


def _bary_weights(p: int) -> np.ndarray:
    w = (-1.0) ** np.arange(p + 1)
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


def interp_matrix(p: int, t: np.ndarray) -> np.ndarray:
    """Barycentric interpolation from the p+1 Lobatto points to targets ``t`` in [-1, 1]."""
    x = _lobatto(p)
    w = _bary_weights(p)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    diff = t[:, None] - x[None, :]
    exact = np.isclose(diff, 0.0, atol=1e-15)
    diff[exact] = 1.0
    M = w[None, :] / diff
    M /= M.sum(axis=1, keepdims=True)
    rows = np.any(exact, axis=1)
    if rows.any():
        M[rows] = exact[rows].astype(float)
    return M


def _clenshaw_curtis(p: int) -> np.ndarray:
    """Clenshaw-Curtis weights on the ascending Lobatto points of [-1, 1]."""
    theta = np.pi * np.arange(p + 1) / p
    w = np.zeros(p + 1)
    v = np.ones(p - 1)
    if p % 2 == 0:
        w[0] = w[p] = 1.0 / (p**2 - 1)
        for k in range(1, p // 2):
            v -= 2.0 * np.cos(2 * k * theta[1:-1]) / (4 * k**2 - 1)
        v -= np.cos(p * theta[1:-1]) / (p**2 - 1)
    else:
        w[0] = w[p] = 1.0 / p**2
        for k in range(1, (p - 1) // 2 + 1):
            v -= 2.0 * np.cos(2 * k * theta[1:-1]) / (4 * k**2 - 1)
    w[1:-1] = 2.0 * v / p
    return w[::-1]


@dataclass
class Mesh:
    """Element partition with ``p + 1`` Lobatto nodes per element."""

    breaks: np.ndarray
    p: int = 20
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.breaks = np.asarray(self.breaks, dtype=float)
        if np.any(np.diff(self.breaks) <= 0):
            raise ValueError("mesh breaks must be strictly increasing")
        if self.p < 4:
            raise ValueError("need at least degree 4 per element")

    @classmethod
    def uniform(cls, a: float, b: float, h: float, p: int = 20, anchors: Sequence[float] = ()):
        """Elements of length about ``h`` whose breaks include every anchor point."""
        pts = sorted({a, b, *[c for c in anchors if a < c < b]})
        breaks = [a]
        for lo, hi in zip(pts[:-1], pts[1:]):
            n = max(1, int(np.ceil((hi - lo) / h)))
            breaks.extend(np.linspace(lo, hi, n + 1)[1:])
        return cls(np.array(breaks), p)

    @property
    def n_elem(self) -> int:
        return len(self.breaks) - 1

    @property
    def a(self) -> float:
        return float(self.breaks[0])

    @property
    def b(self) -> float:
        return float(self.breaks[-1])

    @property
    def h(self) -> np.ndarray:
        return np.diff(self.breaks)

    def _ref(self, name):
        if name not in self._cache:
            p = self.p
            if name == "D":
                val = _cheb_diff(p)
            elif name == "t":
                val = _lobatto(p)
            elif name == "tc":
                val = -np.cos(np.pi * (2 * np.arange(p) + 1) / (2 * p))
            elif name == "P":
                val = interp_matrix(p, self._ref("tc"))
            elif name == "w":
                val = _clenshaw_curtis(p)
            else:
                raise KeyError(name)
            self._cache[name] = val
        return self._cache[name]

    def nodes(self) -> np.ndarray:
        """Node coordinates, shape ``(E, p+1)``; interface points appear twice."""
        t = self._ref("t")
        mid = 0.5 * (self.breaks[:-1] + self.breaks[1:])
        return mid[:, None] + 0.5 * self.h[:, None] * t[None, :]

    def colloc_points(self) -> np.ndarray:
        tc = self._ref("tc")
        mid = 0.5 * (self.breaks[:-1] + self.breaks[1:])
        return mid[:, None] + 0.5 * self.h[:, None] * tc[None, :]

    def quad_weights(self) -> np.ndarray:
        return 0.5 * self.h[:, None] * self._ref("w")[None, :]

    def diff(self, v: np.ndarray) -> np.ndarray:
        """Elementwise derivative of nodal values with shape ``(..., E, p+1)``."""
        D = self._ref("D")
        return np.einsum("ij,...ej->...ei", D, v) * (2.0 / self.h)[:, None]

    def integrate(self, v: np.ndarray, lo: float | None = None, hi: float | None = None) -> float:
        """Integral of nodal values over ``[lo, hi]`` (breaks of the mesh when given)."""
        lo = self.a if lo is None else lo
        hi = self.b if hi is None else hi
        for end in (lo, hi):
            if not np.any(np.isclose(self.breaks, end, rtol=0.0, atol=1e-12)):
                raise ValueError(f"integration limit {end} is not a mesh break")
        sel = (self.breaks[:-1] >= lo - 1e-12) & (self.breaks[1:] <= hi + 1e-12)
        w = self.quad_weights()
        return float(np.sum(w[sel] * v[sel]))

    def locate(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.clip(np.searchsorted(self.breaks, x, side="right") - 1, 0, self.n_elem - 1)

    def evaluate(self, v: np.ndarray, x) -> np.ndarray:
        """Interpolate nodal values ``v`` (shape ``(E, p+1)``) at points ``x``."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        e = self.locate(x)
        lo = self.breaks[e]
        t = 2.0 * (x - lo) / self.h[e] - 1.0
        out = np.empty_like(x)
        for ee in np.unique(e):
            sel = e == ee
            out[sel] = interp_matrix(self.p, t[sel]) @ v[ee]
        return out

    def integrate_from(self, v: np.ndarray, x0: float) -> float:
        """``int_{x0}^{b} v`` for a point ``x0`` that need not be a break."""
        e0 = int(self.locate(np.array([x0]))[0])
        w = self.quad_weights()
        total = float(np.sum(w[e0 + 1:] * v[e0 + 1:]))
        hi = self.breaks[e0 + 1]
        if hi > x0:
            g, gw = np.polynomial.legendre.leggauss(self.p + 2)
            xs = 0.5 * (x0 + hi) + 0.5 * (hi - x0) * g
            t = 2.0 * (xs - self.breaks[e0]) / self.h[e0] - 1.0
            vals = interp_matrix(self.p, t) @ v[e0]
            total += 0.5 * (hi - x0) * float(gw @ vals)
        return total

    def refined(self, factor: int = 2) -> "Mesh":
        br = [self.breaks[0]]
        for lo, hi in zip(self.breaks[:-1], self.breaks[1:]):
            br.extend(np.linspace(lo, hi, factor + 1)[1:])
        return Mesh(np.array(br), self.p)


@dataclass
class Boundary:
    """Condition ``Y_j(end) = value`` at ``side`` in {"left", "right"}."""

    side: str
    j: int
    value: float


@dataclass
class BVPResult:
    mesh: Mesh
    Y: np.ndarray  # (m, E, p+1)
    converged: bool
    residual: float
    iterations: int

    @property
    def x(self) -> np.ndarray:
        return self.mesh.nodes()


RhsFn = Callable[[np.ndarray, np.ndarray], tuple]


def solve_bvp(
    rhs: RhsFn,
    order: int,
    mesh: Mesh,
    bcs: Sequence[Boundary],
    Y0: np.ndarray,
    tol: float = 1e-11,
    max_iter: int = 40,
    min_damping: float = 1.0 / 1024,
) -> BVPResult:
    """Damped Newton on the collocation system.

    ``rhs(x, Y)`` returns ``(F, dF)`` with ``F`` the top derivative and
    ``dF[j] = dF/dY_j``, both evaluated pointwise on arrays ``x`` of any shape.
    """
    m = order
    if len(bcs) != m:
        raise ValueError(f"need {m} boundary conditions, got {len(bcs)}")
    E, p = mesh.n_elem, mesh.p
    npt = p + 1
    D = mesh._ref("D")
    P = mesh._ref("P")
    PD = P @ D
    xc = mesh.colloc_points()
    scale = 2.0 / mesh.h

    def idx(j, e, i):
        return (e * npt + i) * m + j

    n_unk = E * npt * m

    def residual(Y):
        dY = np.einsum("ij,kej->kei", PD, Y) * scale[None, :, None]
        Yc = np.einsum("ij,kej->kei", P, Y)
        F, _ = rhs(xc, Yc)
        col = np.empty((m, E, p))
        col[: m - 1] = dY[: m - 1] - Yc[1:]
        col[m - 1] = dY[m - 1] - F
        res = [col.transpose(1, 2, 0).reshape(-1)]
        res.append((Y[:, :-1, -1] - Y[:, 1:, 0]).T.reshape(-1))
        bc = []
        for b in bcs:
            val = Y[b.j, 0, 0] if b.side == "left" else Y[b.j, -1, -1]
            bc.append(val - b.value)
        res.append(np.array(bc))
        return np.concatenate(res)

    # static sparsity pattern pieces
    ii = np.arange(p)
    ll = np.arange(npt)

    def jacobian(Y):
        Yc = np.einsum("ij,kej->kei", P, Y)
        _, dF = rhs(xc, Yc)
        rows, cols, vals = [], [], []
        for e in range(E):
            base_row = (e * p) * m
            PDe = PD * scale[e]
            for j in range(m):
                r = base_row + ii * m + j
                R = np.repeat(r, npt)
                C = np.tile(idx(j, e, ll), p)
                rows.append(R)
                cols.append(C)
                vals.append(PDe.reshape(-1))
                if j < m - 1:
                    rows.append(R)
                    cols.append(np.tile(idx(j + 1, e, ll), p))
                    vals.append(-P.reshape(-1))
                else:
                    for jj in range(m):
                        rows.append(R)
                        cols.append(np.tile(idx(jj, e, ll), p))
                        vals.append((-dF[jj, e][:, None] * P).reshape(-1))
        r0 = E * p * m
        for e in range(E - 1):
            for j in range(m):
                r = r0 + e * m + j
                rows += [np.array([r]), np.array([r])]
                cols += [np.array([idx(j, e, p)]), np.array([idx(j, e + 1, 0)])]
                vals += [np.array([1.0]), np.array([-1.0])]
        r0 += (E - 1) * m
        for q, b in enumerate(bcs):
            c = idx(b.j, 0, 0) if b.side == "left" else idx(b.j, E - 1, p)
            rows.append(np.array([r0 + q]))
            cols.append(np.array([c]))
            vals.append(np.array([1.0]))
        J = sp.csc_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(n_unk, n_unk),
        )
        return J

    Y = np.array(Y0, dtype=float, copy=True)
    if Y.shape != (m, E, npt):
        raise ValueError(f"initial guess has shape {Y.shape}, expected {(m, E, npt)}")
    r = residual(Y)
    nr = np.linalg.norm(r, np.inf)
    it = 0
    for it in range(1, max_iter + 1):
        if not np.isfinite(nr):
            break
        J = jacobian(Y)
        try:
            step = splu(J).solve(-r)
        except RuntimeError as exc:  # singular factor
            raise NoConvergence(f"singular Newton matrix: {exc}") from exc
        step = step.reshape(E, npt, m).transpose(2, 0, 1)
        lam = 1.0
        while lam >= min_damping:
            Yn = Y + lam * step
            rn = residual(Yn)
            nrn = np.linalg.norm(rn, np.inf)
            if np.isfinite(nrn) and nrn < (1 - 0.25 * lam) * nr or (lam == 1.0 and nrn < 10 * tol):
                break
            lam *= 0.5
        else:
            log.debug("line search failed at iteration %d, residual %.3e", it, nr)
            break
        Y, r, nr = Yn, rn, nrn
        step_size = lam * np.max(np.abs(step))
        log.debug("newton it=%d res=%.3e step=%.3e lam=%.3g", it, nr, step_size, lam)
        if nr < tol and step_size < 1e-9 * max(1.0, np.max(np.abs(Y))) * 1e3:
            return BVPResult(mesh, Y, True, nr, it)
    return BVPResult(mesh, Y, nr < tol, nr, it)
