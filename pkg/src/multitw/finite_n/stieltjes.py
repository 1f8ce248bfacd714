"""Orthonormal polynomials on ``(-inf, y]`` by the discretized Stieltjes procedure.

The weight ``exp(-alpha_hat V)`` is discretized by composite Gauss-Legendre
panels on ``[a, y]``.  The lower end ``a`` is placed where the integrand
``exp(-alpha_hat V) (1+|l|)^(2 n_max + 2)`` has fallen below the working
precision relative to its maximum, so the dropped mass cannot be seen at
that precision.  All arithmetic runs in mpmath at ``precision_bits``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath
import numpy as np
from mpmath.calculus.quadrature import GaussLegendre

from ..errors import NotConverged, PrecisionExhausted, ValidationError
from .potential import Potential

DEFAULT_BITS = 106  # twice the 53-bit double mantissa


def _log_integrand(pot: Potential, lam: np.ndarray, n_poly: int) -> np.ndarray:
    return -pot.alpha_hat * pot.V(lam) + n_poly * np.log1p(np.abs(lam))


def _scan(pot: Potential, start: float, direction: int, n_poly: int, drop: float, best: float = -math.inf):
    """March from ``start`` until the log-integrand is far below its running
    maximum and has been strictly decreasing for a while."""
    step = 0.05 / math.sqrt(pot.alpha_hat)
    xs, fs = [], []
    x0 = start
    while True:
        grid = x0 + direction * step * np.arange(0, 2000)
        f = _log_integrand(pot, grid, n_poly)
        xs.append(grid)
        fs.append(f)
        best = max(best, float(f.max()))
        x0 = float(grid[-1]) + direction * step
        if f[-1] < best - drop - 10 and np.all(np.diff(f[-200:]) < 0):
            return np.concatenate(xs), np.concatenate(fs), best, step
        if abs(x0) > 1e6:
            raise ValidationError("weight does not decay")


def lower_cutoff(pot: Potential, y: float, n_poly: int, drop: float) -> float:
    """Point left of which the log-integrand on ``(-inf, y]`` stays below ``max - drop``."""
    xs, fs, best, step = _scan(pot, y, -1, n_poly, drop)
    idx = np.nonzero(fs >= best - drop)[0]
    return float(xs[idx.max()] - step)


def upper_cutoff(pot: Potential, n_poly: int, drop: float) -> float:
    """Wall ``y_big`` standing in for ``+inf``: beyond it the integrand is below ``max - drop``."""
    if not pot.integrable_above():
        raise ValidationError("weight does not decay to the right")
    _, _, best_left, _ = _scan(pot, 0.0, -1, n_poly, drop)
    xs, fs, best, step = _scan(pot, 0.0, +1, n_poly, drop, best_left)
    idx = np.nonzero(fs >= best - drop)[0]
    return float(xs[idx.max()] + step)


@lru_cache(maxsize=8)
def _gl_reference(bits: int, degree: int):
    with mpmath.workprec(bits + 20):
        nodes = GaussLegendre(mpmath.mp).calc_nodes(degree, bits + 20)
    return tuple(nodes)


def quadrature_rule(pot: Potential, a: float, y: float, bits: int, panel_width: float, degree: int = 5):
    """Nodes and weights (weight function included) on ``[a, y]`` in mpmath at ``bits``."""
    ref = _gl_reference(bits, degree)
    n_pan = max(1, int(math.ceil((y - a) / panel_width)))
    with mpmath.workprec(bits):
        A, Y = mpmath.mpf(a), mpmath.mpf(y)
        hw = (Y - A) / (2 * n_pan)
        xs, ws = [], []
        ah = mpmath.mpf(pot.alpha_hat)
        for j in range(n_pan):
            mid = A + (2 * j + 1) * hw
            for t, w in ref:
                x = mid + hw * t
                xs.append(x)
                ws.append(hw * w * mpmath.exp(-ah * pot.V_mp(x)))
    return xs, ws


@dataclass
class OPSystem:
    potential: Potential
    y: float
    n_max: int
    h: list  # h_0 .. h_nmax (mpf)
    r: list  # r_0 (unused, 0) .. r_nmax
    s: list  # s_0 .. s_nmax
    pi_at_y: list  # pi_0(y) .. pi_nmax(y)
    precision_bits: int
    gram_error: float
    rule: tuple = field(repr=False, default=())
    a: float = -math.inf

    @property
    def alpha_hat(self) -> float:
        return self.potential.alpha_hat

    def as_float(self, name: str) -> np.ndarray:
        return np.array([float(v) for v in getattr(self, name)])

    def log_z(self, N: int):
        """``N log h_0 + N sum_{i<N} (1 - i/N) log r_i``."""
        if N - 1 > self.n_max:
            raise ValidationError(f"need n_max >= {N - 1}")
        with mpmath.workprec(self.precision_bits):
            tot = N * mpmath.log(self.h[0])
            for i in range(1, N):
                tot += (N - i) * mpmath.log(self.r[i])
            return tot

    def log_z_product(self, N: int):
        """``sum_{i<N} log h_i``, the same quantity through the norms directly."""
        with mpmath.workprec(self.precision_bits):
            return mpmath.fsum(mpmath.log(self.h[i]) for i in range(N))

    def monic_values(self, lam_list, nmax: int | None = None, derivative: bool = False):
        """Monic ``p_n`` (and ``p_n'``) at mp points, from the recurrence."""
        nmax = self.n_max if nmax is None else nmax
        with mpmath.workprec(self.precision_bits):
            P = [[mpmath.mpf(1)] * len(lam_list)]
            D = [[mpmath.mpf(0)] * len(lam_list)]
            prev = [mpmath.mpf(0)] * len(lam_list)
            dprev = [mpmath.mpf(0)] * len(lam_list)
            for n in range(nmax):
                cur, dcur = P[-1], D[-1]
                sn, rn = self.s[n], (self.r[n] if n else 0)
                nxt = [(x - sn) * c - rn * pv for x, c, pv in zip(lam_list, cur, prev)]
                dnx = [c + (x - sn) * dc - rn * dp for x, c, dc, dp in zip(lam_list, cur, dcur, dprev)]
                prev, dprev = cur, dcur
                P.append(nxt)
                D.append(dnx)
        return (P, D) if derivative else P


def stieltjes_recurrence(
    pot: Potential,
    y: float,
    n_max: int,
    precision_bits: int = DEFAULT_BITS,
    panel_width: float | None = None,
    degree: int = 5,
) -> OPSystem:
    return _stieltjes_cached(pot, float(y), int(n_max), int(precision_bits), panel_width, degree)


@lru_cache(maxsize=256)
def _stieltjes_cached(pot, y, n_max, bits, panel_width, degree) -> OPSystem:
    if n_max < 0:
        raise ValidationError("n_max must be >= 0")
    pot.check_integrable(y_infinite=False)
    if math.isinf(y):
        raise ValidationError("use an explicit finite wall (see upper_cutoff)")
    n_poly = 2 * n_max + 2
    drop = bits * math.log(2) + 30.0
    a = lower_cutoff(pot, y, n_poly, drop)
    if panel_width is None:
        panel_width = min(1.0, 1.0 / math.sqrt(pot.alpha_hat * max(1.0, abs(pot.coefficients[1]) if len(pot.coefficients) > 1 else 1.0)))
    xs, ws = quadrature_rule(pot, a, y, bits, panel_width, degree)
    keep = sorted({0, n_max // 2, n_max})
    kept = {}
    with mpmath.workprec(bits):
        Y = mpmath.mpf(y)
        M = len(xs)
        p_prev = [mpmath.mpf(0)] * M
        p = [mpmath.mpf(1)] * M
        py_prev, py = mpmath.mpf(0), mpmath.mpf(1)
        h, r, s, piy = [], [mpmath.mpf(0)], [], []
        for n in range(n_max + 1):
            wp = [w * v for w, v in zip(ws, p)]
            hn = mpmath.fdot(wp, p)
            if not hn > 0:
                raise PrecisionExhausted(f"h_{n} lost positivity; raise precision_bits")
            sn = mpmath.fdot(wp, [x * v for x, v in zip(xs, p)]) / hn
            h.append(hn)
            s.append(sn)
            piy.append(py / mpmath.sqrt(hn))
            if n in keep:
                kept[n] = p
            if n >= 1:
                r.append(hn / h[n - 1])
            if n == n_max:
                break
            rn = r[n] if n >= 1 else 0
            p_prev, p = p, [(x - sn) * v - rn * u for x, v, u in zip(xs, p, p_prev)]
            py_prev, py = py, (Y - sn) * py - rn * py_prev
        # orthonormality on sampled pairs
        err = 0
        for i in keep:
            for j in keep:
                g = mpmath.fdot([w * v for w, v in zip(ws, kept[i])], kept[j]) / mpmath.sqrt(h[i] * h[j])
                err = max(err, abs(g - (1 if i == j else 0)))
    digits = bits * math.log10(2)
    gram = float(err)
    if gram > 10 ** (1 - digits / 2):
        raise PrecisionExhausted(f"Gram deviation {gram:.2e} at {bits} bits")
    return OPSystem(pot, y, n_max, h, r, s, piy, bits, gram, (tuple(xs), tuple(ws)), a)


def infinity_wall(pot: Potential, N: int, precision_bits: int = DEFAULT_BITS) -> float:
    """``y_big`` beyond which the weight times any polynomial of degree ``2N`` is invisible."""
    return upper_cutoff(pot, 2 * N + 2, precision_bits * math.log(2) + 30.0)


def gap_probability_finite_n(pot: Potential, N: int, y: float, precision_bits: int = DEFAULT_BITS) -> tuple:
    """``(log P, P)`` for ``P_N(lambda_max < y) = Z_N(y) / Z_N(inf)``."""
    if N < 1:
        raise ValidationError("N must be >= 1")
    pot.check_integrable(y_infinite=True)
    y_big = infinity_wall(pot, N, precision_bits)
    if y >= y_big:
        return 0.0, 1.0
    zy = stieltjes_recurrence(pot, y, N - 1, precision_bits).log_z(N)
    zb = stieltjes_recurrence(pot, y_big, N - 1, precision_bits).log_z(N)
    lp = float(zy - zb)
    return lp, math.exp(lp)


def gap_ratio_finite_n(pot: Potential, N: int, y1: float, y2: float, precision_bits: int = DEFAULT_BITS) -> tuple:
    """``Z_N(y1) / Z_N(y2)`` for ``y1 < y2``; the only gap quantity for weights unbounded above."""
    if not y1 < y2:
        raise ValidationError("need y1 < y2")
    z1 = stieltjes_recurrence(pot, y1, N - 1, precision_bits).log_z(N)
    z2 = stieltjes_recurrence(pot, y2, N - 1, precision_bits).log_z(N)
    lp = float(z1 - z2)
    return lp, math.exp(lp)


# ---------------------------------------------------------------------------
# brute-force oracle

def _vandermonde_integral(x: np.ndarray, w: np.ndarray, N: int) -> float:
    if N == 1:
        return float(w.sum())
    if N == 2:
        d = (x[:, None] - x[None, :]) ** 2
        return float(w @ d @ w) / 2.0
    d2 = (x[:, None] - x[None, :]) ** 2
    total = 0.0
    for i in range(len(x)):
        # sum_jk w_j w_k (xi-xj)^2 (xi-xk)^2 (xj-xk)^2
        a = w * d2[i]
        total += w[i] * float(a @ d2 @ a)
    return total / 6.0


def direct_quadrature_oracle(pot: Potential, N: int, y: float, tol: float = 1e-10, max_doublings: int = 5) -> float:
    """``Z_N(y) / Z_N(inf)`` from tensor-product Gauss-Legendre on the raw N-fold integral."""
    if N not in (1, 2, 3):
        raise ValidationError("oracle supports N in {1, 2, 3}")
    drop = 45.0
    n_poly = 2 * N + 2
    y_big = upper_cutoff(pot, n_poly, drop)
    a = lower_cutoff(pot, min(y, y_big), n_poly, drop)
    if y >= y_big:
        return 1.0
    g, gw = np.polynomial.legendre.leggauss(16)
    shift = -pot.alpha_hat * float(np.min(pot.V(np.linspace(a, y_big, 4001))))

    def rule(lo, hi, n_pan):
        edges = np.linspace(lo, hi, n_pan + 1)
        mid = 0.5 * (edges[:-1] + edges[1:])
        half = 0.5 * np.diff(edges)
        x = (mid[:, None] + half[:, None] * g[None, :]).ravel()
        w = (half[:, None] * gw[None, :]).ravel() * np.exp(-pot.alpha_hat * pot.V(x) - shift)
        return x, w

    prev = None
    n_pan = 6
    for _ in range(max_doublings + 1):
        zy = _vandermonde_integral(*rule(a, y, n_pan), N)
        zb = _vandermonde_integral(*rule(a, y_big, n_pan), N)
        val = zy / zb
        if prev is not None and abs(val - prev) < tol * max(abs(val), 1e-300) + 1e-300:
            return val
        prev = val
        n_pan *= 2
    raise NotConverged(f"N={N} y={y}: oracle not self-converged to {tol}")
