"""Boundary-value solvers for the Painleve II / XXXIV hierarchy and the gap probability.

Conventions
-----------
The edge function ``u(x; s)`` of order ``k`` solves

    L'_{k+1}[u] - 4 s L'_k[u] = x u' + 2u - 2s

and the gap probability is ``log P(s) = -int_{-inf}^0 (x/2)(u(x,s) - u(x,inf)) dx``
where the background ``u(x, inf)`` solves ``L_k[u] = x/2``.

The problem is posed on ``[-L, R]`` with ``R > 0``.  To the right of the
turning point ``x* = 2 beta_k s^k`` the solution approaches the constant
``s`` with the algebraic tail ``s + 1/(4 (x - x*)^2)``.  That tail and its
first ``k - 1`` derivatives give ``k`` conditions at ``x = R``.  The remaining
``k + 1`` conditions pin the jet of ``u`` to the background at ``x = -L``,
which leaves the decaying correction free inside the domain.

For ``k = 1`` the map ``x = xbar/gamma``, ``u = gamma^2 ubar`` with
``gamma = -2^(-1/3)`` turns the problem into the Hastings-McLeod
description, so ``P^(1)(s) = F2(2^(2/3) s)``.
"""
from __future__ import annotations

import hashlib
import json
import logging
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import airy
from .collocation import Boundary, Mesh, solve_bvp
from .diffpoly import DiffPoly
from .errors import (
    CrossCheckFailed,
    DomainExceeded,
    MatchingWindowViolated,
    NoConvergence,
    PoleDetected,
    ValidationError,
)
from .lenard import LenardTable, beta, get_table
from .odes import ODE, background_equation, painleve2_equation, string_equation

log = logging.getLogger(__name__)

GAMMA = -(2.0 ** (-1.0 / 3.0))


@dataclass(frozen=True)
class SolverConfig:
    """Numerical parameters; every reported number carries :meth:`hash`."""

    p: int = 20
    h: float = 1.0
    L: float | None = None
    right_margin: float | None = None
    tol_newton: float = 1e-10
    max_iter: int = 40
    min_step: float = 1e-4
    max_step: float = 0.25
    window_fraction: float = 0.1
    window_floor: float = 1e-9
    fd_points: int = 7
    cross_tol: float = 1e-5

    def domain_left(self, k: int) -> float:
        if self.L is not None:
            return float(self.L)
        return 40.0 if k == 1 else 60.0

    def margin(self, k: int) -> float:
        if self.right_margin is not None:
            return float(self.right_margin)
        return 20.0 if k == 1 else 40.0

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    def hash(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()[:12]


@dataclass(frozen=True)
class HierarchySpec:
    k: int
    lenard: LenardTable

    def __post_init__(self):
        if self.k < 1:
            raise ValidationError("k must be >= 1")
        if self.lenard.k_max < self.k + 1:
            raise ValidationError(f"table depth {self.lenard.k_max} < k+1 = {self.k + 1}")

    @classmethod
    def make(cls, k: int) -> "HierarchySpec":
        return cls(k, get_table(k + 1))

    @property
    def order(self) -> int:
        return 2 * self.k + 1

    def turning_point(self, s: float) -> float:
        return 2.0 * float(beta(self.k)) * s**self.k


def make_mesh(spec: HierarchySpec, s_max: float, cfg: SolverConfig = SolverConfig()) -> Mesh:
    """Domain ``[-L, R]`` with ``R`` past the turning point at the largest ``s``."""
    L = cfg.domain_left(spec.k)
    R = max(0.0, spec.turning_point(s_max)) + cfg.margin(spec.k)
    R = cfg.h * math.ceil(R / cfg.h)
    return Mesh.uniform(-L, R, cfg.h, cfg.p, anchors=[0.0])


# ---------------------------------------------------------------------------
# background u(x, inf)

def laurent_background(k: int, nterms: int = 8) -> dict:
    """Coefficients ``{e: a_e}`` of ``u = sum a_e X^e`` with ``x = X^k`` solving ``L_k[u] = x/2``.

    Exponents are ``1 - n(2k+1)``.  Each coefficient is fixed by the lowest
    order of the residual, which is linear in it with factor ``k beta_k a_1^(k-1)``.
    """
    b = float(beta(k))
    a1 = (1.0 / (2.0 * b)) ** (1.0 / k)
    Lk = get_table(k)[k]
    coeffs = {1: a1}

    def deriv(ser):  # d/dx = X^(1-k)/k d/dX
        return {e - k: c * e / k for e, c in ser.items() if e != 0}

    def mul(A, B, floor):
        out = {}
        for ea, ca in A.items():
            for eb, cb in B.items():
                e = ea + eb
                if e >= floor:
                    out[e] = out.get(e, 0.0) + ca * cb
        return out

    for n in range(1, nterms):
        floor = k - n * (2 * k + 1)
        jets = [dict(coeffs)]
        for _ in range(Lk.max_order()):
            jets.append(deriv(jets[-1]))
        total = {}
        for mono, c in Lk.items():
            prod = {0: 1.0}
            # factors carry exponents up to +1, so partial products keep some headroom
            low = floor - sum(e for _, e in mono)
            for j, e in mono:
                for _ in range(e):
                    prod = mul(prod, jets[j], low)
            for e_, v in prod.items():
                total[e_] = total.get(e_, 0.0) + float(c) * v
        coeffs[1 - n * (2 * k + 1)] = -total.get(floor, 0.0) / (k * b * a1 ** (k - 1))
    return coeffs


def laurent_jet(coeffs: dict, k: int, x: float, depth: int) -> np.ndarray:
    """Jet ``(u, ..., u^(depth))`` of the optimally truncated series at ``x``."""
    X = math.copysign(abs(x) ** (1.0 / k), x)
    out = []
    ser = dict(coeffs)
    for _ in range(depth + 1):
        terms = sorted(ser.items(), reverse=True)
        total, prev = 0.0, math.inf
        for e, c in terms:
            t = c * X**e
            if abs(t) > prev and abs(t) > 1e-300:
                break
            total += t
            if t != 0.0:
                prev = abs(t)
        out.append(total)
        ser = {e - k: c * e / k for e, c in ser.items() if e != 0}
    return np.array(out)


@dataclass
class BackgroundSolution:
    k: int
    mesh: Mesh
    jets: np.ndarray  # (2k+2, E, p+1): u_inf and derivatives up to order 2k+1
    residual: float
    ode: ODE | None = field(default=None, repr=False)

    @property
    def x_grid(self) -> np.ndarray:
        return self.mesh.nodes()

    @property
    def u_inf(self) -> np.ndarray:
        return self.jets[0]


def background_solution(spec: HierarchySpec, mesh: Mesh, cfg: SolverConfig = SolverConfig()) -> BackgroundSolution:
    """Real pole-free solution of ``L_k[u] = x/2`` on ``mesh``.

    ``k = 1`` is ``x/2``.  For odd ``k >= 3`` the far-field series in
    ``x^(1/k)`` supplies ``k - 1`` conditions at each end.  For even ``k`` the
    leading balance ``beta_k u^k = x/2`` has no real root at ``x < 0``, so no
    real solution with algebraic decay exists on the left and
    :class:`PoleDetected` is raised.
    """
    k = spec.k
    x = mesh.nodes()
    depth = 2 * k + 1
    if k == 1:
        jets = np.zeros((depth + 1,) + x.shape)
        jets[0] = x / 2.0
        jets[1] = 0.5
        return BackgroundSolution(1, mesh, jets, 0.0)
    if k % 2 == 0:
        raise PoleDetected(
            f"k={k}: beta_k u^k = x/2 has no real root for x < 0; "
            "no real background with algebraic growth exists on [-L, 0]"
        )
    ode = ODE(background_equation(spec.lenard, k))
    m = ode.order
    coeffs = laurent_background(k)
    jl = laurent_jet(coeffs, k, mesh.a, m)
    jr = laurent_jet(coeffs, k, mesh.b, m)
    half = m // 2
    bcs = [Boundary("left", j, jl[j]) for j in range(half)] + [Boundary("right", j, jr[j]) for j in range(m - half)]
    b = float(beta(k))
    g = np.cbrt(x / (2 * b)) if k == 3 else np.sign(x) * np.abs(x / (2 * b)) ** (1.0 / k)
    x0 = 3.0
    g0 = np.sign(x0) * (x0 / (2 * b)) ** (1.0 / k)
    g = np.where(np.abs(x) < x0, g0 * x / x0, g)
    Y0 = [g]
    for _ in range(m - 1):
        Y0.append(mesh.diff(Y0[-1]))
    res = solve_bvp(ode.rhs, m, mesh, bcs, np.array(Y0), tol=cfg.tol_newton, max_iter=80)
    if not res.converged:
        raise NoConvergence(f"background k={k}: Newton residual {res.residual:.3e}")
    lead = np.abs(g) + 1.0
    if np.any(np.abs(res.Y[0]) > 10 * lead):
        raise PoleDetected(f"background k={k} left the asymptotic branch (|u| too large)")
    jets = ode.extend_jet(x, res.Y, depth)
    return BackgroundSolution(k, mesh, jets, res.residual, ode)


# ---------------------------------------------------------------------------
# Hastings-McLeod and the Tracy-Widom log-CDF

@dataclass
class HMProfile:
    mesh: Mesh
    q: np.ndarray
    dq: np.ndarray
    residual: float

    @property
    def x_min(self) -> float:
        return self.mesh.a

    @property
    def x_max(self) -> float:
        return self.mesh.b

    def __call__(self, x) -> np.ndarray:
        return self.mesh.evaluate(self.q, x)

    def derivative(self, x) -> np.ndarray:
        return self.mesh.evaluate(self.dq, x)

    def equation_residual(self) -> float:
        x = self.mesh.nodes()
        ddq = self.mesh.diff(self.dq)
        return float(np.max(np.abs(ddq - 2 * self.q**3 - x * self.q)))


def hm_left_value(x: float) -> float:
    """``q ~ sqrt(-x/2) (1 + 1/(8x^3) - 73/(128x^6) + 10657/(1024x^9))`` as x -> -inf."""
    return math.sqrt(-x / 2) * (1 + 1 / (8 * x**3) - 73 / (128 * x**6) + 10657 / (1024 * x**9))


def hastings_mcleod(x_min: float = -12.0, x_max: float = 8.0, h: float = 0.5, p: int = 20, tol: float = 1e-12) -> HMProfile:
    """Solve ``q'' = 2q^3 + xq`` with ``q(x_max) = Ai(x_max)`` and the algebraic law at ``x_min``."""
    if not x_min < 0 < x_max:
        raise ValidationError("need x_min < 0 < x_max")
    mesh = Mesh.uniform(x_min, x_max, h, p, anchors=[0.0])
    x = mesh.nodes()
    ai, _, _ = airy.airy_arrays(x)
    left = np.sqrt(np.maximum(-x / 2, 0.0))
    g = left / (1 + np.exp(3 * x)) + ai / (1 + np.exp(-3 * x))
    ode = ODE(painleve2_equation())
    bcs = [Boundary("left", 0, hm_left_value(x_min)), Boundary("right", 0, airy.airy_ai(x_max).ai)]
    res = solve_bvp(ode.rhs, 2, mesh, bcs, np.array([g, mesh.diff(g)]), tol=tol)
    if not res.converged:
        raise NoConvergence(f"Hastings-McLeod Newton residual {res.residual:.3e}")
    return HMProfile(mesh, res.Y[0], res.Y[1], res.residual)


def _airy_tail(X: float, s: float) -> float:
    """``int_X^inf (s - x) Ai(x)^2 dx`` in closed form."""
    v = airy.airy_ai(X)
    a, b = v.ai, v.ai_prime
    i0 = b * b - X * a * a
    i1 = (X * b * b - X * X * a * a - a * b) / 3.0
    return s * i0 - i1


def tw_logcdf(s: float, profile: HMProfile) -> float:
    """``log F2(s) = int_s^inf (s - x) q(x)^2 dx``; beyond ``x_max`` q is replaced by Ai."""
    if s < profile.x_min:
        raise DomainExceeded(f"s={s} below profile start {profile.x_min}")
    if s >= profile.x_max:
        return _airy_tail(s, s)
    m = profile.mesh
    q2 = profile.q**2
    x = m.nodes()
    body = s * m.integrate_from(q2, s) - m.integrate_from(x * q2, s)
    return body + _airy_tail(profile.x_max, s)


# ---------------------------------------------------------------------------
# P-XXXIV hierarchy

@dataclass
class SolutionGrid:
    k: int
    s: float
    mesh: Mesh
    Y: np.ndarray  # (2k+1, E, p+1)
    jets: np.ndarray  # (2k+2, E, p+1)
    converged: bool
    newton_residual: float
    iterations: int
    ode: ODE = field(repr=False)

    @property
    def x_grid(self) -> np.ndarray:
        return self.mesh.nodes()

    @property
    def u1(self) -> np.ndarray:
        return self.Y[0]

    def jet(self, depth: int) -> np.ndarray:
        if depth < self.jets.shape[0]:
            return self.jets[: depth + 1]
        return self.ode.extend_jet(self.x_grid, self.Y, depth)


def _right_tail(s: float, xs: float, R: float, n: int) -> list:
    """Derivatives ``0..n-1`` of ``s + 1/(4 (x - xs)^2)`` at ``x = R``."""
    d = R - xs
    if d <= 0:
        raise DomainExceeded(f"turning point {xs:.3f} beyond the right end {R}")
    out = []
    for j in range(n):
        c = 0.25 * (-1) ** j * math.factorial(j + 1) * d ** (-(j + 2))
        out.append(c + (s if j == 0 else 0.0))
    return out


def _initial_guess(spec: HierarchySpec, s: float, bg: BackgroundSolution) -> np.ndarray:
    x = bg.x_grid
    m = spec.order
    xs = spec.turning_point(s)
    w = 1.0 / (1.0 + np.exp(-(x - xs)))
    g = (1.0 - w)[None] * bg.jets[:m]
    g[0] += w * s
    return g


def matching_window_check(sol: SolutionGrid, bg: BackgroundSolution, cfg: SolverConfig = SolverConfig()):
    """The correction ``u - u_inf`` must have died out near ``x = -L``.

    Returns ``(window_max, interior_max)``; raises when the window carries more
    than a thousandth of the interior correction and exceeds the floor.
    """
    x = sol.x_grid
    L = -sol.mesh.a
    delta = np.abs(sol.u1 - bg.u_inf)
    win = x <= -L + cfg.window_fraction * L
    neg = x <= 0
    wmax = float(delta[win].max())
    imax = float(delta[neg].max())
    if wmax > max(cfg.window_floor, 1e-3 * imax):
        raise MatchingWindowViolated(
            f"k={sol.k} s={sol.s}: |u - u_inf| = {wmax:.2e} in the left window (interior max {imax:.2e})"
        )
    return wmax, imax


def p34_solve(
    spec: HierarchySpec,
    s: float,
    background: BackgroundSolution,
    warm_start: SolutionGrid | None = None,
    cfg: SolverConfig = SolverConfig(),
    check_window: bool = True,
) -> SolutionGrid:
    k = spec.k
    mesh = background.mesh
    if background.k != k:
        raise ValidationError("background built for a different k")
    if warm_start is not None and (warm_start.k != k or warm_start.mesh.n_elem != mesh.n_elem):
        raise ValidationError("warm start built for a different k or grid")
    ode = ODE(string_equation(spec.lenard, k, s))
    m = ode.order
    bcs = [Boundary("left", j, float(background.jets[j][0, 0])) for j in range(k + 1)]
    tail = _right_tail(s, spec.turning_point(s), mesh.b, k)
    bcs += [Boundary("right", j, tail[j]) for j in range(k)]
    Y0 = warm_start.Y if warm_start is not None else _initial_guess(spec, s, background)
    res = solve_bvp(ode.rhs, m, mesh, bcs, Y0, tol=cfg.tol_newton, max_iter=cfg.max_iter)
    if not res.converged:
        raise NoConvergence(f"k={k} s={s}: Newton residual {res.residual:.3e} after {res.iterations} iterations")
    x = mesh.nodes()
    jets = ode.extend_jet(x, res.Y, 2 * k + 1)
    sol = SolutionGrid(k, float(s), mesh, res.Y, jets, True, res.residual, res.iterations, ode)
    if check_window:
        matching_window_check(sol, background, cfg)
    return sol


def continuation(
    spec: HierarchySpec,
    s_targets: Iterable[float],
    background: BackgroundSolution,
    cfg: SolverConfig = SolverConfig(),
    start: SolutionGrid | None = None,
) -> list:
    """Solve at every target in descending order, halving steps on failure."""
    targets = sorted({float(t) for t in s_targets}, reverse=True)
    if not targets:
        return []
    out = []
    cur = start
    if cur is None:
        s0 = targets[0]
        for attempt in range(8):
            try:
                cur = p34_solve(spec, s0, background, None, cfg)
                break
            except (NoConvergence, MatchingWindowViolated) as exc:
                log.debug("cold start at s=%g failed: %s", s0, exc)
                s0 += 0.5
                if spec.turning_point(s0) > background.mesh.b - 5:
                    raise
        else:
            raise NoConvergence("could not find a starting solution")
    for t in targets:
        while cur.s > t:
            step = min(cfg.max_step, cur.s - t)
            while True:
                s_try = max(t, cur.s - step)
                try:
                    cur = p34_solve(spec, s_try, background, cur, cfg)
                    break
                except (NoConvergence, MatchingWindowViolated):
                    step /= 2
                    if step < cfg.min_step:
                        raise NoConvergence(f"continuation stalled at s={cur.s} towards {t}")
        if cur.s == t:
            out.append(cur)
        elif cur.s < t:  # start was below the first target
            raise ValidationError(f"start s={cur.s} below target {t}")
    return out


# ---------------------------------------------------------------------------
# gap probability

def _lk_polys(table: LenardTable, k: int, n: int):
    polys = [table[k]]
    for _ in range(n):
        polys.append(polys[-1].total_derivative())
    return polys


def log_gap(sol: SolutionGrid, bg: BackgroundSolution) -> float:
    x = sol.x_grid
    return -sol.mesh.integrate((x / 2.0) * (sol.u1 - bg.u_inf), hi=0.0)


def dlog_gap_integral(sol: SolutionGrid, table: LenardTable) -> float:
    """Route (i): ``d/ds log P = -int_{-inf}^0 (L_k[u] - x/2) dx``."""
    x = sol.x_grid
    lk = table[sol.k].eval_jet(sol.jet(2 * sol.k))
    return -sol.mesh.integrate(lk - x / 2.0, hi=0.0)


def tail_estimate(sol: SolutionGrid, bg: BackgroundSolution) -> float:
    """Size of the dropped piece below ``-L``: ``(L/2) |u - u_inf|`` over the first element."""
    d = np.abs(sol.u1[0] - bg.u_inf[0])
    return float(0.5 * (-sol.mesh.a) * sol.mesh.h[0] * d.max())


def fornberg_weights(z: float, x: np.ndarray, m: int) -> np.ndarray:
    """Finite-difference weights for derivatives ``0..m`` at ``z`` on nodes ``x``."""
    n = len(x)
    c = np.zeros((n, m + 1))
    c1, c4 = 1.0, x[0] - z
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, m)
        c2, c5, c4 = 1.0, c4, x[i] - z
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for kk in range(mn, 0, -1):
                    c[i, kk] = c1 * (kk * c[i - 1, kk - 1] - c5 * c[i - 1, kk]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for kk in range(mn, 0, -1):
                c[j, kk] = (c4 * c[j, kk] - kk * c[j, kk - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, m]


def fd_derivative(s: np.ndarray, f: np.ndarray, npts: int = 7) -> np.ndarray:
    """First derivative of tabulated ``f`` with ``npts``-point stencils (one-sided at the ends)."""
    n = len(s)
    npts = min(npts, n)
    half = npts // 2
    out = np.empty(n)
    for i in range(n):
        lo = min(max(0, i - half), n - npts)
        idx = slice(lo, lo + npts)
        out[i] = fornberg_weights(s[i], s[idx], 1) @ f[idx]
    return out


@dataclass
class GapCurve:
    k: int
    s_grid: np.ndarray
    log_p: np.ndarray
    dlog_p: np.ndarray  # route (i)
    dlog_p_fd: np.ndarray  # route (ii)
    pdf: np.ndarray
    newton_residual: np.ndarray
    tail: np.ndarray
    config_hash: str
    solutions: list = field(default_factory=list, repr=False)

    @property
    def cdf(self) -> np.ndarray:
        return np.exp(self.log_p)

    def max_route_gap(self) -> float:
        return float(np.max(np.abs(self.dlog_p - self.dlog_p_fd)))


def gap_curve(
    spec: HierarchySpec,
    s_grid: Sequence[float],
    cfg: SolverConfig = SolverConfig(),
    background: BackgroundSolution | None = None,
    check: bool = True,
    keep_solutions: bool = False,
) -> GapCurve:
    s_grid = np.array(sorted(float(s) for s in s_grid))
    if background is None:
        background = background_solution(spec, make_mesh(spec, float(s_grid[-1]), cfg), cfg)
    sols = continuation(spec, s_grid, background, cfg)[::-1]  # ascending s
    logp = np.array([log_gap(sl, background) for sl in sols])
    dl = np.array([dlog_gap_integral(sl, spec.lenard) for sl in sols])
    dfd = fd_derivative(s_grid, logp, cfg.fd_points) if len(s_grid) >= 3 else np.full_like(dl, np.nan)
    curve = GapCurve(
        k=spec.k,
        s_grid=s_grid,
        log_p=logp,
        dlog_p=dl,
        dlog_p_fd=dfd,
        pdf=np.exp(logp) * dl,
        newton_residual=np.array([sl.newton_residual for sl in sols]),
        tail=np.array([tail_estimate(sl, background) for sl in sols]),
        config_hash=cfg.hash(),
        solutions=sols if keep_solutions else [],
    )
    if check and len(s_grid) >= 3:
        gap = curve.max_route_gap()
        if gap > cfg.cross_tol:
            raise CrossCheckFailed(f"d/ds log P routes differ by {gap:.3e} > {cfg.cross_tol:.1e}")
    return curve


# ---------------------------------------------------------------------------
# a-posteriori checks on solved profiles

def equation_residual(sol: SolutionGrid) -> float:
    """Sup of the string equation evaluated with the spectral derivative of the top component."""
    m = sol.ode.order
    jet = np.concatenate([sol.Y, sol.mesh.diff(sol.Y[m - 1])[None]])
    return float(np.max(np.abs(sol.ode.residual(sol.x_grid, jet))))


def k_function(sol: SolutionGrid, table: LenardTable, nder: int = 2) -> np.ndarray:
    """``K = 2 L_k[u] - x`` and its first ``nder`` derivatives from exact jets."""
    k = sol.k
    polys = _lk_polys(table, k, nder)
    jet = sol.jet(2 * k - 2 + nder)
    x = sol.x_grid
    K = np.array([2.0 * p.eval_jet(jet) for p in polys])
    K[0] -= x
    if nder >= 1:
        K[1] -= 1.0
    return K


def first_integral_residual(sol: SolutionGrid, table: LenardTable) -> float:
    """``sup |K K'' - K'^2/2 + 2(u - s) K^2| / max(1, |K|_inf^2)``."""
    K = k_function(sol, table, 2)
    fi = K[0] * K[2] - 0.5 * K[1] ** 2 + 2.0 * (sol.u1 - sol.s) * K[0] ** 2
    return float(np.max(np.abs(fi)) / max(1.0, float(np.max(np.abs(K[0]))) ** 2))


def flow_residual(lo: SolutionGrid, mid: SolutionGrid, hi: SolutionGrid, table: LenardTable, x_max: float = 0.0) -> float:
    """``(u(s+ds) - u(s-ds)) / 2ds`` against ``d/dx (x - 2 L_k[u])`` at the midpoint, for ``x <= x_max``."""
    ds = 0.5 * (hi.s - lo.s)
    dsu = (hi.u1 - lo.u1) / (2 * ds)
    lk1 = table[mid.k].total_derivative().eval_jet(mid.jet(2 * mid.k - 1))
    rhs = 1.0 - 2.0 * lk1
    sel = mid.x_grid <= x_max
    return float(np.max(np.abs(dsu - rhs)[sel]))


def k1_to_hm(sol: SolutionGrid, xbar: np.ndarray) -> np.ndarray:
    """q(xbar) from a k = 1 profile via ``-2 q^2 = ubar + xbar``, ``x = xbar/gamma``, ``u = gamma^2 ubar``."""
    if sol.k != 1:
        raise ValidationError("only k = 1 maps onto Painleve II")
    x = np.asarray(xbar) / GAMMA
    ubar = sol.mesh.evaluate(sol.u1, x) / GAMMA**2
    val = -(ubar + np.asarray(xbar)) / 2.0
    return np.sqrt(np.maximum(val, 0.0))


def tw_variable(s):
    """``t = 2^(2/3) s`` so that ``P^(1)(s) = F2(t)``."""
    return np.asarray(s) / GAMMA**2


def paper_variable(t):
    return np.asarray(t) * GAMMA**2


def refinement_check(spec: HierarchySpec, s: float, cfg: SolverConfig = SolverConfig(), factor: int = 2) -> tuple:
    """``(log P on the base mesh, log P on the refined mesh)`` at one ``s``."""
    mesh = make_mesh(spec, max(s, 1.0), cfg)
    vals = []
    for msh in (mesh, mesh.refined(factor)):
        bg = background_solution(spec, msh, cfg)
        sols = continuation(spec, [s], bg, cfg)
        vals.append(log_gap(sols[0], bg))
    return tuple(vals)
