"""Backlund chain on solved profiles: u -> psi -> W.

With ``K = 2 L_k[u] - x`` the chain reads

    K = 2 psi^2,   psi'' + (u - s) psi = 0,   psi' + W psi = 0,
    (d + 2W) L_k[W' - W^2 + s] = x W + 1/2.

On the profiles produced by :mod:`multitw.painleve`, ``K <= 0`` on the whole
domain, so ``psi = i phi`` with ``phi = sqrt(-K/2)`` real.  Every relation
above is homogeneous in ``psi`` and ``W = -phi'/phi`` is real, so the checks
run on ``phi``.  ``W = -K'/(2K)`` needs no square root at all.

Where ``|K|`` is at the rounding level of ``2 L_k[u] - x`` (far left, where
``u`` sits on the background) ``phi`` carries no information.  Residuals are
taken over the nodes with ``|K| > mask_rel * max|K|``; the fraction kept is
reported.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import NegativeRadicand, PoleOfW, ValidationError
from .lenard import LenardTable, backlund_beta, tau, tau_prefactor
from .painleve import GAMMA, HMProfile, SolutionGrid


@dataclass
class BacklundChain:
    k: int
    s: float
    x_grid: np.ndarray
    psi: np.ndarray  # phi = |psi| on the mask, nan elsewhere
    w: np.ndarray
    imaginary: bool
    mask: np.ndarray
    residual_schrodinger: float
    residual_weqn: float
    residual_first_integral: float
    residual_u_relation: float
    kept_fraction: float


def tau_profile(k: int, s: float) -> list:
    """``[tau_0(s), ..., tau_{k-1}(s)]``."""
    if k < 1:
        raise ValidationError("k must be >= 1")
    return [tau(k, j)(s) for j in range(k)]


def tau_prefactors(k: int) -> list:
    return [tau_prefactor(k, j) for j in range(k)]


def _leibniz_quotient(K: np.ndarray, n: int) -> np.ndarray:
    """Derivatives ``0..n`` of ``W = -K'/(2K)`` from derivatives ``0..n+1`` of ``K``."""
    W = np.empty((n + 1,) + K.shape[1:])
    for j in range(n + 1):
        acc = -0.5 * K[j + 1]
        for i in range(1, j + 1):
            acc = acc - comb(j, i) * K[i] * W[j - i]
        W[j] = acc / K[0]
    return W


def _riccati_jet(W: np.ndarray, s: float, n: int) -> np.ndarray:
    """Derivatives ``0..n`` of ``v = W' - W^2 + s``."""
    v = np.empty((n + 1,) + W.shape[1:])
    for j in range(n + 1):
        sq = sum(comb(j, i) * W[i] * W[j - i] for i in range(j + 1))
        v[j] = W[j + 1] - sq
    v[0] = v[0] + s
    return v


def chain_from_solution(sol: SolutionGrid, table: LenardTable, mask_rel: float = 1e-6) -> BacklundChain:
    if not sol.converged:
        raise ValidationError("solution not converged")
    k = sol.k
    x = sol.x_grid
    nk = 2 * k + 1  # derivatives of K needed
    jet = sol.jet(2 * k - 2 + nk)
    polys = [table[k]]
    for _ in range(nk):
        polys.append(polys[-1].total_derivative())
    K = np.array([2.0 * p.eval_jet(jet) for p in polys])
    K[0] -= x
    K[1] -= 1.0
    kmax = float(np.max(np.abs(K[0])))
    mask = np.abs(K[0]) > mask_rel * kmax
    signs = np.sign(K[0][mask])
    if signs.size == 0:
        raise NegativeRadicand(f"k={k} s={sol.s}: K vanishes on the grid")
    if np.any(signs != signs.flat[0]):
        neg = x[mask][signs < 0]
        raise NegativeRadicand(
            f"k={k} s={sol.s}: 2 L_k[u] - x changes sign on the grid",
            interval=(float(neg.min()), float(neg.max())),
        )
    imaginary = bool(signs.flat[0] < 0)
    sgn = -1.0 if imaginary else 1.0
    Kc = np.where(mask, K[0], np.nan)
    if np.any(np.abs(Kc[mask]) == 0):
        raise PoleOfW("psi vanishes inside the domain")

    with np.errstate(invalid="ignore", divide="ignore"):
        Kj = K.copy()
        Kj[0] = Kc
        # phi = sqrt(sgn K / 2)
        Phi = sgn * Kj[:3] / 2.0
        phi = np.sqrt(Phi[0])
        phi1 = Phi[1] / (2 * phi)
        phi2 = Phi[2] / (2 * phi) - Phi[1] ** 2 / (4 * phi**3)
        schr = phi2 + (sol.u1 - sol.s) * phi

        W = _leibniz_quotient(Kj, nk - 1)  # W .. W^(2k)
        v = _riccati_jet(W, sol.s, nk - 2)  # v .. v^(2k-1)
        Lv = table[k].eval_jet(v[: 2 * k - 1])
        dLv = table[k].total_derivative().eval_jet(v[: 2 * k])
        weqn = dLv + 2 * W[0] * Lv - x * W[0] - 0.5
        # U''/U = q' + q^2 at the shifted point is phi''/phi = W^2 - W'
        urel = phi2 / phi - (W[0] ** 2 - W[1])

    fi = K[0] * K[2] - 0.5 * K[1] ** 2 + 2.0 * (sol.u1 - sol.s) * K[0] ** 2

    def sup(a):
        return float(np.nanmax(np.abs(np.where(mask, a, np.nan))))

    return BacklundChain(
        k=k,
        s=sol.s,
        x_grid=x,
        psi=np.where(mask, phi, np.nan),
        w=np.where(mask, W[0], np.nan),
        imaginary=imaginary,
        mask=mask,
        residual_schrodinger=sup(schr),
        residual_weqn=sup(weqn),
        residual_first_integral=float(np.max(np.abs(fi))) / max(1.0, kmax**2),
        residual_u_relation=sup(urel),
        kept_fraction=float(mask.mean()),
    )


def shifted_w(chain: BacklundChain, sol: SolutionGrid, x) -> np.ndarray:
    """``q(x, s) = -W(x + tau_0(beta s), s)`` by interpolation on the solution mesh."""
    shift = tau(chain.k, 0)(backlund_beta(chain.k) * chain.s)
    Wfill = np.where(chain.mask, chain.w, 0.0)
    return -sol.mesh.evaluate(Wfill, np.asarray(x, dtype=float) + shift)


def hm_logderivative(profile: HMProfile, x) -> np.ndarray:
    """``gamma q_HM'(gamma x) / q_HM(gamma x)``, the k = 1 image of ``-W`` under the shift."""
    xb = GAMMA * np.asarray(x, dtype=float)
    return GAMMA * profile.derivative(xb) / profile(xb)
