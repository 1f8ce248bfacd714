"""Numerical checks of the finite-N relations among recurrence coefficients.

Two families:

* scalar relations between ``r_n``, ``s_n`` and their ``y`` / ``alpha_hat``
  derivatives (Gaussian weight), with derivatives by central differences on
  auxiliary systems;
* matrix relations between the truncated ``B``, ``A``, ``P``, ``H`` on
  interior indices (any potential).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import mpmath
import numpy as np

from ..errors import ValidationError
from .potential import Potential
from .stieltjes import OPSystem, infinity_wall, stieltjes_recurrence


@dataclass
class IdentityReport:
    residuals: dict = field(default_factory=dict)
    orders: dict = field(default_factory=dict)  # residual(dy) / residual(dy/2)
    n_range: tuple = (0, 0)

    def worst(self, names=None) -> float:
        names = self.residuals if names is None else names
        return max(self.residuals[k] for k in names)

    def lines(self) -> list:
        out = []
        for k, v in self.residuals.items():
            extra = f"  order-ratio={self.orders[k]:.3f}" if k in self.orders else ""
            out.append(f"{k:<14s} {v:.3e}{extra}")
        return out


def _f(seq) -> np.ndarray:
    return np.array([float(v) for v in seq])


def _shifted(sys: OPSystem, dy: float = 0.0, dalpha: float = 0.0) -> OPSystem:
    pot = sys.potential if dalpha == 0.0 else sys.potential.with_alpha(sys.alpha_hat + dalpha)
    return stieltjes_recurrence(pot, sys.y + dy, sys.n_max, sys.precision_bits)


def _mp_diff(plus, minus, h):
    """Central difference of two mp sequences, returned as float."""
    with mpmath.workprec(max(106, 2 * mpmath.mp.prec)):
        return np.array([float((a - b) / (2 * mpmath.mpf(h))) for a, b in zip(plus, minus)])


def _flow_residuals(sys: OPSystem, dy: float) -> dict:
    a = sys.alpha_hat
    p, m = _shifted(sys, dy), _shifted(sys, -dy)
    n = np.arange(2, sys.n_max - 1)
    r, s = _f(sys.r), _f(sys.s)
    with mpmath.workprec(sys.precision_bits):
        logr_p = [mpmath.log(v) if v else mpmath.mpf(0) for v in p.r]
        logr_m = [mpmath.log(v) if v else mpmath.mpf(0) for v in m.r]
        logr_0 = [mpmath.log(v) if v else mpmath.mpf(0) for v in sys.r]
        d2 = np.array(
            [float((lp - 2 * l0 + lm) / mpmath.mpf(dy) ** 2) for lp, l0, lm in zip(logr_p, logr_0, logr_m)]
        )
    dlogr = _mp_diff(logr_p, logr_m, dy)
    ds = _mp_diff(p.s, m.s, dy)
    snG = s[n] - s[n - 1] + dlogr[n] / (2 * a)
    rnG = r[n + 1] - r[n] - (1 - ds[n]) / (2 * a)
    toda = r[n + 1] + r[n - 1] - 2 * r[n] - d2[n] / (4 * a * a)
    return {
        "snG": float(np.max(np.abs(snG))),
        "rnG": float(np.max(np.abs(rnG))),
        "Toda": float(np.max(np.abs(toda))),
        "_dlogr": dlogr,
    }


def verify_recurrence_identities(sys: OPSystem, dy: float = 1e-3, dalpha: float = 1e-5) -> IdentityReport:
    """Sup-norm residuals over ``n in [2, n_max-2]`` for the Gaussian relations."""
    pot = sys.potential
    if not pot.is_gaussian:
        raise ValidationError("recurrence identities are stated for V = lambda^2")
    if sys.n_max < 5:
        raise ValidationError("need n_max >= 5")
    a, y = sys.alpha_hat, sys.y
    n = np.arange(2, sys.n_max - 1)
    r, s, piy = _f(sys.r), _f(sys.s), _f(sys.pi_at_y)
    rep = IdentityReport(n_range=(2, sys.n_max - 2))

    # algebraic
    m = n[n + 2 <= sys.n_max]
    s1 = s[m + 1] ** 2 - s[m] ** 2 + r[m + 2] - r[m] - y * (s[m + 1] - s[m]) - 1 / a
    s2 = r[n + 1] * (s[n + 1] + s[n] - y) - r[n] * (s[n] + s[n - 1] - y) - (s[n] - y) / (2 * a)
    rep.residuals["string1"] = float(np.max(np.abs(s1)))
    rep.residuals["string2"] = float(np.max(np.abs(s2)))
    w = np.exp(-a * y * y)
    rep.residuals["sn"] = float(np.max(np.abs(s[n] + w * piy[n] ** 2 / (2 * a))))
    rep.residuals["Pid"] = float(np.max(np.abs(n - np.sqrt(r[n]) * w * piy[n] * piy[n - 1] - 2 * a * r[n])))
    rep.residuals["Pid2"] = float(np.max(np.abs(2 * n + 1 - 2 * a * ((s[n] - y) * s[n] + r[n + 1] + r[n]))))

    # y derivatives, with the order read off from dy -> dy/2
    full = _flow_residuals(sys, dy)
    half = _flow_residuals(sys, dy / 2)
    for key in ("snG", "rnG", "Toda"):
        rep.residuals[key] = full[key]
        rep.orders[key] = full[key] / half[key] if half[key] > 0 else float("inf")

    # alpha_hat derivatives
    ap, am = _shifted(sys, dalpha=dalpha), _shifted(sys, dalpha=-dalpha)
    with mpmath.workprec(sys.precision_bits):
        dlogr_a = _mp_diff(
            [mpmath.log(v) if v else 0 for v in ap.r], [mpmath.log(v) if v else 0 for v in am.r], dalpha
        )
    dlogr_y = half["_dlogr"]
    yal = 1 - 0.5 * y * dlogr_y[n] + a * dlogr_a[n]
    rep.residuals["yal"] = float(np.max(np.abs(yal)))
    lhs = r[n + 1] - r[n - 1] + s[n] ** 2 - s[n - 1] ** 2
    rep.residuals["rnGSN"] = float(np.max(np.abs(lhs + dlogr_a[n])))
    # the same right-hand side routed through the y-flow via "yal"
    via_flow = -(1 - 0.5 * y * dlogr_y[n]) / a
    rep.residuals["rnGSN_flow"] = float(np.max(np.abs(lhs + via_flow)))
    return rep


def verify_infinite_wall_string(pot: Potential, n_max: int = 30, precision_bits: int = 106) -> IdentityReport:
    """``alpha_hat V'(B)_{n,n-1} sqrt(r_n) = n`` and ``V'(B)_{nn} = 0`` with the wall at ``y_big``."""
    pot.check_integrable(y_infinite=True)
    yb = infinity_wall(pot, n_max + 2, precision_bits)
    sys = stieltjes_recurrence(pot, yb, n_max, precision_bits)
    B = jacobi_matrix(sys)
    dV = matrix_poly(pot.dV_coeffs(), B)
    margin = pot.degree
    n = np.arange(1, sys.n_max + 1 - margin)
    r = _f(sys.r)
    off = pot.alpha_hat * dV[n, n - 1] * np.sqrt(r[n]) - n
    rep = IdentityReport(n_range=(1, int(n[-1])))
    rep.residuals["Zinfstr2_off"] = float(np.max(np.abs(off)))
    rep.residuals["Zinfstr2_diag"] = float(np.max(np.abs(np.diag(dV)[: n[-1] + 1])))
    if pot.is_gaussian:
        rep.residuals["r_n=n/2a"] = float(np.max(np.abs(r[n] - n / (2 * pot.alpha_hat))))
    return rep


# ---------------------------------------------------------------------------
# matrices

def jacobi_matrix(sys: OPSystem) -> np.ndarray:
    n = sys.n_max + 1
    B = np.diag(_f(sys.s))
    off = np.sqrt(_f(sys.r[1:]))
    B[np.arange(1, n), np.arange(n - 1)] = off
    B[np.arange(n - 1), np.arange(1, n)] = off
    return B


def matrix_poly(coeffs, B: np.ndarray) -> np.ndarray:
    """``sum c_i B^i`` by Horner."""
    out = np.zeros_like(B)
    eye = np.eye(B.shape[0])
    for c in reversed(list(coeffs)):
        out = out @ B + c * eye
    return out


def upper(M):
    return np.triu(M, 1)


def lower(M):
    return np.tril(M, -1)


def diag(M):
    return np.diag(np.diag(M))


def derivative_matrix(sys: OPSystem) -> np.ndarray:
    """``A_nm = <pi_m | d pi_n>`` by quadrature on the system's own rule."""
    xs, ws = sys.rule
    P, D = sys.monic_values(list(xs), derivative=True)
    with mpmath.workprec(sys.precision_bits):
        inv = [1 / mpmath.sqrt(h) for h in sys.h]
        sw = [mpmath.sqrt(w) for w in ws]
        Pi = np.array([[float(v * c * q) for v, q in zip(row, sw)] for row, c in zip(P, inv)])
        dPi = np.array([[float(v * c * q) for v, q in zip(row, sw)] for row, c in zip(D, inv)])
    return dPi @ Pi.T


def dB_dy(sys: OPSystem, dy: float = 1e-3) -> np.ndarray:
    """Richardson-extrapolated central difference of ``B`` in ``y``."""

    def cd(h):
        return (jacobi_matrix(_shifted(sys, h)) - jacobi_matrix(_shifted(sys, -h))) / (2 * h)

    return (4 * cd(dy / 2) - cd(dy)) / 3


@dataclass
class LaxMatrices:
    B: np.ndarray
    A: np.ndarray
    P: np.ndarray
    H: np.ndarray
    dB: np.ndarray
    margin: int


def build_lax_matrices(sys: OPSystem, dy: float = 1e-3) -> LaxMatrices:
    pot = sys.potential
    a, y = sys.alpha_hat, sys.y
    B = jacobi_matrix(sys)
    dV = matrix_poly(pot.dV_coeffs(), B)
    I = np.eye(B.shape[0])
    P = -0.5 * a * (upper(dV) - lower(dV))
    F = dV @ (B - y * I)
    H = -0.5 * a * (upper(F) - lower(F))
    return LaxMatrices(B, derivative_matrix(sys), P, H, dB_dy(sys, dy), 2 * pot.degree)


def build_lax_matrices_and_check(sys: OPSystem, pot: Potential | None = None, dy: float = 1e-3) -> IdentityReport:
    """Entry-wise interior residuals of the matrix relations."""
    pot = sys.potential if pot is None else pot
    if pot != sys.potential:
        raise ValidationError("potential does not match the system")
    lax = build_lax_matrices(sys, dy)
    B, A, P, H, dB = lax.B, lax.A, lax.P, lax.H, lax.dB
    a, y = sys.alpha_hat, sys.y
    n_dim = B.shape[0]
    I = np.eye(n_dim)
    cut = n_dim - lax.margin
    if cut < 4:
        raise ValidationError("n_max too small for the band margin")
    sl = slice(0, cut)

    def sup(M):
        return float(np.max(np.abs(M[sl, sl])))

    By = B - y * I
    dV = matrix_poly(pot.dV_coeffs(), B)
    rep = IdentityReport(n_range=(0, cut - 1))
    rep.residuals["stringeqn"] = sup(By @ H - H @ By - By)
    flow = P @ (y * I - B) - (y * I - B) @ P - (I - dB)
    rep.residuals["flow"] = sup(flow)
    hexp = By @ P - diag(B @ P) - (upper(B) - lower(B)) @ diag(0.5 * a * dV)
    rep.residuals["Hexp"] = sup(H - hexp)
    hdef = A @ By - 0.5 * a * dV @ By + 0.5 * I
    rep.residuals["Hdef"] = sup(H - hdef)
    rep.residuals["BA=1"] = sup(B @ A - A @ B - I)
    n = np.arange(1, cut)
    r = _f(sys.r)
    rep.residuals["Aid"] = float(np.max(np.abs(A[n, n - 1] - n / np.sqrt(r[n]))))
    rep.residuals["A_strict_lower"] = sup(np.triu(A))
    rep.residuals["P_antisym"] = sup(P + P.T)
    rep.residuals["H_antisym"] = sup(H + H.T)
    if pot.is_gaussian:
        k = np.arange(0, cut - 2)
        rep.residuals["flow_pm2"] = float(max(np.max(np.abs(flow[k, k + 2])), np.max(np.abs(flow[k + 2, k]))))
    return rep
