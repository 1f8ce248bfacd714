"""Aggregated residual checks used by ``multitw verify-all``."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from .diffpoly import DiffPoly
from .lenard import beta, get_table, verify_shift_identity


@dataclass
class CheckRecord:
    suite: str
    name: str
    value: float
    threshold: float

    @property
    def passed(self) -> bool:
        return bool(self.value <= self.threshold)

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"{mark}  {self.suite:<10s} {self.name:<40s} {self.value:.3e} <= {self.threshold:.1e}"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


def _bool(ok: bool) -> float:
    return 0.0 if ok else 1.0


U = DiffPoly.var


def expected_string_displays() -> dict:
    """Hand-expanded string-equation left sides ``L'_{k+1} - 4 s L'_k`` at ``s = 0``."""
    u, u1, u2, u3, u4, u5, u7 = U(0), U(1), U(2), U(3), U(4), U(5), U(7)
    return {
        1: U(3) + 6 * u * u1,
        2: U(5) + 10 * u * u3 + 20 * u1 * u2 + 30 * u * u * u1,
        3: u7 + 14 * u * u5 + 42 * u1 * u4 + 70 * u2 * u3 + 70 * u * u * u3 + 280 * u * u1 * u2
        + 70 * u1 ** 3 + 140 * u ** 3 * u1,
    }


def symbolic_suite(k_max: int = 6) -> list:
    out = []
    table = get_table(k_max + 1)
    zero = all(table[l].constant_term() == 0 for l in range(1, k_max + 1))
    out.append(CheckRecord("symbolic", f"L_l[0] = 0, l=1..{k_max}", _bool(zero), 0.0))
    homog = all(table[l].is_homogeneous(2 * l) for l in range(1, k_max + 1))
    out.append(CheckRecord("symbolic", "weight-2l homogeneity", _bool(homog), 0.0))
    zs = [Fraction(1, 3), Fraction(-2, 5), Fraction(7, 2), Fraction(-1), Fraction(5, 11)]
    shift_ok = all(verify_shift_identity(k, z, table)[0] for k in range(k_max + 1) for z in zs)
    out.append(CheckRecord("symbolic", "shift identity k<=6, 5 rational z", _bool(shift_ok), 0.0))
    beta_ok = all(table[k].coeff({0: k}) == beta(k) for k in range(1, k_max + 1))
    out.append(CheckRecord("symbolic", "beta_k = [u^k] L_k", _bool(beta_ok), 0.0))
    for k, want in expected_string_displays().items():
        got = table.string_lhs(k, 0)
        out.append(CheckRecord("symbolic", f"string display k={k}", _bool(got == want), 0.0))
    return out


def finite_n_suite(ys=(0.5, 1.0, 2.0), n_max: int = 30, lax_n_max: int = 40) -> list:
    from .finite_n import Potential, build_lax_matrices_and_check, stieltjes_recurrence, verify_recurrence_identities

    out = []
    pot = Potential.gaussian(1.0)
    for y in ys:
        sys = stieltjes_recurrence(pot, y, n_max)
        rep = verify_recurrence_identities(sys)
        for key in ("string1", "string2", "sn", "Pid2"):
            out.append(CheckRecord("finite-N", f"{key} y={y}", rep.residuals[key], 1e-8))
        for key in ("snG", "rnG", "Toda"):
            out.append(CheckRecord("finite-N", f"{key} y={y}", rep.residuals[key], 1e-6))
            out.append(CheckRecord("finite-N", f"{key} order |ratio-4| y={y}", abs(rep.orders[key] - 4.0), 0.25))
        lax = build_lax_matrices_and_check(stieltjes_recurrence(pot, y, lax_n_max))
        for key in ("stringeqn", "flow", "Hexp", "Aid"):
            out.append(CheckRecord("finite-N", f"lax {key} y={y}", lax.residuals[key], 1e-7))
    big = stieltjes_recurrence(pot, 12.0, n_max)
    h = [float(v) for v in big.h]
    r = [float(v) for v in big.r]
    herm_h = max(abs(h[n] / (math.factorial(n) * math.sqrt(math.pi) / 2**n) - 1) for n in range(n_max + 1))
    herm_r = max(abs(r[n] / (n / 2) - 1) for n in range(1, n_max + 1))
    out.append(CheckRecord("finite-N", "Hermite h_n relative", herm_h, 1e-10))
    out.append(CheckRecord("finite-N", "Hermite r_n relative", herm_r, 1e-10))
    return out


def oracle_suite() -> list:
    from .finite_n import Potential, direct_quadrature_oracle, gap_probability_finite_n

    out = []
    pot = Potential.gaussian(1.0)
    err = max(abs(gap_probability_finite_n(pot, 1, y)[1] - 0.5 * (1 + math.erf(y))) for y in (-1.0, 0.5, 1.0, 2.0))
    out.append(CheckRecord("oracle", "N=1 erf closed form", err, 1e-10))
    for N in (2, 3):
        for y in (0.0, 0.5, 1.5):
            d = abs(gap_probability_finite_n(pot, N, y)[1] - direct_quadrature_oracle(pot, N, y))
            out.append(CheckRecord("oracle", f"N={N} y={y} vs direct quadrature", d, 1e-8))
    return out


def tw_quick_suite() -> list:
    from .airy import fredholm_det_airy
    from .painleve import HierarchySpec, gap_curve, paper_variable

    t = np.arange(-4.0, 2.0001, 0.25)
    curve = gap_curve(HierarchySpec.make(1), paper_variable(t), check=False)
    f2 = np.array([fredholm_det_airy(float(tt), 60, False).f2 for tt in t])
    return [
        CheckRecord("tw", "k=1 P(s) vs Fredholm F2", float(np.max(np.abs(curve.cdf - f2))), 1e-6),
        CheckRecord("tw", "k=1 Newton residual", float(np.max(curve.newton_residual)), 1e-8),
    ]


def verify_all(quick: bool = True) -> list:
    records = symbolic_suite() + finite_n_suite()
    if not quick:
        records += oracle_suite() + tw_quick_suite()
    return records
