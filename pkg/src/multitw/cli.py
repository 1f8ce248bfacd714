"""Command-line entry point.

Every output starts with ``#`` header lines carrying the tool version, the
hash of the canonical run configuration and a residual summary, followed by
CSV, JSON or a scalar.  Exit codes: 0 success, 2 invalid input, 3 solver
failure, 4 failed cross-check, 1 anything else from the package.
"""
from __future__ import annotations

import argparse
import hashlib
import io
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .errors import MultiTWError

PRECISION_ENV = "MULTITW_PRECISION_BITS"


def default_bits() -> int:
    return int(os.environ.get(PRECISION_ENV, "106"))


def config_hash(cfg: dict) -> str:
    canon = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:12]


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


class Output:
    def __init__(self, cfg: dict):
        self.cfg = cfg
        self.header = [f"multitw {__version__}", f"config {config_hash(cfg)} {json.dumps(cfg, sort_keys=True)}"]
        self.body = io.StringIO()

    def note(self, text: str):
        self.header.append(text)

    def residual(self, name: str, value: float):
        self.header.append(f"residual {name} {float(value):.6e}")

    def csv(self, columns: list, rows):
        self.body.write(",".join(columns) + "\n")
        for row in rows:
            self.body.write(",".join(_fmt(v) for v in row) + "\n")

    def json(self, obj):
        self.body.write(json.dumps(obj, indent=1, sort_keys=True, default=_json_default) + "\n")

    def text(self, s: str):
        self.body.write(s if s.endswith("\n") else s + "\n")

    def render(self) -> str:
        return "".join(f"# {h}\n" for h in self.header) + self.body.getvalue()


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    raise TypeError(type(o).__name__)


def _grid(lo: float, hi: float, step: float) -> np.ndarray:
    if not step > 0 or hi < lo:
        from .errors import ValidationError

        raise ValidationError("need step > 0 and smax >= smin")
    n = int(round((hi - lo) / step))
    return np.round(lo + step * np.arange(n + 1), 12)


def _solver_config(a):
    from .painleve import SolverConfig

    kw = {}
    for name in ("p", "h", "L"):
        v = getattr(a, name, None)
        if v is not None:
            kw[name] = v
    return SolverConfig(**kw)


# ---------------------------------------------------------------------------
# subcommands

def cmd_lenard(a, out: Output):
    from .lenard import get_table, table_json

    table = get_table(a.kmax)
    if a.format == "json":
        out.body.write(table_json(table) + "\n")
        return
    out.text(table.to_text().rstrip("\n"))
    if a.print:
        for k in range(1, a.kmax):
            out.text(f"k={k} string L'_{k + 1} - 4 s L'_{k}: {table.prime(k + 1).pretty()} - 4 s ({table.prime(k).pretty()})")


def cmd_tw(a, out: Output):
    from .painleve import GAMMA, HierarchySpec, gap_curve, paper_variable

    spec = HierarchySpec.make(a.k)
    cfg = _solver_config(a)
    grid = _grid(a.smin, a.smax, a.step)
    if a.k == 1:
        # k = 1 is reported in the Tracy-Widom variable t with P = F2(t)
        curve = gap_curve(spec, paper_variable(grid), cfg)
        scale = GAMMA**2
        out.note("variable t = 2^(2/3) s (Tracy-Widom); pdf and dlogp per unit t")
    else:
        curve = gap_curve(spec, grid, cfg)
        scale = 1.0
    out.note(f"solver {cfg.hash()}")
    out.residual("max_newton", float(np.max(curve.newton_residual)))
    out.residual("route_gap", curve.max_route_gap() * scale)
    out.residual("max_tail", float(np.max(curve.tail)))
    rows = zip(grid, curve.cdf, curve.pdf * scale, curve.dlog_p * scale, curve.dlog_p_fd * scale, curve.newton_residual)
    out.csv(["s", "cdf", "pdf", "dlogp_i", "dlogp_ii", "newton_residual"], rows)


def cmd_gap(a, out: Output):
    from .painleve import HierarchySpec, background_solution, continuation, dlog_gap_integral, log_gap, make_mesh

    spec = HierarchySpec.make(a.k)
    cfg = _solver_config(a)
    bg = background_solution(spec, make_mesh(spec, max(a.s, 1.0), cfg), cfg)
    sol = continuation(spec, [a.s], bg, cfg)[0]
    lp = log_gap(sol, bg)
    out.residual("newton", sol.newton_residual)
    out.json({"k": a.k, "s": a.s, "log_p": lp, "p": math.exp(lp), "dlog_p": dlog_gap_integral(sol, spec.lenard)})


def cmd_p34(a, out: Output):
    from .painleve import (
        HierarchySpec,
        background_solution,
        continuation,
        equation_residual,
        first_integral_residual,
        make_mesh,
    )

    spec = HierarchySpec.make(a.k)
    cfg = _solver_config(a)
    bg = background_solution(spec, make_mesh(spec, max(a.s, 1.0), cfg), cfg)
    sol = continuation(spec, [a.s], bg, cfg)[0]
    eq = equation_residual(sol)
    fi = first_integral_residual(sol, spec.lenard)
    out.residual("equation", eq)
    out.residual("first_integral", fi)
    rec = {
        "k": a.k,
        "s": a.s,
        "converged": sol.converged,
        "iterations": sol.iterations,
        "newton_residual": sol.newton_residual,
        "equation_residual": eq,
        "first_integral_residual": fi,
        "solver": cfg.hash(),
    }
    if a.dump_grid:
        rec["x"] = sol.x_grid
        rec["u"] = sol.u1
    out.json(rec)


def cmd_backlund(a, out: Output):
    from .backlund import chain_from_solution, tau_profile
    from .painleve import HierarchySpec, background_solution, continuation, make_mesh

    spec = HierarchySpec.make(a.k)
    cfg = _solver_config(a)
    bg = background_solution(spec, make_mesh(spec, max(a.s, 1.0), cfg), cfg)
    sol = continuation(spec, [a.s], bg, cfg)[0]
    ch = chain_from_solution(sol, spec.lenard)
    out.residual("schrodinger", ch.residual_schrodinger)
    out.residual("weqn", ch.residual_weqn)
    out.json(
        {
            "k": a.k,
            "s": a.s,
            "imaginary_psi": ch.imaginary,
            "kept_fraction": ch.kept_fraction,
            "residual_schrodinger": ch.residual_schrodinger,
            "residual_weqn": ch.residual_weqn,
            "residual_first_integral": ch.residual_first_integral,
            "residual_u_relation": ch.residual_u_relation,
            "tau": tau_profile(a.k, a.s),
        }
    )


def _potential(a):
    from .finite_n import Potential

    if a.potential == "gauss":
        return Potential.gaussian(a.alpha)
    return Potential.quartic(a.g2, a.g4, a.alpha)


def cmd_finite_n(a, out: Output):
    from .finite_n import (
        build_lax_matrices_and_check,
        gap_probability_finite_n,
        stieltjes_recurrence,
        verify_recurrence_identities,
    )

    pot = _potential(a)
    if a.action == "gap":
        lp, p = gap_probability_finite_n(pot, a.N, a.y, a.bits)
        out.text(repr(p))
        out.note(f"log_p {lp!r}")
        return
    sys_ = stieltjes_recurrence(pot, a.y, a.nmax, a.bits)
    rep = {"gram_error": sys_.gram_error}
    if pot.is_gaussian:
        ids = verify_recurrence_identities(sys_)
        rep["recurrence"] = ids.residuals
        rep["orders"] = ids.orders
    lax = build_lax_matrices_and_check(sys_)
    rep["lax"] = lax.residuals
    worst = max(v for d in (rep.get("recurrence", {}), lax.residuals) for v in d.values())
    out.residual("worst", worst)
    out.json(rep)


def cmd_gue(a, out: Output):
    from .finite_n import gue_sample_maxeig

    emp = gue_sample_maxeig(a.n, a.samples, a.seed, a.alpha)
    ys = _grid(a.ymin, a.ymax, a.ystep)
    c = emp.cdf(ys)
    out.note(f"samples {emp.n}")
    out.csv(["y", "cdf", "stderr"], zip(ys, c, emp.standard_error(c)))


def cmd_oracle(a, out: Output):
    from .airy import fredholm_det_airy

    grid = _grid(a.smin, a.smax, a.step)
    res = [fredholm_det_airy(float(s), a.nodes, True) for s in grid]
    out.residual("max_self_error", max(r.self_error for r in res))
    out.csv(["s", "F2", "self_error"], ((r.s, r.f2, r.self_error) for r in res))


def cmd_verify_all(a, out: Output):
    from .verify import verify_all

    recs = verify_all(quick=a.quick)
    failed = [r for r in recs if not r.passed]
    out.note(f"checks {len(recs)} failed {len(failed)}")
    for r in recs:
        out.text(r.line())
    return 4 if failed else 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="multitw", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"multitw {__version__}")
    ap.add_argument("--out", default=None, help="write output to this file instead of stdout")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def solver_flags(p):
        p.add_argument("--p", type=int, default=None, help="polynomial degree per element")
        p.add_argument("--h", type=float, default=None, help="element width")
        p.add_argument("--L", type=float, default=None, help="left domain length")

    p = sub.add_parser("lenard", help="Lenard table L_0..L_kmax")
    p.add_argument("--kmax", type=int, default=4)
    p.add_argument("--print", action="store_true", help="also print string-equation left sides")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_lenard)

    p = sub.add_parser("tw", help="gap-probability curve P^(k)(s)")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--smin", type=float, default=-8.0)
    p.add_argument("--smax", type=float, default=4.0)
    p.add_argument("--step", type=float, default=0.05)
    solver_flags(p)
    p.set_defaults(func=cmd_tw)

    p = sub.add_parser("gap", help="log P^(k)(s) at one s")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--s", type=float, required=True)
    solver_flags(p)
    p.set_defaults(func=cmd_gap)

    p = sub.add_parser("p34", help="solve the scaled string equation at one s")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--s", type=float, default=0.0)
    p.add_argument("--dump-grid", action="store_true")
    solver_flags(p)
    p.set_defaults(func=cmd_p34)

    p = sub.add_parser("backlund", help="Backlund chain residuals")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--s", type=float, default=0.0)
    solver_flags(p)
    p.set_defaults(func=cmd_backlund)

    p = sub.add_parser("finite-n", help="finite-N orthogonal polynomial engine")
    p.add_argument("action", choices=("verify", "gap"))
    p.add_argument("--potential", choices=("gauss", "quartic"), default="gauss")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--g2", type=float, default=1.0)
    p.add_argument("--g4", type=float, default=1.0)
    p.add_argument("--y", type=float, default=1.0)
    p.add_argument("--nmax", type=int, default=30)
    p.add_argument("--N", type=int, default=10)
    p.add_argument("--bits", type=int, default=default_bits())
    p.set_defaults(func=cmd_finite_n)

    p = sub.add_parser("gue", help="Monte-Carlo largest eigenvalue")
    p.add_argument("action", choices=("sample",))
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--samples", type=int, default=100000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--ymin", type=float, default=0.0)
    p.add_argument("--ymax", type=float, default=6.0)
    p.add_argument("--ystep", type=float, default=0.1)
    p.set_defaults(func=cmd_gue)

    p = sub.add_parser("oracle", help="reference computations")
    p.add_argument("action", choices=("fredholm",))
    p.add_argument("--smin", type=float, default=-8.0)
    p.add_argument("--smax", type=float, default=4.0)
    p.add_argument("--step", type=float, default=0.25)
    p.add_argument("--nodes", type=int, default=60)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("verify-all", help="run the residual suites")
    p.add_argument("--quick", action="store_true")
    p.set_defaults(func=cmd_verify_all)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    a = ap.parse_args(argv)
    cfg = {k: v for k, v in sorted(vars(a).items()) if k not in ("func", "out")}
    out = Output(cfg)
    try:
        code = a.func(a, out) or 0
    except MultiTWError as e:
        print(f"multitw: {type(e).__name__}: {e}", file=sys.stderr)
        return e.exit_code
    text = out.render()
    if a.out:
        with open(a.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
