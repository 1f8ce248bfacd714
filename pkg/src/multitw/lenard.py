"""Lenard differential operators and their closed-form coefficients.

``L_0 = 1/2`` and ``d L_{l+1} = (d^3 + 4 u d + 2 u') L_l`` with ``L_l[0] = 0``
for ``l >= 1``.  ``L_l`` is ``4**l`` times the Gelfand-Dikii polynomial
``R_l``.  Tables are cached on disk in the stable text form of
:class:`~multitw.diffpoly.DiffPoly` because ``L_7`` and ``L_8`` are large.
"""
from __future__ import annotations

import json
import logging
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable

from .diffpoly import DiffPoly, u
from .errors import IndexOutOfRange

log = logging.getLogger(__name__)

CACHE_ENV = "MULTITW_CACHE"


def lenard_operator(p: DiffPoly) -> DiffPoly:
    """Apply ``d^3 + 4 u d + 2 u'`` to ``p``."""
    dp = p.total_derivative()
    return dp.d(2) + 4 * u(0) * dp + 2 * u(1) * p


@dataclass(frozen=True)
class LenardTable:
    k_max: int
    entries: tuple
    primes: tuple

    def __getitem__(self, l: int) -> DiffPoly:
        return self.entries[l]

    def prime(self, l: int) -> DiffPoly:
        return self.primes[l]

    def string_lhs(self, k: int, s: Fraction | int = 0) -> DiffPoly:
        """``L'_{k+1} - 4 s L'_k`` for a numeric (rational) ``s``."""
        if k + 1 > self.k_max:
            raise IndexOutOfRange(f"table depth {self.k_max} < {k + 1}")
        return self.primes[k + 1] - 4 * Fraction(s) * self.primes[k]

    def to_text(self) -> str:
        lines = [f"# Lenard table k_max={self.k_max}"]
        for l, p in enumerate(self.entries):
            lines.append(f"L_{l} = {p}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "k_max": self.k_max,
            "entries": [p.to_json() for p in self.entries],
            "primes": [p.to_json() for p in self.primes],
        }

    @classmethod
    def from_text(cls, text: str) -> "LenardTable":
        entries = []
        for line in text.splitlines():
            if not line.strip() or line.startswith("#"):
                continue
            name, _, body = line.partition(" = ")
            if int(name[2:]) != len(entries):
                raise ValueError(f"out-of-order entry {name}")
            entries.append(DiffPoly.parse(body))
        return cls._from_entries(entries)

    @classmethod
    def _from_entries(cls, entries) -> "LenardTable":
        primes = tuple(p.total_derivative() for p in entries)
        return cls(k_max=len(entries) - 1, entries=tuple(entries), primes=primes)


def _extend(entries: list, k_max: int) -> list:
    entries = list(entries) or [DiffPoly.const(Fraction(1, 2))]
    while len(entries) <= k_max:
        nxt = lenard_operator(entries[-1]).integrate_exact()
        entries.append(nxt)
    return entries


def _default_cache_dir() -> Path | None:
    env = os.environ.get(CACHE_ENV)
    if env is not None:
        return Path(env) if env else None
    return None


def build_table(k_max: int, cache_dir: str | os.PathLike | None = None) -> LenardTable:
    """Build ``L_0 .. L_kmax`` (reusing a cached prefix when one is on disk)."""
    if k_max < 0:
        raise IndexOutOfRange("k_max must be >= 0")
    cache = Path(cache_dir) if cache_dir is not None else _default_cache_dir()
    entries: list = []
    path = None
    if cache is not None:
        path = cache / "lenard_table.txt"
        if path.exists():
            try:
                entries = list(LenardTable.from_text(path.read_text()).entries)
            except (ValueError, ZeroDivisionError):
                log.warning("ignoring unreadable Lenard cache %s", path)
                entries = []
    n_cached = len(entries)
    entries = _extend(entries, k_max)
    if path is not None and len(entries) > n_cached:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(LenardTable._from_entries(entries).to_text())
    return LenardTable._from_entries(entries[: k_max + 1])


_TABLE_MEMO: dict = {}


def get_table(k_max: int) -> LenardTable:
    """Process-wide memoised table."""
    if k_max < 0:
        raise IndexOutOfRange("k_max must be >= 0")
    best = max(_TABLE_MEMO, default=-1)
    if best < k_max:
        _TABLE_MEMO[k_max] = build_table(k_max)
        best = k_max
    full = _TABLE_MEMO[best]
    return LenardTable._from_entries(full.entries[: k_max + 1]) if best > k_max else full


# ---------------------------------------------------------------------------
# closed-form coefficients

def half_integer_gamma_ratio(n: int) -> Fraction:
    """``Gamma(n + 1/2) / Gamma(1/2)`` as an exact rational (n >= 0)."""
    out = Fraction(1)
    for i in range(n):
        out *= Fraction(2 * i + 1, 2)
    return out


def alpha_direct(k: int, j: int) -> Fraction:
    """``Gamma(k+1/2) / (Gamma(k-j+1) Gamma(j+1/2))`` by telescoping."""
    if not 0 <= j <= k:
        raise IndexOutOfRange(f"need 0 <= j <= k, got j={j}, k={k}")
    return half_integer_gamma_ratio(k) / (math.factorial(k - j) * half_integer_gamma_ratio(j))


def alpha_row(k: int) -> list:
    """``[alpha^(k)_0, ..., alpha^(k)_k]`` from the Pascal-type recursion."""
    row = [Fraction(1)]  # k = 0
    for kk in range(1, k + 1):
        head = half_integer_gamma_ratio(kk) / math.factorial(kk)
        row = [head] + [row[j] + row[j - 1] for j in range(1, kk)] + [Fraction(1)]
    return row


def beta(k: int) -> Fraction:
    """Coefficient of ``u^k`` in ``L_k``: ``4^(k-1) Gamma(k+1/2)/(Gamma(k+1) Gamma(3/2))``."""
    if k < 0:
        raise IndexOutOfRange("k must be >= 0")
    if k == 0:
        return Fraction(1, 2)
    return 4 ** (k - 1) * half_integer_gamma_ratio(k) / (math.factorial(k) * Fraction(1, 2))


def tau_prefactor(k: int, j: int) -> tuple:
    """``(rational, exponent)`` with tau_j(s) = rational * 2**exponent * s**(k-j)."""
    if not 0 <= j < k + 1:
        raise IndexOutOfRange(f"need 0 <= j <= k, got j={j}, k={k}")
    gam = half_integer_gamma_ratio(k) / (math.factorial(k - j) * half_integer_gamma_ratio(j + 1))
    return (2 * j + 1) * gam, Fraction(2 * k - 4 * j - 1, 2 * k + 1)


def tau(k: int, j: int) -> Callable[[float], float]:
    rat, ex = tau_prefactor(k, j)
    c = float(rat) * 2.0 ** float(ex)
    return lambda s: c * s ** (k - j)


def backlund_beta(k: int) -> float:
    """Argument scale of tau: ``2**((4k-2)/(2k+1))``."""
    return 2.0 ** ((4 * k - 2) / (2 * k + 1))


def hierarchy_coefficients(k: int, j: int):
    """``(alpha^(k)_j, beta_k, tau_j)`` for ``0 <= j <= k``."""
    if k < 0 or not 0 <= j <= k:
        raise IndexOutOfRange(f"need 0 <= j <= k, got j={j}, k={k}")
    return alpha_row(k)[j], beta(k), tau(k, j)


# ---------------------------------------------------------------------------
# shift identity

def shift_rhs(table: LenardTable, k: int, z: Fraction) -> DiffPoly:
    row = alpha_row(k)
    out = DiffPoly()
    for j in range(k + 1):
        out = out + table[j].scale((4 * z) ** (k - j) * row[j])
    return out


def verify_shift_identity(k: int, z, table: LenardTable | None = None):
    """Check ``L_k[u+z] == sum_j (4z)^(k-j) alpha^(k)_j L_j[u]`` exactly.

    Returns ``(ok, residual)``.
    """
    z = Fraction(z)
    table = table if table is not None else get_table(k)
    if k > table.k_max:
        raise IndexOutOfRange(f"table depth {table.k_max} < {k}")
    residual = table[k].substitute_shift(z) - shift_rhs(table, k, z)
    return (not residual), residual


def table_json(table: LenardTable) -> str:
    return json.dumps(table.to_json(), indent=1, sort_keys=True)
