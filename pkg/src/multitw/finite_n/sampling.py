"""Largest eigenvalue of the beta = 2 Hermite ensemble by Sturm bisection.

The tridiagonal model ``(1/sqrt 2) tridiag(chi_{2(N-i)}, N(0, 2), chi_{2(N-i)})``
has eigenvalue density ``prod exp(-l^2/2) |Delta|^2``.  Multiplying by
``1/sqrt(2 alpha_hat)`` gives ``prod exp(-alpha_hat l^2) |Delta|^2``, the
weight used throughout :mod:`multitw.finite_n`.

Samples are drawn in fixed-size shards; shard ``j`` uses a Philox stream
seeded by ``SeedSequence([seed, j])``, so output is bit-identical for a given
``(seed, n_samples, shard_size)`` whatever the evaluation order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError


@dataclass
class EmpiricalCDF:
    samples: np.ndarray  # sorted

    @property
    def n(self) -> int:
        return int(self.samples.size)

    def cdf(self, y) -> np.ndarray:
        return np.searchsorted(self.samples, np.asarray(y, dtype=float), side="right") / self.n

    def standard_error(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        return np.sqrt(p * (1 - p) / self.n)

    def merge(self, other: "EmpiricalCDF") -> "EmpiricalCDF":
        return EmpiricalCDF(np.sort(np.concatenate([self.samples, other.samples]), kind="stable"))

    def moments(self) -> tuple:
        return float(self.samples.mean()), float(self.samples.var(ddof=1))


def _tridiagonal_batch(rng: np.random.Generator, N: int, m: int) -> tuple:
    diag = rng.standard_normal((m, N))  # N(0, 2) / sqrt 2
    dof = 2 * np.arange(N - 1, 0, -1)
    off = np.sqrt(rng.chisquare(dof, size=(m, N - 1)) / 2.0)
    return diag, off


def _count_below(diag: np.ndarray, off2: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Number of eigenvalues below ``x`` per row (negative LDL^T pivots)."""
    tiny = np.finfo(float).tiny
    d = diag[:, 0] - x
    count = (d < 0).astype(int)
    for i in range(1, diag.shape[1]):
        d = np.where(d == 0.0, tiny, d)
        d = diag[:, i] - x - off2[:, i - 1] / d
        count += d < 0
    return count


def max_eigenvalue_sturm(diag: np.ndarray, off: np.ndarray, rtol: float = 4 * np.finfo(float).eps) -> np.ndarray:
    """Largest eigenvalue of each symmetric tridiagonal row-batch by bisection."""
    diag = np.atleast_2d(diag)
    N = diag.shape[1]
    if N == 1:
        return diag[:, 0].copy()
    off = np.abs(np.atleast_2d(off))
    rad = np.zeros_like(diag)
    rad[:, :-1] += off
    rad[:, 1:] += off
    lo = np.min(diag - rad, axis=1)
    hi = np.max(diag + rad, axis=1)
    off2 = off**2
    scale = np.maximum(np.abs(lo), np.abs(hi))
    for _ in range(200):
        if np.all(hi - lo <= rtol * scale + 1e-300):
            break
        mid = 0.5 * (lo + hi)
        full = _count_below(diag, off2, mid) >= N  # all eigenvalues below mid
        hi = np.where(full, mid, hi)
        lo = np.where(full, lo, mid)
    return 0.5 * (lo + hi)


def gue_sample_maxeig(
    N: int, n_samples: int, seed: int, alpha_hat: float = 1.0, shard_size: int = 20000
) -> EmpiricalCDF:
    if not 1 <= N <= 500:
        raise ValidationError("N must be in [1, 500]")
    if not 1 <= n_samples <= 10**7:
        raise ValidationError("n_samples must be in [1, 1e7]")
    if not alpha_hat > 0:
        raise ValidationError("alpha_hat must be positive")
    out = []
    n_shards = math.ceil(n_samples / shard_size)
    for j in range(n_shards):
        m = min(shard_size, n_samples - j * shard_size)
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, j])))
        d, e = _tridiagonal_batch(rng, N, m)
        out.append(max_eigenvalue_sturm(d, e))
    lam = np.concatenate(out) / math.sqrt(2.0 * alpha_hat)
    return EmpiricalCDF(np.sort(lam, kind="stable"))
