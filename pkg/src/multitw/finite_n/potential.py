"""Potentials ``V(l) = sum_l g_l l^l / l`` and the weight ``exp(-alpha_hat V)``."""
from __future__ import annotations

from dataclasses import dataclass

import mpmath
import numpy as np

from ..errors import NonIntegrableWeight, ValidationError


@dataclass(frozen=True)
class Potential:
    """``coefficients[l-1] = g_l``; ``alpha_hat = N alpha``."""

    coefficients: tuple
    alpha_hat: float = 1.0
    name: str = "custom"

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coefficients)
        object.__setattr__(self, "coefficients", coeffs)
        if not any(coeffs):
            raise ValidationError("potential needs at least one nonzero g_l")
        if not self.alpha_hat > 0:
            raise ValidationError("alpha_hat must be positive")

    @classmethod
    def gaussian(cls, alpha_hat: float = 1.0) -> "Potential":
        """``V = l^2`` (g_2 = 2)."""
        return cls((0.0, 2.0), alpha_hat, "gauss")

    @classmethod
    def quartic(cls, g2: float = 1.0, g4: float = 1.0, alpha_hat: float = 1.0) -> "Potential":
        return cls((0.0, g2, 0.0, g4), alpha_hat, "quartic")

    def with_alpha(self, alpha_hat: float) -> "Potential":
        return Potential(self.coefficients, alpha_hat, self.name)

    @property
    def degree(self) -> int:
        return max(l + 1 for l, g in enumerate(self.coefficients) if g)

    @property
    def is_gaussian(self) -> bool:
        return self.degree == 2 and self.coefficients[0] == 0.0 and self.coefficients[1] == 2.0

    def V(self, lam):
        lam = np.asarray(lam, dtype=float)
        return sum(g * lam ** (l + 1) / (l + 1) for l, g in enumerate(self.coefficients) if g)

    def dV(self, lam):
        lam = np.asarray(lam, dtype=float)
        return sum(g * lam**l for l, g in enumerate(self.coefficients) if g)

    def V_mp(self, lam):
        return mpmath.fsum(mpmath.mpf(g) * lam ** (l + 1) / (l + 1) for l, g in enumerate(self.coefficients) if g)

    def dV_coeffs(self) -> list:
        """Monomial coefficients of ``V'``: ``V'(l) = sum c_i l^i``."""
        return list(self.coefficients)

    def integrable_below(self) -> bool:
        """``exp(-alpha V)`` decays as ``l -> -inf``."""
        d = self.degree
        g = self.coefficients[d - 1]
        return (g > 0) if d % 2 == 0 else (g < 0)

    def integrable_above(self) -> bool:
        d = self.degree
        return self.coefficients[d - 1] > 0

    def check_integrable(self, y_infinite: bool = False):
        if not self.integrable_below():
            raise NonIntegrableWeight("exp(-alpha V) does not decay as lambda -> -inf")
        if y_infinite and not self.integrable_above():
            raise NonIntegrableWeight("exp(-alpha V) does not decay as lambda -> +inf; use finite walls")
