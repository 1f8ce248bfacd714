"""Edge scaling of the Gaussian model onto the k = 1 variable.

For the weight ``exp(-alpha_hat l^2)`` with ``N`` eigenvalues the equilibrium
density is a semicircle on ``[-y_c, y_c]`` with ``y_c = sqrt(2N/alpha_hat)``.
Near ``y_c`` the largest eigenvalue fluctuates on the scale ``N^(-1/6)``:

    y = y_c + t / (sqrt(2 alpha_hat) N^(1/6)),

with ``t`` the Tracy-Widom variable.  In the unit ``a = N^(-2/3)`` of the
scaled string equation this is ``y = y_c + a c_1 s`` with
``c_1 = sqrt(N / (2 alpha_hat)) / gamma^2`` and ``s = gamma^2 t``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError
from ..painleve import GAMMA


@dataclass(frozen=True)
class ScalingMap:
    N: int
    alpha_hat: float = 1.0

    def __post_init__(self):
        if self.N < 1 or not self.alpha_hat > 0:
            raise ValidationError("need N >= 1 and alpha_hat > 0")

    @property
    def y_c(self) -> float:
        return math.sqrt(2.0 * self.N / self.alpha_hat)

    @property
    def a(self) -> float:
        return self.N ** (-2.0 / 3.0)

    @property
    def width(self) -> float:
        """``dy/dt``."""
        return 1.0 / (math.sqrt(2.0 * self.alpha_hat) * self.N ** (1.0 / 6.0))

    @property
    def c1(self) -> float:
        return self.width / (self.a * GAMMA**2)

    def y_of_t(self, t):
        return self.y_c + self.width * np.asarray(t, dtype=float)

    def t_of_y(self, y):
        return (np.asarray(y, dtype=float) - self.y_c) / self.width

    def s_of_t(self, t):
        return GAMMA**2 * np.asarray(t, dtype=float)

    def y_of_s(self, s):
        return self.y_c + self.a * self.c1 * np.asarray(s, dtype=float)
