"""Finite-N truncated Hermitian matrix model."""
from .identities import build_lax_matrices_and_check, verify_infinite_wall_string, verify_recurrence_identities
from .potential import Potential
from .sampling import EmpiricalCDF, gue_sample_maxeig
from .scaling import ScalingMap
from .stieltjes import OPSystem, direct_quadrature_oracle, gap_probability_finite_n, stieltjes_recurrence

__all__ = [
    "Potential",
    "OPSystem",
    "stieltjes_recurrence",
    "gap_probability_finite_n",
    "direct_quadrature_oracle",
    "verify_recurrence_identities",
    "verify_infinite_wall_string",
    "build_lax_matrices_and_check",
    "gue_sample_maxeig",
    "EmpiricalCDF",
    "ScalingMap",
]
