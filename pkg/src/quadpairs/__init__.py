"""Exponential sums and lattice-point counts for a diagonal pair of quadratic forms."""
from .arith import SumValue
from .counting import LinearSystem, WeightSpec, count_S, count_T, ratio_diagnostic, reduce_to_pair
from .expsums import D_d, M_dq, Q_q, S_dq, rho
from .forms import MClass, QuadPair, classify_m, new_quad_pair, profile
from .verify import CheckReport, check_explicit, check_growth

__all__ = [
    "SumValue",
    "QuadPair",
    "new_quad_pair",
    "MClass",
    "profile",
    "classify_m",
    "S_dq",
    "D_d",
    "Q_q",
    "M_dq",
    "rho",
    "WeightSpec",
    "LinearSystem",
    "reduce_to_pair",
    "count_S",
    "count_T",
    "ratio_diagnostic",
    "CheckReport",
    "check_explicit",
    "check_growth",
]
