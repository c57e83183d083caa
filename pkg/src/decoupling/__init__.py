"""Exponent theory, Weyl-sum moments and extremizer ratios for paraboloid decoupling."""

from .exponents import DiagramPoint, ParaboloidSpec, sharp_exponent, verify_all
from .fitting import ScalingSeries, Verdict, compare, fit_exponent
from .harness import BoxSpec, Kind, ratio_constant, ratio_expsum, ratio_hyperplane
from .weyl import GridSpec, moment_2d

__all__ = [
    "BoxSpec", "DiagramPoint", "GridSpec", "Kind", "ParaboloidSpec", "ScalingSeries", "Verdict",
    "compare", "fit_exponent", "moment_2d", "ratio_constant", "ratio_expsum", "ratio_hyperplane",
    "sharp_exponent", "verify_all",
]
