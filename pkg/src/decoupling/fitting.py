"""Power-law exponent fits and verdicts against predicted rational exponents."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Sequence

import numpy as np


class Verdict(str, enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class ScalingSeries:
    """Points ``(N, value)`` with ``N`` strictly increasing, at least three of them."""

    N: tuple[float, ...]
    values: tuple[float, ...]
    label: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "N", tuple(float(x) for x in self.N))
        object.__setattr__(self, "values", tuple(float(x) for x in self.values))
        if len(self.N) != len(self.values):
            raise ValueError("N and values differ in length")
        if len(self.N) < 3:
            raise ValueError("a scaling series needs at least 3 points")
        if any(n <= 0 for n in self.N):
            raise ValueError("abscissae must be positive")
        if any(b <= a for a, b in zip(self.N, self.N[1:])):
            raise ValueError("abscissae must be strictly increasing")

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[float, float]], label: str = "") -> "ScalingSeries":
        pairs = sorted(pairs)
        return cls(tuple(n for n, _ in pairs), tuple(v for _, v in pairs), label)


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    max_residual: float
    predicted: Fraction | None = None
    tol: float | None = None
    verdict: Verdict | None = None
    label: str = ""

    def to_dict(self) -> dict:
        out = {
            "label": self.label,
            "slope": self.slope,
            "intercept": self.intercept,
            "max_residual": self.max_residual,
        }
        if self.predicted is not None:
            out["predicted"] = f"{self.predicted.numerator}/{self.predicted.denominator}"
            out["predicted_float"] = float(self.predicted)
        if self.tol is not None:
            out["tol"] = self.tol
        if self.verdict is not None:
            out["verdict"] = self.verdict.value
        return out


def _line_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    xc = x - x.mean()
    slope = float(np.dot(xc, y - y.mean()) / np.dot(xc, xc))
    intercept = float(y.mean() - slope * x.mean())
    resid = y - (intercept + slope * x)
    return slope, intercept, float(np.max(np.abs(resid)))


def fit_exponent(series: ScalingSeries) -> FitResult:
    """Least-squares line through ``(log N, log value)``.

    Values are divided by the first value before taking logs, so rescaling
    the whole series by a power of two leaves the slope bit-identical.
    """
    vals = np.asarray(series.values)
    if np.any(vals <= 0) or not np.all(np.isfinite(vals)):
        raise ValueError("power-law fits need positive finite values")
    x = np.log(np.asarray(series.N))
    ref = vals[0]
    y = np.log(vals / ref)
    slope, intercept, resid = _line_fit(x, y)
    return FitResult(slope, intercept + math.log(ref), resid, label=series.label)


def compare(fit: FitResult, predicted: Fraction | float, tol: float) -> FitResult:
    """Attach a two-sided verdict.

    A large residual makes the verdict inconclusive regardless of the slope.
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    predicted = Fraction(predicted).limit_denominator(10**9)
    if fit.max_residual > 0.5 * tol:
        verdict = Verdict.INCONCLUSIVE
    elif abs(fit.slope - float(predicted)) <= tol:
        verdict = Verdict.PASS
    else:
        verdict = Verdict.FAIL
    return replace(fit, predicted=predicted, tol=tol, verdict=verdict)


def compare_one_sided(
    fit: FitResult, lower: Fraction, upper_cap: Fraction | float, tol: float, cap_tol: float = 0.15
) -> FitResult:
    """Pass iff ``lower - tol <= slope <= upper_cap + cap_tol``.

    Used where only a lower bound is predicted; ``upper_cap`` is the sharp
    exponent, a sanity ceiling rather than a prediction.
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    lower = Fraction(lower)
    ok = float(lower) - tol <= fit.slope <= float(upper_cap) + cap_tol
    return replace(fit, predicted=lower, tol=tol, verdict=Verdict.PASS if ok else Verdict.FAIL)


def log_growth_fit(Ms: Sequence[float], values: Sequence[float]) -> tuple[float, float]:
    """``(a, b)`` in ``value ~ a + b log M`` by least squares."""
    if len(Ms) < 3 or len(Ms) != len(values):
        raise ValueError("need at least 3 matching points")
    x = np.log(np.asarray(Ms, dtype=float))
    y = np.asarray(values, dtype=float)
    b, a, _ = _line_fit(x, y)
    return a, b
