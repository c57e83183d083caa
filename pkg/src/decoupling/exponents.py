"""Exact exponent calculus for l^q(L^p) decoupling of paraboloids.

Every exponent here is the power of ``N = delta^{-(d-1)/2}`` in a decoupling
bound.  Points of the interpolation diagram are handled through reciprocals
``(rp, rq) = (1/p, 1/q)`` as :class:`fractions.Fraction`, with ``1/inf = 0``;
all formulas are affine in these coordinates, so comparisons are exact.

The module covers the sharp piecewise exponent (elliptic and hyperbolic
cases), the three extremizer lower bounds, the classical upper bounds that
serve as references, and an exhaustive checker showing that the lower bounds
jointly attain the sharp exponent.
"""

from __future__ import annotations

import enum
import functools
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence, Union

ExponentLike = Union[int, float, str, Fraction]

HALF = Fraction(1, 2)


class InvalidSpecError(ValueError):
    """Raised for a sign vector or dimension that does not define a paraboloid."""


class DiagramDomainError(ValueError):
    """Raised for a point outside ``[0, 1/2]^2``."""


# ---------------------------------------------------------------------------
# Rational helpers
# ---------------------------------------------------------------------------


def reciprocal(p: ExponentLike) -> Fraction:
    """Return ``1/p`` as an exact fraction, with ``1/inf = 0``.

    ``p`` may be an int, a Fraction, a string such as ``"10/3"`` or ``"inf"``,
    or ``math.inf``.  Finite floats are converted exactly, which is rarely
    what you want; prefer strings.
    """
    if isinstance(p, str):
        text = p.strip().lower()
        if text in {"inf", "infinity", "oo", "∞"}:
            return Fraction(0)
        value = Fraction(text)
    elif isinstance(p, float):
        if math.isinf(p) and p > 0:
            return Fraction(0)
        value = Fraction(p)
    else:
        value = Fraction(p)
    if value <= 0:
        raise ValueError(f"exponent must be positive, got {p!r}")
    return 1 / value


def format_rational(x: Fraction) -> str:
    """Serialize a fraction as ``"num/den"`` (always with a denominator)."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(text: str) -> Fraction:
    return Fraction(text.strip())


def format_exponent(r: Fraction) -> str:
    """Render an exponent given by its reciprocal: ``0 -> "inf"``."""
    if r == 0:
        return "inf"
    p = 1 / Fraction(r)
    return str(p.numerator) if p.denominator == 1 else format_rational(p)


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------


def signature_defect(v: Sequence[int]) -> int:
    """Minimum of the number of ``+1`` and ``-1`` entries of ``v``."""
    v = tuple(v)
    if not v:
        raise InvalidSpecError("sign vector must be nonempty")
    if any(s not in (1, -1) for s in v):
        raise InvalidSpecError(f"sign vector entries must be +1 or -1, got {v}")
    pos = sum(1 for s in v if s == 1)
    return min(pos, len(v) - pos)


def parse_signs(text: str) -> tuple[int, ...]:
    """Turn ``"++-"`` into ``(1, 1, -1)``; the unicode minus is accepted."""
    table = {"+": 1, "-": -1, "−": -1}
    try:
        return tuple(table[ch] for ch in text.strip())
    except KeyError as exc:
        raise InvalidSpecError(f"bad sign character {exc.args[0]!r} in {text!r}") from None


def format_signs(v: Sequence[int]) -> str:
    return "".join("+" if s == 1 else "-" for s in v)


@dataclass(frozen=True)
class ParaboloidSpec:
    """The paraboloid ``sum_i v_i xi_i^2`` over ``[0,1]^{d-1}`` in ``R^d``."""

    d: int
    v: tuple[int, ...]

    def __post_init__(self) -> None:
        if isinstance(self.d, bool) or not isinstance(self.d, int) or self.d < 2:
            raise InvalidSpecError(f"dimension must be an integer >= 2, got {self.d!r}")
        object.__setattr__(self, "v", tuple(int(s) for s in self.v))
        if len(self.v) != self.d - 1:
            raise InvalidSpecError(
                f"sign vector has length {len(self.v)}, expected d-1 = {self.d - 1}"
            )
        signature_defect(self.v)

    @classmethod
    def elliptic(cls, d: int) -> "ParaboloidSpec":
        return cls(d, (1,) * (d - 1))

    @classmethod
    def with_defect(cls, d: int, dv: int) -> "ParaboloidSpec":
        """Canonical representative ``(+,...,+,-,...,-)`` with ``dv`` minus signs."""
        if not 0 <= dv <= (d - 1) // 2:
            raise InvalidSpecError(f"defect {dv} impossible in dimension {d}")
        return cls(d, (1,) * (d - 1 - dv) + (-1,) * dv)

    @classmethod
    def from_signs(cls, d: int, signs: str) -> "ParaboloidSpec":
        return cls(d, parse_signs(signs))

    # cached_property writes to the instance __dict__, which frozen allows
    @functools.cached_property
    def dv(self) -> int:
        return signature_defect(self.v)

    @functools.cached_property
    def pd(self) -> Fraction:
        return Fraction(2 * (self.d + 1), self.d - 1)

    @functools.cached_property
    def pv(self) -> Fraction:
        return Fraction(2 * (self.d + 1 - self.dv), self.d - 1 - self.dv)

    @functools.cached_property
    def slope(self) -> Fraction:
        """``dv/(d-1)``, the weight of the hyperplane correction term."""
        return Fraction(self.dv, self.d - 1)

    @property
    def is_elliptic(self) -> bool:
        return self.dv == 0

    @property
    def signs(self) -> str:
        return format_signs(self.v)

    def canonical(self) -> "ParaboloidSpec":
        return ParaboloidSpec.with_defect(self.d, self.dv)


def critical_exponents(spec: ParaboloidSpec) -> tuple[Fraction, Fraction]:
    """``(p_d, p_v)`` as exact fractions."""
    return spec.pd, spec.pv


def canonical_specs(d: int) -> list[ParaboloidSpec]:
    """One spec per sign pattern up to permutation and global sign flip."""
    return [ParaboloidSpec.with_defect(d, dv) for dv in range((d - 1) // 2 + 1)]


def all_specs(d: int) -> Iterator[ParaboloidSpec]:
    for v in itertools.product((1, -1), repeat=d - 1):
        yield ParaboloidSpec(d, v)


@dataclass(frozen=True, order=True)
class DiagramPoint:
    """A point ``(1/p, 1/q)`` of the interpolation square ``[0, 1/2]^2``."""

    rp: Fraction
    rq: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "rp", Fraction(self.rp))
        object.__setattr__(self, "rq", Fraction(self.rq))
        for name in ("rp", "rq"):
            val = getattr(self, name)
            if not 0 <= val <= HALF:
                raise DiagramDomainError(f"{name} = {val} outside [0, 1/2]")

    @classmethod
    def from_pq(cls, p: ExponentLike, q: ExponentLike) -> "DiagramPoint":
        return cls(reciprocal(p), reciprocal(q))

    @property
    def p_text(self) -> str:
        return format_exponent(self.rp)

    @property
    def q_text(self) -> str:
        return format_exponent(self.rq)

    def __str__(self) -> str:
        return f"({self.rp}, {self.rq})"


class Region(str, enum.Enum):
    PENTAGON = "Pentagon"
    TRIANGLE = "Triangle"
    TRAPEZOID = "Trapezoid"


_REGION_ORDER = (Region.PENTAGON, Region.TRIANGLE, Region.TRAPEZOID)


@dataclass(frozen=True)
class RegionLabel:
    """All closed regions containing a point, plus any anchor it coincides with."""

    regions: frozenset[Region]
    vertices: tuple[str, ...] = ()

    @property
    def region(self) -> Region:
        return next(r for r in _REGION_ORDER if r in self.regions)

    @property
    def touches(self) -> tuple[Region, ...]:
        return tuple(r for r in _REGION_ORDER if r in self.regions and r != self.region)

    @property
    def on_boundary(self) -> bool:
        return len(self.regions) > 1

    def names(self) -> list[str]:
        return [r.value for r in _REGION_ORDER if r in self.regions]


def anchors(spec: ParaboloidSpec) -> dict[str, DiagramPoint]:
    """The seven anchor points of the interpolation diagram."""
    return dict(_anchors(spec.d, spec.dv))


@functools.lru_cache(maxsize=None)
def _anchors(d: int, dv: int) -> tuple[tuple[str, DiagramPoint], ...]:
    spec = ParaboloidSpec.with_defect(d, dv)
    pd, pv = spec.pd, spec.pv
    return tuple({
        "A1": DiagramPoint(0, 0),
        "A2": DiagramPoint(0, HALF),
        "A3": DiagramPoint(1 / pv, HALF),
        "A4": DiagramPoint(1 / pd, 1 / pd),
        "A5": DiagramPoint(1 / pd, 0),
        "A6": DiagramPoint(HALF, 0),
        "A7": DiagramPoint(HALF, HALF),
    }.items())


def l1_defect(spec: ParaboloidSpec, pt: DiagramPoint) -> Fraction:
    """Pentagon exponent minus triangle exponent.

    Vanishes exactly on the critical line through A3 and A4, is positive on
    the pentagon side and negative on the triangle side.
    """
    return HALF - spec.pd * pt.rp / 2 - spec.slope * (pt.rq - pt.rp)


def classify(spec: ParaboloidSpec, pt: DiagramPoint) -> RegionLabel:
    """Closed regions of the diagram containing ``pt``.

    The pentagon is ``rp <= 1/pd`` on the nonnegative side of l1, the triangle
    lies on or above the diagonal on the nonpositive side of l1, and the
    trapezoid is ``rp >= 1/pd`` on or below the diagonal.  For elliptic specs
    the triangle formula coincides with the trapezoid one and there is no
    hyperplane extremizer, so the strip ``rp >= 1/pd`` is labelled trapezoid
    throughout.
    """
    if not isinstance(pt, DiagramPoint):
        raise DiagramDomainError(f"expected a DiagramPoint, got {pt!r}")
    inv_pd = 1 / spec.pd
    side = l1_defect(spec, pt)
    regions = set()
    if pt.rp <= inv_pd and side >= 0:
        regions.add(Region.PENTAGON)
    if spec.dv == 0:
        if pt.rp >= inv_pd:
            regions.add(Region.TRAPEZOID)
    else:
        if pt.rq >= pt.rp and side <= 0:
            regions.add(Region.TRIANGLE)
        if pt.rp >= inv_pd and pt.rq <= pt.rp:
            regions.add(Region.TRAPEZOID)
    vertices = tuple(name for name, a in _anchors(spec.d, spec.dv) if a == pt)
    return RegionLabel(frozenset(regions), vertices)


# ---------------------------------------------------------------------------
# Exponent formulas
# ---------------------------------------------------------------------------


def region_exponent(spec: ParaboloidSpec, pt: DiagramPoint, region: Region) -> Fraction:
    """The sharp-exponent formula attached to ``region`` evaluated at ``pt``."""
    if region is Region.TRAPEZOID:
        return HALF - pt.rq
    if region is Region.TRIANGLE:
        return HALF - pt.rq + spec.slope * (pt.rq - pt.rp)
    if region is Region.PENTAGON:
        return 1 - spec.pd * pt.rp / 2 - pt.rq
    raise ValueError(region)


def elliptic_exponent(spec: ParaboloidSpec, pt: DiagramPoint) -> Fraction:
    """``max(1/2 - rq, 1 - pd*rp/2 - rq)``, the elliptic sharp exponent."""
    return max(HALF - pt.rq, 1 - spec.pd * pt.rp / 2 - pt.rq)


def lower_bound_constant(spec: ParaboloidSpec, pt: DiagramPoint) -> Fraction:
    """Exponent achieved by ``g = 1``."""
    return 1 - spec.pd * pt.rp / 2 - pt.rq


def lower_bound_expsum(spec: ParaboloidSpec, pt: DiagramPoint) -> Fraction:
    """Exponent achieved by point masses on the cap corners.

    For ``d >= 3`` and ``p > pd`` this falls strictly short of the sharp
    exponent; the constant function is needed there.
    """
    return max(HALF - pt.rq, 1 - 3 * pt.rp - pt.rq)


def lower_bound_hyperplane(spec: ParaboloidSpec, pt: DiagramPoint) -> Fraction:
    """Exponent achieved by masses on the diagonal hyperplanes ``xi_j = xi_{dv+j}``.

    The correction term enters as ``+ dv/(d-1) * (rq - rp)``.  With ``dv = 0``
    there is no such test function and the value reduces to ``1/2 - rq``.
    """
    return HALF - pt.rq + spec.slope * (pt.rq - pt.rp)


class Extremizer(str, enum.Enum):
    CONSTANT = "constant"
    EXPSUM = "expsum"
    HYPERPLANE = "hyperplane"


@dataclass(frozen=True)
class ExponentBreakdown:
    spec: ParaboloidSpec
    point: DiagramPoint
    sharp: Fraction
    region: RegionLabel
    lb_constant: Fraction
    lb_expsum: Fraction
    lb_hyperplane: Fraction
    attained_by: frozenset[Extremizer] = field(default_factory=frozenset)

    def lower_bounds(self) -> dict[Extremizer, Fraction]:
        return {
            Extremizer.CONSTANT: self.lb_constant,
            Extremizer.EXPSUM: self.lb_expsum,
            Extremizer.HYPERPLANE: self.lb_hyperplane,
        }

    def to_dict(self) -> dict:
        return {
            "d": self.spec.d,
            "signs": self.spec.signs,
            "dv": self.spec.dv,
            "pd": format_rational(self.spec.pd),
            "pv": format_rational(self.spec.pv),
            "p": self.point.p_text,
            "q": self.point.q_text,
            "rp": format_rational(self.point.rp),
            "rq": format_rational(self.point.rq),
            "sharp": format_rational(self.sharp),
            "region": self.region.region.value,
            "regions": self.region.names(),
            "boundary": self.region.on_boundary,
            "vertices": list(self.region.vertices),
            "lower_bounds": {
                "constant": format_rational(self.lb_constant),
                "expsum": format_rational(self.lb_expsum),
                "hyperplane": format_rational(self.lb_hyperplane),
            },
            "attained_by": sorted(e.value for e in self.attained_by),
        }


def sharp_exponent(
    spec: ParaboloidSpec, pt: DiagramPoint, label: RegionLabel | None = None
) -> ExponentBreakdown:
    """Sharp decoupling exponent at ``pt`` with its extremizer breakdown."""
    if label is None:
        label = classify(spec, pt)
    sharp = region_exponent(spec, pt, label.region)
    lbs = {
        Extremizer.CONSTANT: lower_bound_constant(spec, pt),
        Extremizer.EXPSUM: lower_bound_expsum(spec, pt),
        Extremizer.HYPERPLANE: lower_bound_hyperplane(spec, pt),
    }
    attained = {e for e, val in lbs.items() if val == sharp}
    if spec.dv == 0:
        attained.discard(Extremizer.HYPERPLANE)
    return ExponentBreakdown(
        spec=spec,
        point=pt,
        sharp=sharp,
        region=label,
        lb_constant=lbs[Extremizer.CONSTANT],
        lb_expsum=lbs[Extremizer.EXPSUM],
        lb_hyperplane=lbs[Extremizer.HYPERPLANE],
        attained_by=frozenset(attained),
    )


def reference_upper_bounds(spec: ParaboloidSpec, pt: DiagramPoint) -> list[tuple[str, Fraction]]:
    """Classical upper-bound exponents that apply at ``pt``.

    * ``BD15``: elliptic, ``q = 2``: ``max(0, 1/2 - pd*rp/2)``.
    * ``BD17``: ``q = p``: ``max(1/2 - rp, 1 - rp - pd*rp/2)``.
    * ``BD17-l2``: ``q = 2``: ``dv/(d-1) * (1/2 - rp)`` for ``p <= pv``,
      else ``1/2 - pd*rp/2``.
    """
    out: list[tuple[str, Fraction]] = []
    pd = spec.pd
    if spec.dv == 0 and pt.rq == HALF:
        out.append(("BD15", max(Fraction(0), HALF - pd * pt.rp / 2)))
    if pt.rq == pt.rp:
        out.append(("BD17", max(HALF - pt.rp, 1 - pt.rp - pd * pt.rp / 2)))
    if pt.rq == HALF:
        if pt.rp >= 1 / spec.pv:
            out.append(("BD17-l2", spec.slope * (HALF - pt.rp)))
        else:
            out.append(("BD17-l2", HALF - pd * pt.rp / 2))
    return out


# ---------------------------------------------------------------------------
# Exhaustive identity check
# ---------------------------------------------------------------------------


def rational_grid(denominator_bound: int) -> list[Fraction]:
    """All fractions in ``[0, 1/2]`` with denominator at most the bound."""
    vals = {Fraction(a, b) for b in range(1, denominator_bound + 1) for a in range(b // 2 + 1)}
    return sorted(vals)


def diagram_points(denominator_bound: int) -> Iterator[DiagramPoint]:
    coords = rational_grid(denominator_bound)
    for rp in coords:
        for rq in coords:
            yield DiagramPoint(rp, rq)


@dataclass
class Violation:
    point: DiagramPoint
    reason: str

    def to_dict(self) -> dict:
        return {
            "rp": format_rational(self.point.rp),
            "rq": format_rational(self.point.rq),
            "reason": self.reason,
        }


@dataclass
class SharpnessReport:
    spec: ParaboloidSpec
    denominator_bound: int
    n_points: int = 0
    n_boundary: int = 0
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.n_points > 0 and not self.violations

    def to_dict(self) -> dict:
        return {
            "d": self.spec.d,
            "signs": self.spec.signs,
            "dv": self.spec.dv,
            "denominator_bound": self.denominator_bound,
            "n_points": self.n_points,
            "n_boundary": self.n_boundary,
            "violations": [v.to_dict() for v in self.violations],
            "ok": self.ok,
        }


def check_point(
    spec: ParaboloidSpec, pt: DiagramPoint, br: ExponentBreakdown | None = None
) -> list[str]:
    """Reasons the identities fail at ``pt`` (empty when everything holds)."""
    problems = []
    if br is None:
        br = sharp_exponent(spec, pt)
    if not br.region.regions:
        problems.append("no region label")
    best = max(br.lb_constant, br.lb_expsum, br.lb_hyperplane)
    if best != br.sharp:
        problems.append(f"max lower bound {best} != sharp {br.sharp}")
    for region in br.region.regions:
        val = region_exponent(spec, pt, region)
        if val != br.sharp:
            problems.append(f"{region.value} formula {val} != sharp {br.sharp}")
    if spec.dv == 0 and elliptic_exponent(spec, pt) != br.sharp:
        problems.append("elliptic formula disagrees")
    for tag, ub in reference_upper_bounds(spec, pt):
        if ub < br.sharp:
            problems.append(f"{tag} upper bound {ub} below sharp {br.sharp}")
    if not br.attained_by:
        problems.append("no extremizer attains the sharp exponent")
    return problems


def verify_sharpness_identity(spec: ParaboloidSpec, denominator_bound: int) -> SharpnessReport:
    """Check every identity at all grid points; never raises on a violation."""
    if denominator_bound < 2:
        raise ValueError("denominator bound must be at least 2")
    report = SharpnessReport(spec, denominator_bound)
    for pt in diagram_points(denominator_bound):
        report.n_points += 1
        try:
            br = sharp_exponent(spec, pt)
            problems = check_point(spec, pt, br)
            if br.region.on_boundary:
                report.n_boundary += 1
        except Exception as exc:  # report, do not propagate
            problems = [f"{type(exc).__name__}: {exc}"]
        report.violations.extend(Violation(pt, msg) for msg in problems)
    return report


def verify_all(dims: Iterable[int], denominator_bound: int) -> list[SharpnessReport]:
    return [
        verify_sharpness_identity(spec, denominator_bound)
        for d in dims
        for spec in canonical_specs(d)
    ]
