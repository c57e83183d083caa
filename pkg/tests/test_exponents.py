from fractions import Fraction as Fr

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from decoupling import exponents as ex
from decoupling.exponents import DiagramPoint, ParaboloidSpec, Region


def pt(p, q):
    return DiagramPoint.from_pq(p, q)


# --- point-in-polygon oracle, independent of the line tests in classify ------


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _in_convex(poly, x):
    signs = {(_cross(poly[i], poly[(i + 1) % len(poly)], x) > 0) - (_cross(poly[i], poly[(i + 1) % len(poly)], x) < 0)
             for i in range(len(poly))}
    signs.discard(0)
    return len(signs) <= 1


def oracle_regions(spec, x):
    a = {k: (v.rp, v.rq) for k, v in ex.anchors(spec).items()}
    out = set()
    if _in_convex([a["A1"], a["A5"], a["A4"], a["A3"], a["A2"]], x):
        out.add(Region.PENTAGON)
    if _in_convex([a["A4"], a["A5"], a["A6"], a["A7"]], x):
        out.add(Region.TRAPEZOID)
    if _in_convex([a["A3"], a["A4"], a["A7"]], x):
        out.add(Region.TRIANGLE if spec.dv else Region.TRAPEZOID)
    return out


coord = st.fractions(min_value=0, max_value=Fr(1, 2), max_denominator=60)
specs = st.integers(2, 7).flatmap(
    lambda d: st.tuples(st.just(d), st.lists(st.sampled_from([1, -1]), min_size=d - 1, max_size=d - 1))
).map(lambda t: ParaboloidSpec(t[0], tuple(t[1])))


# --- signature defect and critical exponents --------------------------------


@pytest.mark.parametrize("v, dv", [((1, 1), 0), ((1, -1), 1), ((1, 1, -1), 1)])
def test_signature_defect_examples(v, dv):
    assert ex.signature_defect(v) == dv


@pytest.mark.parametrize("v", [(), (1, 0), (2,)])
def test_signature_defect_rejects_bad_vectors(v):
    with pytest.raises(ex.InvalidSpecError):
        ex.signature_defect(v)


def test_spec_rejects_wrong_length_and_dimension():
    with pytest.raises(ex.InvalidSpecError):
        ParaboloidSpec(3, (1,))
    with pytest.raises(ex.InvalidSpecError):
        ParaboloidSpec(1, ())
    with pytest.raises(ex.InvalidSpecError):
        ParaboloidSpec.with_defect(4, 2)


@pytest.mark.parametrize("d, dv, pd, pv", [(2, 0, 6, 6), (3, 1, 4, 6), (5, 2, 3, 4)])
def test_critical_exponents(d, dv, pd, pv):
    assert ex.critical_exponents(ParaboloidSpec.with_defect(d, dv)) == (Fr(pd), Fr(pv))


@given(specs)
def test_pd_at_most_pv_with_equality_iff_elliptic(spec):
    assert spec.pd <= spec.pv
    assert (spec.pd == spec.pv) == (spec.dv == 0)


def test_parse_and_format_signs():
    assert ex.parse_signs("++-") == (1, 1, -1)
    assert ex.format_signs((1, -1)) == "+-"
    with pytest.raises(ex.InvalidSpecError):
        ex.parse_signs("+x")


def test_rationals_serialize_as_num_den():
    assert ex.format_rational(Fr(0)) == "0/1"
    assert ex.format_rational(Fr(6, 4)) == "3/2"
    assert ex.reciprocal("inf") == 0
    assert ex.reciprocal("10/3") == Fr(3, 10)
    with pytest.raises(ValueError):
        ex.reciprocal(0)


# --- anchors and regions ---------------------------------------------------------


def test_anchor_positions_d3():
    a = ex.anchors(ParaboloidSpec.with_defect(3, 1))
    assert a["A3"] == DiagramPoint(Fr(1, 6), Fr(1, 2))
    assert a["A4"] == DiagramPoint(Fr(1, 4), Fr(1, 4))
    assert a["A5"] == DiagramPoint(Fr(1, 4), 0)


@given(specs)
def test_l1_passes_through_a3_and_a4(spec):
    a = ex.anchors(spec)
    if spec.dv:
        assert ex.l1_defect(spec, a["A3"]) == 0
    assert ex.l1_defect(spec, a["A4"]) == 0


def test_classify_examples_d3():
    spec = ParaboloidSpec.with_defect(3, 1)
    lab = ex.classify(spec, DiagramPoint(Fr(1, 2), 0))
    assert lab.region is Region.TRAPEZOID and "A6" in lab.vertices
    lab = ex.classify(spec, DiagramPoint(0, Fr(1, 2)))
    assert lab.region is Region.PENTAGON and "A2" in lab.vertices
    lab = ex.classify(spec, DiagramPoint(Fr(1, 5), Fr(2, 5)))
    assert lab.regions == {Region.PENTAGON, Region.TRIANGLE}
    assert ex.region_exponent(spec, DiagramPoint(Fr(1, 5), Fr(2, 5)), Region.PENTAGON) == Fr(1, 5)
    assert ex.region_exponent(spec, DiagramPoint(Fr(1, 5), Fr(2, 5)), Region.TRIANGLE) == Fr(1, 5)


def test_points_outside_square_rejected():
    with pytest.raises(ex.DiagramDomainError):
        DiagramPoint(Fr(3, 5), 0)
    with pytest.raises(ex.DiagramDomainError):
        ex.classify(ParaboloidSpec.elliptic(2), (0, 0))


@given(specs, coord, coord)
def test_classify_matches_polygon_oracle(spec, rp, rq):
    x = DiagramPoint(rp, rq)
    assert set(ex.classify(spec, x).regions) == oracle_regions(spec, (rp, rq))


@given(st.integers(2, 7), coord, coord)
def test_no_triangle_when_elliptic(d, rp, rq):
    assert Region.TRIANGLE not in ex.classify(ParaboloidSpec.elliptic(d), DiagramPoint(rp, rq)).regions


# --- sharp exponent and lower bounds --------------------------------------------


@pytest.mark.parametrize(
    "d, dv, p, q, expected",
    [(2, 0, 6, 2, 0), (2, 0, "inf", "inf", 1), (3, 1, 4, 4, Fr(1, 4)), (3, 1, "inf", 2, Fr(1, 2))],
)
def test_sharp_examples(d, dv, p, q, expected):
    assert ex.sharp_exponent(ParaboloidSpec.with_defect(d, dv), pt(p, q)).sharp == expected


def test_a4_all_formulas_agree_d3():
    spec = ParaboloidSpec.with_defect(3, 1)
    x = pt(4, 4)
    vals = {ex.region_exponent(spec, x, r) for r in Region}
    assert vals == {Fr(1, 4)}
    assert "A4" in ex.classify(spec, x).vertices


@pytest.mark.parametrize("d, p, q, expected", [(2, 6, 2, 0), (2, "inf", "inf", 1), (4, "10/3", "10/3", Fr(1, 5))])
def test_lower_bound_constant(d, p, q, expected):
    assert ex.lower_bound_constant(ParaboloidSpec.elliptic(d), pt(p, q)) == expected


@pytest.mark.parametrize("d, p, q, expected", [(2, 2, 2, 0), (2, 10, 2, Fr(1, 5)), (3, 4, 4, Fr(1, 4))])
def test_lower_bound_expsum(d, p, q, expected):
    assert ex.lower_bound_expsum(ParaboloidSpec.elliptic(d), pt(p, q)) == expected


@given(st.integers(2, 7), coord, coord)
def test_lower_bound_hyperplane_elliptic_reduces(d, rp, rq):
    x = DiagramPoint(rp, rq)
    assert ex.lower_bound_hyperplane(ParaboloidSpec.elliptic(d), x) == Fr(1, 2) - rq


def test_lower_bound_hyperplane_examples():
    spec = ParaboloidSpec.with_defect(3, 1)
    at_pv = ex.lower_bound_hyperplane(spec, pt(6, 2))
    assert at_pv == Fr(1, 6)
    # first branch of the hyperbolic q = 2 upper bound at p = pv
    assert at_pv == Fr(spec.dv, spec.d - 1) * (Fr(1, 2) - Fr(1, 6))
    assert ex.lower_bound_hyperplane(spec, pt(4, 4)) == Fr(1, 4)


def test_expsum_below_sharp_above_pd_in_higher_dimension():
    spec = ParaboloidSpec.elliptic(3)
    x = pt(6, 2)
    assert ex.lower_bound_expsum(spec, x) < ex.sharp_exponent(spec, x).sharp


def test_reference_upper_bounds_examples():
    got = dict(ex.reference_upper_bounds(ParaboloidSpec.elliptic(2), pt(6, 2)))
    assert got["BD15"] == 0
    got = dict(ex.reference_upper_bounds(ParaboloidSpec.with_defect(3, 1), pt(4, 4)))
    assert got["BD17"] == Fr(1, 4)
    got = dict(ex.reference_upper_bounds(ParaboloidSpec.with_defect(3, 1), pt(4, 2)))
    assert got["BD17-l2"] == Fr(1, 8)
    assert "BD15" not in got


def test_breakdown_serializes_and_attains():
    spec = ParaboloidSpec.with_defect(3, 1)
    # A3 lies on l1, where the constant and hyperplane bounds meet
    assert ex.sharp_exponent(spec, pt(6, 2)).to_dict()["attained_by"] == ["constant", "hyperplane"]
    br = ex.sharp_exponent(spec, pt(5, 2))
    d = br.to_dict()
    assert d["sharp"] == "3/20" and d["region"] == "Triangle"
    assert d["attained_by"] == ["hyperplane"]
    assert br.sharp == max(br.lb_constant, br.lb_expsum, br.lb_hyperplane)


@settings(max_examples=300)
@given(specs, coord, coord)
def test_sharp_is_max_of_lower_bounds(spec, rp, rq):
    x = DiagramPoint(rp, rq)
    br = ex.sharp_exponent(spec, x)
    assert br.sharp == max(ex.lower_bound_constant(spec, x), ex.lower_bound_expsum(spec, x),
                           ex.lower_bound_hyperplane(spec, x))
    assert br.attained_by
    if spec.dv == 0:
        assert br.sharp == ex.elliptic_exponent(spec, x)


@given(specs, coord, coord, coord)
def test_sharp_nonincreasing_in_rq(spec, rp, a, b):
    lo, hi = sorted((a, b))
    assert ex.sharp_exponent(spec, DiagramPoint(rp, lo)).sharp >= ex.sharp_exponent(spec, DiagramPoint(rp, hi)).sharp


@given(specs, coord, coord)
def test_reference_upper_bounds_dominate(spec, rp, rq):
    x = DiagramPoint(rp, rq)
    s = ex.sharp_exponent(spec, x).sharp
    assert all(ub >= s for _, ub in ex.reference_upper_bounds(spec, x))


@given(specs, coord, coord, st.randoms(use_true_random=False))
def test_sharp_invariant_under_permutation_and_flip(spec, rp, rq, rnd):
    v = list(spec.v)
    rnd.shuffle(v)
    other = ParaboloidSpec(spec.d, tuple(-s for s in v))
    x = DiagramPoint(rp, rq)
    assert ex.sharp_exponent(spec, x).sharp == ex.sharp_exponent(other, x).sharp


@given(specs, st.fractions(0, 1, max_denominator=50))
def test_boundary_continuity(spec, t):
    a = ex.anchors(spec)

    def on(P, Q):
        return DiagramPoint(P.rp + t * (Q.rp - P.rp), P.rq + t * (Q.rq - P.rq))

    x = on(a["A4"], a["A5"])
    assert ex.region_exponent(spec, x, Region.PENTAGON) == ex.region_exponent(spec, x, Region.TRAPEZOID)
    x = on(a["A4"], a["A7"])
    assert ex.region_exponent(spec, x, Region.TRAPEZOID) == ex.region_exponent(spec, x, Region.TRIANGLE)
    x = on(a["A3"], a["A4"])
    assert ex.region_exponent(spec, x, Region.PENTAGON) == ex.region_exponent(spec, x, Region.TRIANGLE)


# --- exhaustive grid check ---------------------------------------------------------


@pytest.mark.parametrize("d, signs, bound", [(2, "+", 12), (3, "+-", 12), (6, "++--+", 8)])
def test_sharpness_identity_examples(d, signs, bound):
    report = ex.verify_sharpness_identity(ParaboloidSpec.from_signs(d, signs), bound)
    assert report.ok and report.violations == []
    assert report.n_points == len(ex.rational_grid(bound)) ** 2


def test_sharpness_report_lists_violations(monkeypatch):
    monkeypatch.setattr(ex, "lower_bound_expsum", lambda spec, x: Fr(5))
    report = ex.verify_sharpness_identity(ParaboloidSpec.elliptic(2), 2)
    assert not report.ok
    assert report.to_dict()["violations"]


def test_sharpness_bound_must_be_at_least_two():
    with pytest.raises(ValueError):
        ex.verify_sharpness_identity(ParaboloidSpec.elliptic(2), 1)


def test_canonical_specs_cover_all_defects():
    assert [s.dv for s in ex.canonical_specs(6)] == [0, 1, 2]
    assert {s.canonical() for s in ex.all_specs(5)} == set(ex.canonical_specs(5))
