import io
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from decoupling import weyl
from decoupling.weyl import GridSpec


def brute_weyl(M, x, y):
    j = np.arange(1, M + 1)
    return np.exp(2j * np.pi * (np.multiply.outer(x, j) + np.multiply.outer(y, j * j))).sum(-1)


# --- grid evaluation --------------------------------------------------------------


def test_grid_m1_is_unimodular():
    vals = weyl.eval_weyl_grid(1, GridSpec(2, 2))
    assert np.allclose(np.abs(vals), 1.0)


@pytest.mark.parametrize("M", [1, 3, 7, 16])
def test_origin_value_is_M(M):
    vals = weyl.eval_weyl_grid(M, GridSpec(2, 2))
    assert vals[0, 0] == pytest.approx(M, abs=1e-12)


def test_m2_cancels_at_half():
    grid = GridSpec(2, 2)
    vals = weyl.eval_weyl_grid(2, grid)
    nx = grid.nx(2)
    assert nx % 2 == 0
    assert abs(vals[0, nx // 2]) < 1e-12


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 12), st.integers(2, 3), st.integers(2, 3))
def test_grid_matches_direct_sum(M, ox, oy):
    grid = GridSpec(ox, oy)
    vals = weyl.eval_weyl_grid(M, grid)
    nx, ny = grid.nx(M), grid.ny(M)
    rng = np.random.default_rng(M)
    a, b = rng.integers(0, nx, 6), rng.integers(0, ny, 6)
    assert np.allclose(vals[b, a], brute_weyl(M, a / nx, b / ny), atol=1e-10)


def test_grid_budget_guard():
    with pytest.raises(weyl.ResourceError):
        weyl.eval_weyl_grid(64, GridSpec(4, 4), budget=1000)


def test_gridspec_rejects_low_oversampling():
    with pytest.raises(ValueError):
        GridSpec(1, 4)


# --- moments -------------------------------------------------------------------------


@pytest.mark.parametrize("M", [1, 2, 5, 17, 64, 128])
def test_second_moment_plancherel(M):
    s = weyl.moment_2d(M, 2)
    assert s.value**2 == pytest.approx(M, rel=1e-10)
    assert weyl.second_moment_exact(M) == M


def test_fourth_moment_m4_exact_on_4x_grid():
    assert weyl.moment_2d(4, 4, GridSpec(4, 4)).value ** 4 == pytest.approx(28, rel=1e-12)


@pytest.mark.parametrize("p", [2, 3, "7/2", 10, "inf"])
def test_m1_moment_is_one(p):
    assert weyl.moment_2d(1, p).value == pytest.approx(1.0, rel=1e-12)


def test_moment_rejects_small_p():
    with pytest.raises(ValueError):
        weyl.moment_2d(4, "3/2")


def test_moment_budget_guard():
    with pytest.raises(weyl.ResourceError):
        weyl.moment_2d(64, 3, budget=10)


@pytest.mark.parametrize("M, count", [(1, 1), (4, 28), (10, 190)])
def test_fourth_moment_count(M, count):
    assert weyl.fourth_moment_count(M) == count


def test_fourth_moment_count_cap():
    with pytest.raises(weyl.ResourceError):
        weyl.fourth_moment_count(65)


@pytest.mark.parametrize("M", [2, 5, 9, 12])
def test_fourth_moment_grid_matches_enumeration(M):
    assert weyl.moment_2d(M, 4).power == pytest.approx(weyl.fourth_moment_count(M), rel=1e-8)


@pytest.mark.parametrize("M", [3, 6, 8])
def test_sixth_moment_grid_matches_enumeration(M):
    assert weyl.moment_2d(M, 6).power == pytest.approx(weyl.sixth_moment_count(M), rel=1e-8)


def test_exact_grid_flag():
    assert weyl.moment_2d(8, 4).exact
    assert not weyl.moment_2d(8, 3).exact
    assert weyl.grid_is_exact(8, 4, weyl.exact_grid(8, 4))
    with pytest.raises(ValueError):
        weyl.exact_grid(8, 3)


def test_err_is_none_unless_requested():
    assert weyl.moment_2d(6, 3).err is None
    assert weyl.moment_2d(6, 3, with_error=True).err > 0


@pytest.mark.parametrize("M, p", [(4, 3), (6, "7/2"), (8, 5)])
def test_doubling_changes_value_less_than_err(M, p):
    base = GridSpec(2, 2)
    reported = weyl.moment_2d(M, p, base, with_error=True)
    finer = weyl.moment_2d(M, p, base.doubled().doubled())
    assert abs(finer.value - reported.value) < reported.err


@settings(max_examples=15, deadline=None)
@given(st.integers(2, 10), st.sampled_from([2, 3, "5/2", 4, 5, 6, 8]), st.sampled_from([2, 3, "7/2", 4, 6, 8, 10]))
def test_holder_monotone_in_p(M, a, b):
    lo, hi = sorted((weyl.as_exponent(a), weyl.as_exponent(b)))
    grid = GridSpec(4, 4)
    v_lo = weyl.moment_2d(M, lo, grid).value
    v_hi = weyl.moment_2d(M, hi, grid).value
    assert v_hi / v_lo >= 1 - 1e-12


# --- S_p profiles ------------------------------------------------------------------


@pytest.mark.parametrize("M", [1, 4, 9])
def test_s2_is_2M(M):
    prof = weyl.sp_profile(M, 2)
    assert np.allclose(prof.values, 2 * M, rtol=1e-12)


@pytest.mark.parametrize("p", [2, 3, 6, "inf"])
def test_m1_profile_is_two(p):
    prof = weyl.sp_profile(1, p)
    expected = 1.0 if p == "inf" else 2.0
    assert np.allclose(prof.values, expected)


@pytest.mark.parametrize("M", [3, 8])
def test_s4_at_zero_is_dirichlet_moment(M):
    prof = weyl.sp_profile(M, 4)
    assert prof.xd[0] == -1.0  # S_p has period 1, so S(-1) = S(0)
    assert prof.values[0] == pytest.approx(weyl.dirichlet_moment(M, 4), rel=1e-10)


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 12), st.sampled_from([2, 3, 4, "9/2", 6]))
def test_profile_symmetric(M, p):
    prof = weyl.sp_profile(M, p)
    n = prof.values.size
    mirror = prof.values[(n - np.arange(n)) % n]
    assert np.allclose(prof.values, mirror, rtol=1e-10, atol=1e-12)


@pytest.mark.parametrize("M", [2, 5, 8])
@pytest.mark.parametrize("p", [2, 4])
def test_profile_integral_is_four_torus_moments(M, p):
    prof = weyl.sp_profile(M, p)
    assert prof.integrate() == pytest.approx(4 * weyl.moment_2d(M, p).power, rel=1e-12)


def test_profile_size_guard():
    with pytest.raises(ValueError):
        weyl.sp_profile(4, 4, xd_size=10)


# --- Dirichlet moments ------------------------------------------------------------


def test_dirichlet_examples():
    assert weyl.dirichlet_moment(1, 5) == pytest.approx(2.0)
    assert weyl.dirichlet_moment(3, 2) == pytest.approx(6.0)
    assert weyl.additive_energy(8) == 344
    assert weyl.dirichlet_moment(8, 4) == pytest.approx(688.0, rel=1e-12)


@given(st.integers(1, 20))
def test_dirichlet_fourth_is_twice_additive_energy(M):
    assert weyl.dirichlet_moment(M, 4) == pytest.approx(2 * weyl.additive_energy(M), rel=1e-11)


# --- sixth moment table -----------------------------------------------------------


def test_sixth_moment_table():
    table = weyl.sixth_moment_log_check([1, 2, 4, 8])
    assert table[0] == (1, pytest.approx(1.0))
    vals = [v for _, v in table]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    with pytest.raises(ValueError):
        weyl.sixth_moment_log_check([4, 2])


# --- CSV -----------------------------------------------------------------------------


def test_moment_csv_round_trip():
    samples = [weyl.moment_2d(5, 3, with_error=True), weyl.moment_2d(5, 4), weyl.moment_2d(3, "inf")]
    text = weyl.moments_to_csv_text(samples)
    assert text.splitlines()[0] == ",".join(weyl.MOMENT_CSV_COLUMNS)
    back = weyl.read_moment_csv(io.StringIO(text))
    for a, b in zip(samples, back):
        assert (a.kind, a.M, a.p, a.value, a.err) == (b.kind, b.M, b.p, b.value, b.err)


@given(st.one_of(st.just(math.inf), st.fractions(min_value=2, max_value=50, max_denominator=20)))
def test_exponent_pair_round_trip(p):
    assert weyl.pair_to_exponent(*weyl.exponent_to_pair(p)) == p


def test_as_exponent_forms():
    assert weyl.as_exponent("10/3") == Fraction(10, 3)
    assert weyl.as_exponent("inf") == math.inf
    assert weyl.as_exponent(2.5) == Fraction(5, 2)
