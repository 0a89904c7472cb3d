from __future__ import annotations

import math

import pytest
from hypothesis import given, settings, strategies as st

from brickwork import analytics as an
from brickwork.errors import InvalidArgument


def test_mi_profile_examples():
    assert all(an.mi_profile(x, 0, 8) == 0 for x in range(9))
    for l in (4, 8, 12):
        assert an.mi_profile(l // 2, l / 4, l) == l / 2
    assert an.mi_profile(2, 3, 10) == 2
    with pytest.raises(InvalidArgument):
        an.mi_profile(11, 1, 10)


@pytest.mark.parametrize("l", [4, 8, 12, 20])
def test_mi_profile_symmetries(l):
    for T2 in range(0, l + 1):
        T = T2 / 2
        for x in range(0, l + 1, 2):
            v = an.mi_profile(x, T, l)
            assert v == an.mi_profile(l - x, T, l)
            assert v == an.mi_profile(x, l / 2 - T, l)
            assert v <= min(2 * T, max(0, l - 2 * T), l / 2) or T > l / 2


def test_trapezoid_area_examples():
    assert an.trapezoid_area(0, 10) == 0
    assert an.trapezoid_area(2, 8) == 64 / 4
    assert an.trapezoid_area(6, 8) == 0


@pytest.mark.parametrize("l", range(2, 42, 2))
def test_profile_sum_equals_area(l):
    for T in range(0, l // 2 + 1):
        assert an.profile_sum(T, l) == an.trapezoid_area(T, l)
        # the unweighted sum of the even-cut samples is half the area
        assert sum(v for _, v in an.trapezoid_profile(T, l)) == (l - 2 * T) * T


def test_complexity_lower_bound():
    assert an.complexity_lower_bound(25, 100, 0.001) == pytest.approx(300)
    assert an.complexity_lower_bound(50, 100, 0.001) == 0
    assert an.complexity_lower_bound(1, 100, 0.4) == 0
    with pytest.raises(InvalidArgument):
        an.complexity_lower_bound(1, 10, 0.5)


def test_mi_bounds():
    assert an.mi_gate_bound(3, 2, 0.01, 10) == pytest.approx(12 * math.log(2) + 0.5 * math.log(200))
    assert an.mi_gate_bound(0, 2, 1e-15, 10) < 1e-11
    assert an.mi_continuity(0.1, 4) == pytest.approx(math.log(40))
    with pytest.raises(InvalidArgument):
        an.mi_continuity(0.6, 4)


def test_thermalization_time():
    assert an.thermalization_time(2, 4, 0.1) == pytest.approx(17.97, abs=0.01)
    assert an.thermalization_time(5, 6, 1) == pytest.approx(3 * (1 + 3 * math.log(2) / math.log(5)))
    assert an.thermalization_time(1e300, 6, 0.5) == pytest.approx(3, abs=2e-2)
    with pytest.raises(InvalidArgument):
        an.thermalization_time(1.5, 4, 0.1)


def test_prob_overlap_bound_examples():
    assert an.prob_overlap_bound(0, 0.2, 0.5, 6, 10, 2).value == pytest.approx(1.2)
    rep = an.prob_overlap_bound(4, 0, 0.9, 6, 10, 2)
    assert rep.value == pytest.approx(0.1**-8 * 2**-8 * min(math.e, 24))
    assert rep.flags["meaningful"]
    assert not an.prob_overlap_bound(1, 0, 0.5, 4, 10, 2).flags["meaningful"]
    with pytest.raises(InvalidArgument):
        an.prob_overlap_bound(1, 0, 1.0, 4, 10, 2)


@pytest.mark.parametrize("delta", [0.1, 0.9])
@pytest.mark.parametrize("l,L", [(6, 10), (4, 6), (5, 8)])
def test_prob_overlap_single_copy(delta, l, L):
    # at k = 1 the min picks k! = 1
    q = 3
    v = an.prob_overlap_bound(1, 0, delta, l, L, q).value
    assert v == pytest.approx((1 - delta) ** -2 * q ** -(2 * l - L), rel=1e-12)


@given(st.integers(1, 6), st.integers(2, 6))
@settings(max_examples=40, deadline=None)
def test_prob_overlap_nonincreasing_in_q(k, q):
    a = an.prob_overlap_bound(k, 0.1, 0.5, 6, 10, q).value
    b = an.prob_overlap_bound(k, 0.1, 0.5, 6, 10, q + 1).value
    assert b <= a * (1 + 1e-12)


def test_holographic():
    s, beta, l, L = 2.0, 0.5, 6, 20
    assert an.holographic_complexity(l, L, 0, s, beta) == 0
    assert an.holographic_complexity(l, L, 0, s, beta, "large") == 0
    assert an.holographic_entropy(l, 0, s) == 0
    assert an.holographic_complexity(l, L, 2.999, s, beta) == pytest.approx(4 * l * 2.999)
    assert an.holographic_complexity(l, L, 3.001, s, beta) == 0
    assert an.holographic_complexity(l, L, 4, s, beta, "large") == pytest.approx(4 * L * 4)
    v, left, right = an.holographic_complexity(l, L, 3, s, beta, one_sided=True)
    assert v == right == 0 and left == pytest.approx(4 * l * 3)
    assert an.holographic_entropy(l, 10, s) == s * l


def test_packing_design_bound():
    rep = an.packing_design_bound(100, 1.0, 1.0)
    assert rep.value == pytest.approx(-math.log(15))
    assert rep.flags["vacuous"]
    sat = an.packing_design_bound(5, 1.0, 2.0)
    assert sat.value == -math.inf and sat.flags["vacuous"]
    bad = an.packing_design_bound(5, 1.0, 2.5)
    assert not bad.valid and bad.value is None
    assert not an.packing_design_bound(5, 1.0, 0.5, d=4).valid
    good = an.packing_design_bound(50, 1.0, 0.5)
    assert good.value == pytest.approx(50 * math.log(1.5) - math.log(15))


def test_packing_counts():
    assert an.packing_full_bound(10, 1.0, 0.5).value == pytest.approx(0.25 / 16 * 100)
    assert an.packing_full_bound(10, 1.0, 1.0).value is None
    assert an.packing_rank_bound(2, 64, 0.5).value == pytest.approx(0.5 * (0.5 - 1 / 32) ** 2 * 128)
    assert not an.packing_rank_bound(40, 64, 0.5).valid
    rep = an.packing_fidelity_count(2, 32, 0.5)
    assert rep.value == pytest.approx(39.48, abs=0.01)
    assert not an.packing_fidelity_count(8, 16, 0.5).valid


@pytest.mark.parametrize("d", [2, 8, 16, 33, 64])
def test_norm_extremal_grid(d):
    for r in range(1, d):
        eps = 0.5 / (r + r * r / (d - r)) / r
        res = an.norm_extremal_onetwo(r, d, eps)
        assert res.computed == pytest.approx(res.closed_form, abs=1e-6)
    assert an.norm_extremal_onetwo(d, d, 1e-3).degenerate


def test_norm_extremal_example_and_errors():
    res = an.norm_extremal_onetwo(4, 64, 1e-3)
    assert res.computed == pytest.approx(15, abs=1e-6)
    skewed = an.norm_extremal_onetwo(3, 40, 1e-3, a=[0.5, 0.3, 0.2])
    assert skewed.computed == pytest.approx(4 * 3 * (37 / 40), abs=1e-6)
    with pytest.raises(InvalidArgument):
        an.norm_extremal_onetwo(4, 64, 0.3)


@pytest.mark.parametrize("d", [1, 2, 10, 64])
@pytest.mark.parametrize("eps", [1e-3, 0.2, 0.9])
def test_fidelity_extremal(d, eps):
    res = an.fidelity_extremal(d, eps)
    assert res.computed == pytest.approx(d, abs=1e-6)


def test_linear_growth_gate_bound():
    rep = an.linear_growth_gate_bound(100, 10, 1.0, 2)
    assert rep.value == 1.0
    with pytest.raises(InvalidArgument):
        an.linear_growth_gate_bound(100, 10, 0.0, 2)


def test_bound_report_dict():
    d = an.packing_rank_bound(2, 64, 0.5).as_dict()
    assert d["valid"] is True and set(d) >= {"name", "inputs", "value", "conditions"}
