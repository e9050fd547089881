import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tmslab import spaces as sp
from tmslab.errors import NotSeparated
from tmslab.measure import (MeasureKind, caratheodory_probe, lebesgue, measure_of,
                            nu_lower_connected, nu_upper, separated_additivity_check)

R, C, P = sp.RealInterval(), sp.Circle(), sp.EuclideanBox.plane()


def test_lebesgue_examples():
    assert lebesgue(R, sp.Interval(0, 2.5)).upper == pytest.approx(2.5)
    e = lebesgue(R, sp.Interval(-0.1, 0.1))
    assert (e.lower, e.upper) == pytest.approx((0.2, 0.2))
    assert lebesgue(P, sp.Box(((0, 1), (0, 0.01)))).upper == pytest.approx(0.01)
    assert lebesgue(P, sp.Ball((0.0, 0.0), 1.0)).upper == pytest.approx(math.pi)


def test_nu_examples():
    assert nu_upper(R, sp.Interval(0, 1)).upper <= 1 + 1e-12
    assert nu_upper(R, sp.Empty()).upper == 0.0
    assert nu_lower_connected(R, sp.Interval(0, 1)).lower == pytest.approx(1)
    assert nu_lower_connected(C, sp.Arc(0, math.pi / 2)).lower == pytest.approx(math.pi / 2)
    assert nu_lower_connected(P, sp.Ball((0.0, 0.0), 0.3)).lower == pytest.approx(0.6)


def test_thin_strip_is_its_diameter():
    # a connected set can never be covered more cheaply than its diameter
    e = measure_of(P, MeasureKind.DIAM, sp.Box(((0, 1), (0, 0.01))), 100)
    assert e.lower == pytest.approx(math.sqrt(1.0001), abs=1e-9)
    assert e.upper == pytest.approx(math.sqrt(1.0001), abs=1e-9)


def test_measure_of_examples():
    e = measure_of(R, MeasureKind.LEBESGUE, sp.Interval(0, 1))
    assert (e.lower, e.upper) == (1.0, 1.0)
    e = measure_of(P, MeasureKind.DIAM, sp.Ball((0.0, 0.0), 0.3), 100)
    assert abs(e.lower - 0.6) <= 1e-9 and abs(e.upper - 0.6) <= 1e-9
    assert measure_of(R, MeasureKind.COUNTING, sp.Interval(0, 1)).upper == math.inf
    assert measure_of(R, "counting", sp.Singleton((0.0,))).upper == 1


def test_budget_must_be_positive():
    with pytest.raises(ValueError):
        measure_of(R, "diam", sp.Interval(0, 1), 0)


def test_additivity_examples():
    rep = separated_additivity_check(R, sp.Interval(0, 1), sp.Interval(2, 3), 100, 1e-6)
    assert rep.additive and rep.nu_union.upper == pytest.approx(2)
    rep = separated_additivity_check(C, sp.Arc(0, math.pi / 4), sp.Arc(math.pi, 5 * math.pi / 4))
    assert rep.additive and rep.nu_union.lower == pytest.approx(math.pi / 2)
    with pytest.raises(NotSeparated):
        separated_additivity_check(R, sp.Interval(0, 1), sp.Interval(0, 1))


def test_caratheodory_examples():
    assert caratheodory_probe(R, sp.Interval(0, 1), [sp.Interval(-1, 2)]).verdict == "pass"
    assert caratheodory_probe(R, sp.Interval(0, 1), [sp.Interval(0, 1)]).verdict == "pass"
    assert caratheodory_probe(R, sp.Interval(-math.inf, math.inf), [sp.Interval(3, 4)]).verdict == "pass"


@given(st.floats(-5, 5), st.floats(0.01, 3), st.floats(0, 0.9), st.floats(0, 0.9))
def test_monotone_nested_intervals(a, length, s, t):
    outer = sp.Interval(a, a + length)
    lo = a + s * length
    inner = sp.Interval(lo, lo + (a + length - lo) * (1 - t))
    assert nu_upper(R, inner).upper <= nu_upper(R, outer).upper + 1e-9


@given(st.lists(st.tuples(st.floats(-5, 5), st.floats(0.01, 1)), min_size=1, max_size=4))
def test_finite_subadditivity_line(parts):
    sets = [sp.Interval(a, a + l) for a, l in parts]
    # merge overlapping pieces into a disjoint union
    ivs = sorted((s.a, s.b) for s in sets)
    merged = [list(ivs[0])]
    for a, b in ivs[1:]:
        if a <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], b)
        else:
            merged.append([a, b])
    union = sp.union(*[sp.Interval(a, b) for a, b in merged])
    total = sum(nu_upper(R, s).upper for s in sets)
    assert nu_upper(R, union).upper <= total + 1e-9


@pytest.mark.parametrize("space,shape", [
    (R, sp.Interval(0, 0.7)),
    (C, sp.Arc(1, 2.5)),
    (C, sp.Arc(0, 5.0)),
    (P, sp.Ball((0.5, 0.5), 0.25)),
])
def test_bracket_closes_on_connected_sets(space, shape):
    for budget in (10, 100, 1000):
        e = measure_of(space, "diam", shape, budget)
        assert e.lower <= e.upper + 1e-12
        assert abs(e.upper - sp.diam_upper(space, shape)) <= 1e-6
        assert abs(e.lower - sp.diam_upper(space, shape)) <= 1e-6


def test_two_far_intervals_cost_two_diameters():
    s = sp.union(sp.Interval(0, 1), sp.Interval(5, 6))
    e = measure_of(R, "diam", s, 100)
    assert e.upper == pytest.approx(2)
