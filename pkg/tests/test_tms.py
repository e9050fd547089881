import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tmslab import spaces as sp
from tmslab.errors import UnsupportedMeasure
from tmslab.measure import MeasureKind
from tmslab.tms import (TmsInstance, check_axiom_ii, check_axiom_iii, check_instance,
                        induced_pseudometric, pseudometric_axiom_check, restrict)

R, C, P = sp.RealInterval(), sp.Circle(), sp.EuclideanBox.plane()
LEB, DIAM, COUNT = MeasureKind.LEBESGUE, MeasureKind.DIAM, MeasureKind.COUNTING


def test_axiom_ii_lebesgue_witness():
    frag = check_axiom_ii(TmsInstance(R, LEB), [0.0], [0.3])
    assert frag.passed
    w = frag.witnesses[0]
    assert w["measure_upper"] == pytest.approx(0.2)
    U = sp.shape_from_dict(w["set"])
    assert (U.a, U.b) == pytest.approx((-0.1, 0.1))


def test_axiom_ii_counting_fails():
    frag = check_axiom_ii(TmsInstance(R, COUNT), [0.0], [0.5])
    assert not frag.passed and frag.failures[0]["smallest_measure"] >= 1


def test_axiom_ii_circle_diam():
    frag = check_axiom_ii(TmsInstance(C, DIAM), [0.0], [0.1])
    assert frag.passed and frag.witnesses[0]["measure_upper"] < 0.1


def test_axiom_iii_examples():
    assert check_axiom_iii(TmsInstance(R, LEB), [sp.Interval(0, 1)], [0.5]).passed
    assert check_axiom_iii(TmsInstance(P, DIAM), [sp.Ball((0.0, 0.0), 1.0)], [(0.0, 0.0)]).passed
    frag = check_axiom_iii(TmsInstance(C, LEB), [sp.Arc(0, math.pi / 2)], [math.pi / 4])
    assert not frag.passed
    f = frag.failures[0]
    assert f["measure_upper"] == 0.0
    U = sp.shape_from_dict(f["U"])
    y = np.array(f["escape_point"])
    assert sp.contains(C, U, y[None])[0]
    assert not sp.contains(C, sp.Arc(0, math.pi / 2), y[None])[0]


@pytest.mark.parametrize("space,kind", [
    (R, LEB), (sp.RealInterval(0.0, 1.0, True, True), LEB), (P, LEB), (C, DIAM), (P, DIAM)])
def test_positive_fixtures(space, kind):
    assert check_instance(TmsInstance(space, kind), 60, seed=1).passed


def test_negative_fixtures():
    assert check_instance(TmsInstance(R, COUNT), 30, seed=1).failed_axioms == [2]
    assert check_instance(TmsInstance(C, LEB), 30, seed=1).failed_axioms == [3]


def test_c_outer_regular_defaults():
    assert TmsInstance(R, LEB).c_outer_regular
    assert not TmsInstance(C, DIAM).c_outer_regular
    with pytest.raises(UnsupportedMeasure):
        TmsInstance(R, COUNT, c_outer_regular=True)
    with pytest.raises(UnsupportedMeasure):
        TmsInstance(sp.GridFunctionSpace(4), LEB)


def test_restriction_passes():
    sub = restrict(TmsInstance(P, LEB), sp.Box(((0, 1), (0, 2))))
    assert check_instance(sub, 40, seed=2).passed


def test_pseudometric_examples():
    inst = TmsInstance(R, LEB)
    assert induced_pseudometric(inst, 0.2, 0.7).contains(0.5, 1e-6)
    assert induced_pseudometric(TmsInstance(C, DIAM), 0.0, math.pi / 2).contains(math.pi / 2, 1e-6)
    ups = [induced_pseudometric(inst, 0.3, 0.3, b).upper for b in (10, 100, 1000)]
    assert ups[0] >= ups[1] >= ups[2] and ups[2] < 1e-3
    assert pseudometric_axiom_check(inst, [(0, 0.3, 1)]).passed
    assert pseudometric_axiom_check(TmsInstance(C, DIAM), [(0, math.pi / 2, math.pi)]).passed


@given(st.floats(-10, 10), st.floats(-10, 10))
def test_pseudometric_contains_distance(p, q):
    br = induced_pseudometric(TmsInstance(R, LEB), p, q)
    assert br.contains(abs(p - q), 1e-4)
    other = induced_pseudometric(TmsInstance(R, LEB), q, p)
    assert abs(br.upper - other.upper) <= 1e-6


@given(st.lists(st.floats(0, 2 * math.pi), min_size=3, max_size=3))
def test_circle_triangle(triple):
    assert pseudometric_axiom_check(TmsInstance(C, DIAM), [tuple(triple)]).verdict != "fail"


def test_report_is_seed_deterministic():
    a = check_instance(TmsInstance(C, DIAM), 30, seed=5).to_dict()
    b = check_instance(TmsInstance(C, DIAM), 30, seed=5).to_dict()
    assert a == b


def test_plane_lebesgue_thin_boxes_break_axiom_iii():
    plane = sp.EuclideanBox.plane()
    assert check_instance(TmsInstance(plane, LEB), 10, seed=1).failed_axioms == []
    rep = check_instance(TmsInstance(plane, LEB), 10, seed=1, extended=True)
    assert rep.failed_axioms == [3]
    w = rep.axiom_iii.failures[0]
    assert w["measure_upper"] < w["eps"] * 1.01
