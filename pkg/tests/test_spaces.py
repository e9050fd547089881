import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tmslab import spaces as sp
from tmslab.errors import InvalidSpace

finite = st.floats(-50, 50, allow_nan=False)
angles = st.floats(0, 2 * math.pi, allow_nan=False)

SPACES = {
    "real": sp.RealInterval(),
    "plane_l2": sp.EuclideanBox.plane("l2"),
    "plane_sup": sp.EuclideanBox.plane("sup"),
    "circle_arc": sp.Circle("arc"),
    "circle_chord": sp.Circle("chord"),
    "grid_l1": sp.GridFunctionSpace(6, "l1"),
}


def _rand_point(space, rng):
    if isinstance(space, sp.Circle):
        return float(rng.uniform(0, 2 * math.pi))
    if isinstance(space, sp.RealInterval):
        return float(rng.uniform(-5, 5))
    return rng.uniform(-5, 5, space.dim)


def test_distance_examples():
    assert sp.distance(sp.RealInterval(), 0.2, 0.7) == pytest.approx(0.5)
    assert sp.distance(sp.Circle("arc"), 0.0, math.pi / 2) == pytest.approx(math.pi / 2)
    z = np.zeros(5)
    assert sp.distance(sp.GridFunctionSpace(5, "sup"), z, z) == 0.0


@pytest.mark.parametrize("name", sorted(SPACES))
def test_metric_axioms_random_triples(name):
    space = SPACES[name]
    rng = np.random.default_rng(3)
    for _ in range(300):
        x, y, z = (_rand_point(space, rng) for _ in range(3))
        dxy, dyx = sp.distance(space, x, y), sp.distance(space, y, x)
        assert dxy >= 0 and dxy == pytest.approx(dyx, abs=1e-12)
        assert sp.distance(space, x, z) <= dxy + sp.distance(space, y, z) + 1e-12


@given(angles, angles)
def test_arc_distance_at_most_pi(a, b):
    d = sp.distance(sp.Circle("arc"), a, b)
    assert 0 <= d <= math.pi + 1e-12
    assert sp.distance(sp.Circle("chord"), a, b) <= d + 1e-12


def test_diam_examples():
    assert sp.diam_upper(sp.RealInterval(), sp.Interval(0, 1)) == pytest.approx(1)
    assert sp.diam_upper(sp.EuclideanBox.plane(), sp.Ball((0.0, 0.0), 0.3)) == pytest.approx(0.6)
    assert sp.diam_upper(sp.Circle(), sp.Arc(0, math.pi / 3)) == pytest.approx(math.pi / 3)


@pytest.mark.parametrize("space,shape", [
    (sp.RealInterval(), sp.Interval(-1, 2)),
    (sp.Circle(), sp.Arc(0.5, 3.0)),
    (sp.Circle(), sp.Arc(1.0, 5.5)),
    (sp.EuclideanBox.plane(), sp.Ball((1.0, -1.0), 0.7)),
    (sp.EuclideanBox.plane("sup"), sp.Box(((0, 1), (0, 0.2)))),
])
def test_sampled_distances_below_diameter(space, shape):
    rng = np.random.default_rng(0)
    pts = sp.sample_points(space, shape, 400, rng)
    D = sp.diam_upper(space, shape)
    for i in range(0, 400, 2):
        assert sp.distance(space, pts[i], pts[i + 1]) <= D + 1e-12


def test_enumerate_unit_interval():
    sets = sp.enumerate_basic_opens(sp.RealInterval(), 0.5, sp.Interval(0, 1))
    got = sorted((s.a, s.b) for s in sets)
    assert got == pytest.approx([((k - 1) / 4, (k + 1) / 4) for k in range(1, 5)])


def test_enumerate_circle_single_arc():
    region = sp.Arc(0.1, 0.1 + 2 * math.pi - 1e-9)
    assert len(sp.enumerate_basic_opens(sp.Circle(), 2 * math.pi, region)) == 1


def test_enumerate_sup_square_covers():
    space = sp.EuclideanBox.plane("sup")
    region = sp.Box(((0, 1), (0, 1)))
    sets = sp.enumerate_basic_opens(space, 0.5, region)
    assert len(sets) == 16
    g = (np.arange(101) / 100)
    P = np.array([(x, y) for x in g[1:-1] for y in g[1:-1]])
    covered = np.zeros(len(P), bool)
    for s in sets:
        covered |= sp.contains(space, s, P)
    assert covered.all()


@given(st.floats(-3, 3), st.floats(0.01, 2), st.floats(0.01, 1))
def test_enumerate_interval_cover(a, length, scale):
    space = sp.RealInterval()
    region = sp.Interval(a, a + length)
    sets = sp.enumerate_basic_opens(space, scale, region)
    P = np.linspace(a, a + length, 203)[1:-1]
    covered = np.zeros(len(P), bool)
    for s in sets:
        covered |= sp.contains(space, s, P)
    assert covered.all()


def test_disjoint_examples():
    R, C, P = sp.RealInterval(), sp.Circle(), sp.EuclideanBox.plane()
    assert sp.are_disjoint(R, sp.Interval(0, 0.5), sp.Interval(0.5, 1))
    assert not sp.are_disjoint(C, sp.Arc(0, math.pi), sp.Arc(math.pi / 2, 3 * math.pi / 2))
    assert sp.are_disjoint(P, sp.Ball((0.0, 0.0), 0.4), sp.Ball((1.0, 0.0), 0.5))


@given(finite, st.floats(0.01, 3), finite, st.floats(0.01, 3))
def test_disjoint_implies_no_common_sample(a, la, b, lb):
    R = sp.RealInterval()
    I, J = sp.Interval(a, a + la), sp.Interval(b, b + lb)
    if sp.are_disjoint(R, I, J):
        P = np.linspace(min(a, b), max(a + la, b + lb), 2001)
        assert not (sp.contains(R, I, P) & sp.contains(R, J, P)).any()


@given(angles, st.floats(0.01, 3), angles, st.floats(0.01, 3))
def test_disjoint_arcs_sampled(a, la, b, lb):
    C = sp.Circle()
    A, B = sp.Arc(a, a + la), sp.Arc(b, b + lb)
    if sp.are_disjoint(C, A, B):
        t = np.linspace(0, 2 * math.pi, 4001)
        assert not (sp.contains(C, A, t) & sp.contains(C, B, t)).any()


def test_boundary_excluded():
    R = sp.RealInterval()
    assert not sp.contains(R, sp.Interval(0, 1), np.array([0.0, 1.0])).any()


def test_space_roundtrip():
    for space in SPACES.values():
        assert sp.space_from_dict(space.to_dict()).to_dict() == space.to_dict()


def test_shape_roundtrip():
    for s in (sp.Interval(0, 1), sp.Arc(0, 1), sp.Ball((0.0, 1.0), 2.0), sp.Box(((0, 1), (2, 3)))):
        assert sp.shape_from_dict(sp.shape_to_dict(s)) == s


def test_unknown_named_space():
    with pytest.raises(InvalidSpace):
        sp.named_space("torus")
