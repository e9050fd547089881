import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tmslab import spaces as sp
from tmslab.ac import (GridDensityIntegral, analyze, builtin, certify_ac_integral,
                       certify_ac_lipschitz, ac_algebra_check, constancy_falsifier,
                       estimate_local_lipschitz, falsify_ac, glue_verdicts, is_ac,
                       restriction_check, spot_check, standard_ac_check,
                       uniform_continuity_check, validate_witness)
from tmslab.ac.certify import sqrt_tail
from tmslab.ac.falsify import check_schedule
from tmslab.ac.verdicts import Certified, Falsified, Inconclusive, Pass
from tmslab.errors import (InsufficientHypotheses, InvalidPartition, RuleNotApplicable,
                           SpecError)
from tmslab.measure import MeasureKind
from tmslab.tms import TmsInstance

R = sp.RealInterval()
UNIT = sp.RealInterval(0.0, 1.0, True, True)
HALF = sp.RealInterval(0.0, math.inf, True)
PLANE = sp.EuclideanBox.plane()
LEB = TmsInstance(R, MeasureKind.LEBESGUE)
DELTAS = (1e-1, 1e-2, 1e-3, 1e-4)


def test_lipschitz_estimates():
    assert estimate_local_lipschitz(builtin("sin"), LEB).L_hat == pytest.approx(1, rel=0.05)
    est = estimate_local_lipschitz(builtin("identity"), LEB)
    assert est.L_hat == pytest.approx(1, abs=1e-9) and est.accepted
    est = estimate_local_lipschitz(builtin("sqrt"), TmsInstance(HALF, "lebesgue"),
                                   scales=[10.0 ** -k for k in range(1, 9)])
    assert est.diverging and not est.accepted
    assert isinstance(certify_ac_lipschitz(est), Inconclusive)


def test_lipschitz_delta_rule():
    assert certify_ac_lipschitz(1.0).delta(0.01) == pytest.approx(0.01)
    assert certify_ac_lipschitz(5.0).delta(1.0) == pytest.approx(0.2)


@pytest.mark.parametrize("name", ["identity", "sin", "cos"])
def test_lipschitz_spot_checks(name):
    v = certify_ac_lipschitz(1.0, builtin(name), LEB, n_families=100, seed=3)
    assert v.spot_checks_passed and len(v.spot_checks) == 3


def test_integral_certificates():
    ind = GridDensityIntegral(np.ones(100), 0.0, 1.0, "cumulative")
    v = certify_ac_integral(ind, instance=TmsInstance(UNIT, "lebesgue"))
    assert v.delta(0.1) == pytest.approx(0.05)
    zero = GridDensityIntegral(np.zeros(50), 0.0, 1.0, "cumulative")
    v = certify_ac_integral(zero, instance=TmsInstance(UNIT, "lebesgue"))
    assert v.delta(0.1) == math.inf and v.spot_checks_passed
    assert all(c["worst_sum_upper"] == 0 for c in v.spot_checks)


def test_integral_symmetric_level():
    t = (np.arange(1000) + 0.5) / 1000
    F = GridDensityIntegral(np.minimum(1 / np.sqrt(t), 1e3), 0.0, 1.0, "symmetric")
    v = certify_ac_integral(F, instance=TmsInstance(UNIT, "lebesgue"), n_families=50)
    p = v.delta_rule.level(0.1)
    assert F.tail(p) < 0.025 <= F.tail(p - 1)
    assert v.delta(0.1) == pytest.approx(0.1 / (4 * p))
    assert v.spot_checks_passed


def test_sqrt_tail_matches_quadrature():
    t = (np.arange(200000) + 0.5) / 200000
    dens = 0.5 / np.sqrt(t)
    for p in (0.3, 0.8, 2.0, 10.0):
        quad = np.mean(np.maximum(dens - p, 0))
        assert sqrt_tail(p) >= quad - 1e-3


def test_glue_sqrt_and_errors():
    v = analyze(builtin("sqrt"), TmsInstance(HALF, "lebesgue"), 0.01, n_families=20)
    assert isinstance(v, Certified) and v.certificate == "Glued" and v.spot_checks_passed
    one = certify_ac_lipschitz(1.0)
    single = glue_verdicts([(R, one)])
    assert single.delta(0.1) == pytest.approx(one.delta(0.1))
    left, right = sp.RealInterval(0.0, 1.0, True, True), sp.RealInterval(1.0, 2.0, False, True)
    with pytest.raises(InvalidPartition):
        glue_verdicts([(left, one), (right, one)], continuous=False)
    with pytest.raises(InvalidPartition):
        glue_verdicts([])


def test_algebra_constants():
    s, c = builtin("sin"), builtin("cos")
    one = certify_ac_lipschitz(1.0)
    _, v = ac_algebra_check(s, one, "sum", c, one, instance=LEB, n_families=30)
    assert v.L == 2 and v.spot_checks_passed
    h, v = ac_algebra_check(builtin("identity"), one, "scale", alpha=0.0, instance=LEB, n_families=30)
    assert v.L == 0 and all(ch["worst_sum_upper"] == 0 for ch in v.spot_checks)
    with pytest.raises(InsufficientHypotheses):
        ac_algebra_check(s, one, "sum")
    with pytest.raises(InsufficientHypotheses):
        ac_algebra_check(s, one, "reciprocal")


@given(st.floats(-5, 5).filter(lambda a: abs(a) > 1e-6), st.floats(0.1, 3))
def test_scale_constant_property(alpha, L):
    _, v = ac_algebra_check(builtin("sin"), certify_ac_lipschitz(L), "scale", alpha=alpha)
    assert v.L == pytest.approx(abs(alpha) * L)


def test_uniform_continuity_and_restriction():
    v = certify_ac_lipschitz(1.0, builtin("sin"), LEB)
    for eps in (0.1, 0.01):
        assert uniform_continuity_check(builtin("sin"), v, eps)["passed"]
    checks = restriction_check(builtin("sin"), v, LEB, sp.Interval(0, 1))
    assert all(c["passed"] for c in checks)


def test_abs_keeps_constant():
    one = certify_ac_lipschitz(1.0)
    _, v = ac_algebra_check(builtin("sin"), one, "abs", instance=LEB, n_families=30)
    assert v.L == 1.0 and v.spot_checks_passed


# ---------------------------------------------------------------- falsifier


def test_schedule_validation():
    with pytest.raises(SpecError):
        check_schedule([1e-1, 1e-2])
    with pytest.raises(SpecError):
        check_schedule([1e-4, 1e-3, 1e-2, 1e-1])


def _assert_witnesses(v, eps, f):
    assert isinstance(v, Falsified) and v.eps == eps
    assert [w.delta for w in v.witnesses] == list(DELTAS)
    for w in v.witnesses:
        chk = validate_witness(f, w.family, w.delta, eps, seed=11)
        assert chk["witness"], chk


def test_falsify_x_sin_inv_x():
    f = builtin("x_sin_inv_x", sp.RealInterval(0.0, 1.0))
    _assert_witnesses(falsify_ac(f, TmsInstance(f.domain, "lebesgue"), 0.5, DELTAS), 0.5, f)


def test_falsify_square():
    f = builtin("square")
    _assert_witnesses(falsify_ac(f, LEB, 1.0, DELTAS), 1.0, f)


def test_falsify_projection_lebesgue():
    f = builtin("projection_k", PLANE, 0)
    _assert_witnesses(falsify_ac(f, TmsInstance(PLANE, "lebesgue"), 0.9, DELTAS), 0.9, f)


def test_sin_not_falsified():
    v = falsify_ac(builtin("sin"), LEB, 0.1, DELTAS)
    assert isinstance(v, Inconclusive)


def test_constancy_rule():
    inst = TmsInstance(PLANE, "lebesgue")
    seg = sp.Segment((0.0, 0.0), (1.0, 0.0))
    v = constancy_falsifier(builtin("projection_k", PLANE, 0), inst, seg)
    assert isinstance(v, Falsified) and v.by_theorem["difference"] > 0.5
    assert isinstance(constancy_falsifier(builtin("constant", PLANE, 2.0), inst, seg), Pass)
    with pytest.raises(RuleNotApplicable):
        constancy_falsifier(builtin("projection_k", PLANE, 0), TmsInstance(PLANE, "diam"), seg)


def test_standard_check_small_cases():
    assert standard_ac_check(builtin("identity", UNIT), 0, 1, DELTAS, 0.1).holds
    assert standard_ac_check(builtin("sqrt", UNIT), 0, 1, DELTAS, 0.1).holds


def test_cantor_stage_sums():
    # stage n: 2^n intervals of length 3^-n whose endpoint jumps sum to 1
    from tmslab.ac.functions import cantor_function
    for n in range(1, 13):
        lo = np.array([0.0])
        for _ in range(n):
            lo = np.concatenate([lo, lo + 2 * 3.0 ** -(_ + 1)])
        hi = lo + 3.0 ** -n
        assert np.sum(cantor_function(hi) - cantor_function(lo)) == pytest.approx(1.0)
        assert np.sum(hi - lo) == pytest.approx((2 / 3) ** n)


# ---------------------------------------------------------------- pipeline


@pytest.mark.parametrize("name,space,kind,expected", [
    ("sin", R, "lebesgue", True),
    ("identity", UNIT, "lebesgue", True),
    ("square", UNIT, "lebesgue", True),
    ("sqrt", UNIT, "lebesgue", True),
    ("complex_identity", sp.Circle(), "diam", True),
    ("square", R, "lebesgue", False),
])
def test_analyze_classification(name, space, kind, expected):
    v = analyze(builtin(name, space), TmsInstance(space, kind), 0.1, n_families=10)
    assert is_ac(v) is expected


def test_analyze_projection_both_measures():
    f = builtin("projection_k", PLANE, 0)
    v = analyze(f, TmsInstance(PLANE, "diam"), 0.01)
    assert isinstance(v, Certified) and v.L == 1
    v = analyze(f, TmsInstance(PLANE, "lebesgue"), 0.9)
    assert isinstance(v, Falsified) and v.by_theorem is not None


def test_analyze_deterministic():
    f = builtin("sin")
    a = analyze(f, LEB, 0.01, seed=4).to_dict()
    assert a == analyze(f, LEB, 0.01, seed=4).to_dict()
