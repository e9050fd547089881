import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tmslab import spaces as sp
from tmslab.ac import builtin, certify_ac_lipschitz
from tmslab.ac.functions import Composite
from tmslab.ac.families import random_family
from tmslab.errors import InvalidComposition
from tmslab.linear import (Addition, FunctionalOnRn, HolderFunctional, IntegrationOperator,
                           MapFunction, MatrixOnGrid, Scalar, VectorIdentity, ac_from_bounded,
                           composition_ac, differentiation_norms, holder_check,
                           holder_functional_check, linearity_probe, map_from_dict,
                           norm_function_check, operator_norm)
from tmslab.measure import MeasureKind
from tmslab.tms import TmsInstance

small = st.floats(-5, 5, allow_nan=False)


def test_norm_examples():
    est = operator_norm(FunctionalOnRn([3, 4], "l2"))
    assert 5 - 1e-6 <= est.lower <= est.upper <= 5 + 1e-12
    est = operator_norm(Addition(1))
    assert 2 - 1e-6 <= est.lower <= est.upper <= 2 + 1e-12
    est = operator_norm(Scalar(0.0))
    assert est.lower == est.upper == 0


def test_ac_from_bounded_examples():
    v = ac_from_bounded(FunctionalOnRn([3, 4], "l2"), n_families=30)
    assert v.delta(0.6) == pytest.approx(0.1) and v.spot_checks_passed
    v = ac_from_bounded(IntegrationOperator(32), n_families=30)
    assert v.L <= 1 + 1e-12 and v.delta(0.01) == pytest.approx(0.005)


@given(st.lists(small, min_size=1, max_size=6), st.sampled_from(["l2", "sup"]))
def test_functional_norm_bracket(coeffs, norm):
    T = FunctionalOnRn(coeffs, norm)
    est = operator_norm(T, budget=50)
    assert est.lower <= est.upper + 1e-9
    dual = {"l2": 2, "sup": 1}[norm]
    assert est.upper == pytest.approx(np.linalg.norm(coeffs, dual), abs=1e-12)


@pytest.mark.parametrize("dn,cn", [("sup", "sup"), ("l2", "l2"), ("l1", "sup"), ("sup", "l1")])
def test_matrix_norm_bracket(dn, cn):
    rng = np.random.default_rng(0)
    for _ in range(5):
        T = MatrixOnGrid(rng.normal(size=(4, 5)), dn, cn)
        est = operator_norm(T, budget=100)
        assert est.lower <= est.upper * (1 + 1e-9)
        assert linearity_probe(T)["passed"]


def test_linearity_all_maps():
    maps = [FunctionalOnRn([1, -2, 3]), IntegrationOperator(8), HolderFunctional(np.ones(8), 2.0),
            Addition(2), Scalar(-1.5), MatrixOnGrid(np.eye(3) * 2)]
    for T in maps:
        assert linearity_probe(T)["passed"], T


def test_holder_functional():
    v = holder_functional_check(np.ones(20), 2.0)
    assert v.L == pytest.approx(1.0)
    assert holder_check(HolderFunctional(np.ones(20), 2.0))["passed"]
    z = holder_functional_check(np.zeros(20), 2.0)
    assert z.L == 0 and all(c["worst_sum_upper"] == 0 for c in z.spot_checks)
    T = HolderFunctional(np.linspace(-1, 1, 20), 3.0)
    x = np.random.default_rng(1).normal(size=(1, 20))
    assert T(x - x) == pytest.approx(0)
    with pytest.raises(ValueError):
        HolderFunctional(np.ones(3), 2.0, 3.0)


def test_composition():
    R = TmsInstance(sp.RealInterval(), "lebesgue")
    h, v = composition_ac(Scalar(3.0), builtin("sin"), certify_ac_lipschitz(1.0), R)
    assert v.L == 3 and v.spot_checks_passed
    h, v = composition_ac(Scalar(0.0), builtin("sin"), certify_ac_lipschitz(1.0), R)
    assert v.L == 0 and all(c["worst_sum_upper"] == 0 for c in v.spot_checks)
    P = sp.EuclideanBox.plane()
    h, v = composition_ac(FunctionalOnRn([1.0, 0.0]), VectorIdentity(P), certify_ac_lipschitz(1.0),
                          TmsInstance(P, "diam"))
    assert v.L == 1 and v.spot_checks_passed
    with pytest.raises(InvalidComposition):
        composition_ac(FunctionalOnRn([1.0, 0.0, 2.0]), VectorIdentity(P), certify_ac_lipschitz(1.0),
                       TmsInstance(P, "diam"))


def test_norm_function_and_scalar_addition():
    assert norm_function_check(sp.GridFunctionSpace(6, "l1"), n_families=30).spot_checks_passed
    assert ac_from_bounded(Addition(1)).L == pytest.approx(2)
    assert ac_from_bounded(Scalar(-4.0)).L == pytest.approx(4)


def test_shift_invariance():
    T = FunctionalOnRn([1.0, 2.0], "sup")
    f = MapFunction(T)
    g = Composite("shift", [f], c=7.5)
    inst = TmsInstance(T.domain, MeasureKind.DIAM)
    fam = random_family(inst, 0.3, np.random.default_rng(2))
    assert fam.oscillation_sum_upper(f) == pytest.approx(fam.oscillation_sum_upper(g))
    a, b = fam.oscillation_sum(f, seed=1), fam.oscillation_sum(g, seed=1)
    assert a.lower == pytest.approx(b.lower)


def test_differentiation_grows():
    rows = differentiation_norms((4, 8, 16))
    assert [r["upper"] for r in rows] == pytest.approx([8, 16, 32])


def test_map_roundtrip():
    for T in (FunctionalOnRn([1, 2]), IntegrationOperator(4), Addition(1), Scalar(2.0)):
        U = map_from_dict(T.to_dict())
        x = np.ones((1, T.domain.dim))
        assert np.allclose(T(x), U(x))
