"""Reproduction corpus: named fixtures with an expected outcome each."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import spaces as sp
from .ac import (analyze, builtin, certify_ac_lipschitz, ac_algebra_check, falsify_ac,
                 standard_ac_check, GridDensityIntegral, is_ac)
from .ac.falsify import constancy_falsifier
from .linear import (Addition, FunctionalOnRn, IntegrationOperator, Scalar, VectorIdentity,
                     ac_from_bounded, composition_ac, holder_functional_check,
                     norm_function_check)
from .measure import (MeasureKind, caratheodory_probe, measure_of,
                      separated_additivity_check)
from .tms import (TmsInstance, check_instance, induced_pseudometric, pseudometric_axiom_check,
                  restrict)

CORPUS_VERSION = 1
DELTAS = (1e-1, 1e-2, 1e-3, 1e-4)


@dataclass(frozen=True)
class CorpusEntry:
    id: str
    expected: str
    source: str
    run: Callable[[int], tuple]


def _verdict_outcome(v) -> str:
    if v.status == "falsified":
        return f"falsified({v.eps:g})" if not v.by_theorem or v.witnesses else "falsified"
    return v.status


# --------------------------------------------------------------------------
# tms fixtures
# --------------------------------------------------------------------------

def _tms(space, kind, samples=200):
    def run(seed):
        rep = check_instance(TmsInstance(space, kind), samples, seed)
        failed = rep.failed_axioms
        actual = "tms_passes" if not failed else f"tms_fails_axiom({failed[0]})"
        detail = {"failed_axioms": failed,
                  "axiom_ii_failures": rep.axiom_ii.failures[:3],
                  "axiom_iii_failures": rep.axiom_iii.failures[:3]}
        return actual, detail
    return run


def _restriction(seed):
    inst = restrict(TmsInstance(sp.RealInterval(), MeasureKind.LEBESGUE), sp.Interval(0.25, 0.75))
    rep = check_instance(inst, 100, seed)
    return ("tms_passes" if rep.passed else f"tms_fails_axiom({rep.failed_axioms[0]})",
            {"space": inst.space.space_id})


# --------------------------------------------------------------------------
# measure fixtures
# --------------------------------------------------------------------------

def _diameter_identity(seed):
    rng = np.random.default_rng(seed)
    worst = 0.0
    cases = []
    plane, line, circle = sp.EuclideanBox.plane(), sp.RealInterval(), sp.Circle()
    for _ in range(10):
        a = float(rng.uniform(-2, 2))
        cases.append((line, sp.Interval(a, a + float(rng.uniform(0.01, 2)))))
        t = float(rng.uniform(0, 6))
        cases.append((circle, sp.Arc(t, t + float(rng.uniform(0.01, 3)))))
        cases.append((plane, sp.Ball(tuple(rng.uniform(-1, 1, 2)), float(rng.uniform(0.01, 1)))))
    for space, s in cases:
        e = measure_of(space, MeasureKind.DIAM, s, 1000)
        d = sp.diam_upper(space, s)
        worst = max(worst, abs(e.upper - d), abs(e.lower - d))
    return ("bracket_closes" if worst <= 1e-6 else "bracket_open",
            {"sets": len(cases), "max_deviation": worst})


def _additivity(seed):
    rep = separated_additivity_check(sp.Circle(), sp.Arc(0, math.pi / 4),
                                     sp.Arc(math.pi, 5 * math.pi / 4), 100, 1e-6)
    rep2 = separated_additivity_check(sp.RealInterval(), sp.Interval(0, 1), sp.Interval(2, 3))
    ok = rep.additive and rep2.additive
    return ("additive" if ok else "not_additive",
            {"circle_union_upper": rep.nu_union.upper, "line_union_upper": rep2.nu_union.upper})


def _outer_measure_axioms(seed):
    space = sp.RealInterval()
    e = measure_of(space, MeasureKind.DIAM, sp.Empty(), 10)
    a = measure_of(space, MeasureKind.DIAM, sp.Interval(0, 0.5), 100)
    b = measure_of(space, MeasureKind.DIAM, sp.Interval(0, 1), 100)
    u = measure_of(space, MeasureKind.DIAM, sp.union(sp.Interval(0, 1), sp.Interval(2, 2.5)), 100)
    ok = e.upper == 0.0 and a.upper <= b.upper + 1e-9 and u.upper <= 1.5 + 1e-9
    return ("outer_measure" if ok else "violated",
            {"empty": e.upper, "monotone": [a.upper, b.upper], "union_upper": u.upper})


def _caratheodory(seed):
    rep = caratheodory_probe(sp.RealInterval(), sp.Interval(0, 1), [sp.Interval(-1, 2)], 100)
    return ("caratheodory_" + rep.verdict, {"probes": len(rep.results)})


def _pseudometric(seed):
    inst = TmsInstance(sp.RealInterval(), MeasureKind.LEBESGUE)
    rng = np.random.default_rng(seed)
    pairs = rng.uniform(-5, 5, (200, 2))
    bad = 0
    for p, q in pairs:
        br = induced_pseudometric(inst, p, q)
        bad += not br.contains(abs(p - q), 1e-4)
    tri = pseudometric_axiom_check(inst, [tuple(rng.uniform(-5, 5, 3)) for _ in range(100)])
    ok = bad == 0 and tri.passed
    return ("pseudometric_contains" if ok else "pseudometric_violated",
            {"pairs": len(pairs), "misses": bad, "triangle": tri.verdict})


def _circle_pseudometric(seed):
    br = induced_pseudometric(TmsInstance(sp.Circle(), MeasureKind.DIAM), 0.0, math.pi / 2)
    ok = br.contains(math.pi / 2, 1e-6)
    return ("pseudometric_contains" if ok else "pseudometric_violated", br.to_dict())


# --------------------------------------------------------------------------
# absolute continuity fixtures
# --------------------------------------------------------------------------

def _certify(fn, space, kind, eps=0.01, param=None):
    def run(seed):
        f = builtin(fn, space, param) if isinstance(fn, str) else fn()
        inst = TmsInstance(f.domain, kind)
        v = analyze(f, inst, eps, n_families=20, seed=seed)
        detail = {"certificate": getattr(v, "certificate", None), "L": getattr(v, "L", None),
                  "spot_checks_passed": getattr(v, "spot_checks_passed", None)}
        if v.status == "certified" and not v.spot_checks_passed:
            return "spot_check_failed", detail
        return _verdict_outcome(v), detail
    return run


def _falsify(fn, space, kind, eps, param=None):
    def run(seed):
        f = builtin(fn, space, param)
        inst = TmsInstance(f.domain, kind)
        v = falsify_ac(f, inst, eps, DELTAS, seed=seed)
        ws = getattr(v, "witnesses", None) or getattr(v, "partial", [])
        detail = {"witnesses": [{"delta": w.delta, "strategy": w.strategy, "sets": len(w.family),
                                 "total_measure_upper": w.total_measure_upper,
                                 "oscillation_sum_lower": w.oscillation_sum_lower} for w in ws]}
        return _verdict_outcome(v), detail
    return run


def _cantor_standard(seed):
    r = standard_ac_check(builtin("cantor"), 0.0, 1.0, DELTAS, 0.9)
    detail = {"per_delta": [{k: e[k] for k in ("delta", "best_sum", "witness")} for e in r.per_delta]}
    return ("standard_ac_holds" if r.holds else "standard_ac_fails(0.9)"), detail


def _equivalence(seed):
    unit = sp.RealInterval(0.0, 1.0, True, True)
    inst = TmsInstance(unit, MeasureKind.LEBESGUE)
    rows = {}
    agree = True
    for name in ("identity", "sin", "sqrt", "cantor", "square"):
        f = builtin(name, unit)
        tms_ac = is_ac(analyze(f, inst, 0.1, DELTAS, n_families=5, seed=seed))
        std_ac = standard_ac_check(f, 0.0, 1.0, DELTAS, 0.1).holds
        rows[name] = {"tms": tms_ac, "standard": std_ac}
        agree &= tms_ac == std_ac
    return ("agree" if agree else "disagree"), rows


def _projection_constancy(seed):
    P = TmsInstance(sp.EuclideanBox.plane(), MeasureKind.LEBESGUE)
    v = constancy_falsifier(builtin("projection_k", P.space, 0), P, sp.Segment((0, 0), (1, 0)), seed=seed)
    return ("falsified" if v.status == "falsified" else v.status), v.by_theorem or {}


def _density(mode):
    def make():
        t = (np.arange(1000) + 0.5) / 1000
        return GridDensityIntegral(np.minimum(1 / np.sqrt(t), 1e3), 0.0, 1.0, mode)
    return make


def _algebra(op):
    def run(seed):
        R = TmsInstance(sp.RealInterval(), MeasureKind.LEBESGUE)
        s, c = builtin("sin"), builtin("cos")
        one = certify_ac_lipschitz(1.0)
        if op == "sum":
            h, v = ac_algebra_check(s, one, "sum", c, one, instance=R, n_families=20, seed=seed)
            want = 2.0
        elif op == "reciprocal":
            from .ac.functions import Composite
            f = Composite("shift", [s], c=3.0)  # |2 + ...| >= 2
            h, v = ac_algebra_check(f, one, "reciprocal", K=2.0, instance=R, n_families=20, seed=seed)
            want = 0.25
        elif op == "product":
            h, v = ac_algebra_check(s, one, "product", c, one, M=1.0, instance=R, n_families=20, seed=seed)
            want = 2.0
        elif op == "scale":
            h, v = ac_algebra_check(s, one, "scale", alpha=-3.0, instance=R, n_families=20, seed=seed)
            want = 3.0
        else:
            h, v = ac_algebra_check(s, one, "abs", instance=R, n_families=20, seed=seed)
            want = 1.0
        ok = v.spot_checks_passed and abs(v.L - want) <= 1e-12
        return ("certified" if ok else "mismatch"), {"L": v.L, "expected_L": want}
    return run


# --------------------------------------------------------------------------
# linear fixtures
# --------------------------------------------------------------------------

def _linear(make, expect_L=None):
    def run(seed):
        T = make()
        v = ac_from_bounded(T, n_families=20, seed=seed)
        ok = v.spot_checks_passed and v.params["norm_lower"] <= v.L + 1e-6
        if expect_L is not None:
            ok &= abs(v.L - expect_L) <= 1e-9
        return ("certified" if ok else "mismatch"), {"norm": v.params["norm"],
                                                    "norm_lower": v.params["norm_lower"],
                                                    "delta_at_0.01": v.delta(0.01)}
    return run


def _holder(seed):
    v = holder_functional_check(np.ones(16), 2.0, seed=seed, n_families=20)
    ok = v.spot_checks_passed and v.params["holder"]["passed"] and abs(v.L - 1.0) < 1e-12
    return ("certified" if ok else "mismatch"), {"L": v.L, "holder": v.params["holder"]}


def _norm_fn(seed):
    v = norm_function_check(sp.GridFunctionSpace(8, "l1"), n_families=20, seed=seed)
    return ("certified" if v.spot_checks_passed else "mismatch"), {"L": v.L}


def _composition(seed):
    P = sp.EuclideanBox.plane()
    D = TmsInstance(P, MeasureKind.DIAM)
    h, v = composition_ac(FunctionalOnRn([1.0, 0.0]), VectorIdentity(P), certify_ac_lipschitz(1.0),
                          D, n_families=20, seed=seed)
    R = TmsInstance(sp.RealInterval(), MeasureKind.LEBESGUE)
    h2, v2 = composition_ac(Scalar(3.0), builtin("sin"), certify_ac_lipschitz(1.0), R,
                            n_families=20, seed=seed)
    ok = v.spot_checks_passed and v2.spot_checks_passed and v.L == 1.0 and v2.L == 3.0
    return ("certified" if ok else "mismatch"), {"projection_L": v.L, "scaled_sin_L": v2.L}


LEB, DIAM, COUNT = MeasureKind.LEBESGUE, MeasureKind.DIAM, MeasureKind.COUNTING
PLANE = sp.EuclideanBox.plane()
UNIT = sp.RealInterval(0.0, 1.0, True, True)

ENTRIES = (
    CorpusEntry("tms_real_lebesgue", "tms_passes", "Lebesgue measure on the real line",
                _tms(sp.RealInterval(), LEB)),
    CorpusEntry("tms_unit_interval_lebesgue", "tms_passes", "closed bounded interval as a subspace",
                _tms(UNIT, LEB)),
    CorpusEntry("tms_plane_lebesgue", "tms_passes", "Lebesgue measure on the plane",
                _tms(PLANE, LEB)),
    CorpusEntry("tms_circle_diam", "tms_passes", "circle with arc metric and nu",
                _tms(sp.Circle(), DIAM)),
    CorpusEntry("tms_plane_diam", "tms_passes", "metric space with nu",
                _tms(PLANE, DIAM)),
    CorpusEntry("tms_counting", "tms_fails_axiom(2)", "counting measure on the line",
                _tms(sp.RealInterval(), COUNT)),
    CorpusEntry("tms_circle_planar_lebesgue", "tms_fails_axiom(3)", "circle with planar Lebesgue measure",
                _tms(sp.Circle(), LEB)),
    CorpusEntry("tms_open_restriction", "tms_passes", "open subspace of a tms", _restriction),
    CorpusEntry("measure_outer_axioms", "outer_measure", "nu is an outer measure", _outer_measure_axioms),
    CorpusEntry("measure_separated_additivity", "additive", "nu is additive on separated sets",
                _additivity),
    CorpusEntry("measure_diameter_identity", "bracket_closes", "nu equals diameter on balls",
                _diameter_identity),
    CorpusEntry("measure_caratheodory_interval", "caratheodory_pass", "Caratheodory measurability",
                _caratheodory),
    CorpusEntry("pseudometric_real", "pseudometric_contains", "induced pseudometric",
                _pseudometric),
    CorpusEntry("pseudometric_circle", "pseudometric_contains", "induced pseudometric on the circle",
                _circle_pseudometric),
    CorpusEntry("ac_identity", "certified", "identity oscillation equals length",
                _certify("identity", sp.RealInterval(), LEB)),
    CorpusEntry("ac_sin", "certified", "sine is 1-Lipschitz", _certify("sin", sp.RealInterval(), LEB)),
    CorpusEntry("ac_cos", "certified", "cosine is 1-Lipschitz", _certify("cos", sp.RealInterval(), LEB)),
    CorpusEntry("ac_sqrt_half_line", "certified", "square root glued across 1",
                _certify("sqrt", sp.RealInterval(0.0, math.inf, True), LEB)),
    CorpusEntry("ac_density_symmetric", "certified", "symmetric integral of an L1 density",
                _certify(_density("symmetric"), None, LEB, 0.1)),
    CorpusEntry("ac_density_cumulative", "certified", "cumulative integral of an L1 density",
                _certify(_density("cumulative"), None, LEB, 0.1)),
    CorpusEntry("ac_projection_diam", "certified", "projection under nu",
                _certify("projection_k", PLANE, DIAM, 0.01, 0)),
    CorpusEntry("ac_complex_identity_circle", "certified", "vector-valued identity on the circle",
                _certify("complex_identity", sp.Circle(), DIAM)),
    CorpusEntry("ac_x_sin_inv_x", "falsified(0.5)", "x sin(1/x) is not absolutely continuous",
                _falsify("x_sin_inv_x", sp.RealInterval(0.0, 1.0), LEB, 0.5)),
    CorpusEntry("ac_square_real", "falsified(1)", "x^2 is not uniformly continuous",
                _falsify("square", sp.RealInterval(), LEB, 1.0)),
    CorpusEntry("ac_projection_lebesgue", "falsified(0.9)", "projections under Lebesgue measure",
                _falsify("projection_k", PLANE, LEB, 0.9, 0)),
    CorpusEntry("ac_projection_constancy", "falsified", "non-constant on a null segment",
                _projection_constancy),
    CorpusEntry("ac_cantor_standard", "standard_ac_fails(0.9)", "Cantor function", _cantor_standard),
    CorpusEntry("ac_equivalence_unit_interval", "agree", "equivalence with the standard notion",
                _equivalence),
    CorpusEntry("ac_algebra_sum", "certified", "sum of AC functions", _algebra("sum")),
    CorpusEntry("ac_algebra_scale", "certified", "scalar multiple", _algebra("scale")),
    CorpusEntry("ac_algebra_product", "certified", "bounded product", _algebra("product")),
    CorpusEntry("ac_algebra_reciprocal", "certified", "reciprocal bounded below", _algebra("reciprocal")),
    CorpusEntry("ac_algebra_abs", "certified", "absolute value", _algebra("abs")),
    CorpusEntry("linear_functional", "certified", "bounded functional",
                _linear(lambda: FunctionalOnRn([3.0, 4.0]), 5.0)),
    CorpusEntry("linear_addition", "certified", "addition map", _linear(lambda: Addition(1), 2.0)),
    CorpusEntry("linear_scalar", "certified", "scalar map", _linear(lambda: Scalar(-2.5), 2.5)),
    CorpusEntry("linear_integration", "certified", "integration operator on sampled C[0,1]",
                _linear(lambda: IntegrationOperator(16), 1.0)),
    CorpusEntry("linear_holder", "certified", "integral functional with Holder bound", _holder),
    CorpusEntry("linear_norm_function", "certified", "norm function", _norm_fn),
    CorpusEntry("linear_composition", "certified", "composition with a bounded map", _composition),
)


def entry_ids() -> list:
    return sorted(e.id for e in ENTRIES)


def run_entry(entry: CorpusEntry, seed: int) -> dict:
    actual, detail = entry.run(seed)
    return {"id": entry.id, "expected": entry.expected, "actual": actual,
            "met": actual == entry.expected, "source": entry.source, "detail": detail}


def reproduce(seed: int = 7, only: list | None = None) -> list:
    """Run the corpus in id order."""
    entries = sorted(ENTRIES, key=lambda e: e.id)
    if only:
        entries = [e for e in entries if e.id in set(only)]
    return [run_entry(e, seed) for e in entries]
