"""Witness-family search against absolute continuity, the constancy rule for
null connected sets, and the endpoint-difference check on compact intervals."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .. import spaces as sp
from ..errors import RuleDisabled, RuleNotApplicable, SpecError
from ..measure import MeasureKind
from ..tms import TmsInstance, sample_region
from .families import DisjointFamily
from .functions import Builtin, FunctionSpec
from .oscillation import interval_oscillations
from .verdicts import Falsified, Inconclusive, Pass, Witness, _num

STRATEGIES = ("hotspot", "extremum", "translate", "thin")
DEFAULT_DELTAS = (1e-1, 1e-2, 1e-3, 1e-4)
MIN_DELTAS = 4
MIN_SPAN = 1e3
MAX_INTERVALS = 1 << 24
KEEP_RATIO = 1e-4


def check_schedule(deltas: Sequence[float]) -> list:
    d = [float(x) for x in deltas]
    if len(d) < MIN_DELTAS:
        raise SpecError(f"delta schedule needs at least {MIN_DELTAS} entries")
    if any(x <= 0 for x in d) or any(b >= a for a, b in zip(d, d[1:])):
        raise SpecError("delta schedule must be positive and strictly decreasing")
    return d


# --------------------------------------------------------------------------
# strategies: each returns a candidate DisjointFamily or None
# --------------------------------------------------------------------------

def _region_1d(instance):
    return sp._interval_bounds(sp.canonical(instance.space, sample_region(instance.space)))


def _pack_greedy(lo, hi, w, delta):
    """Highest oscillation-per-length intervals until the length budget is spent."""
    length = hi - lo
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(length > 0, w / length, 0.0)
    order = np.argsort(-ratio, kind="stable")
    cum = np.cumsum(length[order])
    take = order[cum < delta * (1 - 1e-9)]
    take.sort()
    return lo[take], hi[take], float(w[take].sum())


class TernaryGrid:
    """Kept intervals [a + k h, a + (k+1) h] with h = (b - a) / 3**n.

    Integer numerators keep the endpoints exact up to one rounding, so
    refinement does not drift across stages.
    """

    def __init__(self, f, a, b, endpoint=False):
        self.f, self.a, self.b, self.endpoint = f, float(a), float(b), endpoint
        self.k = np.zeros(1, dtype=np.int64)
        self.n = 0
        self.w = self._weights(np.array([self.a]), np.array([self.b]))

    @property
    def lo(self):
        return self.a + (self.b - self.a) * (self.k / 3.0 ** self.n)

    @property
    def hi(self):
        return self.a + (self.b - self.a) * ((self.k + 1) / 3.0 ** self.n)

    @property
    def total_length(self) -> float:
        return len(self.k) * (self.b - self.a) / 3.0 ** self.n

    def _uses_points(self):
        f = self.f
        return self.endpoint or (f.monotone and f.continuous and f.codim == 1)

    def _weights(self, lo, hi):
        if self.endpoint:
            return _endpoint_diffs(self.f, lo, hi)
        return interval_oscillations(self.f, lo, hi)[0]

    def refine(self, chunk=1 << 20):
        """Split into thirds and keep children with a non-negligible share."""
        n1 = self.n + 1
        scale = (self.b - self.a) / 3.0 ** n1
        ks, ws = [], []
        for i in range(0, len(self.k), chunk):
            k3 = 3 * self.k[i:i + chunk]
            grid = k3[:, None] + np.arange(4)[None, :]
            x = self.a + scale * grid.astype(float)
            v = None
            if self._uses_points():
                v = self.f.ternary_values(grid, n1, self.a, self.b)
                if v is None:
                    v = np.asarray(self.f(x.reshape(-1, 1))).reshape(-1, 4)
            if v is not None:
                w = np.abs(np.diff(v, axis=1))
            else:
                w = self._weights(x[:, :3].ravel(), x[:, 1:].ravel()).reshape(-1, 3)
            keep = w > KEEP_RATIO * w.sum(axis=1, keepdims=True)
            ks.append((k3[:, None] + np.arange(3)[None, :])[keep])
            ws.append(w[keep])
        self.k = np.concatenate(ks) if ks else np.zeros(0, dtype=np.int64)
        self.w = np.concatenate(ws) if ws else np.zeros(0)
        self.n = n1


def _hotspot_1d(f, instance, delta, eps, max_intervals=MAX_INTERVALS, state=None, **_):
    """Adaptive ternary refinement towards where f oscillates.

    Children without oscillation are dropped; once the kept intervals are
    short enough they form the witness, otherwise the best ratio intervals
    are packed greedily. Gives up when refinement stops shrinking length.
    """
    if not sp._one_dimensional(instance.space):
        return None
    a, b = _region_1d(instance)
    # deltas arrive in decreasing order, so refinement resumes where it stopped
    g = state.get("grid") if state is not None else None
    if g is None:
        g = TernaryGrid(f, a, b)
        if state is not None:
            state["grid"] = g
    stalled = 0
    while True:
        total = g.total_length
        if total < delta and g.w.sum() >= eps:
            return DisjointFamily(instance, lo=g.lo, hi=g.hi, generator="hotspot")
        plo, phi, pw = _pack_greedy(g.lo, g.hi, g.w, delta)
        if len(plo) and pw >= eps:
            return DisjointFamily(instance, lo=plo, hi=phi, generator="hotspot-greedy")
        if 3 * len(g.k) > max_intervals or g.w.sum() < eps or 3.0 ** (g.n + 1) > 2.0 ** 62:
            return None
        g.refine()
        if len(g.k) == 0:
            return None
        stalled = stalled + 1 if g.total_length > 0.9 * total else 0
        if stalled >= 3:
            return None


def _extremum(f, instance, delta, eps, **_):
    """Intervals between consecutive extrema of x sin(1/x) near 0."""
    if not isinstance(f, Builtin) or f.name != "x_sin_inv_x":
        return None
    xs = f.extremum_points(delta, eps)
    if xs is None or len(xs) < 2:
        return None
    lo, hi = xs[1:], xs[:-1]
    # each interval has oscillation at least x_k + x_{k+1}; stop once eps is reached
    gain = np.cumsum(lo + hi)
    n = int(np.searchsorted(gain, eps * (1 + 1e-9))) + 1
    lo, hi = lo[:n][::-1].copy(), hi[:n][::-1].copy()
    return DisjointFamily(instance, lo=lo, hi=hi, generator="extremum")


def _translate(f, instance, delta, eps, **_):
    """One interval of length delta/2 pushed out towards infinity."""
    space = instance.space
    if not isinstance(space, sp.RealInterval):
        return None
    length = delta / 2.0
    for j in range(0, 64):
        for x in (2.0 ** j, -(2.0 ** j) - length):
            if not (space.a <= x and x + length <= space.b):
                continue
            w, _ = interval_oscillations(f, np.array([x]), np.array([x + length]))
            if w[0] >= eps:
                return DisjointFamily(instance, lo=[x], hi=[x + length], generator="translate")
    return None


def _thin(f, instance, delta, eps, n: int = 10, **_):
    """Families of measure-thin sets that are long in the metric.

    Boxes (i/n, (i+1)/n) x (-h, h) along each axis under Lebesgue on R^k,
    or arcs under planar measure on the circle.
    """
    space = instance.space
    if instance.measure_kind is not MeasureKind.LEBESGUE:
        return None
    if isinstance(space, sp.Circle):
        arcs = [sp.Arc(2 * math.pi * i / n, 2 * math.pi * (i + 1) / n * (1 - 1e-9)) for i in range(n)]
        fam = DisjointFamily(instance, arcs, generator="thin-arcs")
        return fam if fam.oscillation_sum(f).lower >= eps else None
    if not isinstance(space, sp.EuclideanBox) or space.dim < 2:
        return None
    h = delta / 4.0
    centre = np.array([0.5 * (max(lo, -5.0) + min(hi, 5.0)) for lo, hi in space.bounds])
    best = None
    for length in (1.0, 2.0, 4.0, 8.0):
        for axis in range(space.dim):
            boxes = []
            for i in range(n):
                bounds = [(c - h / length ** (1.0 / (space.dim - 1)), c + h / length ** (1.0 / (space.dim - 1)))
                          for c in centre]
                a0 = centre[axis] - length / 2 + i * length / n
                bounds[axis] = (a0, a0 + length / n * (1 - 1e-9))
                boxes.append(sp.Box(tuple(bounds)))
            fam = DisjointFamily(instance, boxes, generator="thin-boxes")
            if fam.total_measure_upper >= delta:
                continue
            total = fam.oscillation_sum(f, budget=200).lower
            if total >= eps:
                return fam
            if best is None or total > best[0]:
                best = (total, fam)
    return None


STRATEGY_FUNCS = {"hotspot": _hotspot_1d, "extremum": _extremum,
                  "translate": _translate, "thin": _thin}


# --------------------------------------------------------------------------
# witness validation and the driver
# --------------------------------------------------------------------------

def validate_witness(f: FunctionSpec, family: DisjointFamily, delta: float, eps: float,
                     seed: int = 1) -> dict:
    """Re-check a witness: disjoint, connected, measure below delta and a
    freshly sampled oscillation sum of at least eps."""
    v = family.validate()
    total = family.oscillation_sum(f, budget=2000, seed=seed)
    v.update({"total_measure_upper": family.total_measure_upper,
              "measure_ok": family.total_measure_upper < delta,
              "oscillation_sum_lower": total.lower, "oscillation_ok": total.lower >= eps})
    v["witness"] = bool(v["valid"] and v["measure_ok"] and v["oscillation_ok"])
    return v


def falsify_ac(f: FunctionSpec, instance: TmsInstance, eps: float,
               delta_schedule: Sequence[float] = DEFAULT_DELTAS,
               strategies: Sequence[str] = STRATEGIES, seed: int = 0):
    """Search a witness family for every delta of the schedule.

    Falsified only when each delta has a validated witness and the schedule
    spans at least three decades; otherwise Inconclusive with the witnesses
    found so far as partial evidence.
    """
    if not eps > 0:
        raise SpecError("eps must be positive")
    deltas = check_schedule(delta_schedule)
    for s in strategies:
        if s not in STRATEGY_FUNCS:
            raise SpecError(f"unknown strategy {s!r}; choose from {STRATEGIES}")
    witnesses, missing = [], []
    state = {}
    for delta in deltas:
        found = None
        for name in strategies:
            fam = STRATEGY_FUNCS[name](f, instance, delta, eps, state=state)
            if fam is None:
                continue
            check = validate_witness(f, fam, delta, eps, seed=seed + 1)
            if check["witness"]:
                found = Witness(delta, fam, check["oscillation_sum_lower"], name)
                break
        if found is None:
            missing.append(delta)
        else:
            witnesses.append(found)
    span = max(deltas) / min(deltas)
    if not missing and span >= MIN_SPAN:
        return Falsified(eps, witnesses)
    return Inconclusive({"reason": "no witness for some delta" if missing else "schedule too short",
                         "eps": eps, "deltas_without_witness": missing,
                         "strategies": list(strategies)}, witnesses)


# --------------------------------------------------------------------------
# constancy on null connected sets
# --------------------------------------------------------------------------

def constancy_falsifier(f: FunctionSpec, instance: TmsInstance, E, n: int = 2000,
                        tol: float = 1e-6, seed: int = 0):
    """An AC function on a C-outer regular space is constant on every null
    connected set, so a non-constant sample refutes absolute continuity."""
    m = instance.measure_upper(E)
    if m > 0:
        raise RuleNotApplicable(f"the set has measure upper bound {m:g}, not 0")
    if not instance.c_outer_regular:
        raise RuleDisabled("the instance is not declared C-outer regular")
    rng = np.random.default_rng(seed)
    pts = _null_set_points(instance.space, E, n, rng)
    vals = np.asarray(f(pts))
    if vals.ndim > 1:
        vals = np.linalg.norm(vals - vals[0], axis=1)
    i, j = int(np.argmin(vals)), int(np.argmax(vals))
    gap = float(abs(vals[j] - vals[i]))
    if gap > tol:
        return Falsified(gap, [], by_theorem={
            "rule": "constant on null connected sets", "set": sp.shape_to_dict(E),
            "points": [pts[i].tolist(), pts[j].tolist()], "difference": gap})
    return Pass("f is constant on the sampled null set")


def _null_set_points(space, E, n, rng):
    if isinstance(E, sp.Segment):
        p, q = np.asarray(E.start, dtype=float), np.asarray(E.end, dtype=float)
        t = np.concatenate([[0.1, 0.9], rng.uniform(0, 1, n)])
        return p[None, :] + t[:, None] * (q - p)[None, :]
    if isinstance(E, sp.Singleton):
        return np.asarray(E.point, dtype=float)[None, :]
    return sp.sample_points(space, E, n, rng)


# --------------------------------------------------------------------------
# endpoint-difference check on a compact interval
# --------------------------------------------------------------------------

@dataclass
class StandardACReport:
    holds: bool
    eps: float
    per_delta: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"holds": self.holds, "eps": _num(self.eps), "per_delta": self.per_delta}


def _endpoint_diffs(f, lo, hi):
    fa = np.asarray(f(lo[:, None]))
    fb = np.asarray(f(hi[:, None]))
    d = fb - fa
    return np.abs(d) if d.ndim == 1 else np.linalg.norm(d, axis=1)


def standard_ac_check(f: FunctionSpec, a: float, b: float,
                      delta_schedule: Sequence[float] = DEFAULT_DELTAS, eps: float = 0.1,
                      n_max: int = MAX_INTERVALS) -> StandardACReport:
    """Maximize the sum of |f(b_i) - f(a_i)| over disjoint subintervals of
    [a, b] with total length below delta.

    Candidates come from ternary refinement keeping intervals with nonzero
    endpoint difference, and from greedy packing of a uniform grid by
    difference per length. The property holds unless every delta of the
    schedule admits a family with sum at least eps.
    """
    deltas = check_schedule(delta_schedule)
    if not a < b:
        raise SpecError("need a < b")
    per = []
    grid = min(n_max, 1 << 20)
    x = np.linspace(a, b, grid + 1)
    glo, ghi = x[:-1], x[1:]
    gd = _endpoint_diffs(f, glo, ghi)
    g = TernaryGrid(f, a, b, endpoint=True)
    g.stuck = False
    for delta in deltas:
        best, best_fam = 0.0, None
        # uniform grid, greedy by ratio
        plo, phi, s = _pack_greedy(glo, ghi, gd, delta)
        best, best_fam = s, (plo, phi, "grid-greedy")
        # ternary refinement, resumed across the decreasing schedule
        while True:
            if g.total_length < delta:
                if g.w.sum() > best:
                    best, best_fam = float(g.w.sum()), (g.lo, g.hi, "ternary")
                break
            if 3 * len(g.k) > n_max or 3.0 ** (g.n + 1) > 2.0 ** 62 or g.stuck:
                break
            before = len(g.k)
            g.refine()
            g.stuck = len(g.k) == 3 * before  # nothing discarded: length will not shrink
        witness = best >= eps
        entry = {"delta": delta, "best_sum": best, "witness": witness,
                 "generator": best_fam[2] if best_fam else None}
        if witness:
            lo, hi, _ = best_fam
            entry["count"] = int(len(lo))
            entry["total_length"] = float((hi - lo).sum())
            entry["disjoint"] = sp.intervals_disjoint(lo, hi)
        per.append(entry)
    holds = not all(e["witness"] for e in per)
    return StandardACReport(holds, eps, per)
