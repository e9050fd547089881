"""Lebesgue measure of simple sets and brackets on the diameter-cover outer
measure ``nu``.

``nu(A)`` is the infimum, over countable open covers of ``A``, of the sum of
the cover diameters. Two facts make it computable for the shapes here:

* chaining: whenever the parts of a set are split into groups according to
  which cover elements chain them together, the cover's diameter sum is at
  least the sum of the group diameters. So ``min over partitions of
  sum(diam(group))`` is a lower bound for any finite union of connected parts;
* every group can be covered by one open convex set (or arc) whose diameter
  equals the group diameter in a normed space, which gives a matching upper
  bound.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import spaces as sp
from .errors import NotConnected, NotSeparated, UnsupportedMeasure, UnsupportedShape

#: parts handled by the exact subset dynamic programme
EXACT_PARTS = 12


class MeasureKind(str, enum.Enum):
    LEBESGUE = "lebesgue"
    DIAM = "diam"
    COUNTING = "counting"

    @classmethod
    def parse(cls, value) -> "MeasureKind":
        if isinstance(value, cls):
            return value
        aliases = {"lebesgue": cls.LEBESGUE, "diam": cls.DIAM, "diamouter": cls.DIAM,
                   "nu": cls.DIAM, "counting": cls.COUNTING}
        try:
            return aliases[str(value).lower()]
        except KeyError:
            raise UnsupportedMeasure(f"unknown measure kind {value!r}") from None


@dataclass(frozen=True)
class CoverProposal:
    sets: tuple
    total_diam: float

    def to_dict(self) -> dict:
        return {"sets": [sp.shape_to_dict(s) for s in self.sets], "total_diam": self.total_diam}


@dataclass(frozen=True)
class MeasureEstimate:
    lower: float
    upper: float
    method: str
    cover: CoverProposal | None = None
    notes: tuple = field(default=())

    def __post_init__(self):
        if self.lower < 0 or self.upper < 0:
            raise ValueError("measure brackets are nonnegative")
        if self.lower > self.upper:
            raise ValueError(f"lower {self.lower} exceeds upper {self.upper}")

    @property
    def width(self) -> float:
        return self.upper - self.lower

    @property
    def closed(self) -> bool:
        return self.width <= 1e-12 * max(1.0, self.upper)

    def to_dict(self) -> dict:
        d = {"lower": self.lower, "upper": self.upper, "method": self.method}
        if self.cover is not None:
            d["cover"] = self.cover.to_dict()
        return d


def _exact(value: float, method: str = "analytic") -> MeasureEstimate:
    return MeasureEstimate(float(value), float(value), method)


def pad_for_budget(budget: int) -> float:
    """Neighbourhood width used to cover non-open pieces at a given budget."""
    return 2.0 ** (-min(int(budget), 50))


# --------------------------------------------------------------------------
# Lebesgue
# --------------------------------------------------------------------------

def _merge_1d(bounds: Sequence[tuple]) -> list:
    out = []
    for a, b in sorted(bounds):
        if b <= a:
            continue
        if out and a <= out[-1][1]:
            out[-1][1] = max(out[-1][1], b)
        else:
            out.append([a, b])
    return out


def _clip_1d(space, s) -> tuple:
    a, b = sp._interval_bounds(s)
    if isinstance(space, sp.RealInterval):
        return max(a, space.a), min(b, space.b)
    if isinstance(space, sp.RectifiableCurve):
        return max(a, 0.0), min(b, space.length)
    return a, b


def lebesgue(space: sp.Space, s) -> MeasureEstimate:
    """Exact Lebesgue measure of intervals, boxes, balls and finite unions.

    On the circle and on curves the planar measure of the embedded set is
    reported, which is zero.
    """
    s = sp.canonical(space, s)
    if isinstance(space, (sp.Circle, sp.RectifiableCurve)):
        return MeasureEstimate(0.0, 0.0, "analytic", notes=("planar measure of a curve",))
    if isinstance(space, sp.RealInterval):
        parts = sp.parts_of(s)
        for p in parts:
            if not isinstance(p, (sp.Interval, sp.Singleton)):
                raise UnsupportedMeasure(f"Lebesgue measure of {type(p).__name__} on the line")
        merged = _merge_1d([_clip_1d(space, p) for p in parts])
        return _exact(sum(b - a for a, b in merged))
    if isinstance(space, sp.EuclideanBox):
        parts = sp.parts_of(s)
        if len(parts) > 1:
            for p, q in itertools.combinations(parts, 2):
                if not sp.are_disjoint(space, p, q):
                    raise UnsupportedMeasure("Lebesgue measure of overlapping unions in R^n")
        return _exact(sum(_lebesgue_part(space, p) for p in parts))
    raise UnsupportedMeasure(f"Lebesgue measure is not defined on {space.space_id}")


def _lebesgue_part(space: sp.EuclideanBox, p) -> float:
    n = space.dim
    if isinstance(p, (sp.Singleton, sp.Empty)):
        return 0.0
    if isinstance(p, sp.Segment):
        return 0.0 if n > 1 else sp.diam_upper(space, p)
    if isinstance(p, sp.Box):
        return float(np.prod([hi - lo for lo, hi in p.bounds]))
    if isinstance(p, sp.Ball):
        return math.pi ** (n / 2) / math.gamma(n / 2 + 1) * p.radius ** n
    if isinstance(p, sp.Hull) and len(p.parts) == 1 and n == 2 and space.norm == "l2" \
            and isinstance(p.parts[0], (sp.Segment, sp.Singleton)):
        # stadium: rectangle of width 2*pad along the segment plus two half discs
        length = sp.diam_upper(space, p.parts[0])
        return 2.0 * p.pad * length + math.pi * p.pad ** 2
    raise UnsupportedMeasure(f"Lebesgue measure of {type(p).__name__}")


# --------------------------------------------------------------------------
# group costs and partitions
# --------------------------------------------------------------------------

def _is_open_part(p) -> bool:
    return not isinstance(p, (sp.Segment, sp.Singleton))


class _Groups:
    """Lower and upper cover costs of every subset of a list of parts."""

    def __init__(self, space, parts, pad):
        self.space = space
        self.parts = list(parts)
        self.pad = pad
        self._lo = {}
        self._hi = {}

    def members(self, mask: int) -> list:
        return [p for i, p in enumerate(self.parts) if mask >> i & 1]

    def lower(self, mask: int) -> float:
        if mask not in self._lo:
            self._lo[mask] = sp.union_diameter(self.space, self.members(mask))
        return self._lo[mask]

    def cover(self, mask: int):
        """Single open set covering the group and its diameter."""
        group = self.members(mask)
        needs_pad = any(not _is_open_part(p) for p in group)
        pad = self.pad if needs_pad else 0.0
        if len(group) == 1 and not needs_pad:
            p = group[0]
            return p, sp.diam_upper(self.space, p)
        if isinstance(self.space, sp.Circle):
            arc = sp.covering_arc(group)
            if arc is None:
                return None, math.inf
            h = sp.canonical(self.space, sp.Hull(tuple(group), pad))
            return h, sp.diam_upper(self.space, h)
        h = sp.Hull(tuple(group), pad)
        if sp._one_dimensional(self.space):
            h = sp.canonical(self.space, h)
            return h, sp.diam_upper(self.space, h)
        return h, sp.union_diameter(self.space, group) + 2.0 * pad

    def upper(self, mask: int) -> float:
        if mask not in self._hi:
            self._hi[mask] = self.cover(mask)[1]
        return self._hi[mask]


def _min_partition(k: int, cost) -> tuple[float, list]:
    """Exact minimum of sum(cost(group)) over set partitions of range(k)."""
    full = (1 << k) - 1
    best = [0.0] + [math.inf] * full
    choice = [0] * (full + 1)
    for S in range(1, full + 1):
        low = S & -S
        rest = S ^ low
        T = rest
        while True:
            grp = T | low
            v = cost(grp) + best[S ^ grp]
            if v < best[S]:
                best[S], choice[S] = v, grp
            if T == 0:
                break
            T = (T - 1) & rest
    groups, S = [], full
    while S:
        groups.append(choice[S])
        S ^= choice[S]
    return best[full], groups


def _greedy_partition(k: int, cost, max_steps: int) -> tuple[float, list]:
    groups = [1 << i for i in range(k)]
    total = sum(cost(g) for g in groups)
    for _ in range(max_steps):
        best_gain, best_pair = 0.0, None
        for i, j in itertools.combinations(range(len(groups)), 2):
            gain = cost(groups[i]) + cost(groups[j]) - cost(groups[i] | groups[j])
            if gain > best_gain + 1e-15:
                best_gain, best_pair = gain, (i, j)
        if best_pair is None:
            break
        i, j = best_pair
        merged = groups[i] | groups[j]
        groups = [g for t, g in enumerate(groups) if t not in (i, j)] + [merged]
        total -= best_gain
    return total, groups


# --------------------------------------------------------------------------
# nu
# --------------------------------------------------------------------------

def _prepared_parts(space, s) -> list:
    s = sp.canonical(space, s)
    parts = []
    for p in sp.parts_of(s):
        if sp._one_dimensional(space) and isinstance(p, sp.Interval):
            a, b = _clip_1d(space, p)
            if b <= a:
                continue
            p = sp.Interval(a, b)
        parts.append(p)
    return parts


def cover_is_valid(space, cover_sets, s, n: int = 400, seed: int = 0) -> bool:
    """Sampled check that ``cover_sets`` covers ``s``."""
    rng = np.random.default_rng(seed)
    parts = _prepared_parts(space, s)
    if not parts:
        return True
    pts = sp.sample_points(space, sp.union(*parts), n, rng)
    hit = np.zeros(len(pts), dtype=bool)
    for c in cover_sets:
        hit |= sp.contains(space, c, pts)
    return bool(hit.all())


def nu_upper(space: sp.Space, s, budget: int = 100, extra_covers: Sequence = ()) -> MeasureEstimate:
    """Upper bound on ``nu(s)`` with the witnessing cover.

    Candidate covers are one open set per group of a partition of the parts;
    covers passed in ``extra_covers`` (lists of open sets) are also
    considered after a sampled coverage check.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    parts = _prepared_parts(space, s)
    if not parts:
        return MeasureEstimate(0.0, 0.0, "analytic", CoverProposal((), 0.0))
    groups = _Groups(space, parts, pad_for_budget(budget))
    k = len(parts)
    if k <= EXACT_PARTS:
        total, masks = _min_partition(k, groups.upper)
    else:
        total, masks = _greedy_partition(k, groups.upper, max_steps=min(budget, 4 * k))
    sets = tuple(groups.cover(m)[0] for m in masks)
    best = CoverProposal(sets, float(total))
    for extra in extra_covers:
        extra = tuple(extra)
        t = float(sum(sp.diam_upper(space, c) for c in extra))
        if t < best.total_diam and cover_is_valid(space, extra, s):
            best = CoverProposal(extra, t)
    return MeasureEstimate(0.0, best.total_diam, "cover_search", best)


def nu_lower(space: sp.Space, s) -> float:
    """Chaining lower bound for a finite union of connected parts."""
    parts = _prepared_parts(space, s)
    if not parts:
        return 0.0
    if len(parts) > EXACT_PARTS:
        # nu is monotone, so any sub-union bounds it from below
        parts = sorted(parts, key=lambda p: -sp.diam_upper(space, p))[:EXACT_PARTS]
    groups = _Groups(space, parts, 0.0)
    return float(_min_partition(len(parts), groups.lower)[0])


def nu_lower_connected(space: sp.Space, s) -> MeasureEstimate:
    """``nu(E) >= diam(E)`` for connected ``E``; returns the bracket [diam, inf]."""
    s = sp.canonical(space, s)
    if not sp.is_connected(s):
        raise NotConnected("the chaining bound needs a connected set")
    parts = _prepared_parts(space, s)
    d = sp.diam_upper(space, parts[0]) if parts else 0.0
    return MeasureEstimate(float(d), math.inf, "chaining")


def nu_estimate(space: sp.Space, s, budget: int = 100, extra_covers: Sequence = ()) -> MeasureEstimate:
    up = nu_upper(space, s, budget, extra_covers)
    lo = min(nu_lower(space, s), up.upper)
    method = "analytic" if lo == up.upper else "cover_search"
    return MeasureEstimate(lo, up.upper, method, up.cover)


# --------------------------------------------------------------------------
# dispatch
# --------------------------------------------------------------------------

def counting(space: sp.Space, s) -> MeasureEstimate:
    parts = sp.parts_of(sp.canonical(space, s))
    if all(isinstance(p, sp.Singleton) for p in parts):
        n = len({p.point for p in parts})
        return _exact(n, "analytic")
    return MeasureEstimate(math.inf, math.inf, "analytic", notes=("infinite set",))


def measure_of(space: sp.Space, kind, s, budget: int = 100) -> MeasureEstimate:
    kind = MeasureKind.parse(kind)
    if budget < 1:
        raise ValueError("budget must be at least 1")
    if kind is MeasureKind.LEBESGUE:
        return lebesgue(space, s)
    if kind is MeasureKind.COUNTING:
        return counting(space, s)
    return nu_estimate(space, s, budget)


# --------------------------------------------------------------------------
# probes
# --------------------------------------------------------------------------

@dataclass
class AdditivityReport:
    additive: bool
    distance: float
    nu_a: MeasureEstimate
    nu_b: MeasureEstimate
    nu_union: MeasureEstimate
    superadditive: bool
    subadditive: bool

    def to_dict(self) -> dict:
        return {"additive": self.additive, "distance": self.distance,
                "superadditive": self.superadditive, "subadditive": self.subadditive,
                "nu_a": self.nu_a.to_dict(), "nu_b": self.nu_b.to_dict(),
                "nu_union": self.nu_union.to_dict()}


def separated_additivity_check(space: sp.Space, A, B, budget: int = 100,
                               tol: float = 1e-6) -> AdditivityReport:
    """Compare ``nu(A u B)`` with ``nu(A) + nu(B)`` for sets at positive distance.

    ``superadditive`` is decided soundly: it is False only when the union's
    upper bound lies below the sum of the lower bounds by more than ``tol``.
    """
    d = sp.inf_distance(space, A, B)
    if not d > 0:
        raise NotSeparated("A and B are at distance zero")
    ea = nu_estimate(space, A, budget)
    eb = nu_estimate(space, B, budget)
    eu = nu_estimate(space, sp.union(A, B), budget, extra_covers=[
        (ea.cover.sets + eb.cover.sets)])
    superadd = eu.upper >= ea.lower + eb.lower - tol
    subadd = eu.upper <= ea.upper + eb.upper + tol
    closed = (eu.width <= tol and ea.width <= tol and eb.width <= tol)
    additive = superadd and subadd and closed and \
        abs(eu.lower - ea.lower - eb.lower) <= tol
    return AdditivityReport(bool(additive), float(d), ea, eb, eu, bool(superadd), bool(subadd))


def split(space: sp.Space, D, A) -> tuple[list, list]:
    """Pieces of ``D n A`` and ``D \\ A`` up to boundary pieces.

    Boundary pieces are points on 1-D spaces and on the circle, which are
    ``nu``-null; for boxes they are faces, which are accounted for by the
    caller.
    """
    D = sp.canonical(space, D)
    A = sp.canonical(space, A)
    if isinstance(A, sp.Empty):
        return [], [D]
    if isinstance(D, sp.Interval) and isinstance(A, sp.Interval):
        inter = (max(D.a, A.a), min(D.b, A.b))
        ins = [sp.Interval(*inter)] if inter[0] < inter[1] else []
        outs = []
        if D.a < min(A.a, D.b):
            outs.append(sp.Interval(D.a, min(A.a, D.b)))
        if max(A.b, D.a) < D.b:
            outs.append(sp.Interval(max(A.b, D.a), D.b))
        return ins, outs
    if isinstance(D, sp.Arc) and isinstance(A, sp.Arc):
        return _split_arcs(D, A)
    if isinstance(D, sp.Box) and isinstance(A, sp.Box):
        return _split_boxes(D, A)
    raise UnsupportedShape(f"cannot split {type(D).__name__} by {type(A).__name__}")


def _split_arcs(D: sp.Arc, A: sp.Arc):
    # work in D's frame: D = (0, LD), A's complement is (end_A, start_A + 2pi)
    LD = D.length
    a0 = (A.start - D.start) % sp.TWO_PI
    ins, outs = [], []
    for shift in (-sp.TWO_PI, 0.0, sp.TWO_PI):
        lo, hi = max(0.0, a0 + shift), min(LD, a0 + shift + A.length)
        if lo < hi:
            ins.append((lo, hi))
    ins = _merge_1d(ins)
    cur = 0.0
    for lo, hi in ins:
        if lo > cur:
            outs.append((cur, lo))
        cur = max(cur, hi)
    if cur < LD:
        outs.append((cur, LD))
    mk = lambda lo, hi: sp.Arc(D.start + lo, D.start + hi)
    return [mk(*x) for x in ins], [mk(*x) for x in outs]


def _split_boxes(D: sp.Box, A: sp.Box):
    inter = tuple((max(l1, l2), min(h1, h2)) for (l1, h1), (l2, h2) in zip(D.bounds, A.bounds))
    if any(lo >= hi for lo, hi in inter):
        return [], [D]
    outs = []
    rest = list(D.bounds)
    for axis, (lo, hi) in enumerate(inter):
        dlo, dhi = rest[axis]
        if dlo < lo:
            b = list(rest)
            b[axis] = (dlo, lo)
            outs.append(sp.Box(tuple(b)))
        if hi < dhi:
            b = list(rest)
            b[axis] = (hi, dhi)
            outs.append(sp.Box(tuple(b)))
        rest[axis] = (lo, hi)
    return [sp.Box(inter)], outs


@dataclass
class ProbeResult:
    probe: object
    nu_d: MeasureEstimate
    nu_in: MeasureEstimate
    nu_out: MeasureEstimate
    verdict: str  # "pass", "fail" or "inconclusive"

    def to_dict(self) -> dict:
        return {"probe": sp.shape_to_dict(self.probe), "verdict": self.verdict,
                "nu_d": self.nu_d.to_dict(), "nu_in": self.nu_in.to_dict(),
                "nu_out": self.nu_out.to_dict()}


@dataclass
class CaratheodoryReport:
    results: list

    @property
    def verdict(self) -> str:
        v = [r.verdict for r in self.results]
        if "fail" in v:
            return "fail"
        if "inconclusive" in v:
            return "inconclusive"
        return "pass"

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "probes": [r.to_dict() for r in self.results]}


def caratheodory_probe(space: sp.Space, A, probes: Sequence, budget: int = 100,
                       tol: float = 1e-6) -> CaratheodoryReport:
    """Test ``nu(D) = nu(D n A) + nu(D \\ A)`` for each probe ``D``.

    ``A=None`` stands for the whole space. A probe fails only when the
    brackets are disjoint by more than ``tol``.
    """
    if not probes:
        raise ValueError("at least one probe set is required")
    results = []
    face_pad = 0.0
    for D in probes:
        if A is None:
            ins, outs = [sp.canonical(space, D)], []
        else:
            ins, outs = split(space, D, A)
        if isinstance(space, sp.EuclideanBox) and space.dim > 1:
            # faces of D \ A along the boundary of A are not nu-null in R^n
            face_pad = pad_for_budget(budget)
        nd = nu_estimate(space, D, budget)
        ni = nu_estimate(space, sp.union(*ins), budget)
        no_ = nu_estimate(space, sp.union(*outs), budget)
        if face_pad and outs:
            no_ = MeasureEstimate(no_.lower, no_.upper + 2 * face_pad * len(outs), no_.method, no_.cover)
        s_lo, s_hi = ni.lower + no_.lower, ni.upper + no_.upper
        if s_lo > nd.upper + tol or nd.lower > s_hi + tol:
            verdict = "fail"
        elif max(s_hi, nd.upper) - min(s_lo, nd.lower) <= tol:
            verdict = "pass"
        else:
            verdict = "inconclusive"
        results.append(ProbeResult(D, nd, ni, no_, verdict))
    return CaratheodoryReport(results)
