"""Finite families of pairwise-disjoint open connected sets (elements of
P_delta) and random family generators for spot checks."""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .. import spaces as sp
from ..measure import MeasureKind
from ..tms import TmsInstance, sample_region
from .functions import FunctionSpec
from .oscillation import OscBracket, interval_oscillations, oscillation, oscillation_upper

ARRAY_PREVIEW = 50
MAX_LISTED_SETS = 2000


def set_measure(instance: TmsInstance, s) -> float:
    """Upper bound on the measure of one connected open set."""
    return instance.measure_upper(s)


class DisjointFamily:
    """Either a list of shapes or, on 1-D spaces, two arrays of interval
    endpoints (for families of millions of intervals)."""

    def __init__(self, instance: TmsInstance, sets: Sequence = (), lo=None, hi=None,
                 generator: str | None = None):
        self.instance = instance
        self.generator = generator
        if lo is not None:
            self.lo = np.asarray(lo, dtype=float)
            self.hi = np.asarray(hi, dtype=float)
            self.sets = None
            self._measures = self._interval_measures()
        else:
            self.lo = self.hi = None
            self.sets = [sp.canonical(instance.space, s) for s in sets]
            self._measures = np.array([set_measure(instance, s) for s in self.sets], dtype=float)

    @property
    def space(self) -> sp.Space:
        return self.instance.space

    @property
    def is_array(self) -> bool:
        return self.sets is None

    def __len__(self) -> int:
        return len(self.lo) if self.is_array else len(self.sets)

    def _interval_measures(self) -> np.ndarray:
        space = self.space
        kind = self.instance.measure_kind
        if kind is MeasureKind.COUNTING:
            return np.full(len(self.lo), math.inf)
        a, b = self.lo, self.hi
        if isinstance(space, sp.RealInterval):
            a, b = np.maximum(a, space.a), np.minimum(b, space.b)
        elif isinstance(space, sp.RectifiableCurve):
            a, b = np.maximum(a, 0.0), np.minimum(b, space.length)
        else:
            raise TypeError("array families live on 1-D spaces")
        return np.maximum(b - a, 0.0)

    @property
    def measures(self) -> np.ndarray:
        return self._measures

    @property
    def total_measure_upper(self) -> float:
        return float(self._measures.sum())

    def in_p_delta(self, delta: float) -> bool:
        return self.total_measure_upper < delta

    def iter_sets(self):
        if self.is_array:
            for a, b in zip(self.lo, self.hi):
                yield sp.Interval(float(a), float(b))
        else:
            yield from self.sets

    def validate(self) -> dict:
        """Disjointness, connectedness and non-emptiness."""
        if self.is_array:
            nonempty = bool(np.all(self.hi > self.lo))
            disjoint = sp.intervals_disjoint(self.lo, self.hi)
            connected = True
        else:
            nonempty = all(not isinstance(s, sp.Empty) for s in self.sets)
            connected = all(sp.is_connected(s) and not isinstance(s, sp.FiniteDisjointUnion)
                            for s in self.sets)
            disjoint = sp.family_disjoint(self.space, self.sets)
        return {"disjoint": bool(disjoint), "connected": bool(connected),
                "nonempty": bool(nonempty),
                "valid": bool(disjoint and connected and nonempty)}

    def oscillation_sum(self, f: FunctionSpec, budget: int = 2000, seed: int = 0,
                        per_set: bool = False):
        """Componentwise sum of the per-set oscillation brackets."""
        rng = np.random.default_rng(seed)
        if self.is_array:
            lo_arr, up_arr = _chunked_oscillations(f, self.lo, self.hi, rng)
        else:
            lo_arr = np.empty(len(self.sets))
            up_arr = np.empty(len(self.sets))
            for i, s in enumerate(self.sets):
                b = oscillation(f, s, budget, rng)
                lo_arr[i], up_arr[i] = b.lower, b.upper
        total = OscBracket(float(lo_arr.sum()), float(up_arr.sum()))
        return (total, lo_arr, up_arr) if per_set else total

    def oscillation_sum_upper(self, f: FunctionSpec) -> float:
        """Sum of analytic oscillation upper bounds (no sampling)."""
        if self.is_array:
            _, up = _chunked_oscillations(f, self.lo, self.hi, np.random.default_rng(0))
            return float(up.sum())
        return float(sum(oscillation_upper(f, s) for s in self.sets))

    def to_dict(self) -> dict:
        d = {"count": len(self), "total_measure_upper": self.total_measure_upper}
        if self.generator:
            d["generator"] = self.generator
        if self.is_array:
            n = len(self.lo)
            if n <= MAX_LISTED_SETS:
                d["intervals"] = [[float(a), float(b)] for a, b in zip(self.lo, self.hi)]
            else:
                d["intervals_preview"] = [[float(a), float(b)]
                                          for a, b in zip(self.lo[:ARRAY_PREVIEW], self.hi[:ARRAY_PREVIEW])]
        else:
            sets = self.sets if len(self.sets) <= MAX_LISTED_SETS else self.sets[:ARRAY_PREVIEW]
            d["sets"] = [sp.shape_to_dict(s) for s in sets]
        return d


def _chunked_oscillations(f, lo, hi, rng, chunk: int = 1 << 20):
    lows, ups = [], []
    for i in range(0, len(lo), chunk):
        a, b = interval_oscillations(f, lo[i:i + chunk], hi[i:i + chunk], rng=rng)
        lows.append(a)
        ups.append(b)
    if not lows:
        return np.zeros(0), np.zeros(0)
    return np.concatenate(lows), np.concatenate(ups)


# --------------------------------------------------------------------------
# random P_delta families
# --------------------------------------------------------------------------

def random_family(instance: TmsInstance, delta: float, rng: np.random.Generator,
                  region=None, n_sets: int | None = None, anchors: Sequence[float] = ()) -> DisjointFamily:
    """A random element of P_delta inside ``region``.

    Sizes are Dirichlet shares of ``delta`` (shrunk slightly so the total
    stays strictly below it). Sets sit in separate slots of the region, so
    they are pairwise disjoint by construction. On 1-D spaces some sets are
    pinned to ``anchors`` (for instance points of steep growth).
    """
    space = instance.space
    region = sp.canonical(space, region if region is not None else sample_region(space))
    if not math.isfinite(delta):
        delta = 1.0
    n = int(n_sets or rng.integers(1, 12))
    shares = rng.dirichlet(np.ones(n)) * delta * (1 - 1e-6) * float(rng.uniform(0.5, 1.0))
    if sp._one_dimensional(space):
        a, b = sp._interval_bounds(region)
        return _family_1d(instance, a, b, _measure_to_length(instance, shares), rng, anchors)
    if isinstance(space, sp.Circle):
        lengths = _measure_to_length(instance, shares)
        return _family_circle(instance, region, lengths, rng)
    if isinstance(space, sp.EuclideanBox):
        return _family_boxspace(instance, region, shares, rng)
    if isinstance(space, sp.GridFunctionSpace):
        return _family_grid(instance, shares, rng)
    raise TypeError(f"no random families on {space.space_id}")


def _measure_to_length(instance, shares):
    if instance.measure_kind is MeasureKind.LEBESGUE and isinstance(instance.space, sp.Circle):
        # planar measure of arcs is zero: any arc length is allowed
        return np.minimum(shares * 10.0, 1.0)
    if isinstance(instance.space, sp.Circle) and instance.space.metric == "chord":
        return 2.0 * np.arcsin(np.minimum(shares / 2.0, 1.0))
    return shares


def _family_1d(instance, a, b, lengths, rng, anchors):
    n = len(lengths)
    width = (b - a) / n
    lengths = np.minimum(lengths, width * 0.999)
    lo = a + width * np.arange(n) + rng.random(n) * (width - lengths)
    anchors = [x for x in anchors if a <= x <= b]
    for i, x in enumerate(anchors[: n // 2]):
        # move slot i onto the anchor when the neighbours leave room
        j = min(max(int((x - a) // width), 0), n - 1)
        start = min(max(x - lengths[j] / 2, a + width * j), a + width * (j + 1) - lengths[j])
        lo[j] = start
    return DisjointFamily(instance, lo=lo, hi=lo + lengths)


def _family_circle(instance, region, lengths, rng):
    n = len(lengths)
    slot = region.length / n
    lengths = np.minimum(lengths, slot * 0.999)
    starts = region.start + slot * np.arange(n) + rng.random(n) * (slot - lengths)
    return DisjointFamily(instance, [sp.Arc(s, s + l) for s, l in zip(starts, lengths)])


def _family_boxspace(instance, region, shares, rng):
    space = instance.space
    n = len(shares)
    dim = space.dim
    per_axis = int(math.ceil(n ** (1.0 / dim)))
    bounds = region.bounds if isinstance(region, sp.Box) else sp._bounding_box(region)
    cell = np.array([(hi - lo) / per_axis for lo, hi in bounds])
    lows = np.array([lo for lo, _ in bounds])
    sets = []
    kind = instance.measure_kind
    for i, m in enumerate(shares):
        idx = np.array(np.unravel_index(i, (per_axis,) * dim))
        if kind is MeasureKind.LEBESGUE:
            r = 0.5 * (m / math.pi) ** 0.5 if dim == 2 else 0.5 * m ** (1.0 / dim)
        else:
            r = m / 2.0
        r = min(r, 0.49 * float(cell.min()))
        c = lows + cell * idx + r + rng.random(dim) * (cell - 2 * r)
        if bool(rng.integers(2)) and space.norm == "l2":
            sets.append(sp.Ball(tuple(c), r))
        else:
            # a box of the same measure budget: shape it as a thin or fat box
            aspect = float(rng.uniform(0.1, 1.0))
            if kind is MeasureKind.LEBESGUE:
                side = (m * (1 - 1e-9)) ** (1.0 / dim)
                widths = np.full(dim, side)
                widths[0] = side / aspect
                widths[-1] = side * aspect
            else:
                widths = np.full(dim, m / math.sqrt(dim) if space.norm == "l2" else m) * (1 - 1e-9)
                widths[-1] *= aspect
            widths = np.minimum(widths, cell * 0.98)
            lo = lows + cell * idx + rng.random(dim) * (cell - widths)
            sets.append(sp.Box(tuple(zip(lo, lo + widths))))
    return DisjointFamily(instance, sets)


def _family_grid(instance, shares, rng):
    space = instance.space
    sets = []
    for i, m in enumerate(shares):
        c = np.zeros(space.m)
        c[i % space.m] = 3.0 * (i + 1)
        sets.append(sp.Ball(tuple(c + rng.standard_normal(space.m) * 0.01), m / 2.0))
    return DisjointFamily(instance, sets)
