"""Sampled checks of the topological-measure-space axioms.

A triple (space, sigma-algebra, measure) is a tms when

(i)   the sigma-algebra contains every open set,
(ii)  each point has open connected neighbourhoods of arbitrarily small
      measure, and
(iii) for each open G and x in G there is an eps such that every open
      connected U containing x with m(U) < eps lies inside G.

Axiom (i) is taken from the declared sigma-algebra of the measure kind.
Axioms (ii) and (iii) are searched at finite resolution, so a pass means "no
violation found" while a failure always carries a concrete witness.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import spaces as sp
from .errors import InvalidSpace, UnsupportedMeasure, UnsupportedShape
from .measure import MeasureKind, measure_of, pad_for_budget

RADIUS_STEPS = 20
EPS_STEPS = 20


@dataclass(frozen=True)
class TmsInstance:
    space: sp.Space
    measure_kind: MeasureKind
    c_outer_regular: bool | None = None

    def __post_init__(self):
        kind = MeasureKind.parse(self.measure_kind)
        object.__setattr__(self, "measure_kind", kind)
        if kind is MeasureKind.LEBESGUE and isinstance(self.space, sp.GridFunctionSpace):
            raise UnsupportedMeasure("Lebesgue measure is not available on grid function spaces")
        default = kind is MeasureKind.LEBESGUE and isinstance(
            self.space, (sp.RealInterval, sp.EuclideanBox))
        if self.c_outer_regular is None:
            object.__setattr__(self, "c_outer_regular", default)
        elif self.c_outer_regular and not (default or kind is MeasureKind.DIAM):
            raise UnsupportedMeasure(
                "C-outer regularity may only be declared for Lebesgue on R^n or for nu")

    @property
    def label(self) -> str:
        return f"{self.space.space_id}/{self.measure_kind.value}"

    def measure_upper(self, s, budget: int = 60) -> float:
        s = sp.clip_to_space(self.space, s)
        kind = self.measure_kind
        if kind is MeasureKind.DIAM and isinstance(s, (sp.Interval, sp.Arc, sp.Ball, sp.Box)):
            return sp.diam_upper(self.space, s)
        if kind is MeasureKind.COUNTING and not isinstance(s, (sp.Singleton, sp.Empty)):
            return math.inf
        return measure_of(self.space, kind, s, budget).upper

    def to_dict(self) -> dict:
        return {"space": self.space.to_dict(), "measure": self.measure_kind.value,
                "c_outer_regular": bool(self.c_outer_regular)}


@dataclass
class AxiomFragment:
    passed: bool
    witnesses: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"passed": self.passed, "witnesses": self.witnesses, "failures": self.failures}


@dataclass
class AxiomReport:
    axiom_i: AxiomFragment
    axiom_ii: AxiomFragment
    axiom_iii: AxiomFragment
    notes: list = field(default_factory=list)

    @property
    def failed_axioms(self) -> list:
        return [k for k, frag in ((1, self.axiom_i), (2, self.axiom_ii), (3, self.axiom_iii))
                if not frag.passed]

    @property
    def passed(self) -> bool:
        return not self.failed_axioms

    def to_dict(self) -> dict:
        return {"passed": self.passed, "failed_axioms": self.failed_axioms,
                "axiom_i": self.axiom_i.to_dict(), "axiom_ii": self.axiom_ii.to_dict(),
                "axiom_iii": self.axiom_iii.to_dict(), "notes": list(self.notes)}


def _pt(space, x) -> np.ndarray:
    return space.normalize(space.as_points(x))[0]


def _plain(x) -> list:
    return [float(v) for v in np.atleast_1d(x)]


# --------------------------------------------------------------------------
# axiom (i)
# --------------------------------------------------------------------------

def check_axiom_i(instance: TmsInstance) -> AxiomFragment:
    """Declared: Lebesgue and counting sigma-algebras contain every open set;
    for nu the Caratheodory sigma-algebra is taken to contain the opens."""
    note = {
        MeasureKind.LEBESGUE: "Lebesgue sets contain the Borel sets",
        MeasureKind.COUNTING: "the power set contains every open set",
        MeasureKind.DIAM: "declared; see caratheodory_probe for spot checks",
    }[instance.measure_kind]
    return AxiomFragment(True, [{"sigma_algebra": note}], [])


# --------------------------------------------------------------------------
# axiom (ii)
# --------------------------------------------------------------------------

def neighbourhood(space: sp.Space, x: np.ndarray, r: float):
    """Open connected neighbourhood of ``x`` of radius ``r`` in native form."""
    if sp._one_dimensional(space):
        return sp.clip_to_space(space, sp.Interval(x[0] - r, x[0] + r))
    if isinstance(space, sp.Circle):
        return sp.canonical(space, sp.Ball((x[0],), r))
    return sp.canonical(space, sp.Ball(tuple(x), r))


def check_axiom_ii(instance: TmsInstance, sample_points: Iterable, eps_grid: Sequence[float],
                   budget: int = 60) -> AxiomFragment:
    """Look for a neighbourhood of measure below eps around every point,
    shrinking the radius from eps/3 by halves."""
    if any(not e > 0 for e in eps_grid):
        raise ValueError("eps values must be positive")
    space = instance.space
    frag = AxiomFragment(True)
    for x in sample_points:
        x = _pt(space, x)
        for eps in eps_grid:
            found = None
            best = math.inf
            for k in range(RADIUS_STEPS + 1):
                r = eps / 3.0 * 2.0 ** (-k)
                U = neighbourhood(space, x, r)
                if not bool(sp.contains(space, U, x[None, :])[0]):
                    continue
                m = instance.measure_upper(U, budget)
                best = min(best, m)
                if m < eps:
                    found = (U, m)
                    break
            if found is None:
                frag.passed = False
                frag.failures.append({
                    "point": _plain(x), "eps": eps, "smallest_measure": best,
                    "detail": f"every neighbourhood down to radius {eps / 3 * 2 ** -RADIUS_STEPS:.3g}"
                              f" has measure >= {best:g}"})
            else:
                frag.witnesses.append({"point": _plain(x), "eps": eps,
                                       "set": sp.shape_to_dict(found[0]), "measure_upper": found[1]})
    return frag


# --------------------------------------------------------------------------
# axiom (iii)
# --------------------------------------------------------------------------

OFFSETS = (0.0, 0.5, 0.999)
PARAM_RANGE = (1e-12, 1e4)


def _largest_below(instance, make, eps, budget, hi=PARAM_RANGE[1]):
    """Largest shape parameter (found by bisection in log scale) whose shape
    has measure below eps; measures are monotone in the parameter."""
    lo = PARAM_RANGE[0]

    def measured(t):
        U = make(t)
        return U, (math.inf if U is None else instance.measure_upper(U, budget))

    U, m = measured(hi)
    if m < eps:
        return U, m
    U, m = measured(lo)
    if not m < eps:
        return None
    best = (U, m)
    a, b = math.log(lo), math.log(hi)
    for _ in range(48):
        mid = 0.5 * (a + b)
        U, m = measured(math.exp(mid))
        if m < eps:
            a, best = mid, (U, m)
        else:
            b = mid
    return best


@functools.lru_cache(maxsize=4096)
def _basic_size(instance: TmsInstance, eps: float, budget: int):
    """Largest size of a basic neighbourhood with measure below eps.

    Computed at the centre of the sampling region, where clipping to a
    bounded space removes the least, so the size is safe at every point.
    """
    space = instance.space
    region = sample_region(space)
    if sp._one_dimensional(space):
        c = 0.5 * (region.a + region.b)
        got = _largest_below(instance, lambda w: sp.Interval(c - w / 2, c + w / 2), eps, budget)
        return None if got is None else (got[0].b - got[0].a, got[1])
    if isinstance(space, sp.Circle):
        got = _largest_below(instance, lambda w: sp.Arc(-w / 2, w / 2), eps, budget,
                             hi=sp.TWO_PI * (1 - 1e-9))
        return None if got is None else (got[0].length, got[1])
    c = tuple(np.zeros(space.dim)) if isinstance(space, sp.GridFunctionSpace) else \
        tuple(0.5 * (lo + hi) for lo, hi in region.bounds)
    got = _largest_below(instance, lambda r: sp.canonical(space, sp.Ball(c, r)), eps, budget)
    if got is None:
        return None
    U0 = got[0]
    r = U0.radius if isinstance(U0, sp.Ball) else (U0.bounds[0][1] - U0.bounds[0][0]) / 2
    return r, got[1]


def candidate_neighbourhoods(instance: TmsInstance, x: np.ndarray, eps: float,
                             extended: bool = False, budget: int = 60) -> list:
    """Connected opens through ``x`` with measure below eps, as large as the
    measure allows, at several offsets of ``x`` inside the shape.

    The default family is the basic opens (intervals, arcs, balls).
    ``extended`` adds thin boxes on box spaces.
    """
    space = instance.space
    out = []
    size = _basic_size(instance, float(eps), int(budget))
    if sp._one_dimensional(space):
        if size:
            w, m = size
            for t in OFFSETS + (-0.5, -0.999):
                c = x[0] + t * w / 2
                out.append((sp.clip_to_space(space, sp.Interval(c - w / 2, c + w / 2)), m))
    elif isinstance(space, sp.Circle):
        if size:
            w, m = size
            for t in OFFSETS + (-0.5, -0.999):
                c = x[0] + t * w / 2
                out.append((sp.Arc(c - w / 2, c + w / 2), m))
    elif isinstance(space, (sp.EuclideanBox, sp.GridFunctionSpace)):
        n = space.dim
        if size:
            r, m = size
            dirs = [np.eye(n)[i] * s for i in range(min(n, 4)) for s in (1, -1)]
            if n >= 2:
                dirs += [np.ones(n) / math.sqrt(n), -np.ones(n) / math.sqrt(n)]
            for u in dirs:
                u = u / float(sp._space_norm(space, u[None, :])[0])
                for t in OFFSETS:
                    out.append((sp.canonical(space, sp.Ball(tuple(x + t * r * u), r)), m))
        if extended and isinstance(space, sp.EuclideanBox) and n >= 2:
            for axis in range(n):
                for length in (1.0, 10.0, 100.0):
                    def make(w, axis=axis, length=length):
                        b = [(xi - w / 2, xi + w / 2) for xi in x]
                        b[axis] = (x[axis] - length / 2, x[axis] + length / 2)
                        return sp.Box(tuple(b))
                    got = _largest_below(instance, make, eps, budget, hi=length)
                    if got:
                        out.append(got)
    else:
        raise UnsupportedShape(f"no candidate family for {space.space_id}")
    return out


def _escape_point(space, U, G, rng):
    pts = sp.sample_points(space, U, 256, rng)
    pts = pts[sp.contains(space, U, pts)]
    outside = ~sp.contains(space, G, pts)
    if outside.any():
        return pts[np.flatnonzero(outside)[0]]
    return None


def _inside(space, U, G) -> bool:
    U = sp.clip_to_space(space, U)
    G = sp.clip_to_space(space, G)
    try:
        return sp.is_subset(space, U, G)
    except UnsupportedShape:
        return False


def check_axiom_iii(instance: TmsInstance, open_sets: Sequence, sample_points: Iterable,
                    candidate_scales: Sequence[float] = (1.0,), extended: bool = False,
                    budget: int = 60, seed: int = 0) -> AxiomFragment:
    """For each open G and sample point x in G, search eps = scale * 2**-k
    such that every candidate neighbourhood of x with measure below eps lies
    in G."""
    space = instance.space
    rng = np.random.default_rng(seed)
    frag = AxiomFragment(True)
    pts = [_pt(space, x) for x in sample_points]
    for G in open_sets:
        G = sp.canonical(space, G)
        for x in pts:
            if not bool(sp.contains(space, G, x[None, :])[0]):
                continue
            found_eps = None
            violation = None
            for scale in candidate_scales:
                for k in range(EPS_STEPS + 1):
                    eps = scale * 2.0 ** (-k)
                    bad = None
                    for U, m in candidate_neighbourhoods(instance, x, eps, extended, budget):
                        if not _inside(space, U, G):
                            y = _escape_point(space, U, G, rng)
                            if y is not None:
                                bad = (U, m, y)
                                break
                    if bad is None:
                        found_eps = eps
                        break
                    violation = (eps,) + bad
                if found_eps is not None:
                    break
            if found_eps is not None:
                frag.witnesses.append({"point": _plain(x), "G": sp.shape_to_dict(G), "eps": found_eps})
            else:
                frag.passed = False
                eps, U, m, y = violation
                frag.failures.append({
                    "point": _plain(x), "G": sp.shape_to_dict(G), "eps": eps,
                    "U": sp.shape_to_dict(U), "measure_upper": m,
                    "escape_point": _plain(y)})
    return frag


# --------------------------------------------------------------------------
# whole-instance check
# --------------------------------------------------------------------------

def sample_region(space: sp.Space):
    """Bounded region where sample points are drawn."""
    if isinstance(space, sp.RealInterval):
        a = space.a if math.isfinite(space.a) else -5.0
        b = space.b if math.isfinite(space.b) else 5.0
        if not math.isfinite(space.a) and math.isfinite(space.b):
            a = space.b - 10.0
        if math.isfinite(space.a) and not math.isfinite(space.b):
            b = space.a + 10.0
        return sp.Interval(a, b)
    if isinstance(space, sp.RectifiableCurve):
        return sp.Interval(0.0, space.length)
    if isinstance(space, sp.Circle):
        return sp.Arc(0.0, sp.TWO_PI)
    if isinstance(space, sp.EuclideanBox):
        return sp.Box(tuple((lo if math.isfinite(lo) else -5.0, hi if math.isfinite(hi) else 5.0)
                            for lo, hi in space.bounds))
    if isinstance(space, sp.GridFunctionSpace):
        return sp.Ball(tuple(np.zeros(space.m)), 5.0)
    raise InvalidSpace(f"no sampling region for {space.space_id}")


def sample_space_points(space: sp.Space, n: int, rng: np.random.Generator) -> np.ndarray:
    pts = sp.sample_points(space, sample_region(space), n, rng, include_edges=False)
    pts = pts[space.in_space(pts)]
    return space.normalize(pts[:n])


def local_open_set(space: sp.Space, x: np.ndarray, rng: np.random.Generator):
    """A random open connected G around x."""
    r = float(rng.uniform(0.05, 0.5))
    if sp._one_dimensional(space):
        off = float(rng.uniform(-0.9, 0.9)) * r
        return sp.clip_to_space(space, sp.Interval(x[0] + off - r, x[0] + off + r))
    if isinstance(space, sp.Circle):
        off = float(rng.uniform(-0.9, 0.9)) * r
        return sp.Arc(x[0] + off - r, x[0] + off + r)
    u = rng.standard_normal(space.dim)
    u /= float(sp._space_norm(space, u[None, :])[0])
    c = x + float(rng.uniform(0, 0.9)) * r * u
    return sp.canonical(space, sp.Ball(tuple(c), r))


def check_instance(instance: TmsInstance, n_samples: int = 200, seed: int = 0,
                   eps_grid: Sequence[float] = (1.0, 0.1, 0.01), extended: bool = False,
                   budget: int = 60) -> AxiomReport:
    rng = np.random.default_rng(seed)
    space = instance.space
    pts = sample_space_points(space, n_samples, rng)
    a1 = check_axiom_i(instance)
    a2 = check_axiom_ii(instance, pts, eps_grid, budget)
    a3 = AxiomFragment(True)
    for x in pts:
        G = local_open_set(space, x, rng)
        # dyadic scales keep the eps ladder shared between points
        scale = 2.0 ** math.floor(math.log2(max(sp.diam_upper(space, G), 1e-3)))
        frag = check_axiom_iii(instance, [G], [x], [scale], extended, budget,
                               seed=int(rng.integers(2 ** 31)))
        a3.passed &= frag.passed
        a3.witnesses += frag.witnesses
        a3.failures += frag.failures
    notes = [f"{len(pts)} sample points, eps grid {list(eps_grid)}",
             "checks are sampled: a pass means no violation was found at this resolution"]
    if extended:
        notes.append("axiom (iii) candidates include thin boxes")
    return AxiomReport(a1, a2, a3, notes)


# --------------------------------------------------------------------------
# induced pseudometric
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PseudometricBracket:
    lower: float
    upper: float
    witness: object = None

    def contains(self, value: float, tol: float = 0.0) -> bool:
        return self.lower - tol <= value <= self.upper + tol

    def to_dict(self) -> dict:
        d = {"lower": self.lower, "upper": self.upper}
        if self.witness is not None:
            d["witness"] = sp.shape_to_dict(self.witness)
        return d


def _joining_set(space, p, q, eta):
    if sp._one_dimensional(space):
        return sp.clip_to_space(space, sp.Interval(min(p[0], q[0]) - eta, max(p[0], q[0]) + eta))
    if isinstance(space, sp.Circle):
        d = (q[0] - p[0]) % sp.TWO_PI
        if d <= math.pi:
            a, length = p[0], d
        else:
            a, length = q[0], sp.TWO_PI - d
        return sp.Arc(a - eta, a + length + eta)
    if np.allclose(p, q):
        return sp.canonical(space, sp.Ball(tuple(p), eta))
    return sp.Hull((sp.Segment(tuple(p), tuple(q)),), eta)


def induced_pseudometric(instance: TmsInstance, p, q, budget: int = 30) -> PseudometricBracket:
    """Bracket on inf{m(U) : U open connected, p, q in U}."""
    space = instance.space
    P, Q = _pt(space, p), _pt(space, q)
    eta = pad_for_budget(budget)
    kind = instance.measure_kind
    if kind is MeasureKind.COUNTING:
        return PseudometricBracket(0.0, math.inf)
    candidates = [_joining_set(space, P, Q, eta)]
    best, witness = math.inf, None
    for U in candidates:
        if U is None:
            continue
        try:
            m = measure_of(space, kind, U, budget).upper
        except (UnsupportedMeasure, UnsupportedShape):
            continue
        if m < best:
            best, witness = m, U
    d = float(space.dist(P[None], Q[None])[0])
    if kind is MeasureKind.DIAM:
        lower = d
    elif kind is MeasureKind.LEBESGUE and isinstance(space, sp.RealInterval):
        lower = d  # connected sets of the line are intervals
    else:
        lower = 0.0
    return PseudometricBracket(lower, max(best, lower), witness)


@dataclass
class PseudometricCheck:
    verdict: str
    checked: int
    failures: list
    inconclusive: int

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "checked": self.checked,
                "failures": self.failures, "inconclusive": self.inconclusive}


def pseudometric_axiom_check(instance: TmsInstance, sample_triples: Iterable, tol: float = 1e-6,
                             budget: int = 30) -> PseudometricCheck:
    """Nonnegativity, symmetry and the triangle inequality on samples.

    The triangle inequality is certified when upper(x, y) <= lower(x, z) +
    lower(z, y) + tol and refuted when lower(x, y) > upper(x, z) + upper(z, y)
    + tol; anything in between is counted as inconclusive.
    """
    fails, inconclusive, n = [], 0, 0
    for x, y, z in sample_triples:
        n += 1
        dxy = induced_pseudometric(instance, x, y, budget)
        dyx = induced_pseudometric(instance, y, x, budget)
        dxz = induced_pseudometric(instance, x, z, budget)
        dzy = induced_pseudometric(instance, z, y, budget)
        rec = {"triple": [_plain(x), _plain(y), _plain(z)]}
        if min(dxy.lower, dxy.upper) < 0:
            fails.append(dict(rec, rule="nonnegativity"))
            continue
        if abs(dxy.upper - dyx.upper) > tol or abs(dxy.lower - dyx.lower) > tol:
            fails.append(dict(rec, rule="symmetry"))
            continue
        if dxy.lower > dxz.upper + dzy.upper + tol:
            fails.append(dict(rec, rule="triangle"))
        elif dxy.upper > dxz.lower + dzy.lower + tol:
            inconclusive += 1
    verdict = "fail" if fails else ("inconclusive" if inconclusive else "pass")
    return PseudometricCheck(verdict, n, fails, inconclusive)


# --------------------------------------------------------------------------
# restriction
# --------------------------------------------------------------------------

def restrict(instance: TmsInstance, region) -> TmsInstance:
    """The open sub-instance on an interval or box region."""
    space = instance.space
    region = sp.canonical(space, region)
    if isinstance(space, sp.RealInterval) and isinstance(region, sp.Interval):
        a, b = max(region.a, space.a), min(region.b, space.b)
        return TmsInstance(sp.RealInterval(a, b), instance.measure_kind, instance.c_outer_regular)
    if isinstance(space, sp.EuclideanBox) and isinstance(region, sp.Box):
        bounds = tuple((max(l, L), min(h, H)) for (l, h), (L, H) in zip(region.bounds, space.bounds))
        return TmsInstance(sp.EuclideanBox(bounds, space.norm), instance.measure_kind,
                           instance.c_outer_regular)
    raise UnsupportedShape(f"cannot restrict {space.space_id} to {type(region).__name__}")
