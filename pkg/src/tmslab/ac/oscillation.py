"""Oscillation brackets.

The lower bound is always a sampled value of |f(x) - f(y)|; for continuous
functions samples may include points of the closure, since the supremum
over an open set equals the maximum over its closure. The upper bound comes
from exact ranges, Lipschitz constants or composite rules, and is +inf when
nothing analytic is known.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import spaces as sp
from ..errors import DomainError
from .functions import Composite, FunctionSpec

DEFAULT_SAMPLES = 10_000


@dataclass(frozen=True)
class OscBracket:
    lower: float
    upper: float

    def __add__(self, other: "OscBracket") -> "OscBracket":
        return OscBracket(self.lower + other.lower, self.upper + other.upper)

    def to_dict(self) -> dict:
        return {"lower": self.lower, "upper": self.upper}


def _closure_samples(space, E, n, rng):
    pts = sp.sample_points(space, E, n, rng)
    E = sp.canonical(space, E)
    if isinstance(E, sp.Interval):
        pts = np.concatenate([pts, [[E.a], [E.b]]])
    elif isinstance(E, sp.Arc):
        pts = np.concatenate([pts, [[E.start], [E.start + E.length]]])
    elif isinstance(E, sp.Box):
        import itertools
        pts = np.concatenate([pts, np.array(list(itertools.product(*E.bounds)))])
    return pts


def _spread(vals: np.ndarray) -> float:
    """max |v_i - v_j| over the sample."""
    if len(vals) == 0:
        return 0.0
    if vals.ndim == 1:
        return float(vals.max() - vals.min())
    # vector values: exact on a subsample, plus extreme points along axes
    idx = np.unique(np.concatenate([np.argmax(vals, axis=0), np.argmin(vals, axis=0)]))
    sub = vals[:: max(1, len(vals) // 400)]
    sub = np.concatenate([sub, vals[idx]])
    d = np.sqrt(((sub[:, None, :] - sub[None, :, :]) ** 2).sum(-1))
    return float(d.max())


def oscillation_lower(f: FunctionSpec, E, n: int = DEFAULT_SAMPLES,
                      rng: np.random.Generator | None = None) -> float:
    rng = rng or np.random.default_rng(0)
    space = f.domain
    pts = _closure_samples(space, E, n, rng) if f.continuous else sp.sample_points(space, E, n, rng)
    pts = _inside_domain(f, pts)
    return _spread(np.asarray(f(pts)))


def _inside_domain(f, pts):
    space = f.domain
    if isinstance(space, sp.RealInterval):
        lo = space.a if math.isfinite(space.a) else -np.inf
        hi = space.b if math.isfinite(space.b) else np.inf
        keep = (pts[:, 0] >= lo) & (pts[:, 0] <= hi)
        return pts[keep]
    return pts


def oscillation_upper(f: FunctionSpec, E) -> float:
    """Analytic upper bound on the oscillation of f over E."""
    space = f.domain
    E = sp.canonical(space, E)
    if isinstance(E, (sp.Empty, sp.Singleton)):
        return 0.0
    if isinstance(E, sp.Interval) and f.codim == 1:
        r = f.exact_range(np.array([E.a]), np.array([E.b]))
        if r is not None:
            return float(r[1][0] - r[0][0])
    ex = f.exact_oscillation(E)
    if ex is not None:
        return float(ex)
    if isinstance(f, Composite):
        how, k = f.factor()
        parts = [oscillation_upper(c, E) for c in f.children]
        return k * sum(parts) if how == "add" else k * parts[0]
    if isinstance(E, sp.Interval):
        L = f.local_lipschitz(np.array([E.a]), np.array([E.b]))
        if L is not None and np.isfinite(L[0]):
            bound = float(L[0]) * (E.b - E.a)
            if f.name == "x_sin_inv_x":
                bound = min(bound, 2.0 * max(abs(E.a), abs(E.b)))
            return bound
        if f.name == "x_sin_inv_x":
            return 2.0 * max(abs(E.a), abs(E.b))
    L = f.lipschitz()
    if L is not None:
        return L * sp.diam_upper(space, E)
    return math.inf


def oscillation(f: FunctionSpec, E, budget: int = DEFAULT_SAMPLES,
                rng: np.random.Generator | None = None) -> OscBracket:
    """[lower, upper] bracket on sup |f(x) - f(y)| over x, y in E."""
    space = f.domain
    E = sp.canonical(space, E)
    f.check_domain(E)
    if isinstance(E, sp.Interval) and not (math.isfinite(E.a) and math.isfinite(E.b)):
        raise DomainError("oscillation over an unbounded interval")
    upper = oscillation_upper(f, E)
    if isinstance(E, sp.Interval) and f.codim == 1:
        r = f.exact_range(np.array([E.a]), np.array([E.b]))
        if r is not None and f.continuous:
            v = float(r[1][0] - r[0][0])
            return OscBracket(v, max(v, upper))
    lower = oscillation_lower(f, E, budget, rng)
    return OscBracket(lower, max(lower, upper))


def interval_oscillations(f: FunctionSpec, lo: np.ndarray, hi: np.ndarray,
                          samples: int = 32, rng: np.random.Generator | None = None):
    """Vectorized oscillation brackets on many intervals (lower, upper arrays)."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    r = f.exact_range(lo, hi) if f.codim == 1 else None
    if r is not None and f.continuous:
        w = r[1] - r[0]
        return w, w.copy()
    rng = rng or np.random.default_rng(0)
    t = np.concatenate([[0.0, 1.0], np.sort(rng.random(samples))])
    pts = lo[:, None] + (hi - lo)[:, None] * t[None, :]
    vals = f(pts.reshape(-1, 1)).reshape(len(lo), len(t), -1)
    if vals.shape[-1] == 1:
        vals = vals[..., 0]
        lower = vals.max(axis=1) - vals.min(axis=1)
    else:
        lower = np.array([_spread(v) for v in vals])
    L = f.local_lipschitz(lo, hi)
    if L is not None:
        upper = L * (hi - lo)
        if f.name == "x_sin_inv_x":
            upper = np.minimum(upper, 2.0 * np.maximum(np.abs(lo), np.abs(hi)))
    elif f.name == "x_sin_inv_x":
        upper = 2.0 * np.maximum(np.abs(lo), np.abs(hi))
    else:
        upper = np.full(len(lo), np.inf)
    return lower, np.maximum(lower, upper)
