"""Certification routes: locally Lipschitz constants, integral truncation,
gluing across a shared boundary point, and algebraic closure."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import optimize

from .. import spaces as sp
from ..errors import InsufficientHypotheses, InvalidPartition
from ..measure import MeasureKind
from ..tms import TmsInstance, sample_region
from .families import DisjointFamily, random_family
from .functions import Builtin, Composite, FunctionSpec, GridDensityIntegral
from .oscillation import interval_oscillations, oscillation_upper
from .verdicts import (Certified, DeltaRule, GluedDelta, Inconclusive, IntegralDelta,
                       LinearDelta, MinDelta, ScaledDelta)

DEFAULT_SCALES = tuple(10.0 ** -k for k in range(1, 9))
MARGIN = 0.05


def measure_dominates_diameter(instance: TmsInstance) -> bool:
    """True when m(E) >= diam(E) for every open connected E, so metric
    Lipschitz constants are also measure Lipschitz constants."""
    kind = instance.measure_kind
    if kind is MeasureKind.DIAM:
        return True
    if kind is MeasureKind.LEBESGUE and sp._one_dimensional(instance.space) \
            and isinstance(instance.space, sp.RealInterval):
        return True
    return False


# --------------------------------------------------------------------------
# Lipschitz estimation
# --------------------------------------------------------------------------

@dataclass
class LipschitzEstimate:
    L_hat: float
    per_scale: dict
    diverging: bool
    shells: dict = field(default_factory=dict)
    argmax: Optional[list] = None
    notes: list = field(default_factory=list)

    @property
    def accepted(self) -> bool:
        return not self.diverging and math.isfinite(self.L_hat)

    def to_dict(self) -> dict:
        def fix(v):
            return v if math.isfinite(v) else "inf"
        return {"L_hat": fix(self.L_hat), "diverging": self.diverging,
                "per_scale": {f"{k:.0e}": fix(v) for k, v in self.per_scale.items()},
                "shells": {f"{k:g}": fix(v) for k, v in self.shells.items()},
                "argmax": self.argmax, "notes": self.notes}


def _ratio_1d(f, instance, centers, s):
    a = centers - s / 2
    b = centers + s / 2
    space = instance.space
    if isinstance(space, sp.RealInterval):
        a = np.clip(a, space.a, space.b)
        b = np.clip(b, space.a, space.b)
    keep = b - a > 0
    a, b = a[keep], b[keep]
    _, up = interval_oscillations(f, a, b)
    meas = b - a  # Lebesgue length and nu both equal the length on the line
    with np.errstate(invalid="ignore", divide="ignore"):
        r = np.where(up > 0, up / meas, 0.0)
    return r, a, b


def _candidate_sets(instance, centers, s, rng):
    space = instance.space
    out = []
    for c in centers:
        if isinstance(space, sp.Circle):
            out.append(sp.Arc(c[0] - s / 2, c[0] + s / 2))
        else:
            out.append(sp.canonical(space, sp.Ball(tuple(c), s / 2)))
            if isinstance(space, sp.EuclideanBox) and space.dim >= 2:
                w = np.full(space.dim, s * 1e-3)
                w[0] = s
                out.append(sp.Box(tuple(zip(c - w / 2, c + w / 2))))
    return out


def _measure_lower(instance, E) -> float:
    kind = instance.measure_kind
    space = instance.space
    if kind is MeasureKind.DIAM:
        return sp.diam_upper(space, E)
    return instance.measure_upper(E)  # Lebesgue values here are exact


def estimate_local_lipschitz(f: FunctionSpec, instance: TmsInstance,
                             scales: Sequence[float] = DEFAULT_SCALES, budget: int = 400,
                             seed: int = 0, anchors: Sequence[float] = ()) -> LipschitzEstimate:
    """Largest ratio oscillation_upper(E) / measure_lower(E) per scale.

    Sets are centred at random points, at domain endpoints and at
    ``anchors``; on the line the best centre per scale is refined with a
    bounded scalar search. Unbounded domains are also probed on shells of
    radius 4**j. Divergence is flagged when a smaller scale or an outer
    shell more than doubles the running maximum.
    """
    rng = np.random.default_rng(seed)
    space = instance.space
    region = sample_region(space)
    per_scale, argmax = {}, None
    notes = []
    if sp._one_dimensional(space):
        a0, b0 = sp._interval_bounds(region)
        base = rng.uniform(a0, b0, budget)
        ends = [v for v in (getattr(space, "a", None), getattr(space, "b", None))
                if v is not None and math.isfinite(v)]
        if isinstance(space, sp.RectifiableCurve):
            ends = [0.0, space.length]
        fixed = np.array(list(ends) + list(anchors) + [0.0], dtype=float)
        best_overall = 0.0
        for s in scales:
            centers = np.concatenate([base, fixed, fixed + s / 2, fixed - s / 2])
            r, a, b = _ratio_1d(f, instance, centers, s)
            if r.size == 0:
                continue
            i = int(np.argmax(r))
            best = float(r[i])
            c0 = 0.5 * (a[i] + b[i])
            best = max(best, _refine_1d(f, instance, c0, s))
            per_scale[s] = best
            if best > best_overall:
                best_overall, argmax = best, [float(c0), float(s)]
    else:
        pts = sp.sample_points(space, region, max(8, budget // 8), rng, include_edges=False)
        pts = space.normalize(pts)
        for s in scales:
            best = 0.0
            for E in _candidate_sets(instance, pts, s, rng):
                m = _measure_lower(instance, E)
                osc = oscillation_upper(f, E)
                if osc <= 0:
                    continue
                ratio = math.inf if m <= 0 else osc / m
                if ratio > best:
                    best, argmax = ratio, [sp.shape_to_dict(E)]
            per_scale[s] = best
    shells = _shell_probe(f, instance, scales, rng) if not getattr(space, "bounded", True) else {}
    diverging = _grows(per_scale, ordered=sorted(per_scale, reverse=True))
    if shells and _grows(shells, ordered=sorted(shells)):
        diverging = True
        notes.append("ratio grows on outer shells")
    if diverging and per_scale:
        notes.append("per-scale maxima grow by more than 2x")
    vals = list(per_scale.values()) + list(shells.values())
    L_hat = max(vals) if vals else 0.0
    return LipschitzEstimate(float(L_hat), per_scale, bool(diverging), shells, argmax, notes)


def _grows(series: dict, ordered) -> bool:
    vals = [series[k] for k in ordered]
    if any(math.isinf(v) for v in vals):
        return True
    for i in range(1, len(vals)):
        prev = max(vals[:i])
        if prev > 0 and vals[i] > 2.0 * prev:
            return True
    return False


def _refine_1d(f, instance, c0, s):
    space = instance.space
    lo, hi = c0 - 2 * s, c0 + 2 * s

    def neg(c):
        r, _, _ = _ratio_1d(f, instance, np.array([c]), s)
        return -float(r[0]) if r.size else 0.0

    try:
        res = optimize.minimize_scalar(neg, bounds=(lo, hi), method="bounded",
                                       options={"xatol": s * 1e-3, "maxiter": 40})
        return max(-float(res.fun), -neg(c0))
    except (ValueError, FloatingPointError):
        return -neg(c0)


def _shell_probe(f, instance, scales, rng):
    space = instance.space
    s = min(1e-2, max(scales))
    out = {}
    for j in range(0, 7):
        R = 4.0 ** j
        if sp._one_dimensional(space):
            centers = np.concatenate([R + rng.uniform(-R / 4, R / 4, 64),
                                      -R + rng.uniform(-R / 4, R / 4, 64)])
            if isinstance(space, sp.RealInterval):
                centers = centers[(centers > space.a + s) & (centers < space.b - s)]
            if centers.size == 0:
                continue
            r, _, _ = _ratio_1d(f, instance, centers, s)
            out[R] = float(r.max()) if r.size else 0.0
        elif isinstance(space, sp.EuclideanBox):
            u = rng.standard_normal((16, space.dim))
            u /= np.linalg.norm(u, axis=1, keepdims=True)
            best = 0.0
            for E in _candidate_sets(instance, R * u, s, rng):
                m = _measure_lower(instance, E)
                osc = oscillation_upper(f, E)
                if osc > 0:
                    best = max(best, math.inf if m <= 0 else osc / m)
            out[R] = best
    return out


# --------------------------------------------------------------------------
# spot checks
# --------------------------------------------------------------------------

def spot_check(f: FunctionSpec, instance: TmsInstance, rule: DeltaRule, eps_list: Sequence[float],
               n_families: int = 10, seed: int = 0, region=None, anchors: Sequence[float] = ()) -> list:
    """Random P_delta(eps) families must have oscillation-sum upper < eps."""
    rng = np.random.default_rng(seed)
    out = []
    for eps in eps_list:
        delta = rule(eps)
        worst, failures = 0.0, 0
        for _ in range(n_families):
            fam = random_family(instance, delta, rng, region=region, anchors=anchors)
            if not fam.in_p_delta(delta) and math.isfinite(delta):
                continue
            total = fam.oscillation_sum_upper(f)
            worst = max(worst, total)
            if not total < eps:
                failures += 1
        out.append({"eps": eps, "delta": delta if math.isfinite(delta) else "inf",
                    "families": n_families, "worst_sum_upper": worst,
                    "failures": failures, "passed": failures == 0})
    return out


def steep_anchors(f: FunctionSpec, instance: TmsInstance, n: int = 4, seed: int = 0) -> list:
    """Points of the line where f changes fastest on a coarse grid."""
    if not sp._one_dimensional(instance.space):
        return []
    a, b = sp._interval_bounds(sample_region(instance.space))
    x = np.linspace(a, b, 2001)
    y = np.asarray(f(x[:, None]))
    if y.ndim > 1:
        y = np.linalg.norm(y, axis=1)
    slope = np.abs(np.diff(y))
    idx = np.argsort(slope)[::-1][:n]
    return [float(0.5 * (x[i] + x[i + 1])) for i in idx]


# --------------------------------------------------------------------------
# certificates
# --------------------------------------------------------------------------

def certify_ac_lipschitz(L: float | LipschitzEstimate, f: FunctionSpec | None = None,
                         instance: TmsInstance | None = None,
                         eps_list: Sequence[float] = (1e-1, 1e-2, 1e-3),
                         n_families: int = 10, seed: int = 0):
    """Certified(LocallyLipschitz(L)) with delta = eps / L.

    A diverging estimate or a non-finite constant is refused.
    """
    if isinstance(L, LipschitzEstimate):
        if not L.accepted:
            return Inconclusive({"reason": "Lipschitz estimate diverges", "estimate": L.to_dict()})
        L = L.L_hat
    if L is None or not math.isfinite(L) or L < 0:
        return Inconclusive({"reason": "no finite Lipschitz constant"})
    rule = LinearDelta(float(L))
    checks = []
    if f is not None and instance is not None:
        checks = spot_check(f, instance, rule, eps_list, n_families, seed,
                            anchors=steep_anchors(f, instance, seed=seed))
    return Certified("LocallyLipschitz", {"L": float(L)}, rule, checks, L=float(L))


def sqrt_tail(p: float) -> float:
    """Tail of the density 1/(2 sqrt t) on (0, 1) above level p."""
    if p <= 0.5:
        return 1.0 - p
    return 1.0 / (4.0 * p)


def certify_ac_integral(F: GridDensityIntegral | None = None, *, mode: str | None = None,
                        tail: Callable[[float], float] | None = None,
                        instance: TmsInstance | None = None, f: FunctionSpec | None = None,
                        eps_list: Sequence[float] = (1e-1, 1e-2, 1e-3),
                        n_families: int = 10, seed: int = 0):
    """Certified(IntegralL1) from the truncation tail of an L1 density.

    Either pass a GridDensityIntegral or an explicit ``tail(p)`` callable with
    ``mode`` (used for closed-form densities such as 1/(2 sqrt t)).
    """
    if F is not None:
        mode = F.mode
        tail = F.tail
        f = f or F
        if not math.isfinite(F.l1_norm):
            return Inconclusive({"reason": "density is not integrable on the grid"})
    if tail is None or mode not in ("symmetric", "cumulative"):
        raise InsufficientHypotheses("integral certificate needs a tail and a mode")
    rule = IntegralDelta(mode, tail)
    for eps in eps_list:
        if rule.level(eps) is None:
            return Inconclusive({"reason": "tail does not shrink", "eps": eps})
    params = {"mode": mode, "levels": {f"{e:g}": rule.level(e) for e in eps_list},
              "tails": {f"{e:g}": tail(rule.level(e)) for e in eps_list}}
    checks = []
    if f is not None and instance is not None:
        checks = spot_check(f, instance, rule, eps_list, n_families, seed,
                            anchors=steep_anchors(f, instance, seed=seed))
    return Certified("IntegralL1", params, rule, checks)


@dataclass(frozen=True)
class Piece:
    region: sp.RealInterval
    verdict: Certified


def glue_verdicts(pieces: Sequence, continuous: bool = True, f: FunctionSpec | None = None,
                  instance: TmsInstance | None = None,
                  eps_list: Sequence[float] = (1e-1, 1e-2, 1e-3), n_families: int = 10,
                  seed: int = 0, tol: float = 1e-9):
    """Glue certificates on adjacent pieces of the line.

    A set straddling the shared point b splits into (u, b] and [b, v); by
    continuity at b each side's oscillation equals that of its open part, so
    delta(eps) = min_i delta_i(eps / 2) suffices.
    """
    pieces = [p if isinstance(p, Piece) else Piece(*p) for p in pieces]
    if not pieces:
        raise InvalidPartition("no pieces to glue")
    if any(not isinstance(p.verdict, Certified) for p in pieces):
        raise InvalidPartition("every piece must be certified")
    if len(pieces) == 1:
        return pieces[0].verdict
    if not continuous:
        raise InvalidPartition("gluing needs continuity across the shared points")
    pieces = sorted(pieces, key=lambda p: p.region.a)
    for left, right in zip(pieces, pieces[1:]):
        if left.region.b != right.region.a:
            raise InvalidPartition(f"pieces {left.region.space_id} and {right.region.space_id} "
                                   "are not adjacent")
        if not (left.region.closed_right or right.region.closed_left):
            raise InvalidPartition(f"the shared point {left.region.b} belongs to no piece")
        if f is not None:
            b = left.region.b
            h = 1e-9 * max(1.0, abs(b))
            jump = abs(f.scalar(b - h) - f.scalar(b + h))
            if jump > 1e-6:
                raise InvalidPartition(f"f jumps by {jump:g} at {b}")
    rule = GluedDelta(tuple(p.verdict.delta_rule for p in pieces))
    checks = []
    if f is not None and instance is not None:
        anchors = [p.region.a for p in pieces if math.isfinite(p.region.a)]
        checks = spot_check(f, instance, rule, eps_list, n_families, seed, anchors=anchors)
    params = {"pieces": [{"region": p.region.space_id, "certificate": p.verdict.certificate}
                         for p in pieces]}
    return Certified("Glued", params, rule, checks)


# --------------------------------------------------------------------------
# algebra of certificates
# --------------------------------------------------------------------------

ALGEBRA_OPS = ("sum", "scale", "product", "reciprocal", "abs")


def ac_algebra_check(f: FunctionSpec, fv: Certified, op: str, g: FunctionSpec | None = None,
                     gv: Certified | None = None, alpha: float | None = None,
                     M: float | None = None, K: float | None = None,
                     instance: TmsInstance | None = None,
                     eps_list: Sequence[float] = (1e-1, 1e-2, 1e-3), n_families: int = 100,
                     seed: int = 0):
    """Derive the certificate of f + g, alpha f, f g, 1/f or |f|.

    Lipschitz certificates combine as L_f + L_g, |alpha| L, M (L_f + L_g),
    L / K^2 and L; other certificates combine through their delta rules.
    Returns (composite function, verdict).
    """
    if op not in ALGEBRA_OPS:
        raise ValueError(f"op must be one of {ALGEBRA_OPS}")
    if op in ("sum", "product") and (g is None or gv is None):
        raise InsufficientHypotheses(f"{op} needs a second certified function")
    if op == "scale" and alpha is None:
        raise InsufficientHypotheses("scale needs alpha")
    if op == "product" and M is None:
        raise InsufficientHypotheses("product needs a declared bound M on |f| and |g|")
    if op == "reciprocal" and not (K is not None and K > 0):
        raise InsufficientHypotheses("reciprocal needs a declared K > 0 with |f| >= K")
    if op == "product":
        for h in (f, g):
            b = h.bound
            if b is not None and b > M + 1e-12:
                raise InsufficientHypotheses(f"declared M={M} is below the known bound {b}")
    if op == "reciprocal":
        x = sp.sample_points(f.domain, sample_region(f.domain), 2000, np.random.default_rng(seed))
        if float(np.min(np.abs(f(x)))) < K - 1e-12:
            raise InsufficientHypotheses(f"|f| drops below K={K} on samples")
    for v in (fv, gv):
        if v is not None and not isinstance(v, Certified):
            raise InsufficientHypotheses("operands must be certified")

    if op == "sum":
        h = Composite("sum", [f, g])
    elif op == "scale":
        h = Composite("scale", [f], alpha=alpha)
    elif op == "product":
        h = Composite("product", [f, g], M=M)
    elif op == "reciprocal":
        h = Composite("reciprocal", [f], K=K)
    else:
        h = Composite("abs", [f])

    lip = fv.L is not None and (gv is None or gv.L is not None)
    if lip:
        Lf, Lg = fv.L, (gv.L if gv is not None else 0.0)
        L = {"sum": Lf + Lg, "scale": abs(alpha or 0.0) * Lf, "product": (M or 0.0) * (Lf + Lg),
             "reciprocal": Lf / (K or 1.0) ** 2, "abs": Lf}[op]
        rule = LinearDelta(L)
        kind, params = "LocallyLipschitz", {"L": L, "derived_from": op}
    else:
        L = None
        if op == "sum":
            rule = MinDelta((fv.delta_rule, gv.delta_rule), 2.0)
        elif op == "scale":
            rule = ScaledDelta(fv.delta_rule, abs(alpha))
        elif op == "product":
            rule = MinDelta((ScaledDelta(fv.delta_rule, M), ScaledDelta(gv.delta_rule, M)), 2.0)
        elif op == "reciprocal":
            rule = ScaledDelta(fv.delta_rule, 1.0 / K ** 2)
        else:
            rule = fv.delta_rule
        kind, params = "Derived", {"derived_from": op}
    checks = []
    if instance is not None:
        checks = spot_check(h, instance, rule, eps_list, n_families, seed,
                            anchors=steep_anchors(h, instance, seed=seed))
    return h, Certified(kind, params, rule, checks, L=L)


# --------------------------------------------------------------------------
# consequences of certification
# --------------------------------------------------------------------------

def uniform_continuity_check(f: FunctionSpec, verdict: Certified, eps: float,
                             n_pairs: int = 2000, seed: int = 0) -> dict:
    """Sampled modulus of continuity at scale delta(eps) must stay <= eps."""
    rng = np.random.default_rng(seed)
    space = f.domain
    delta = verdict.delta(eps)
    if not math.isfinite(delta):
        delta = 1.0
    region = sample_region(space)
    x = sp.sample_points(space, region, n_pairs, rng, include_edges=False)[:n_pairs]
    step = rng.standard_normal(x.shape)
    step /= sp._space_norm(space, step)[:, None]
    y = x + step * (delta * rng.random(len(x)) * (1 - 1e-9))[:, None]
    ok = space.in_space(y) & space.in_space(x)
    x, y = x[ok], y[ok]
    d = space.dist(space.normalize(x), space.normalize(y))
    fx, fy = np.asarray(f(x)), np.asarray(f(y))
    diff = np.abs(fx - fy) if fx.ndim == 1 else np.linalg.norm(fx - fy, axis=1)
    worst = float(diff.max()) if len(diff) else 0.0
    return {"eps": eps, "delta": delta, "max_distance": float(d.max()) if len(d) else 0.0,
            "worst_difference": worst, "passed": worst <= eps}


def restriction_check(f: FunctionSpec, verdict: Certified, instance: TmsInstance, region,
                      eps_list: Sequence[float] = (1e-1, 1e-2), n_families: int = 20,
                      seed: int = 0) -> list:
    """A certificate on X re-checks on an open sub-region with the same delta."""
    from ..tms import restrict
    sub = restrict(instance, region)
    return spot_check(f, sub, verdict.delta_rule, eps_list, n_families, seed,
                      region=sp.canonical(instance.space, region))
