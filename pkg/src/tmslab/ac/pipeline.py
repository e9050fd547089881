"""End-to-end absolute-continuity analysis: try the certificates first, then
the witness search."""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .. import spaces as sp
from ..errors import RuleDisabled, RuleNotApplicable
from ..measure import MeasureKind
from ..tms import TmsInstance, sample_region
from .certify import (MARGIN, Piece, certify_ac_integral, certify_ac_lipschitz,
                      estimate_local_lipschitz, glue_verdicts, measure_dominates_diameter,
                      sqrt_tail)
from .falsify import DEFAULT_DELTAS, constancy_falsifier, falsify_ac
from .functions import Builtin, FunctionSpec, GridDensityIntegral
from .verdicts import Certified, Falsified, Inconclusive

SPOT_EPS = (1e-1, 1e-2, 1e-3)


def _spot_eps(eps):
    return tuple(sorted(set(SPOT_EPS) | {float(eps)}, reverse=True))


def _sqrt_route(f: Builtin, instance: TmsInstance, eps_list, n_families, seed):
    """sqrt = integral of 1/(2 sqrt t): integral certificate on [0, 1],
    Lipschitz 1/2 beyond, glued at 1."""
    space = instance.space
    if not isinstance(space, sp.RealInterval) or space.a != 0.0:
        return None
    near = certify_ac_integral(mode="cumulative", tail=sqrt_tail)
    if space.b <= 1.0:
        return certify_ac_integral(mode="cumulative", tail=sqrt_tail, instance=instance, f=f,
                                   eps_list=eps_list, n_families=n_families, seed=seed)
    left = sp.RealInterval(0.0, 1.0, space.closed_left, True)
    right = sp.RealInterval(1.0, space.b, False, space.closed_right)
    return glue_verdicts([Piece(left, near), Piece(right, certify_ac_lipschitz(0.5))], True,
                         f=f, instance=instance, eps_list=eps_list, n_families=n_families,
                         seed=seed)


def null_segments(instance: TmsInstance) -> list:
    """Axis-parallel unit segments through the centre of the sample region."""
    space = instance.space
    if not isinstance(space, sp.EuclideanBox) or space.dim < 2:
        return []
    region = sample_region(space)
    c = np.array([0.5 * (lo + hi) for lo, hi in region.bounds])
    out = []
    for axis in range(space.dim):
        e = np.zeros(space.dim)
        e[axis] = 0.5
        out.append(sp.Segment(tuple(c - e), tuple(c + e)))
    return out


def analyze(f: FunctionSpec, instance: TmsInstance, eps: float = 0.01,
            deltas: Sequence[float] = DEFAULT_DELTAS, n_families: int = 10, seed: int = 0):
    """Certify or falsify absolute continuity of f on the instance.

    Order: constants; grid-density integrals; analytic Lipschitz constants
    (only where the measure dominates the diameter); the sqrt integral
    representation; the sampled Lipschitz estimate; finally the witness
    search, with the constancy rule attached when it applies.
    """
    eps_list = _spot_eps(eps)
    kw = dict(eps_list=eps_list, n_families=n_families, seed=seed)
    if isinstance(f, Builtin) and f.name == "constant":
        return certify_ac_lipschitz(0.0, f, instance, **kw)
    if isinstance(f, GridDensityIntegral):
        v = certify_ac_integral(f, instance=instance, **kw)
        if isinstance(v, Certified):
            return v
    if measure_dominates_diameter(instance):
        L = f.lipschitz()
        if L is not None:
            return certify_ac_lipschitz(L, f, instance, **kw)
    if isinstance(f, Builtin) and f.name == "sqrt":
        v = _sqrt_route(f, instance, eps_list, n_families, seed)
        if v is not None:
            return v
    est = estimate_local_lipschitz(f, instance, seed=seed)
    if est.accepted:
        return certify_ac_lipschitz(est.L_hat * (1 + MARGIN), f, instance, **kw)
    verdict = falsify_ac(f, instance, eps, deltas, seed=seed)
    by_theorem = _constancy(f, instance, seed)
    if by_theorem is not None:
        if isinstance(verdict, Falsified):
            verdict.by_theorem = by_theorem.by_theorem
        else:
            return by_theorem
    if isinstance(verdict, Inconclusive):
        verdict.diagnostics["lipschitz_estimate"] = est.to_dict()
    return verdict


def _constancy(f, instance, seed):
    if instance.measure_kind is not MeasureKind.LEBESGUE:
        return None
    for seg in null_segments(instance):
        try:
            v = constancy_falsifier(f, instance, seg, seed=seed)
        except (RuleDisabled, RuleNotApplicable):
            return None
        if isinstance(v, Falsified):
            return v
    return None


def is_ac(verdict) -> bool | None:
    """True for certified, False for falsified, None otherwise."""
    if isinstance(verdict, Certified):
        return True
    if isinstance(verdict, Falsified):
        return False
    return None
