"""delta(eps) rules and absolute-continuity verdicts."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence


def _num(x: float):
    """JSON-safe float."""
    if x is None:
        return None
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return x


class DeltaRule:
    kind = "rule"

    def __call__(self, eps: float) -> float:
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class LinearDelta(DeltaRule):
    """delta = eps / L (any delta works when L = 0)."""

    L: float
    kind = "eps_over_L"

    def __call__(self, eps):
        return math.inf if self.L == 0 else eps / self.L

    def to_dict(self):
        return {"kind": self.kind, "L": _num(self.L)}


@dataclass(frozen=True)
class BoundedLinearDelta(DeltaRule):
    """delta = eps / (||T|| + 1)."""

    norm: float
    kind = "eps_over_norm_plus_one"

    def __call__(self, eps):
        return eps / (self.norm + 1.0)

    def to_dict(self):
        return {"kind": self.kind, "norm": _num(self.norm)}


@dataclass(frozen=True)
class IntegralDelta(DeltaRule):
    """delta = eps / (4p) (symmetric) or eps / (2p) (cumulative), where p is
    the least integer level whose truncation tail is below eps/4 or eps/2."""

    mode: str
    tail: Callable[[float], float] = field(compare=False)
    p_max: int = 10 ** 9
    kind = "integral_truncation"

    @property
    def share(self) -> float:
        return 4.0 if self.mode == "symmetric" else 2.0

    def level(self, eps: float) -> Optional[int]:
        target = eps / self.share
        if self.tail(0.0) <= 0.0:
            return 0  # zero density: the integral is constant
        if self.tail(1.0) < target:
            return 1
        lo, hi = 1, 2
        while self.tail(hi) >= target:
            lo, hi = hi, hi * 2
            if hi > self.p_max:
                return None
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self.tail(mid) < target:
                hi = mid
            else:
                lo = mid
        return hi

    def __call__(self, eps):
        p = self.level(eps)
        if p is None:
            return 0.0
        if p == 0:
            return math.inf
        return eps / (self.share * p)

    def to_dict(self):
        return {"kind": self.kind, "mode": self.mode}


@dataclass(frozen=True)
class GluedDelta(DeltaRule):
    """delta = min over pieces of delta_i(eps / 2)."""

    rules: tuple
    kind = "glued"

    def __call__(self, eps):
        return min(r(eps / 2.0) for r in self.rules)

    def to_dict(self):
        return {"kind": self.kind, "pieces": [r.to_dict() for r in self.rules]}


@dataclass(frozen=True)
class ScaledDelta(DeltaRule):
    """delta = inner(eps / factor)."""

    inner: DeltaRule
    factor: float
    kind = "scaled"

    def __call__(self, eps):
        if self.factor == 0:
            return math.inf
        return self.inner(eps / self.factor)

    def to_dict(self):
        return {"kind": self.kind, "factor": _num(self.factor), "inner": self.inner.to_dict()}


@dataclass(frozen=True)
class MinDelta(DeltaRule):
    """delta = min over rules of rule(eps / split)."""

    rules: tuple
    split: float = 2.0
    kind = "min"

    def __call__(self, eps):
        return min(r(eps / self.split) for r in self.rules)

    def to_dict(self):
        return {"kind": self.kind, "split": self.split, "rules": [r.to_dict() for r in self.rules]}


# --------------------------------------------------------------------------
# verdicts
# --------------------------------------------------------------------------

@dataclass
class Certified:
    certificate: str  # LocallyLipschitz | IntegralL1 | Glued | LinearBounded
    params: dict
    delta_rule: DeltaRule
    spot_checks: list = field(default_factory=list)
    L: Optional[float] = None
    status = "certified"

    def delta(self, eps: float) -> float:
        return self.delta_rule(eps)

    @property
    def spot_checks_passed(self) -> bool:
        return all(c["passed"] for c in self.spot_checks)

    def to_dict(self) -> dict:
        return {"status": self.status, "certificate": self.certificate,
                "params": {k: _num(v) if isinstance(v, (int, float)) else v
                           for k, v in self.params.items()},
                "L": _num(self.L), "delta_rule": self.delta_rule.to_dict(),
                "spot_checks": self.spot_checks}


@dataclass
class Witness:
    delta: float
    family: object  # DisjointFamily
    oscillation_sum_lower: float
    strategy: str

    @property
    def total_measure_upper(self) -> float:
        return self.family.total_measure_upper

    def to_dict(self) -> dict:
        return {"delta": _num(self.delta), "strategy": self.strategy,
                "oscillation_sum_lower": _num(self.oscillation_sum_lower),
                "total_measure_upper": _num(self.total_measure_upper),
                "family": self.family.to_dict()}


@dataclass
class Falsified:
    eps: float
    witnesses: list
    by_theorem: Optional[dict] = None
    status = "falsified"

    def to_dict(self) -> dict:
        d = {"status": self.status, "eps": _num(self.eps),
             "witnesses": [w.to_dict() for w in self.witnesses]}
        if self.by_theorem is not None:
            d["by_theorem"] = self.by_theorem
        return d


@dataclass
class Inconclusive:
    diagnostics: dict
    partial: list = field(default_factory=list)
    status = "inconclusive"

    def to_dict(self) -> dict:
        return {"status": self.status, "diagnostics": self.diagnostics,
                "partial_witnesses": [w.to_dict() for w in self.partial]}


@dataclass
class Pass:
    """No conclusion: the rule found nothing to report."""

    detail: str
    status = "pass"

    def to_dict(self) -> dict:
        return {"status": self.status, "detail": self.detail}


Verdict = Certified | Falsified | Inconclusive
