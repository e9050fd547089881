"""Linear maps on finite-dimensional normed spaces, operator-norm brackets
and the bounded-implies-AC certificates built on them."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import spaces as sp
from .ac.certify import certify_ac_lipschitz, spot_check
from .ac.functions import Builtin, Composite, FunctionSpec, dual_norm
from .ac.verdicts import (BoundedLinearDelta, Certified, LinearDelta, ScaledDelta, _num)
from .errors import InvalidComposition, SpecError
from .measure import MeasureKind
from .tms import TmsInstance

SPOT_EPS = (1e-1, 1e-2, 1e-3)


def _lp_exponent(space) -> float:
    if isinstance(space, sp.GridFunctionSpace):
        return {"sup": math.inf, "l1": 1.0, "l2": 2.0}.get(space.norm, space.p)
    return {"sup": math.inf, "l1": 1.0, "l2": 2.0}[space.norm]


def _space_weight(space) -> float:
    return space.step if isinstance(space, sp.GridFunctionSpace) else 1.0


class LinearMap:
    """Base class: ``apply`` maps (N, dim) rows to (N, codim) or (N,)."""

    kind = "linear_map"
    codim = 1

    def __init__(self, domain: sp.Space, codomain: Optional[sp.Space] = None):
        self.domain = domain
        self.codomain = codomain

    def apply(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, X) -> np.ndarray:
        return self.apply(np.atleast_2d(np.asarray(X, dtype=float)))

    def codomain_norm(self, Y: np.ndarray) -> np.ndarray:
        Y = np.asarray(Y, dtype=float)
        if Y.ndim == 1:
            return np.abs(Y)
        if self.codomain is None:
            return np.linalg.norm(Y, axis=1)
        return sp._space_norm(self.codomain, Y)

    @property
    def norm_upper(self) -> float:
        raise NotImplementedError

    def extra_probes(self) -> np.ndarray:
        """Known (near-)maximizing directions; rows need not be unit."""
        return np.zeros((0, self.domain.dim))

    def to_dict(self) -> dict:
        raise NotImplementedError


def _dual_maximizer(a: np.ndarray, space: sp.Space) -> np.ndarray:
    """A direction x with <a, x> = ||a||_* ||x||."""
    p = _lp_exponent(space)
    if p == math.inf:
        return np.sign(a)
    if p == 1.0:
        e = np.zeros_like(a)
        e[int(np.argmax(np.abs(a)))] = np.sign(a[int(np.argmax(np.abs(a)))]) or 1.0
        return e
    q = p / (p - 1.0)
    return np.sign(a) * np.abs(a) ** (q - 1.0)


class FunctionalOnRn(LinearMap):
    """x -> <a, x> on R^n with the l2, sup or l1 norm."""

    kind = "functional"

    def __init__(self, coefficients: Sequence[float], norm: str = "l2"):
        a = np.asarray(coefficients, dtype=float).ravel()
        if a.size < 1:
            raise SpecError("a functional needs at least one coefficient")
        super().__init__(sp.EuclideanBox.rn(a.size, norm))
        self.a = a

    def apply(self, X):
        return X @ self.a

    @property
    def norm_upper(self):
        return dual_norm(self.a, self.domain)

    def extra_probes(self):
        return _dual_maximizer(self.a, self.domain)[None, :]

    def to_dict(self):
        return {"kind": self.kind, "coefficients": self.a.tolist(), "norm": self.domain.norm}


class MatrixOnGrid(LinearMap):
    """A matrix between grid function spaces (norms include the grid weight)."""

    kind = "matrix"

    def __init__(self, matrix, domain_norm: str = "sup", codomain_norm: str = "sup",
                 p: float = 2.0):
        A = np.atleast_2d(np.asarray(matrix, dtype=float))
        if A.shape[0] < 2 or A.shape[1] < 2:
            raise SpecError("grid spaces need at least two samples")
        self.A = A
        super().__init__(sp.GridFunctionSpace(A.shape[1], domain_norm, p),
                         sp.GridFunctionSpace(A.shape[0], codomain_norm, p))
        self.codim = A.shape[0]

    def apply(self, X):
        return X @ self.A.T

    @property
    def norm_upper(self):
        """Exact for (l1, .), (sup, sup) and (l2, l2); otherwise a column bound."""
        A = np.abs(self.A)
        p, q = _lp_exponent(self.domain), _lp_exponent(self.codomain)
        w_in, w_out = _space_weight(self.domain), _space_weight(self.codomain)
        scale = (w_out ** (1.0 / q) if math.isfinite(q) else 1.0) / \
                (w_in ** (1.0 / p) if math.isfinite(p) else 1.0)
        if p == math.inf and q == math.inf:
            raw = float(A.sum(axis=1).max())
        elif p == 2.0 and q == 2.0:
            raw = float(np.linalg.norm(self.A, 2)) * (1 + 1e-12)
        else:
            cols = np.linalg.norm(A, ord=q, axis=0) if math.isfinite(q) else A.max(axis=0)
            # ||T x||_q <= max column norm * ||x||_1 <= ... * n^(1 - 1/p) ||x||_p
            n = A.shape[1]
            raw = float(cols.max()) * (n ** (1.0 - 1.0 / p) if math.isfinite(p) else n)
        return raw * scale

    def extra_probes(self):
        probes = [np.sign(r) for r in self.A]
        if _lp_exponent(self.domain) == 2.0:
            _, _, vt = np.linalg.svd(self.A)
            probes.append(vt[0])
        return np.array(probes)

    def to_dict(self):
        return {"kind": self.kind, "matrix": self.A.tolist(), "domain_norm": self.domain.norm,
                "codomain_norm": self.codomain.norm, "p": self.domain.p}


class IntegrationOperator(MatrixOnGrid):
    """(Tf)(x_i) = sum of f over the cells left of x_i, on sup-normed grids."""

    kind = "integration"

    def __init__(self, m: int):
        if m < 2:
            raise SpecError("grid size must be at least 2")
        super().__init__(np.tril(np.ones((m, m))) / m, "sup", "sup")
        self.m = m

    @property
    def norm_upper(self):
        return 1.0

    def to_dict(self):
        return {"kind": self.kind, "m": self.m}


class HolderFunctional(LinearMap):
    """f -> integral of f h on an lp grid space; bounded by ||h||_q."""

    kind = "holder"

    def __init__(self, h: Sequence[float], p: float, q: float | None = None):
        h = np.asarray(h, dtype=float).ravel()
        if not p > 1:
            raise SpecError("need p > 1")
        q = p / (p - 1.0) if q is None else float(q)
        if not q > 1 or abs(1.0 / p + 1.0 / q - 1.0) > 1e-12:
            raise SpecError("need 1/p + 1/q = 1 with p, q > 1")
        if not np.any(h):
            raise SpecError("h must not vanish identically")
        super().__init__(sp.GridFunctionSpace(h.size, "lp", p))
        self.h, self.p, self.q = h, float(p), q

    def apply(self, X):
        return self.domain.step * (X @ self.h)

    @property
    def norm_upper(self):
        w = self.domain.step
        return float((w * np.sum(np.abs(self.h) ** self.q)) ** (1.0 / self.q))

    def extra_probes(self):
        return _dual_maximizer(self.h, self.domain)[None, :]

    def to_dict(self):
        return {"kind": self.kind, "h": self.h.tolist(), "p": self.p, "q": self.q}


class Addition(LinearMap):
    """(x, y) -> x + y on R^n x R^n with ||(x, y)|| = max(||x||, ||y||).

    With sup norms the product norm is the sup norm on R^{2n}.
    """

    kind = "addition"

    def __init__(self, n: int = 1):
        super().__init__(sp.EuclideanBox.rn(2 * n, "sup"), sp.EuclideanBox.rn(n, "sup"))
        self.n = n
        self.codim = n

    def apply(self, X):
        out = X[:, :self.n] + X[:, self.n:]
        return out[:, 0] if self.n == 1 else out

    @property
    def norm_upper(self):
        return 2.0

    def extra_probes(self):
        return np.ones((1, 2 * self.n))

    def to_dict(self):
        return {"kind": self.kind, "n": self.n}


class Scalar(LinearMap):
    """x -> alpha x on a normed space."""

    kind = "scalar"

    def __init__(self, alpha: float, space: sp.Space | None = None):
        space = space or sp.RealInterval()
        super().__init__(space, space)
        self.alpha = float(alpha)
        self.codim = space.dim

    def apply(self, X):
        out = self.alpha * X
        return out[:, 0] if self.codim == 1 else out

    @property
    def norm_upper(self):
        return abs(self.alpha)

    def to_dict(self):
        return {"kind": self.kind, "alpha": self.alpha, "space": self.domain.to_dict()}


def map_from_dict(d: dict) -> LinearMap:
    kind = d.get("kind")
    if kind == "functional":
        return FunctionalOnRn(d["coefficients"], d.get("norm", "l2"))
    if kind == "matrix":
        return MatrixOnGrid(d["matrix"], d.get("domain_norm", "sup"), d.get("codomain_norm", "sup"),
                            d.get("p", 2.0))
    if kind == "integration":
        return IntegrationOperator(int(d["m"]))
    if kind == "holder":
        return HolderFunctional(d["h"], d["p"], d.get("q"))
    if kind == "addition":
        return Addition(int(d.get("n", 1)))
    if kind == "scalar":
        space = sp.space_from_dict(d["space"]) if "space" in d else None
        return Scalar(d["alpha"], space)
    raise SpecError(f"unknown map kind {kind!r}")


# --------------------------------------------------------------------------
# maps as functions on their domain
# --------------------------------------------------------------------------

class MapFunction(FunctionSpec):
    """A linear map viewed as a (possibly vector-valued) function."""

    def __init__(self, T: LinearMap):
        super().__init__(T.domain)
        self.T = T
        self.name = f"map:{T.kind}"
        self.codim = T.codim

    def evaluate(self, X):
        return self.T.apply(X)

    def lipschitz(self):
        return self.T.norm_upper

    def to_dict(self):
        return {"kind": "map", "map": self.T.to_dict()}


class VectorIdentity(FunctionSpec):
    """x -> x on a box space, as a vector-valued function."""

    name = "vector_identity"

    def __init__(self, space: sp.EuclideanBox):
        super().__init__(space)
        self.codim = space.dim

    def evaluate(self, X):
        return X.copy()

    def lipschitz(self):
        return 1.0

    def to_dict(self):
        return {"kind": "vector_identity", "domain": self.domain.to_dict()}


# --------------------------------------------------------------------------
# norm brackets
# --------------------------------------------------------------------------

@dataclass
class OperatorNormEstimate:
    lower: float
    upper: float
    argmax: Optional[list] = None

    def to_dict(self):
        return {"lower": _num(self.lower), "upper": _num(self.upper), "argmax": self.argmax}


def operator_norm(T: LinearMap, budget: int = 200, seed: int = 0,
                  power_iterations: int = 50) -> OperatorNormEstimate:
    """Probe lower bound over unit vectors, analytic upper bound."""
    if budget < 1:
        raise SpecError("budget must be at least 1")
    rng = np.random.default_rng(seed)
    d = T.domain.dim
    probes = [rng.standard_normal((budget, d)), np.eye(d), T.extra_probes()]
    if isinstance(T, MatrixOnGrid) and _lp_exponent(T.domain) == 2.0:
        v = rng.standard_normal(d)
        for _ in range(power_iterations):
            v = T.A.T @ (T.A @ v)
            nv = np.linalg.norm(v)
            if nv == 0:
                break
            v /= nv
        probes.append(v[None, :])
    X = np.concatenate([p for p in probes if len(p)])
    nx = sp._space_norm(T.domain, X)
    X = X[nx > 0] / nx[nx > 0, None]
    vals = T.codomain_norm(T.apply(X))
    i = int(np.argmax(vals)) if len(vals) else 0
    lower = float(vals[i]) if len(vals) else 0.0
    upper = float(T.norm_upper)
    lower = min(lower, upper) if lower <= upper * (1 + 1e-9) + 1e-12 else lower
    return OperatorNormEstimate(lower, upper, X[i].tolist() if len(vals) else None)


def linearity_probe(T: LinearMap, n: int = 100, seed: int = 0, tol: float = 1e-9) -> dict:
    rng = np.random.default_rng(seed)
    d = T.domain.dim
    X, Y = rng.standard_normal((n, d)), rng.standard_normal((n, d))
    alpha = rng.standard_normal((n, 1))
    add = np.abs(np.asarray(T.apply(X + Y)) - np.asarray(T.apply(X)) - np.asarray(T.apply(Y))).max()
    hom = np.abs(np.asarray(T.apply(alpha * X)) -
                 (alpha if np.ndim(T.apply(X)) > 1 else alpha[:, 0]) * np.asarray(T.apply(X))).max()
    return {"additive_error": float(add), "homogeneous_error": float(hom),
            "passed": bool(add <= tol * (1 + np.abs(X).max()) and hom <= tol * (1 + np.abs(X).max()))}


# --------------------------------------------------------------------------
# certificates
# --------------------------------------------------------------------------

def _diam_instance(T: LinearMap, instance: TmsInstance | None) -> TmsInstance:
    return instance if instance is not None else TmsInstance(T.domain, MeasureKind.DIAM)


def ac_from_bounded(T: LinearMap, instance: TmsInstance | None = None,
                    eps_list: Sequence[float] = SPOT_EPS, n_families: int = 10,
                    seed: int = 0, budget: int = 200):
    """Certified(LinearBounded) with delta = eps / (||T|| + 1)."""
    instance = _diam_instance(T, instance)
    est = operator_norm(T, budget, seed)
    rule = BoundedLinearDelta(est.upper)
    f = MapFunction(T)
    checks = spot_check(f, instance, rule, eps_list, n_families, seed)
    return Certified("LinearBounded", {"norm": est.upper, "norm_lower": est.lower},
                     rule, checks, L=est.upper)


def norm_function_check(space: sp.Space, instance: TmsInstance | None = None,
                        eps_list: Sequence[float] = SPOT_EPS, n_families: int = 10, seed: int = 0):
    """The norm is 1-Lipschitz by the reverse triangle inequality."""
    instance = instance if instance is not None else TmsInstance(space, MeasureKind.DIAM)
    f = Builtin("norm", space)
    return certify_ac_lipschitz(1.0, f, instance, eps_list, n_families, seed)


def holder_check(T: HolderFunctional, n_pairs: int = 1000, seed: int = 0) -> dict:
    """|T f - T g| <= ||h||_q ||f - g||_p on random grid-function pairs."""
    rng = np.random.default_rng(seed)
    F = rng.standard_normal((n_pairs, T.domain.dim))
    G = rng.standard_normal((n_pairs, T.domain.dim))
    lhs = np.abs(T.apply(F) - T.apply(G))
    rhs = T.norm_upper * T.domain.norm_of(F - G)
    worst = float((lhs - rhs).max())
    return {"pairs": n_pairs, "max_excess": worst, "passed": worst <= 1e-9}


def holder_functional_check(h: Sequence[float], p: float, q: float | None = None,
                            instance: TmsInstance | None = None,
                            eps_list: Sequence[float] = SPOT_EPS, n_families: int = 10,
                            seed: int = 0, n_pairs: int = 1000):
    """Certified with L = ||h||_q (grid quadrature); h = 0 gives L = 0."""
    h = np.asarray(h, dtype=float).ravel()
    if not np.any(h):
        space = sp.GridFunctionSpace(h.size, "lp", p)
        zero = Builtin("constant", space, 0.0)
        v = certify_ac_lipschitz(0.0, zero, instance or TmsInstance(space, MeasureKind.DIAM),
                                 eps_list, n_families, seed)
        v.params["holder"] = {"pairs": 0, "max_excess": 0.0, "passed": True}
        return v
    T = HolderFunctional(h, p, q)
    instance = _diam_instance(T, instance)
    v = certify_ac_lipschitz(T.norm_upper, MapFunction(T), instance, eps_list, n_families, seed)
    v.params["holder"] = holder_check(T, n_pairs, seed)
    v.params["q"] = T.q
    return v


def composition_ac(T: LinearMap, f: FunctionSpec, f_verdict: Certified,
                   instance: TmsInstance | None = None, eps_list: Sequence[float] = SPOT_EPS,
                   n_families: int = 10, seed: int = 0):
    """T o f with L' = ||T|| L_f and delta(eps) = delta_f(eps / ||T||).

    Returns (composite function, verdict).
    """
    if not isinstance(f_verdict, Certified):
        raise InvalidComposition("f must carry a certificate")
    if f.codim != T.domain.dim:
        raise InvalidComposition(f"f has {f.codim} components, T expects {T.domain.dim}")
    norm = float(T.norm_upper)
    h = Composite("map", [f], T=T)
    if norm == 0.0:
        rule = LinearDelta(0.0)
        L = 0.0
    else:
        rule = ScaledDelta(f_verdict.delta_rule, norm)
        L = None if f_verdict.L is None else norm * f_verdict.L
    checks = []
    if instance is not None:
        checks = spot_check(h, instance, rule, eps_list, n_families, seed)
    kind = "LocallyLipschitz" if L is not None else "Derived"
    return h, Certified(kind, {"norm": norm, "L_f": f_verdict.L}, rule, checks, L=L)


def differentiation_operator(m: int) -> MatrixOnGrid:
    """Forward differences on a sup-normed grid; the norm grows like 2m."""
    D = np.zeros((m - 1, m))
    i = np.arange(m - 1)
    D[i, i], D[i, i + 1] = -float(m), float(m)
    return MatrixOnGrid(D, "sup", "sup")


def differentiation_norms(sizes: Sequence[int] = (4, 8, 16, 32, 64), seed: int = 0) -> list:
    """Norm brackets along a refinement family, to show unbounded growth."""
    out = []
    for m in sizes:
        est = operator_norm(differentiation_operator(m), seed=seed)
        out.append({"m": m, "lower": est.lower, "upper": est.upper})
    return out
