"""Function specifications: builtins, grid-density integrals, linear maps on
a space and algebraic composites.

Every spec is vectorized: ``f(X)`` takes an ``(N, dim)`` array of points and
returns ``(N,)`` (scalar codomain) or ``(N, k)`` (vector codomain) values.
Specs also carry what is known analytically: a Lipschitz constant relative
to the domain metric, monotonicity, exact ranges on intervals.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .. import spaces as sp
from ..errors import DomainError, InsufficientHypotheses, SpecError

BUILTINS = ("identity", "sin", "cos", "square", "sqrt", "x_sin_inv_x", "cantor",
            "projection_k", "constant", "complex_identity", "norm")


class FunctionSpec:
    """Base class. Subclasses implement ``evaluate``."""

    name = "function"
    codim = 1
    continuous = True

    def __init__(self, domain: sp.Space):
        self.domain = domain

    # -- evaluation --------------------------------------------------------
    def evaluate(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, X) -> np.ndarray:
        X = self.domain.normalize(self.domain.as_points(X))
        return self.evaluate(X)

    def scalar(self, x: float) -> float:
        return float(np.asarray(self(np.array([[x]], dtype=float))).ravel()[0])

    # -- analytic knowledge -------------------------------------------------
    def lipschitz(self) -> Optional[float]:
        """Lipschitz constant w.r.t. the domain metric on the whole domain."""
        return None

    def local_lipschitz(self, a: np.ndarray, b: np.ndarray) -> Optional[np.ndarray]:
        """Lipschitz bounds on closed intervals [a_i, b_i] (1-D domains)."""
        L = self.lipschitz()
        return None if L is None else np.full(np.shape(a), L, dtype=float)

    @property
    def monotone(self) -> Optional[str]:
        return None

    @property
    def bound(self) -> Optional[float]:
        """A bound on sup |f| over the domain, when one is known."""
        return None

    def exact_range(self, a: np.ndarray, b: np.ndarray):
        """(min, max) of f over each closed interval [a_i, b_i], or None."""
        if self.monotone and self.codim == 1 and self.continuous:
            fa = self(np.asarray(a, dtype=float)[:, None] if np.ndim(a) else [[a]])
            fb = self(np.asarray(b, dtype=float)[:, None] if np.ndim(b) else [[b]])
            return np.minimum(fa, fb), np.maximum(fa, fb)
        return None

    def exact_oscillation(self, E) -> Optional[float]:
        """Exact oscillation over a non-interval shape, when known."""
        return None

    def ternary_values(self, k: np.ndarray, n: int, a: float, b: float) -> Optional[np.ndarray]:
        """Exact values at a + (b - a) k / 3**n, for functions where floats
        cannot resolve ternary rationals."""
        return None

    def check_domain(self, E) -> None:
        """Raise DomainError when E is not inside the natural domain."""
        return None

    def to_dict(self) -> dict:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name} on {self.domain.space_id}>"


# --------------------------------------------------------------------------
# Cantor function
# --------------------------------------------------------------------------

def _cantor_tables(k: int = 6):
    n = 3 ** k
    val = np.zeros(n)
    stop = np.zeros(n, dtype=bool)
    for g in range(n):
        digits = [(g // 3 ** (k - 1 - i)) % 3 for i in range(k)]
        v = 0.0
        for i, d in enumerate(digits):
            if d == 1:
                v += 2.0 ** -(i + 1)
                stop[g] = True
                break
            v += (d // 2) * 2.0 ** -(i + 1)
        val[g] = v
    return k, val, stop


_CANTOR = _cantor_tables()


def cantor_function(x) -> np.ndarray:
    """Vectorized Cantor staircase on [0, 1], six ternary digits per step."""
    k, val, stop = _CANTOR
    base = 3 ** k
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    out = np.zeros_like(x)
    ones = x >= 1.0
    active = ~ones
    r = np.where(active, x, 0.0)
    scale = 1.0
    for _ in range(6):  # 36 ternary digits exceed double precision
        if not active.any():
            break
        r = r * base
        g = np.minimum(r.astype(np.int64), base - 1)
        r -= g
        out += np.where(active, val[g] * scale, 0.0)
        active &= ~stop[g]
        scale *= 2.0 ** -k
    out[ones] = 1.0
    return out


# --------------------------------------------------------------------------
# builtins
# --------------------------------------------------------------------------

def cantor_ternary(k: np.ndarray, n: int) -> np.ndarray:
    """Cantor function at k / 3**n from the integer ternary digits of k."""
    size, val, stop = _CANTOR
    m = -(-n // size) * size
    if m > 36:
        raise ValueError("at most 36 ternary digits fit in int64")
    k = np.asarray(k, dtype=np.int64)
    out = np.zeros(k.shape)
    full = k >= 3 ** n
    kk = np.where(full, 0, k) * 3 ** (m - n)
    active = ~full
    scale = 1.0
    for j in range(m // size):
        g = (kk // 3 ** (m - size * (j + 1))) % 3 ** size
        out += np.where(active, val[g] * scale, 0.0)
        active &= ~stop[g]
        scale *= 2.0 ** -size
    out[full] = 1.0
    return out


def _interval_of(space: sp.Space):
    if isinstance(space, sp.RealInterval):
        return space.a, space.b
    if isinstance(space, sp.RectifiableCurve):
        return 0.0, space.length
    return None


class Builtin(FunctionSpec):
    """Named builtin function on a domain space.

    ``param`` is the constant value for ``constant`` and the coordinate
    index for ``projection_k``.
    """

    def __init__(self, name: str, domain: sp.Space, param: float | int | None = None):
        if name not in BUILTINS:
            raise SpecError(f"unknown builtin {name!r}; choose from {BUILTINS}")
        super().__init__(domain)
        self.name = name
        self.param = param
        if name == "constant" and param is None:
            self.param = 0.0
        if name == "projection_k":
            self.param = int(param or 0)
            if not isinstance(domain, (sp.EuclideanBox, sp.GridFunctionSpace)) or self.param >= domain.dim:
                raise SpecError("projection_k needs a box domain with a valid coordinate index")
        if name == "complex_identity":
            if not isinstance(domain, sp.Circle):
                raise SpecError("complex_identity maps the circle angle to e^{i theta}")
            self.codim = 2
        if name == "norm" and not domain.normed:
            raise SpecError("norm needs a normed domain")
        self.check_natural_domain()

    # natural domains ---------------------------------------------------
    def check_natural_domain(self):
        iv = _interval_of(self.domain)
        one_d = ("identity", "sin", "cos", "square", "sqrt", "x_sin_inv_x", "cantor")
        if self.name in one_d and iv is None:
            raise SpecError(f"{self.name} needs a 1-D domain")
        if self.name == "sqrt" and iv[0] < 0:
            raise DomainError("sqrt is defined on [0, inf)")
        if self.name == "cantor" and (iv[0] < 0 or iv[1] > 1):
            raise DomainError("the Cantor function is defined on [0, 1]")

    def check_domain(self, E):
        iv = _interval_of(self.domain)
        if iv is None or not isinstance(E, sp.Interval):
            return
        if E.a < iv[0] - 1e-15 or E.b > iv[1] + 1e-15:
            raise DomainError(f"{E} is outside the domain {self.domain.space_id}")

    # evaluation ----------------------------------------------------------
    def evaluate(self, X):
        n = self.name
        if n == "projection_k":
            return X[:, self.param].copy()
        if n == "constant":
            return np.full(len(X), float(self.param))
        if n == "complex_identity":
            t = X[:, 0]
            return np.stack([np.cos(t), np.sin(t)], axis=1)
        if n == "norm":
            if isinstance(self.domain, sp.GridFunctionSpace):
                return self.domain.norm_of(X)
            if isinstance(self.domain, sp.EuclideanBox):
                return sp.vector_norm(X, self.domain.norm)
            return np.abs(X[:, 0])
        x = X[:, 0]
        if n == "identity":
            return x.copy()
        if n == "sin":
            return np.sin(x)
        if n == "cos":
            return np.cos(x)
        if n == "square":
            return x * x
        if n == "sqrt":
            return np.sqrt(np.maximum(x, 0.0))
        if n == "x_sin_inv_x":
            out = np.zeros_like(x)
            nz = x != 0
            out[nz] = x[nz] * np.sin(1.0 / x[nz])
            return out
        if n == "cantor":
            return cantor_function(x)
        raise SpecError(n)

    # analytic facts ------------------------------------------------------
    def lipschitz(self):
        n = self.name
        if n in ("identity", "sin", "cos", "projection_k", "norm"):
            return 1.0
        if n == "complex_identity":
            return 1.0  # chord length never exceeds arc length
        if n == "constant":
            return 0.0
        iv = _interval_of(self.domain)
        if n == "square" and iv and all(map(math.isfinite, iv)):
            return 2.0 * max(abs(iv[0]), abs(iv[1]))
        if n == "sqrt" and iv and iv[0] > 0:
            return 0.5 / math.sqrt(iv[0])
        if n == "x_sin_inv_x" and iv and (iv[0] > 0 or iv[1] < 0):
            return 1.0 + 1.0 / min(abs(iv[0]), abs(iv[1]))
        return None

    def local_lipschitz(self, a, b):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        n = self.name
        if n == "square":
            return 2.0 * np.maximum(np.abs(a), np.abs(b))
        if n == "sqrt":
            with np.errstate(divide="ignore"):
                return np.where(a > 0, 0.5 / np.sqrt(np.maximum(a, 1e-300)), np.inf)
        if n == "x_sin_inv_x":
            m = np.where((a <= 0) & (b >= 0), 0.0, np.minimum(np.abs(a), np.abs(b)))
            with np.errstate(divide="ignore"):
                return np.where(m > 0, 1.0 + 1.0 / np.maximum(m, 1e-300), np.inf)
        if n == "cantor":
            return np.full(a.shape, np.inf)
        return super().local_lipschitz(a, b)

    @property
    def monotone(self):
        if self.name in ("identity", "sqrt", "cantor", "constant"):
            return "increasing"
        iv = _interval_of(self.domain)
        if self.name == "square" and iv and iv[0] >= 0:
            return "increasing"
        if self.name == "square" and iv and iv[1] <= 0:
            return "decreasing"
        return None

    @property
    def bound(self):
        if self.name in ("sin", "cos", "complex_identity"):
            return 1.0
        if self.name == "cantor":
            return 1.0
        if self.name == "constant":
            return abs(float(self.param))
        iv = _interval_of(self.domain)
        if iv and all(map(math.isfinite, iv)):
            m = max(abs(iv[0]), abs(iv[1]))
            return {"identity": m, "square": m * m, "sqrt": math.sqrt(m),
                    "x_sin_inv_x": m}.get(self.name)
        return None

    def exact_range(self, a, b):
        a = np.atleast_1d(np.asarray(a, dtype=float))
        b = np.atleast_1d(np.asarray(b, dtype=float))
        n = self.name
        if n in ("sin", "cos"):
            f = np.sin if n == "sin" else np.cos
            peak = math.pi / 2 if n == "sin" else 0.0
            fa, fb = f(a), f(b)
            lo, hi = np.minimum(fa, fb), np.maximum(fa, fb)
            kmax = np.ceil((a - peak) / (2 * math.pi))
            hi = np.where(peak + 2 * math.pi * kmax <= b, 1.0, hi)
            kmin = np.ceil((a - peak - math.pi) / (2 * math.pi))
            lo = np.where(peak + math.pi + 2 * math.pi * kmin <= b, -1.0, lo)
            return lo, hi
        if n == "square":
            lo = np.where((a <= 0) & (b >= 0), 0.0, np.minimum(a * a, b * b))
            return lo, np.maximum(a * a, b * b)
        if n == "x_sin_inv_x":
            return None
        if self.monotone and self.codim == 1:
            fa = self.evaluate(a[:, None])
            fb = self.evaluate(b[:, None])
            return np.minimum(fa, fb), np.maximum(fa, fb)
        return None

    def exact_oscillation(self, E):
        n = self.name
        E = sp.canonical(self.domain, E)
        if n == "constant":
            return 0.0
        if n == "projection_k":
            if isinstance(E, sp.Box):
                lo, hi = E.bounds[self.param]
                return hi - lo
            if isinstance(E, sp.Ball):
                return 2.0 * E.radius
        if n == "complex_identity" and isinstance(E, sp.Arc):
            return 2.0 * math.sin(min(E.length, math.pi) / 2.0)
        if n == "norm" and isinstance(E, sp.Ball):
            c = float(np.asarray(self.evaluate(np.asarray(E.center, dtype=float)[None, :]))[0])
            return min(2.0 * E.radius, c + E.radius - max(0.0, c - E.radius))
        return None

    def ternary_values(self, k, n, a, b):
        if self.name == "cantor" and a == 0.0 and b == 1.0 and n <= 36:
            return cantor_ternary(k, n)
        return None

    # oscillatory structure -----------------------------------------------
    def extremum_points(self, delta: float, eps: float, max_points: int = 2_000_000):
        """Consecutive extremum abscissae of x sin(1/x) below ``delta``.

        x_k = 2 / ((2k + 1) pi) alternate between the envelopes +x and -x.
        Returns a decreasing array starting at the first x_k < delta, long
        enough that the sum of x_k + x_{k+1} reaches ``eps`` when possible.
        """
        if self.name != "x_sin_inv_x":
            return None
        iv = _interval_of(self.domain)
        if iv is None or not (iv[0] <= 0 < iv[1]):
            return None
        N = int(math.floor(2.0 / (delta * math.pi) - 0.5)) + 1
        while 2.0 / ((2 * N + 1) * math.pi) >= min(delta, iv[1]):
            N += 1
        # sum_{k>=N}^{K} 4/((2k+1) pi) ~ (2/pi) log(K/N); solve and pad
        ratio = math.exp(eps * math.pi / 2.0 * 1.05) + 0.05
        K = min(int(N * ratio) + 8, N + max_points)
        k = np.arange(N, K + 1, dtype=float)
        return 2.0 / ((2.0 * k + 1.0) * math.pi)

    def to_dict(self):
        d = {"kind": "builtin", "name": self.name, "domain": self.domain.to_dict()}
        if self.name in ("constant", "projection_k"):
            d["param"] = self.param
        return d


# --------------------------------------------------------------------------
# integral functions with piecewise-constant density
# --------------------------------------------------------------------------

class GridDensityIntegral(FunctionSpec):
    """F built from a density that is constant on the cells of a grid over
    ``[lo, hi]`` and zero outside.

    mode ``symmetric``:  F(x) = integral of f over [-|x|, |x|]
    mode ``cumulative``: F(x) = integral of f over (-inf, x]

    Quadrature is exact for such densities, so F is piecewise linear.
    """

    name = "grid_density_integral"

    def __init__(self, density: Sequence[float], lo: float = 0.0, hi: float = 1.0,
                 mode: str = "cumulative", domain: sp.Space | None = None):
        dens = np.asarray(density, dtype=float).ravel()
        if dens.size < 1 or not np.all(np.isfinite(dens)):
            raise SpecError("density samples must be finite")
        if not lo < hi:
            raise SpecError("density grid needs lo < hi")
        if mode not in ("symmetric", "cumulative"):
            raise SpecError("mode must be 'symmetric' or 'cumulative'")
        super().__init__(domain or sp.RealInterval())
        if _interval_of(self.domain) is None:
            raise SpecError("integral functions live on 1-D domains")
        self.density = dens
        self.lo, self.hi, self.mode = float(lo), float(hi), mode
        self.edges = np.linspace(self.lo, self.hi, dens.size + 1)
        self.h = (self.hi - self.lo) / dens.size
        self.cum = np.concatenate([[0.0], np.cumsum(dens * self.h)])

    @property
    def l1_norm(self) -> float:
        return float(np.abs(self.density).sum() * self.h)

    def G(self, x: np.ndarray) -> np.ndarray:
        """Integral of the density over (-inf, x]."""
        return np.interp(x, self.edges, self.cum)

    def evaluate(self, X):
        x = X[:, 0]
        if self.mode == "cumulative":
            return self.G(x)
        r = np.abs(x)
        return self.G(r) - self.G(-r)

    def lipschitz(self):
        m = float(np.abs(self.density).max())
        return m if self.mode == "cumulative" else 2.0 * m

    @property
    def monotone(self):
        if self.mode == "cumulative":
            if np.all(self.density >= 0):
                return "increasing"
            if np.all(self.density <= 0):
                return "decreasing"
        return None

    def _breakpoints(self):
        e = self.edges
        if self.mode == "cumulative":
            return e
        return np.unique(np.concatenate([np.abs(e), -np.abs(e), [0.0]]))

    def exact_range(self, a, b):
        a = np.atleast_1d(np.asarray(a, dtype=float))
        b = np.atleast_1d(np.asarray(b, dtype=float))
        if self.monotone:
            fa, fb = self.evaluate(a[:, None]), self.evaluate(b[:, None])
            return np.minimum(fa, fb), np.maximum(fa, fb)
        bp = self._breakpoints()
        vals = self.evaluate(bp[:, None])
        fa, fb = self.evaluate(a[:, None]), self.evaluate(b[:, None])
        lo, hi = np.minimum(fa, fb), np.maximum(fa, fb)
        # piecewise linear: extremes sit at endpoints or interior breakpoints
        i0 = np.searchsorted(bp, a, side="right")
        i1 = np.searchsorted(bp, b, side="left")
        for j in np.flatnonzero(i1 > i0):
            seg = vals[i0[j]:i1[j]]
            lo[j] = min(lo[j], seg.min())
            hi[j] = max(hi[j], seg.max())
        return lo, hi

    def tail(self, p: float) -> float:
        """Integral of | |f| - min(|f|, p) |, the truncation tail at level p."""
        return float(np.maximum(np.abs(self.density) - p, 0.0).sum() * self.h)

    @property
    def bound(self):
        return self.l1_norm

    def to_dict(self):
        return {"kind": "grid_density_integral", "density": [float(v) for v in self.density],
                "lo": self.lo, "hi": self.hi, "mode": self.mode, "domain": self.domain.to_dict()}


# --------------------------------------------------------------------------
# linear functionals on a space
# --------------------------------------------------------------------------

class LinearOnSpace(FunctionSpec):
    """x -> <a, x> on a box or grid function space (grid quadrature weight
    included on grid spaces)."""

    name = "linear"

    def __init__(self, coefficients: Sequence[float], domain: sp.Space):
        super().__init__(domain)
        a = np.asarray(coefficients, dtype=float).ravel()
        if a.size != domain.dim:
            raise SpecError(f"{a.size} coefficients for a {domain.dim}-dimensional domain")
        self.a = a

    @property
    def weight(self) -> float:
        return self.domain.step if isinstance(self.domain, sp.GridFunctionSpace) else 1.0

    def evaluate(self, X):
        return self.weight * (X @ self.a)

    def lipschitz(self):
        return dual_norm(self.a, self.domain)

    def exact_oscillation(self, E):
        E = sp.canonical(self.domain, E)
        if isinstance(E, sp.Ball):
            return 2.0 * E.radius * self.lipschitz()
        if isinstance(E, sp.Box):
            w = np.array([hi - lo for lo, hi in E.bounds])
            return float(np.abs(self.weight * self.a) @ w)
        return None

    def to_dict(self):
        return {"kind": "linear", "coefficients": [float(v) for v in self.a],
                "domain": self.domain.to_dict()}


def dual_norm(a: np.ndarray, space: sp.Space) -> float:
    """Operator norm of x -> <a, x> (with grid weight) on a normed space."""
    a = np.asarray(a, dtype=float)
    if isinstance(space, sp.GridFunctionSpace):
        w = space.step
        norm, p = space.norm, space.p
        if norm == "sup":
            return float(w * np.abs(a).sum())
        if norm == "l1":
            return float(np.abs(a).max())
        q = 2.0 if norm == "l2" else p / (p - 1.0)
        pp = 2.0 if norm == "l2" else p
        return float(w ** (1.0 - 1.0 / pp) * (np.abs(a) ** q).sum() ** (1.0 / q))
    if isinstance(space, sp.EuclideanBox):
        return float(np.abs(a).sum()) if space.norm == "sup" else float(np.linalg.norm(a))
    return float(np.abs(a).sum())


# --------------------------------------------------------------------------
# composites
# --------------------------------------------------------------------------

COMPOSITE_OPS = ("sum", "scale", "product", "reciprocal", "abs", "shift", "map")


class Composite(FunctionSpec):
    """Algebraic combination of specs on a shared domain.

    ``params``: ``alpha`` (scale), ``c`` (shift), ``M`` (product: common
    bound on |f| and |g|), ``K`` (reciprocal: lower bound on |f|), ``T``
    (map: a callable linear map with attribute ``norm_upper``).
    """

    name = "composite"

    def __init__(self, op: str, children: Sequence[FunctionSpec], **params):
        if op not in COMPOSITE_OPS:
            raise SpecError(f"unknown composite op {op!r}")
        children = list(children)
        arity = 2 if op in ("sum", "product") else 1
        if len(children) != arity:
            raise SpecError(f"{op} takes {arity} operand(s)")
        super().__init__(children[0].domain)
        self.op, self.children, self.params = op, children, params
        self.name = f"{op}({', '.join(c.name for c in children)})"
        if op == "product" and "M" not in params:
            raise InsufficientHypotheses("product needs a declared bound M on |f| and |g|")
        if op == "reciprocal" and not params.get("K", 0) > 0:
            raise InsufficientHypotheses("reciprocal needs a declared K > 0 with |f| >= K")
        if op == "map":
            self.codim = int(getattr(params["T"], "codim", 1))
        else:
            self.codim = children[0].codim
        self.continuous = all(c.continuous for c in children)

    def evaluate(self, X):
        vals = [c.evaluate(X) for c in self.children]
        op, p = self.op, self.params
        if op == "sum":
            return vals[0] + vals[1]
        if op == "scale":
            return float(p["alpha"]) * vals[0]
        if op == "product":
            return vals[0] * vals[1]
        if op == "reciprocal":
            return 1.0 / vals[0]
        if op == "abs":
            v = vals[0]
            return np.abs(v) if v.ndim == 1 else np.linalg.norm(v, axis=1)
        if op == "shift":
            return vals[0] + float(p["c"])
        if op == "map":
            v = vals[0]
            return p["T"].apply(v[:, None] if v.ndim == 1 else v)
        raise SpecError(op)

    def factor(self) -> tuple[str, float]:
        """How oscillations (and Lipschitz constants) combine."""
        op, p = self.op, self.params
        if op == "sum":
            return "add", 1.0
        if op == "scale":
            return "mul", abs(float(p["alpha"]))
        if op == "product":
            return "add", float(p["M"])
        if op == "reciprocal":
            return "mul", 1.0 / float(p["K"]) ** 2
        if op in ("abs", "shift"):
            return "mul", 1.0
        if op == "map":
            return "mul", float(p["T"].norm_upper)
        raise SpecError(op)

    def lipschitz(self):
        Ls = [c.lipschitz() for c in self.children]
        if any(L is None for L in Ls):
            return None
        how, k = self.factor()
        return k * sum(Ls) if how == "add" else k * Ls[0]

    @property
    def monotone(self):
        if self.op in ("shift",) or (self.op == "scale" and float(self.params["alpha"]) > 0):
            return self.children[0].monotone
        return None

    @property
    def bound(self):
        b = [c.bound for c in self.children]
        if any(v is None for v in b):
            return None
        op = self.op
        if op == "sum":
            return b[0] + b[1]
        if op == "scale":
            return abs(float(self.params["alpha"])) * b[0]
        if op == "product":
            return b[0] * b[1]
        if op == "reciprocal":
            return 1.0 / float(self.params["K"])
        if op == "abs":
            return b[0]
        if op == "shift":
            return b[0] + abs(float(self.params["c"]))
        return None

    def check_domain(self, E):
        for c in self.children:
            c.check_domain(E)

    def to_dict(self):
        d = {"kind": "composite", "op": self.op,
             "children": [c.to_dict() for c in self.children]}
        for k, v in self.params.items():
            d[k] = v.to_dict() if hasattr(v, "to_dict") else v
        return d


# --------------------------------------------------------------------------
# construction from JSON-like dicts
# --------------------------------------------------------------------------

def function_from_dict(d: dict, default_domain: sp.Space | None = None) -> FunctionSpec:
    kind = d.get("kind", "builtin")
    domain = sp.space_from_dict(d["domain"]) if "domain" in d else default_domain
    if kind == "builtin":
        name = d["name"]
        if domain is None:
            domain = natural_domain(name)
        return Builtin(name, domain, d.get("param"))
    if kind == "grid_density_integral":
        return GridDensityIntegral(d["density"], d.get("lo", 0.0), d.get("hi", 1.0),
                                   d.get("mode", "cumulative"), domain)
    if kind == "linear":
        if domain is None:
            raise SpecError("linear functions need a domain")
        return LinearOnSpace(d["coefficients"], domain)
    if kind == "composite":
        children = [function_from_dict(c, domain) for c in d["children"]]
        params = {k: v for k, v in d.items() if k in ("alpha", "c", "M", "K")}
        return Composite(d["op"], children, **params)
    raise SpecError(f"unknown function kind {kind!r}")


def natural_domain(name: str) -> sp.Space:
    if name == "sqrt":
        return sp.RealInterval(0.0, math.inf, closed_left=True)
    if name == "cantor":
        return sp.RealInterval(0.0, 1.0, True, True)
    if name == "complex_identity":
        return sp.Circle("arc")
    if name in ("projection_k", "norm"):
        return sp.EuclideanBox.plane()
    return sp.RealInterval()


def builtin(name: str, domain: sp.Space | None = None, param=None) -> Builtin:
    return Builtin(name, domain if domain is not None else natural_domain(name), param)
