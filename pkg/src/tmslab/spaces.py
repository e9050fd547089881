"""Desk-scale metric and normed spaces plus descriptors for their open sets.

Points are plain float arrays. A batch of points has shape ``(N, dim)``; a
single point may be given as a scalar (1-D spaces) or a length-``dim``
sequence. Circle points are angles normalized to ``[0, 2*pi)``; points of a
rectifiable curve are arclength parameters.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import InvalidPoint, InvalidScale, InvalidSpace, UnsupportedShape

TWO_PI = 2.0 * math.pi
INF = math.inf


# --------------------------------------------------------------------------
# norms
# --------------------------------------------------------------------------

def vector_norm(x: np.ndarray, norm: str, p: float = 2.0, weight: float = 1.0) -> np.ndarray:
    """Row-wise norm of ``x`` (last axis). ``weight`` is the quadrature step
    used by grid function spaces; it is 1 for plain coordinate spaces."""
    x = np.asarray(x, dtype=float)
    a = np.abs(x)
    if norm == "sup":
        return a.max(axis=-1)
    if norm == "l1":
        return weight * a.sum(axis=-1)
    if norm == "l2":
        return np.sqrt(weight * (a * a).sum(axis=-1))
    if norm == "lp":
        return (weight * (a ** p).sum(axis=-1)) ** (1.0 / p)
    raise InvalidSpace(f"unknown norm {norm!r}")


def dual_exponent(norm: str, p: float = 2.0) -> tuple[str, float]:
    if norm == "sup":
        return "l1", 1.0
    if norm == "l1":
        return "sup", INF
    if norm == "l2":
        return "l2", 2.0
    if norm == "lp":
        q = p / (p - 1.0)
        return "lp", q
    raise InvalidSpace(f"unknown norm {norm!r}")


# --------------------------------------------------------------------------
# spaces
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Point:
    space_id: str
    coords: tuple


class Space:
    """Common behaviour of the shipped space kinds."""

    kind = "abstract"
    separable = True
    normed = False

    @property
    def dim(self) -> int:
        raise NotImplementedError

    @property
    def space_id(self) -> str:
        return self.kind

    def as_points(self, x) -> np.ndarray:
        arr = np.asarray(x.coords if isinstance(x, Point) else x, dtype=float)
        if arr.ndim == 0:
            arr = arr.reshape(1, 1)
        elif arr.ndim == 1:
            if self.dim == 1:
                arr = arr.reshape(-1, 1)
            else:
                arr = arr.reshape(1, -1)
        if arr.shape[-1] != self.dim:
            raise InvalidPoint(
                f"{self.space_id} expects {self.dim} coordinates, got {arr.shape[-1]}")
        return arr

    def point(self, *coords) -> Point:
        arr = self.as_points(np.asarray(coords, dtype=float).ravel())[0]
        if not bool(self.in_space(arr[None, :])[0]):
            raise InvalidPoint(f"{tuple(arr)} is not a point of {self.space_id}")
        return Point(self.space_id, tuple(float(c) for c in self.normalize(arr[None, :])[0]))

    def normalize(self, pts: np.ndarray) -> np.ndarray:
        return pts

    def in_space(self, pts: np.ndarray) -> np.ndarray:
        return np.ones(len(pts), dtype=bool)

    def dist(self, P: np.ndarray, Q: np.ndarray) -> np.ndarray:
        """Row-wise distances between two equally shaped batches."""
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class RealInterval(Space):
    """An interval of the real line; ``RealInterval()`` is the whole line."""

    a: float = -INF
    b: float = INF
    closed_left: bool = False
    closed_right: bool = False
    kind = "real_interval"
    normed = True

    def __post_init__(self):
        if not self.a < self.b:
            raise InvalidSpace("RealInterval requires a < b")
        if math.isinf(self.a) and self.closed_left or math.isinf(self.b) and self.closed_right:
            raise InvalidSpace("an infinite endpoint cannot be closed")

    @property
    def dim(self) -> int:
        return 1

    @property
    def space_id(self) -> str:
        lb = "[" if self.closed_left else "("
        rb = "]" if self.closed_right else ")"
        return f"real_interval{lb}{self.a:g},{self.b:g}{rb}"

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.a) and math.isfinite(self.b)

    def in_space(self, pts):
        x = pts[:, 0]
        lo = x >= self.a if self.closed_left else x > self.a
        hi = x <= self.b if self.closed_right else x < self.b
        return lo & hi

    def dist(self, P, Q):
        return np.abs(P[:, 0] - Q[:, 0])

    def to_dict(self):
        return {"kind": self.kind, "a": self.a, "b": self.b,
                "closed_left": self.closed_left, "closed_right": self.closed_right}


@dataclass(frozen=True)
class EuclideanBox(Space):
    """An open axis-aligned box of R^n with the l2 or sup norm.

    Infinite bounds are allowed, so ``EuclideanBox.plane()`` is all of R^2.
    """

    bounds: tuple = ((-INF, INF), (-INF, INF))
    norm: str = "l2"
    kind = "euclidean_box"
    normed = True

    def __post_init__(self):
        b = tuple((float(lo), float(hi)) for lo, hi in self.bounds)
        object.__setattr__(self, "bounds", b)
        if not b:
            raise InvalidSpace("EuclideanBox needs at least one axis")
        if any(not lo < hi for lo, hi in b):
            raise InvalidSpace("EuclideanBox bounds require lo < hi on every axis")
        if self.norm not in ("l2", "sup"):
            raise InvalidSpace("EuclideanBox norm must be 'l2' or 'sup'")

    @classmethod
    def rn(cls, n: int, norm: str = "l2") -> "EuclideanBox":
        return cls(tuple((-INF, INF) for _ in range(n)), norm)

    @classmethod
    def plane(cls, norm: str = "l2") -> "EuclideanBox":
        return cls.rn(2, norm)

    @property
    def dim(self) -> int:
        return len(self.bounds)

    @property
    def space_id(self) -> str:
        return f"euclidean_box{self.dim}d[{self.norm}]"

    @property
    def bounded(self) -> bool:
        return all(math.isfinite(lo) and math.isfinite(hi) for lo, hi in self.bounds)

    def in_space(self, pts):
        lo = np.array([b[0] for b in self.bounds])
        hi = np.array([b[1] for b in self.bounds])
        return np.all((pts > lo) & (pts < hi), axis=1)

    def dist(self, P, Q):
        return vector_norm(P - Q, self.norm)

    def to_dict(self):
        return {"kind": self.kind, "bounds": [list(b) for b in self.bounds], "norm": self.norm}


@dataclass(frozen=True)
class Circle(Space):
    """The unit circle, with the shortest-arc metric or the chordal one."""

    metric: str = "arc"
    kind = "circle"

    def __post_init__(self):
        if self.metric not in ("arc", "chord"):
            raise InvalidSpace("Circle metric must be 'arc' or 'chord'")

    @property
    def dim(self) -> int:
        return 1

    @property
    def space_id(self) -> str:
        return f"circle[{self.metric}]"

    bounded = True

    def normalize(self, pts):
        return np.mod(pts, TWO_PI)

    def dist(self, P, Q):
        d = np.mod(np.abs(P[:, 0] - Q[:, 0]), TWO_PI)
        arc = np.minimum(d, TWO_PI - d)
        if self.metric == "arc":
            return arc
        return 2.0 * np.sin(arc / 2.0)

    def arc_to_metric(self, arc_len):
        arc_len = np.minimum(arc_len, math.pi)
        if self.metric == "arc":
            return arc_len
        return 2.0 * np.sin(arc_len / 2.0)

    def embed(self, pts):
        t = np.asarray(pts, dtype=float).reshape(-1)
        return np.stack([np.cos(t), np.sin(t)], axis=1)

    def to_dict(self):
        return {"kind": self.kind, "metric": self.metric}


@dataclass(frozen=True, eq=False)
class RectifiableCurve(Space):
    """A planar polyline parametrized by arclength.

    Distance between two curve points is the difference of their arclength
    parameters, so the curve is isometric to ``[0, length]``.
    """

    samples: tuple = ((0.0, 0.0), (1.0, 0.0))
    kind = "rectifiable_curve"
    normed = False
    arclength: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        pts = np.asarray(self.samples, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 2:
            raise InvalidSpace("RectifiableCurve needs at least two planar samples")
        seg = np.sqrt(((pts[1:] - pts[:-1]) ** 2).sum(axis=1))
        if np.any(seg <= 0):
            raise InvalidSpace("consecutive curve samples must differ")
        object.__setattr__(self, "samples", tuple(map(tuple, pts)))
        object.__setattr__(self, "arclength", np.concatenate([[0.0], np.cumsum(seg)]))

    @property
    def dim(self) -> int:
        return 1

    @property
    def length(self) -> float:
        return float(self.arclength[-1])

    @property
    def space_id(self) -> str:
        return f"rectifiable_curve[L={self.length:.6g}]"

    bounded = True

    def in_space(self, pts):
        return (pts[:, 0] >= 0.0) & (pts[:, 0] <= self.length)

    def dist(self, P, Q):
        return np.abs(P[:, 0] - Q[:, 0])

    def embed(self, pts):
        s = np.asarray(pts, dtype=float).reshape(-1)
        xy = np.asarray(self.samples)
        return np.stack([np.interp(s, self.arclength, xy[:, 0]),
                         np.interp(s, self.arclength, xy[:, 1])], axis=1)

    def to_dict(self):
        return {"kind": self.kind, "samples": [list(p) for p in self.samples]}


@dataclass(frozen=True)
class GridFunctionSpace(Space):
    """Functions on [0, 1] sampled at the midpoints of an ``m``-cell grid.

    Integral norms use the midpoint rule with step ``1/m``.
    """

    m: int = 16
    norm: str = "sup"
    p: float = 2.0
    kind = "grid_function_space"
    normed = True

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 2:
            raise InvalidSpace("GridFunctionSpace requires an integer m >= 2")
        if self.norm not in ("sup", "l1", "l2", "lp"):
            raise InvalidSpace("grid norm must be sup, l1, l2 or lp")
        if self.norm == "lp" and not self.p > 1:
            raise InvalidSpace("lp requires p > 1")

    @property
    def dim(self) -> int:
        return int(self.m)

    @property
    def step(self) -> float:
        return 1.0 / self.m

    @property
    def grid(self) -> np.ndarray:
        return (np.arange(self.m) + 0.5) / self.m

    @property
    def space_id(self) -> str:
        tag = f"l{self.p:g}" if self.norm == "lp" else self.norm
        return f"grid_function_space[m={self.m},{tag}]"

    bounded = False

    def norm_of(self, x):
        return vector_norm(x, self.norm, self.p, self.step)

    def dist(self, P, Q):
        return self.norm_of(P - Q)

    def to_dict(self):
        d = {"kind": self.kind, "m": int(self.m), "norm": self.norm}
        if self.norm == "lp":
            d["p"] = self.p
        return d


def space_from_dict(d: dict) -> Space:
    kind = d.get("kind")
    if kind == "real_interval":
        return RealInterval(float(d.get("a", -INF)), float(d.get("b", INF)),
                            bool(d.get("closed_left", False)), bool(d.get("closed_right", False)))
    if kind == "euclidean_box":
        if "bounds" in d:
            return EuclideanBox(tuple(tuple(b) for b in d["bounds"]), d.get("norm", "l2"))
        return EuclideanBox.rn(int(d.get("n", 2)), d.get("norm", "l2"))
    if kind == "circle":
        return Circle(d.get("metric", "arc"))
    if kind == "rectifiable_curve":
        return RectifiableCurve(tuple(tuple(p) for p in d["samples"]))
    if kind == "grid_function_space":
        return GridFunctionSpace(int(d["m"]), d.get("norm", "sup"), float(d.get("p", 2.0)))
    raise InvalidSpace(f"unknown space kind {kind!r}")


# --------------------------------------------------------------------------
# open set descriptors
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Interval:
    a: float
    b: float
    connected = True

    def __post_init__(self):
        if not self.a < self.b:
            raise UnsupportedShape("Interval requires a < b")


@dataclass(frozen=True)
class Arc:
    """The open arc swept counterclockwise from ``start`` to ``end``.

    ``end - start`` may be up to 2*pi; a length-2*pi arc is the circle minus
    the point ``start``.
    """

    start: float
    end: float
    connected = True

    def __post_init__(self):
        if not 0 < self.length <= TWO_PI + 1e-15:
            raise UnsupportedShape("Arc length must lie in (0, 2*pi]")

    @property
    def length(self) -> float:
        d = self.end - self.start
        if d > TWO_PI:
            return TWO_PI
        return d if d > 0 else d + TWO_PI


@dataclass(frozen=True)
class Ball:
    center: tuple
    radius: float
    connected = True

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.center, dtype=float))
        object.__setattr__(self, "center", tuple(float(v) for v in c))
        if not self.radius > 0:
            raise UnsupportedShape("Ball radius must be positive")


@dataclass(frozen=True)
class Box:
    bounds: tuple
    connected = True

    def __post_init__(self):
        b = tuple((float(lo), float(hi)) for lo, hi in self.bounds)
        object.__setattr__(self, "bounds", b)
        if any(not lo < hi for lo, hi in b):
            raise UnsupportedShape("Box requires lo < hi on every axis")


@dataclass(frozen=True)
class Segment:
    """The straight segment between two points, endpoints excluded.

    Not open; it exists to describe connected null sets such as a line piece
    in the plane.
    """

    start: tuple
    end: tuple
    connected = True

    def __post_init__(self):
        object.__setattr__(self, "start", tuple(float(v) for v in np.atleast_1d(self.start)))
        object.__setattr__(self, "end", tuple(float(v) for v in np.atleast_1d(self.end)))
        if self.start == self.end:
            raise UnsupportedShape("Segment endpoints must differ")


@dataclass(frozen=True)
class Singleton:
    point: tuple
    connected = True

    def __post_init__(self):
        object.__setattr__(self, "point", tuple(float(v) for v in np.atleast_1d(self.point)))


@dataclass(frozen=True)
class Empty:
    connected = True


@dataclass(frozen=True)
class Hull:
    """Open convex hull of ``parts`` widened by ``pad``.

    Used as a cover element. On the circle it stands for the shortest arc
    covering the parts; on 1-D spaces it is the spanning interval.
    """

    parts: tuple
    pad: float = 0.0
    connected = True


@dataclass(frozen=True)
class FiniteDisjointUnion:
    parts: tuple

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(p for p in self.parts if not isinstance(p, Empty)))

    @property
    def connected(self) -> bool:
        return len(self.parts) <= 1


OpenSet = Union[Interval, Arc, Ball, Box, Segment, Singleton, Empty, Hull, FiniteDisjointUnion]
OPEN_SHAPES = (Interval, Arc, Ball, Box, FiniteDisjointUnion, Empty, Hull)


def is_open(s) -> bool:
    if isinstance(s, FiniteDisjointUnion):
        return all(is_open(p) for p in s.parts)
    return isinstance(s, OPEN_SHAPES)


def is_connected(s) -> bool:
    return bool(s.connected)


def parts_of(s) -> tuple:
    if isinstance(s, FiniteDisjointUnion):
        return s.parts
    if isinstance(s, Empty):
        return ()
    return (s,)


def union(*sets) -> OpenSet:
    parts = [p for s in sets for p in parts_of(s)]
    if not parts:
        return Empty()
    if len(parts) == 1:
        return parts[0]
    return FiniteDisjointUnion(tuple(parts))


def shape_to_dict(s) -> dict:
    if isinstance(s, Interval):
        return {"shape": "interval", "a": s.a, "b": s.b}
    if isinstance(s, Arc):
        return {"shape": "arc", "start": s.start, "end": s.end}
    if isinstance(s, Ball):
        return {"shape": "ball", "center": list(s.center), "radius": s.radius}
    if isinstance(s, Box):
        return {"shape": "box", "bounds": [list(b) for b in s.bounds]}
    if isinstance(s, Segment):
        return {"shape": "segment", "start": list(s.start), "end": list(s.end)}
    if isinstance(s, Singleton):
        return {"shape": "singleton", "point": list(s.point)}
    if isinstance(s, Empty):
        return {"shape": "empty"}
    if isinstance(s, FiniteDisjointUnion):
        return {"shape": "union", "parts": [shape_to_dict(p) for p in s.parts]}
    if isinstance(s, Hull):
        return {"shape": "hull", "pad": s.pad, "parts": [shape_to_dict(p) for p in s.parts]}
    raise UnsupportedShape(f"cannot serialize {s!r}")


def shape_from_dict(d: dict) -> OpenSet:
    kind = d.get("shape")
    if kind == "interval":
        return Interval(float(d["a"]), float(d["b"]))
    if kind == "arc":
        return Arc(float(d["start"]), float(d["end"]))
    if kind == "ball":
        return Ball(tuple(np.atleast_1d(d["center"])), float(d["radius"]))
    if kind == "box":
        return Box(tuple(tuple(b) for b in d["bounds"]))
    if kind == "segment":
        return Segment(tuple(d["start"]), tuple(d["end"]))
    if kind == "singleton":
        return Singleton(tuple(np.atleast_1d(d["point"])))
    if kind == "empty":
        return Empty()
    if kind == "union":
        return FiniteDisjointUnion(tuple(shape_from_dict(p) for p in d["parts"]))
    if kind == "hull":
        return Hull(tuple(shape_from_dict(p) for p in d["parts"]), float(d.get("pad", 0.0)))
    raise UnsupportedShape(f"unknown shape {kind!r}")


# --------------------------------------------------------------------------
# canonical forms
# --------------------------------------------------------------------------

def _one_dimensional(space) -> bool:
    return isinstance(space, (RealInterval, RectifiableCurve))


def canonical(space: Space, s):
    """Rewrite a shape into the native form for ``space``.

    Balls become intervals on 1-D spaces and arcs on the circle; sup-norm
    balls of a box space become boxes.
    """
    if isinstance(s, FiniteDisjointUnion):
        return FiniteDisjointUnion(tuple(canonical(space, p) for p in s.parts))
    if isinstance(s, Hull):
        parts = tuple(canonical(space, p) for p in s.parts)
        if _one_dimensional(space):
            bounds = [_interval_bounds(p) for p in parts]
            return Interval(min(b[0] for b in bounds) - s.pad, max(b[1] for b in bounds) + s.pad)
        if isinstance(space, Circle):
            arc = covering_arc(parts)
            if arc is None:
                raise UnsupportedShape("the parts wrap the whole circle; no single arc covers them")
            pad = _circle_radius_to_arc(space, s.pad) if s.pad > 0 else 0.0
            if arc.length + 2 * pad >= TWO_PI:
                return Arc(arc.start, arc.start + TWO_PI)
            return Arc(arc.start - pad, arc.end + pad)
        if len(parts) == 1 and s.pad == 0 and isinstance(parts[0], (Ball, Box, Interval, Arc)):
            return parts[0]
        return Hull(parts, s.pad)
    if isinstance(s, Ball):
        if _one_dimensional(space):
            c = s.center[0]
            return Interval(c - s.radius, c + s.radius)
        if isinstance(space, Circle):
            c = s.center[0]
            r = _circle_radius_to_arc(space, s.radius)
            if r >= math.pi:
                return Arc(c + math.pi, c + math.pi + TWO_PI)
            return Arc(c - r, c + r)
        if isinstance(space, EuclideanBox) and space.norm == "sup":
            return Box(tuple((c - s.radius, c + s.radius) for c in s.center))
    return s


def _circle_radius_to_arc(space: Circle, r: float) -> float:
    if space.metric == "arc":
        return r
    if r >= 2.0:
        return math.pi
    return 2.0 * math.asin(r / 2.0)


def _check_shape(space: Space, s):
    if isinstance(s, Hull):
        for p in s.parts:
            _check_shape(space, p)
        return
    ok = {
        RealInterval: (Interval, Singleton),
        RectifiableCurve: (Interval, Singleton),
        Circle: (Arc, Singleton),
        EuclideanBox: (Ball, Box, Segment, Singleton),
        GridFunctionSpace: (Ball, Singleton, Segment),
    }
    for kind, shapes in ok.items():
        if isinstance(space, kind):
            if not isinstance(s, shapes + (Empty,)):
                raise UnsupportedShape(f"{type(s).__name__} is not available on {space.space_id}")
            if isinstance(s, (Ball, Box, Segment, Singleton)):
                n = len(s.center if isinstance(s, Ball) else s.bounds if isinstance(s, Box)
                        else s.start if isinstance(s, Segment) else s.point)
                if n != space.dim:
                    raise InvalidPoint(f"shape dimension {n} does not match {space.space_id}")
            return


# --------------------------------------------------------------------------
# membership, sampling, diameters
# --------------------------------------------------------------------------

def contains(space: Space, s, pts) -> np.ndarray:
    """Boolean mask of the points lying in ``s``.

    Boundaries are excluded, except that an interval whose endpoint coincides
    with a closed endpoint of a :class:`RealInterval` space contains that
    endpoint (it is relatively open there).
    """
    P = space.normalize(space.as_points(pts))
    s = canonical(space, s)
    if isinstance(s, FiniteDisjointUnion):
        mask = np.zeros(len(P), dtype=bool)
        for part in s.parts:
            mask |= contains(space, part, P)
        return mask
    _check_shape(space, s)
    if isinstance(s, Empty):
        return np.zeros(len(P), dtype=bool)
    if isinstance(s, Interval):
        x = P[:, 0]
        inside = (x > s.a) & (x < s.b)
        if isinstance(space, RealInterval):
            if space.closed_left and s.a <= space.a < s.b:
                inside |= x == space.a
            if space.closed_right and s.a < space.b <= s.b:
                inside |= x == space.b
        if isinstance(space, RectifiableCurve):
            if s.a <= 0.0:
                inside |= x == 0.0
            if s.b >= space.length:
                inside |= x == space.length
        return inside
    if isinstance(s, Arc):
        off = np.mod(P[:, 0] - s.start, TWO_PI)
        return (off > 0) & (off < s.length)
    if isinstance(s, Ball):
        c = np.asarray(s.center)[None, :]
        return space.dist(P, np.broadcast_to(c, P.shape)) < s.radius
    if isinstance(s, Box):
        lo = np.array([b[0] for b in s.bounds])
        hi = np.array([b[1] for b in s.bounds])
        return np.all((P > lo) & (P < hi), axis=1)
    if isinstance(s, Segment):
        a = np.asarray(s.start)
        v = np.asarray(s.end) - a
        t = (P - a) @ v / (v @ v)
        resid = P - a - np.outer(t, v)
        scale = max(1.0, float(np.abs(v).max()))
        return (t > 0) & (t < 1) & (np.abs(resid).max(axis=1) <= 1e-12 * scale)
    if isinstance(s, Singleton):
        return np.all(np.isclose(P, np.asarray(s.point), rtol=0, atol=1e-15), axis=1)
    if isinstance(s, Hull):
        return _hull_contains(space, s, P)
    raise UnsupportedShape(f"unknown shape {s!r}")


def _hull_generators(s: Hull, n_dirs: int = 64) -> np.ndarray:
    gens = []
    for p in s.parts:
        if isinstance(p, Ball):
            c = np.asarray(p.center)
            d = len(c)
            if d == 2:
                t = np.linspace(0, TWO_PI, n_dirs, endpoint=False)
                rr = p.radius / math.cos(math.pi / n_dirs)
                gens.append(c + rr * np.stack([np.cos(t), np.sin(t)], axis=1))
            else:
                eye = np.eye(d)
                gens.append(np.concatenate([c + p.radius * d * eye, c - p.radius * d * eye]))
        else:
            gens.append(_corners(p))
    return np.concatenate(gens)


def _distance_to_piece(space: Space, p, P: np.ndarray) -> np.ndarray:
    a = np.asarray(p.start if isinstance(p, Segment) else p.point)
    if isinstance(p, Singleton):
        return space.dist(P, np.broadcast_to(a, P.shape))
    v = np.asarray(p.end) - a
    t = np.clip((P - a) @ v / (v @ v), 0.0, 1.0)
    foot = a + np.outer(t, v)
    return space.dist(P, foot)


def _hull_contains(space: Space, s: Hull, P: np.ndarray) -> np.ndarray:
    """Membership in a hull cover element.

    Exact for points of the parts; other points are tested against the
    convex hull of generator points (polygonal outer approximation for
    discs), so the test is meant for validating covers, not for geometry.
    """
    mask = np.zeros(len(P), dtype=bool)
    for p in s.parts:
        if isinstance(p, (Segment, Singleton)):
            if s.pad > 0:
                mask |= _distance_to_piece(space, p, P) < s.pad
        else:
            mask |= contains(space, p, P)
    if mask.all():
        return mask
    gens = _hull_generators(s)
    rest = ~mask
    if rest.any() and space.dim in (2, 3) and len(gens) > space.dim:
        from scipy.spatial import Delaunay
        try:
            tri = Delaunay(gens)
        except Exception:  # degenerate generator sets, e.g. collinear segments
            return mask
        inside = tri.find_simplex(P[rest]) >= 0
        mask[np.flatnonzero(rest)[inside]] = True
    return mask


def sample_points(space: Space, s, n: int, rng: np.random.Generator,
                  include_edges: bool = True) -> np.ndarray:
    """Draw ``n`` points of ``s`` (approximately ``n`` for unions).

    With ``include_edges`` the sample also carries points just inside the
    boundary, which is where suprema over open sets live.
    """
    s = canonical(space, s)
    if isinstance(s, FiniteDisjointUnion):
        k = max(1, n // max(1, len(s.parts)))
        return np.concatenate([sample_points(space, p, k, rng, include_edges) for p in s.parts])
    _check_shape(space, s)
    if isinstance(s, Empty):
        return np.zeros((0, space.dim))
    if isinstance(s, Singleton):
        return np.asarray(s.point, dtype=float)[None, :]
    if isinstance(s, Interval):
        a, b = s.a, s.b
        if not (math.isfinite(a) and math.isfinite(b)):
            raise UnsupportedShape("cannot sample an unbounded interval")
        w = b - a
        u = rng.random(n)
        if include_edges:
            grid = np.linspace(0.0, 1.0, min(n, 257))
            eta = 1e-9
            u = np.concatenate([u, eta + (1 - 2 * eta) * grid])
        x = a + w * np.clip(u, 1e-12, 1 - 1e-12)
        return x[:, None]
    if isinstance(s, Arc):
        u = rng.random(n)
        if include_edges:
            u = np.concatenate([u, np.linspace(1e-9, 1 - 1e-9, min(n, 257))])
        t = s.start + s.length * np.clip(u, 1e-12, 1 - 1e-12)
        return np.mod(t, TWO_PI)[:, None]
    if isinstance(s, Box):
        lo = np.array([b[0] for b in s.bounds])
        hi = np.array([b[1] for b in s.bounds])
        u = rng.random((n, len(lo)))
        if include_edges:
            corners = np.array(list(itertools.product([1e-9, 1 - 1e-9], repeat=len(lo))))
            u = np.concatenate([u, corners])
        return lo + (hi - lo) * u
    if isinstance(s, Ball):
        c = np.asarray(s.center)
        d = len(c)
        v = rng.standard_normal((n, d))
        nv = _space_norm(space, v)
        nv[nv == 0] = 1.0
        rad = s.radius * rng.random(n) ** (1.0 / d)
        pts = c + v / nv[:, None] * rad[:, None]
        if include_edges:
            w = rng.standard_normal((min(n, 256), d))
            nw = _space_norm(space, w)
            nw[nw == 0] = 1.0
            pts = np.concatenate([pts, c + w / nw[:, None] * s.radius * (1 - 1e-9)])
        return pts
    if isinstance(s, Segment):
        a = np.asarray(s.start)
        b = np.asarray(s.end)
        t = np.clip(rng.random(n), 1e-12, 1 - 1e-12)
        if include_edges:
            t = np.concatenate([t, [1e-9, 1 - 1e-9]])
        return a + np.outer(t, b - a)
    raise UnsupportedShape(f"cannot sample {s!r}")


def _space_norm(space: Space, v: np.ndarray) -> np.ndarray:
    if isinstance(space, GridFunctionSpace):
        return space.norm_of(v)
    if isinstance(space, EuclideanBox):
        return vector_norm(v, space.norm)
    return np.abs(v).max(axis=-1)


def diam_upper(space: Space, s) -> float:
    """Upper bound on the diameter of ``s``; exact for the connected shapes."""
    s = canonical(space, s)
    if isinstance(s, FiniteDisjointUnion):
        return union_diameter(space, s.parts)
    _check_shape(space, s)
    if isinstance(s, (Empty, Singleton)):
        return 0.0
    if isinstance(s, Interval):
        return float(s.b - s.a)
    if isinstance(s, Arc):
        return float(space.arc_to_metric(s.length))
    if isinstance(s, Ball):
        if space.normed:
            return 2.0 * s.radius
        return 2.0 * s.radius
    if isinstance(s, Box):
        sides = np.array([hi - lo for lo, hi in s.bounds])
        return float(vector_norm(sides, space.norm))
    if isinstance(s, Segment):
        return float(space.dist(np.asarray(s.start)[None], np.asarray(s.end)[None])[0])
    if isinstance(s, Hull):
        return union_diameter(space, s.parts) + 2.0 * s.pad
    raise UnsupportedShape(f"no diameter for {s!r}")


def sup_distance(space: Space, s1, s2) -> float:
    """sup of d(x, y) over x in s1 and y in s2 (closure values)."""
    s1 = canonical(space, s1)
    s2 = canonical(space, s2)
    if isinstance(s1, (Interval, Singleton)) and _one_dimensional(space):
        lo1, hi1 = _interval_bounds(s1)
        lo2, hi2 = _interval_bounds(s2)
        return float(max(abs(hi2 - lo1), abs(hi1 - lo2)))
    if isinstance(space, Circle):
        e1 = _arc_closure_points(s1)
        e2 = _arc_closure_points(s2)
        best = float(space.dist(np.repeat(e1, len(e2))[:, None], np.tile(e2, len(e1))[:, None]).max())
        if _arcs_antipodal(s1, s2):
            best = float(space.arc_to_metric(math.pi))
        return best
    if isinstance(space, EuclideanBox):
        return _box_space_sup_distance(space, s1, s2)
    if isinstance(space, GridFunctionSpace):
        (c1, r1), (c2, r2) = _grid_ball(s1), _grid_ball(s2)
        return float(space.norm_of(c1 - c2)) + r1 + r2
    raise UnsupportedShape(f"sup distance not available on {space.space_id}")


def _grid_ball(s):
    if isinstance(s, Ball):
        return np.asarray(s.center), s.radius
    if isinstance(s, Singleton):
        return np.asarray(s.point), 0.0
    raise UnsupportedShape(f"{type(s).__name__} on a grid function space")


def covering_arc(parts) -> "Arc | None":
    """Shortest open arc containing every part (arcs or singletons).

    Returns None when the parts leave no gap, i.e. only the whole circle
    would do.
    """
    spans = sorted(((_arc_span(p)[0] % TWO_PI, _arc_span(p)[1]) for p in parts))
    if not spans:
        return None
    # largest gap between consecutive merged spans, walking counterclockwise
    merged = []
    for a, l in spans:
        if merged and a <= merged[-1][0] + merged[-1][1]:
            m0, ml = merged[-1]
            merged[-1] = (m0, max(ml, a + l - m0))
        else:
            merged.append((a, l))
    if len(merged) > 1 and merged[-1][0] + merged[-1][1] >= merged[0][0] + TWO_PI:
        m0, ml = merged.pop()
        f0, fl = merged[0]
        merged[0] = (m0, max(ml, f0 + TWO_PI + fl - m0))
    if len(merged) == 1 and merged[0][1] >= TWO_PI:
        return None
    best_gap, best_i = -1.0, 0
    for i, (a, l) in enumerate(merged):
        nxt = merged[(i + 1) % len(merged)][0]
        gap = (nxt - (a + l)) % TWO_PI if len(merged) > 1 else TWO_PI - l
        if gap > best_gap:
            best_gap, best_i = gap, i
    if best_gap <= 0:
        return None
    start = merged[(best_i + 1) % len(merged)][0]
    length = TWO_PI - best_gap
    if length <= 0:
        return None
    return Arc(start, start + length)


def _interval_bounds(s):
    if isinstance(s, Interval):
        return s.a, s.b
    if isinstance(s, Singleton):
        return s.point[0], s.point[0]
    raise UnsupportedShape(f"{s!r} is not an interval")


def _arc_closure_points(s) -> np.ndarray:
    if isinstance(s, Arc):
        return np.mod(np.array([s.start, s.start + s.length]), TWO_PI)
    if isinstance(s, Singleton):
        return np.mod(np.array([s.point[0]]), TWO_PI)
    raise UnsupportedShape(f"{s!r} is not an arc")


def _arc_span(s) -> tuple[float, float]:
    if isinstance(s, Arc):
        return s.start, s.length
    return s.point[0], 0.0


def _arcs_antipodal(s1, s2) -> bool:
    a1, l1 = _arc_span(s1)
    a2, l2 = _arc_span(s2)
    # closure of s1 shifted by pi meets closure of s2
    return _closed_arcs_meet(a1 + math.pi, l1, a2, l2)


def _closed_arcs_meet(a1, l1, a2, l2) -> bool:
    d12 = (a2 - a1) % TWO_PI
    d21 = (a1 - a2) % TWO_PI
    return d12 <= l1 + 1e-15 or d21 <= l2 + 1e-15


def _corners(s) -> np.ndarray:
    if isinstance(s, Box):
        return np.array(list(itertools.product(*s.bounds)))
    if isinstance(s, Segment):
        return np.array([s.start, s.end])
    if isinstance(s, Singleton):
        return np.array([s.point])
    raise UnsupportedShape(f"{s!r} has no corner set")


def _box_space_sup_distance(space: EuclideanBox, s1, s2) -> float:
    if space.norm == "sup":
        b1 = _bounding_box(s1)
        b2 = _bounding_box(s2)
        return float(max(max(abs(h2 - l1), abs(h1 - l2)) for (l1, h1), (l2, h2) in zip(b1, b2)))
    if isinstance(s1, Ball) and isinstance(s2, Ball):
        d = float(np.linalg.norm(np.subtract(s1.center, s2.center)))
        return d + s1.radius + s2.radius
    if isinstance(s1, Ball):
        s1, s2 = s2, s1
    if isinstance(s2, Ball):
        c = np.asarray(s2.center)
        return float(np.linalg.norm(_corners(s1) - c, axis=1).max()) + s2.radius
    c1 = _corners(s1)
    c2 = _corners(s2)
    return float(np.sqrt(((c1[:, None, :] - c2[None, :, :]) ** 2).sum(-1)).max())


def _bounding_box(s) -> tuple:
    if isinstance(s, Box):
        return s.bounds
    if isinstance(s, Ball):
        return tuple((c - s.radius, c + s.radius) for c in s.center)
    if isinstance(s, Segment):
        return tuple((min(a, b), max(a, b)) for a, b in zip(s.start, s.end))
    if isinstance(s, Singleton):
        return tuple((c, c) for c in s.point)
    raise UnsupportedShape(f"{s!r} has no bounding box")


def union_diameter(space: Space, parts: Sequence) -> float:
    parts = [canonical(space, p) for p in parts if not isinstance(p, Empty)]
    if not parts:
        return 0.0
    best = max(diam_upper(space, p) for p in parts)
    for p, q in itertools.combinations(parts, 2):
        best = max(best, sup_distance(space, p, q))
    return float(best)


def inf_distance(space: Space, s1, s2) -> float:
    """d(A, B) = inf of d(a, b); zero when the closures touch."""
    s1 = canonical(space, s1)
    s2 = canonical(space, s2)
    ps1, ps2 = parts_of(s1), parts_of(s2)
    if len(ps1) != 1 or len(ps2) != 1:
        return min(inf_distance(space, p, q) for p in ps1 for q in ps2)
    if _one_dimensional(space):
        lo1, hi1 = _interval_bounds(s1)
        lo2, hi2 = _interval_bounds(s2)
        return float(max(0.0, lo2 - hi1, lo1 - hi2))
    if isinstance(space, Circle):
        a1, l1 = _arc_span(s1)
        a2, l2 = _arc_span(s2)
        if _closed_arcs_meet(a1, l1, a2, l2):
            return 0.0
        gap1 = (a2 - (a1 + l1)) % TWO_PI
        gap2 = (a1 - (a2 + l2)) % TWO_PI
        return float(space.arc_to_metric(min(gap1, gap2)))
    if isinstance(space, GridFunctionSpace):
        (c1, r1), (c2, r2) = _grid_ball(s1), _grid_ball(s2)
        return max(0.0, float(space.norm_of(c1 - c2)) - r1 - r2)
    if isinstance(space, EuclideanBox):
        if space.norm == "sup" or (isinstance(s1, Box) and isinstance(s2, Box)):
            b1, b2 = _bounding_box(s1), _bounding_box(s2)
            gaps = np.array([max(0.0, l2 - h1, l1 - h2) for (l1, h1), (l2, h2) in zip(b1, b2)])
            if isinstance(s1, (Box, Ball)) and isinstance(s2, (Box, Ball)):
                return float(vector_norm(gaps, space.norm))
        if isinstance(s1, Ball) and isinstance(s2, Ball):
            d = float(np.linalg.norm(np.subtract(s1.center, s2.center)))
            return max(0.0, d - s1.radius - s2.radius)
        if isinstance(s1, Ball):
            s1, s2 = s2, s1
        if isinstance(s1, Box) and isinstance(s2, Ball):
            c = np.asarray(s2.center)
            lo = np.array([b[0] for b in s1.bounds])
            hi = np.array([b[1] for b in s1.bounds])
            nearest = np.clip(c, lo, hi)
            return max(0.0, float(np.linalg.norm(c - nearest)) - s2.radius)
    raise UnsupportedShape(f"d(A, B) not available for {type(s1).__name__}, {type(s2).__name__}")


# --------------------------------------------------------------------------
# disjointness and containment
# --------------------------------------------------------------------------

def are_disjoint(space: Space, s1, s2) -> bool:
    """True iff the two open descriptors do not intersect.

    Analytic for interval, arc and box pairs; balls are disjoint when the
    centre distance is at least the sum of the radii, which is exact in a
    normed space.
    """
    s1 = canonical(space, s1)
    s2 = canonical(space, s2)
    if isinstance(s1, Empty) or isinstance(s2, Empty):
        return True
    ps1, ps2 = parts_of(s1), parts_of(s2)
    if len(ps1) != 1 or len(ps2) != 1:
        return all(are_disjoint(space, p, q) for p in ps1 for q in ps2)
    if isinstance(s1, Interval) and isinstance(s2, Interval):
        return s1.b <= s2.a or s2.b <= s1.a
    if isinstance(s1, Arc) and isinstance(s2, Arc):
        d12 = (s2.start - s1.start) % TWO_PI
        d21 = (s1.start - s2.start) % TWO_PI
        return d12 >= s1.length - 1e-15 and d21 >= s2.length - 1e-15
    if isinstance(s1, Box) and isinstance(s2, Box):
        return any(h1 <= l2 or h2 <= l1 for (l1, h1), (l2, h2) in zip(s1.bounds, s2.bounds))
    if isinstance(s1, Ball) and isinstance(s2, Ball):
        d = space.dist(np.asarray(s1.center)[None], np.asarray(s2.center)[None])[0]
        return bool(d >= s1.radius + s2.radius)
    if isinstance(space, EuclideanBox) and {type(s1), type(s2)} == {Ball, Box}:
        return inf_distance(space, s1, s2) > 0 or _ball_box_touch_only(s1, s2)
    raise UnsupportedShape(f"disjointness of {type(s1).__name__} and {type(s2).__name__}")


def _ball_box_touch_only(s1, s2) -> bool:
    ball, box = (s1, s2) if isinstance(s1, Ball) else (s2, s1)
    c = np.asarray(ball.center)
    lo = np.array([b[0] for b in box.bounds])
    hi = np.array([b[1] for b in box.bounds])
    return float(np.linalg.norm(c - np.clip(c, lo, hi))) >= ball.radius


def family_disjoint(space: Space, sets: Sequence) -> bool:
    """Pairwise disjointness of a family; sort-based for 1-D families."""
    sets = [canonical(space, s) for s in sets]
    if all(isinstance(s, Interval) for s in sets):
        lo = np.array([s.a for s in sets])
        hi = np.array([s.b for s in sets])
        return intervals_disjoint(lo, hi)
    if all(isinstance(s, Arc) for s in sets):
        if sum(s.length for s in sets) > TWO_PI + 1e-12:
            return False
        order = sorted(sets, key=lambda s: s.start % TWO_PI)
        for s, t in zip(order, order[1:] + order[:1]):
            if len(order) > 1 and not are_disjoint(space, s, t):
                return False
        return True
    return all(are_disjoint(space, p, q) for p, q in itertools.combinations(sets, 2))


def intervals_disjoint(lo: np.ndarray, hi: np.ndarray) -> bool:
    order = np.argsort(lo, kind="stable")
    lo, hi = lo[order], hi[order]
    return bool(np.all(hi[:-1] <= lo[1:]))


def is_subset(space: Space, inner, outer) -> bool:
    """Analytic containment ``inner <= outer`` for the connected shapes."""
    inner = canonical(space, inner)
    outer = canonical(space, outer)
    if isinstance(inner, Empty):
        return True
    if isinstance(inner, FiniteDisjointUnion):
        return all(is_subset(space, p, outer) for p in inner.parts)
    if isinstance(outer, FiniteDisjointUnion):
        if inner.connected and not isinstance(inner, Singleton):
            return any(is_subset(space, inner, p) for p in outer.parts)
        raise UnsupportedShape("containment in a union needs a connected inner set")
    if isinstance(inner, Interval) and isinstance(outer, Interval):
        return outer.a <= inner.a and inner.b <= outer.b
    if isinstance(inner, Arc) and isinstance(outer, Arc):
        if outer.length >= TWO_PI:
            off = (outer.start - inner.start) % TWO_PI
            return off == 0 or off >= inner.length
        off = (inner.start - outer.start) % TWO_PI
        if off > outer.length and inner.length < TWO_PI:
            off -= TWO_PI
        return off >= 0 and off + inner.length <= outer.length + 1e-15
    if isinstance(inner, Box) and isinstance(outer, Box):
        return all(lo <= l and h <= hi for (l, h), (lo, hi) in zip(inner.bounds, outer.bounds))
    if isinstance(inner, Ball) and isinstance(outer, Ball) and space.normed:
        d = space.dist(np.asarray(inner.center)[None], np.asarray(outer.center)[None])[0]
        return bool(d + inner.radius <= outer.radius)
    if isinstance(inner, Box) and isinstance(outer, Ball) and isinstance(space, EuclideanBox):
        c = np.asarray(outer.center)
        return bool(space.dist(_corners(inner), np.broadcast_to(c, (2 ** space.dim, space.dim))).max()
                    <= outer.radius)
    if isinstance(inner, Ball) and isinstance(outer, Box):
        return is_subset(space, Box(_bounding_box(inner)), outer)
    if isinstance(inner, (Segment, Singleton)):
        if isinstance(outer, Ball) and isinstance(inner, Segment):
            return is_subset(space, Singleton(inner.start), outer) and \
                is_subset(space, Singleton(inner.end), outer) or \
                bool(contains(space, outer, np.array([inner.start, inner.end])).all())
        pts = _corners(inner)
        return bool(contains(space, outer, pts).all())
    raise UnsupportedShape(f"containment of {type(inner).__name__} in {type(outer).__name__}")


# --------------------------------------------------------------------------
# basic open enumeration
# --------------------------------------------------------------------------

def enumerate_basic_opens(space: Space, scale: float, region, max_sets: int = 200_000) -> list:
    """Deterministic finite list of connected basic opens of diameter at most
    ``scale`` whose union covers ``region``.

    On 1-D spaces and sup-norm boxes the cover uses balls of radius
    ``scale/2`` centred on a half-radius grid; l2 boxes shrink the grid
    spacing so the corners of each cell are covered.
    """
    if not scale > 0:
        raise InvalidScale("scale must be positive")
    region = canonical(space, region)
    if isinstance(region, FiniteDisjointUnion):
        out = []
        for part in region.parts:
            out.extend(enumerate_basic_opens(space, scale, part, max_sets))
        return out
    if isinstance(region, Empty):
        return []
    if region.connected and not isinstance(region, (Segment, Singleton)) \
            and diam_upper(space, region) <= scale and not isinstance(region, Box):
        return [region]
    if isinstance(space, GridFunctionSpace):
        raise UnsupportedShape("grid function spaces only enumerate balls no wider than the scale")
    r = scale / 2.0
    if _one_dimensional(space):
        lo, hi = _interval_bounds(region) if not isinstance(region, Ball) else (None, None)
        if isinstance(region, Singleton):
            return [Interval(lo - r, lo + r)]
        _require_finite(lo, hi)
        k = _count(hi - lo, r, max_sets)
        return [Interval(lo + (j - 1) * r, lo + (j + 1) * r) for j in range(1, k + 1)]
    if isinstance(space, Circle):
        ar = _circle_radius_to_arc(space, r)
        if isinstance(region, Singleton):
            return [Arc(region.point[0] - ar, region.point[0] + ar)]
        start, length = region.start, region.length
        k = _count(length, ar, max_sets)
        return [Arc(start + (j - 1) * ar, start + (j + 1) * ar) for j in range(1, k + 1)]
    if isinstance(space, EuclideanBox):
        bounds = _bounding_box(region)
        for lo, hi in bounds:
            _require_finite(lo, hi)
        n = space.dim
        if space.norm == "sup":
            axes = []
            for lo, hi in bounds:
                k = _count(hi - lo, r, max_sets) if hi > lo else 1
                axes.append([lo + j * r for j in range(1, k + 1)] if hi > lo else [lo])
        else:
            step = 2.0 * r / math.sqrt(n) * (1.0 - 1e-9)
            axes = []
            for lo, hi in bounds:
                k = int(math.ceil((hi - lo) / step)) if hi > lo else 0
                axes.append([lo + j * step for j in range(0, k + 1)])
        total = math.prod(len(a) for a in axes)
        if total > max_sets:
            raise InvalidScale(f"scale {scale:g} needs {total} basic opens (> {max_sets})")
        out = []
        for c in itertools.product(*axes):
            b = Ball(c, r) if space.norm == "l2" else Box(tuple((ci - r, ci + r) for ci in c))
            if isinstance(region, Ball) and inf_distance(space, region, b) > 0:
                continue
            out.append(b)
        return out
    raise UnsupportedShape(f"no enumeration for {space.space_id}")


def clip_to_space(space: Space, s):
    """Intersect an interval with a 1-D space, keeping relative openness.

    Other spaces and shapes are returned unchanged.
    """
    s = canonical(space, s)
    if isinstance(s, FiniteDisjointUnion):
        return union(*[clip_to_space(space, p) for p in s.parts])
    if not isinstance(s, Interval):
        return s
    if isinstance(space, RealInterval):
        lo, hi = max(s.a, space.a), min(s.b, space.b)
    elif isinstance(space, RectifiableCurve):
        lo, hi = max(s.a, 0.0), min(s.b, space.length)
    else:
        return s
    return Interval(lo, hi) if lo < hi else Empty()


def _require_finite(lo, hi):
    if lo is None or not (math.isfinite(lo) and math.isfinite(hi)):
        raise UnsupportedShape("basic-open enumeration needs a bounded region")


def _count(width: float, r: float, max_sets: int) -> int:
    k = max(1, int(math.ceil(width / r - 1e-12)))
    if k > max_sets:
        raise InvalidScale(f"{k} basic opens exceed the limit {max_sets}")
    return k


# --------------------------------------------------------------------------
# module-level wrappers
# --------------------------------------------------------------------------

def distance(space: Space, p, q) -> float:
    P = space.normalize(space.as_points(p))
    Q = space.normalize(space.as_points(q))
    if len(P) != 1 or len(Q) != 1:
        raise InvalidPoint("distance takes single points")
    return float(space.dist(P, Q)[0])


def named_space(name: str) -> Space:
    """Shorthand names accepted by the command line."""
    table = {
        "real": RealInterval(),
        "line": RealInterval(),
        "unit_interval": RealInterval(0.0, 1.0, True, True),
        "open_unit_interval": RealInterval(0.0, 1.0),
        "half_line": RealInterval(0.0, INF, closed_left=True),
        "plane": EuclideanBox.plane("l2"),
        "plane_sup": EuclideanBox.plane("sup"),
        "circle": Circle("arc"),
        "circle_chord": Circle("chord"),
    }
    if name not in table:
        raise InvalidSpace(f"unknown space name {name!r}; choose from {sorted(table)}")
    return table[name]


NAMED_SPACES = ("real", "line", "unit_interval", "open_unit_interval", "half_line",
                "plane", "plane_sup", "circle", "circle_chord")


def iter_shapes(sets: Iterable) -> list:
    return [p for s in sets for p in parts_of(s)]
