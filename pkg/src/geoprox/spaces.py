"""Model geodesic spaces and their primitive operations.

Four concrete spaces are provided:

* :class:`EuclideanSpace` -- R^n with the Euclidean norm.
* :class:`HyperbolicPlane` -- the hyperboloid model of H^2.
* :class:`MetricTree` -- a finite tree with positive edge lengths.
* :class:`MaxNormSeq` -- R^n with ``max(|x|_inf, |x|_2 / sqrt(2))`` and linear
  segments as designated geodesics. Not strictly convex.

Every space works on batches: points are rows of a float array whose width is
``space.width``. The public point types (:class:`EuclideanVec`, ...) are thin
immutable wrappers used at API boundaries; ``space.encode`` and
``space.decode`` convert between the two.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from . import kernels
from .errors import InvalidParameter, InvalidPoint

ATOL = 1e-9
HYPERBOLOID_TOL = 1e-9
SQRT2 = np.sqrt(2.0)


# ---------------------------------------------------------------------------
# point values


def _float_tuple(values):
    return tuple(float(v) for v in values)


@dataclass(frozen=True)
class EuclideanVec:
    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "coords", _float_tuple(self.coords))


@dataclass(frozen=True)
class HyperboloidVec:
    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "coords", _float_tuple(self.coords))


@dataclass(frozen=True)
class MaxNormVec:
    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "coords", _float_tuple(self.coords))


@dataclass(frozen=True)
class TreePoint:
    edge_id: object
    offset: float

    def __post_init__(self):
        object.__setattr__(self, "offset", float(self.offset))


SpacePoint = Union[EuclideanVec, HyperboloidVec, MaxNormVec, TreePoint]


# ---------------------------------------------------------------------------
# spaces


class Space:
    """Common interface. Subclasses fill in the batch primitives."""

    kind: str = ""
    is_cat0 = True
    is_busemann = True
    is_uniformly_convex = True
    point_type: type = EuclideanVec
    width: int = 0

    # -- conversion ---------------------------------------------------------
    def encode(self, points) -> np.ndarray:
        """Array of shape (n, width) from one point or a sequence of points."""
        if isinstance(points, np.ndarray):
            arr = np.atleast_2d(np.asarray(points, dtype=np.float64))
            if arr.shape[-1] != self.width:
                raise InvalidPoint(f"{self.kind}: expected width {self.width}, got {arr.shape[-1]}")
            return arr
        if isinstance(points, (EuclideanVec, HyperboloidVec, MaxNormVec, TreePoint)):
            points = [points]
        rows = [self._encode_one(p) for p in points]
        if not rows:
            return np.empty((0, self.width))
        return np.vstack(rows)

    def _encode_one(self, p) -> np.ndarray:
        if not isinstance(p, self.point_type):
            raise InvalidPoint(f"{type(p).__name__} is not a point of a {self.kind} space")
        arr = np.asarray(p.coords, dtype=np.float64)
        if arr.shape != (self.width,):
            raise InvalidPoint(f"{self.kind}: expected {self.width} coordinates, got {arr.size}")
        self.validate(arr[None, :])
        return arr

    def decode(self, arr):
        arr = np.asarray(arr, dtype=np.float64)
        if arr.ndim == 1:
            return self.point_type(tuple(arr))
        return [self.point_type(tuple(row)) for row in arr]

    def validate(self, X) -> None:
        if not np.all(np.isfinite(X)):
            raise InvalidPoint("non-finite coordinates")

    # -- geometry -------------------------------------------------------------
    def dist(self, X, Y) -> np.ndarray:
        raise NotImplementedError

    def combine(self, X, Y, t) -> np.ndarray:
        raise NotImplementedError

    def midpoint(self, X, Y) -> np.ndarray:
        X = np.atleast_2d(X)
        return self.combine(X, Y, np.full(len(X), 0.5))

    def ray(self, A, P, r) -> np.ndarray:
        """Points on the geodesic from A towards P at distance r from A.

        Geodesically complete spaces extend past P when needed; trees stop at P.
        """
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        raise NotImplementedError

    def close(self, X, Y, tol=ATOL) -> np.ndarray:
        return self.dist(X, Y) <= tol

    def to_json(self) -> dict:
        raise NotImplementedError

    def point_to_json(self, row) -> dict:
        return {"kind": self.kind, "coords": [float(c) for c in np.asarray(row).ravel()]}

    def __repr__(self):
        return f"{type(self).__name__}()"


def _as_t(t, n):
    t = np.asarray(t, dtype=np.float64)
    if t.ndim == 0:
        t = np.full(n, float(t))
    return t


class _VectorSpace(Space):
    """R^n with linear segments as geodesics; subclasses choose the norm."""

    def __init__(self, dim: int):
        if int(dim) < 1:
            raise InvalidParameter("dimension must be positive")
        self.dim = self.width = int(dim)

    def dist(self, X, Y):
        D = np.atleast_2d(X) - np.atleast_2d(Y)
        return np.sqrt(np.einsum("...i,...i->...", D, D))

    def combine(self, X, Y, t):
        X, Y = np.atleast_2d(X), np.atleast_2d(Y)
        t = _as_t(t, max(len(X), len(Y)))[:, None]
        return (1.0 - t) * X + t * Y

    def ray(self, A, P, r):
        A, P = np.atleast_2d(A), np.atleast_2d(P)
        D = P - A
        n = np.sqrt(np.einsum("ij,ij->i", D, D))
        n = np.where(n > 0, n, 1.0)
        return A + (np.asarray(r, dtype=np.float64).reshape(-1, 1) / n[:, None]) * D


class EuclideanSpace(_VectorSpace):
    kind = "euclidean"
    point_type = EuclideanVec

    def sample(self, rng, n):
        return rng.standard_normal((n, self.dim))

    def to_json(self):
        return {"kind": "euclidean", "dim": self.dim}

    def __repr__(self):
        return f"EuclideanSpace({self.dim})"


class MaxNormSeq(_VectorSpace):
    """Finite truncation of l2 under ``max(|x|_inf, |x|_2/sqrt 2)``."""

    kind = "maxnorm"
    point_type = MaxNormVec
    is_cat0 = False
    is_busemann = False
    is_uniformly_convex = False

    def dist(self, X, Y):
        D = np.atleast_2d(X) - np.atleast_2d(Y)
        return norm_maxl2(D)

    def ray(self, A, P, r):
        A, P = np.atleast_2d(A), np.atleast_2d(P)
        D = P - A
        n = norm_maxl2(D)
        n = np.where(n > 0, n, 1.0)
        return A + (np.asarray(r, dtype=np.float64).reshape(-1, 1) / n[:, None]) * D

    def sample(self, rng, n):
        return rng.uniform(-2.0, 2.0, size=(n, self.dim))

    def to_json(self):
        return {"kind": "maxnorm", "dim": self.dim}

    def __repr__(self):
        return f"MaxNormSeq({self.dim})"


def norm_maxl2(D):
    D = np.asarray(D, dtype=np.float64)
    return np.maximum(np.abs(D).max(axis=-1), np.sqrt(np.einsum("...i,...i->...", D, D)) / SQRT2)


def minkowski(X, Y):
    """Bilinear form x1*y1 - x2*y2 - x3*y3, row-wise."""
    X, Y = np.asarray(X), np.asarray(Y)
    return X[..., 0] * Y[..., 0] - X[..., 1] * Y[..., 1] - X[..., 2] * Y[..., 2]


class HyperbolicPlane(Space):
    kind = "hyperbolic"
    point_type = HyperboloidVec
    width = 3

    def validate(self, X):
        super().validate(X)
        q = minkowski(X, X)
        if np.any(np.abs(q - 1.0) > HYPERBOLOID_TOL * np.maximum(1.0, X[..., 0] ** 2)) or np.any(X[..., 0] < 1.0 - HYPERBOLOID_TOL):
            raise InvalidPoint("point is not on the upper sheet of the hyperboloid")

    @staticmethod
    def normalize(Z):
        Z = np.atleast_2d(Z)
        q = minkowski(Z, Z)
        return Z / np.sqrt(q)[:, None]

    def dist(self, X, Y):
        X, Y = np.atleast_2d(X), np.atleast_2d(Y)
        B = minkowski(X, Y)
        Dl = X - Y
        small = 2.0 * np.arcsinh(np.sqrt(np.maximum(-minkowski(Dl, Dl), 0.0)) / 2.0)
        big = np.arccosh(np.maximum(B, 1.0))
        return np.where(B > 2.0, big, small)

    def combine(self, X, Y, t):
        X, Y = np.atleast_2d(X), np.atleast_2d(Y)
        n = max(len(X), len(Y))
        t = _as_t(t, n)
        D = self.dist(X, Y)
        tiny = D < 1e-9
        Ds = np.where(tiny, 1.0, D)
        a = np.where(tiny, 1.0 - t, np.sinh((1.0 - t) * Ds) / np.sinh(Ds))
        b = np.where(tiny, t, np.sinh(t * Ds) / np.sinh(Ds))
        Z = self.normalize(a[:, None] * X + b[:, None] * Y)
        # endpoints exactly
        Z = np.where((t == 0.0)[:, None], np.broadcast_to(X, Z.shape), Z)
        Z = np.where((t == 1.0)[:, None], np.broadcast_to(Y, Z.shape), Z)
        return Z

    def exp(self, B, V):
        """Exponential map at base rows B of tangent vectors V (Minkowski-orthogonal to B)."""
        B, V = np.atleast_2d(B), np.atleast_2d(V)
        r = np.sqrt(np.maximum(-minkowski(V, V), 0.0))
        rs = np.where(r > 0, r, 1.0)
        return self.normalize(np.cosh(r)[:, None] * B + (np.sinh(r) / rs)[:, None] * V)

    def log_dir(self, A, P):
        """Unit tangent at A pointing to P (zero where P == A)."""
        A, P = np.atleast_2d(A), np.atleast_2d(P)
        W = P - minkowski(P, A)[:, None] * A
        r = np.sqrt(np.maximum(-minkowski(W, W), 0.0))
        return W / np.where(r > 0, r, 1.0)[:, None]

    def ray(self, A, P, r):
        A, P = np.atleast_2d(A), np.atleast_2d(P)
        U = self.log_dir(A, P)
        return self.exp(A, np.asarray(r, dtype=np.float64).reshape(-1, 1) * U)

    def random_tangent(self, rng, B, radius):
        B = np.atleast_2d(B)
        G = rng.standard_normal(B.shape)
        W = G - minkowski(G, B)[:, None] * B
        r = np.sqrt(np.maximum(-minkowski(W, W), 0.0))
        return W * (np.asarray(radius).reshape(-1, 1) / np.where(r > 0, r, 1.0)[:, None])

    def origin(self, n=1):
        return np.tile([1.0, 0.0, 0.0], (n, 1))

    def sample(self, rng, n):
        base = self.exp(self.origin(n), self.random_tangent(rng, self.origin(n), rng.uniform(0.0, 1.0, n)))
        return self.exp(base, self.random_tangent(rng, base, rng.uniform(0.0, 3.0, n)))

    def to_json(self):
        return {"kind": "hyperbolic"}

    @staticmethod
    def from_polar(r, theta):
        """Point at distance r from the origin in direction theta."""
        return HyperboloidVec((np.cosh(r), np.sinh(r) * np.cos(theta), np.sinh(r) * np.sin(theta)))


class MetricTree(Space):
    """Finite metric tree given by vertex ids and weighted edges.

    Points are encoded as ``(edge_index, offset)`` where the offset is measured
    from the edge's ``a`` endpoint.
    """

    kind = "tree"
    point_type = TreePoint
    width = 2

    def __init__(self, vertices: Sequence, edges: Sequence):
        self.vertices = list(vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise InvalidParameter("duplicate vertex ids")
        if not self.vertices:
            raise InvalidParameter("tree needs at least one vertex")
        self.vindex = {v: i for i, v in enumerate(self.vertices)}
        self.edge_ids = []
        ea, eb, el = [], [], []
        for k, e in enumerate(edges):
            if isinstance(e, dict):
                a, b, length, eid = e["a"], e["b"], e["len"], e.get("id", k)
            else:
                a, b, length = e
                eid = k
            if a not in self.vindex or b not in self.vindex:
                raise InvalidParameter(f"edge {eid} references an unknown vertex")
            if not float(length) > 0.0 or not np.isfinite(float(length)):
                raise InvalidParameter(f"edge {eid} must have positive length")
            ea.append(self.vindex[a])
            eb.append(self.vindex[b])
            el.append(float(length))
            self.edge_ids.append(eid)
        if not el:
            raise InvalidParameter("tree needs at least one edge")
        self.ea = np.array(ea, dtype=np.int64)
        self.eb = np.array(eb, dtype=np.int64)
        self.elen = np.array(el, dtype=np.float64)
        self.edge_index = {eid: k for k, eid in enumerate(self.edge_ids)}
        self._build_tables()

    def _build_tables(self):
        V = len(self.vertices)
        if len(self.elen) != V - 1:
            raise InvalidParameter("a tree on V vertices has exactly V-1 edges")
        adj = [[] for _ in range(V)]
        edge_of = np.full((V, V), -1, dtype=np.int64)
        for k, (a, b) in enumerate(zip(self.ea, self.eb)):
            if a == b or edge_of[a, b] >= 0:
                raise InvalidParameter("loops and parallel edges are not allowed")
            adj[a].append((b, k))
            adj[b].append((a, k))
            edge_of[a, b] = edge_of[b, a] = k
        D = np.full((V, V), np.inf)
        nxt = np.full((V, V), -1, dtype=np.int64)
        for r in range(V):
            D[r, r] = 0.0
            nxt[r, r] = r
            queue = deque([r])
            while queue:
                u = queue.popleft()
                for w, k in adj[u]:
                    if nxt[r, w] < 0:
                        nxt[r, w] = u
                        D[r, w] = D[r, u] + self.elen[k]
                        queue.append(w)
        if np.any(nxt < 0):
            raise InvalidParameter("tree is not connected")
        self.D = D
        self.nxt = nxt
        self.edge_of = edge_of

    # -- conversion ------------------------------------------------------------
    def _encode_one(self, p):
        if not isinstance(p, TreePoint):
            raise InvalidPoint(f"{type(p).__name__} is not a tree point")
        if p.edge_id not in self.edge_index:
            raise InvalidPoint(f"unknown edge {p.edge_id!r}")
        k = self.edge_index[p.edge_id]
        row = np.array([float(k), p.offset])
        self.validate(row[None, :])
        return row

    def decode(self, arr):
        arr = np.asarray(arr, dtype=np.float64)
        if arr.ndim == 1:
            return TreePoint(self.edge_ids[int(arr[0])], float(arr[1]))
        return [TreePoint(self.edge_ids[int(r[0])], float(r[1])) for r in arr]

    def validate(self, X):
        super().validate(X)
        e = X[..., 0]
        if np.any(e != np.round(e)) or np.any(e < 0) or np.any(e >= len(self.elen)):
            raise InvalidPoint("edge index out of range")
        off = X[..., 1]
        if np.any(off < -ATOL) or np.any(off > self.elen[e.astype(np.int64)] + ATOL):
            raise InvalidPoint("offset outside its edge")

    def vertex_point(self, vid) -> TreePoint:
        v = self.vindex[vid]
        k = int(np.flatnonzero((self.ea == v) | (self.eb == v))[0])
        return TreePoint(self.edge_ids[k], 0.0 if self.ea[k] == v else self.elen[k])

    def vertex_row(self, vid):
        return self.encode(self.vertex_point(vid))[0]

    def point_to_json(self, row):
        row = np.asarray(row).ravel()
        return {"kind": "tree", "edge": self.edge_ids[int(row[0])], "offset": float(row[1])}

    # -- geometry ----------------------------------------------------------------
    def _split(self, X):
        X = np.atleast_2d(X)
        return np.ascontiguousarray(X[:, 0].astype(np.int64)), np.ascontiguousarray(X[:, 1])

    def dist(self, X, Y):
        X, Y = np.broadcast_arrays(np.atleast_2d(X), np.atleast_2d(Y))
        e1, o1 = self._split(X)
        e2, o2 = self._split(Y)
        return kernels.tree_dist(e1, o1, e2, o2, self.ea, self.eb, self.elen, self.D)

    def combine(self, X, Y, t):
        X, Y = np.broadcast_arrays(np.atleast_2d(X), np.atleast_2d(Y))
        t = np.ascontiguousarray(_as_t(t, len(X)))
        e1, o1 = self._split(X)
        e2, o2 = self._split(Y)
        e, o = kernels.tree_combine(e1, o1, e2, o2, t, self.ea, self.eb, self.elen,
                                    self.D, self.nxt, self.edge_of)
        o = np.clip(o, 0.0, self.elen[e])
        return np.column_stack([e.astype(np.float64), o])

    def ray(self, A, P, r):
        A, P = np.broadcast_arrays(np.atleast_2d(A), np.atleast_2d(P))
        d = self.dist(A, P)
        t = np.where(d > 0, np.minimum(1.0, np.asarray(r, dtype=np.float64) / np.where(d > 0, d, 1.0)), 0.0)
        return self.combine(A, P, t)

    def sample(self, rng, n):
        e = rng.integers(0, len(self.elen), size=n)
        o = rng.uniform(0.0, 1.0, size=n) * self.elen[e]
        return np.column_stack([e.astype(np.float64), o])

    def to_json(self):
        return {
            "kind": "tree",
            "vertices": list(self.vertices),
            "edges": [{"a": self.vertices[a], "b": self.vertices[b], "len": float(l)}
                      for a, b, l in zip(self.ea, self.eb, self.elen)],
        }

    def __repr__(self):
        return f"MetricTree({len(self.vertices)} vertices)"


# ---------------------------------------------------------------------------
# scalar API


def _row(space: Space, p):
    return space.encode(p)


def distance(space: Space, x, y) -> float:
    """Distance between two points of ``space``."""
    return float(space.dist(_row(space, x), _row(space, y))[0])


def combine(space: Space, x, y, t: float):
    """Point ``(1-t)x + ty`` on the geodesic from x to y, i.e. at distance t*d(x,y) from x."""
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise InvalidParameter(f"t={t} outside [0, 1]")
    if t == 0.0:
        return x
    return space.decode(space.combine(_row(space, x), _row(space, y), t)[0])


def midpoint(space: Space, x, y):
    return combine(space, x, y, 0.5)


# ---------------------------------------------------------------------------
# modulus of uniform convexity


@dataclass(frozen=True)
class Cat0ClosedForm:
    """delta(r, eps) = 1 - sqrt(1 - eps^2/4), valid in every CAT(0) space."""


@dataclass(frozen=True)
class Empirical:
    samples: int = 10_000
    seed: int = 0


ModulusSpec = Union[Cat0ClosedForm, Empirical]


def cat0_modulus(eps):
    eps = np.asarray(eps, dtype=np.float64)
    q = eps * eps / 4.0
    # 1 - sqrt(1-q) written without cancellation
    return q / (1.0 + np.sqrt(1.0 - q))


def modulus(spec: ModulusSpec, space: Space, r: float, eps: float) -> float:
    """Modulus of uniform convexity delta(r, eps).

    ``Cat0ClosedForm`` needs a uniformly convex (CAT(0)-flagged) space and does
    not depend on ``r``. ``Empirical`` estimates the infimum of
    ``1 - d(m, a)/r`` over sampled configurations and subtracts ``1e-6``.
    """
    from .errors import UnsupportedSpace

    r, eps = float(r), float(eps)
    if not 0.0 < eps <= 2.0:
        raise InvalidParameter(f"eps={eps} outside (0, 2]")
    if not r > 0.0:
        raise InvalidParameter("r must be positive")
    if isinstance(spec, Cat0ClosedForm):
        if not (space.is_cat0 and space.is_uniformly_convex):
            raise UnsupportedSpace(f"closed-form CAT(0) modulus is not valid on {space.kind}")
        return float(cat0_modulus(eps))
    if isinstance(spec, Empirical):
        return _empirical_modulus(space, r, eps, spec.samples, spec.seed)
    raise InvalidParameter(f"unknown modulus spec {spec!r}")


def _empirical_modulus(space, r, eps, samples, seed):
    rng = np.random.default_rng(seed)
    n = int(samples)
    A = space.sample(rng, n)
    X = space.ray(A, space.sample(rng, n), np.full(n, r))
    Y = space.ray(A, space.sample(rng, n), np.full(n, r))
    ok = space.dist(X, Y) >= eps * r
    if not np.any(ok):
        return 1.0
    M = space.midpoint(X[ok], Y[ok])
    vals = 1.0 - space.dist(M, A[ok]) / r
    return float(np.clip(vals.min() - 1e-6, 0.0, 1.0))


# ---------------------------------------------------------------------------
# JSON


def space_from_json(obj: dict) -> Space:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise InvalidParameter("space must be an object with a 'kind'")
    kind = obj["kind"]
    if kind == "euclidean":
        return EuclideanSpace(int(obj["dim"]))
    if kind in ("hyperbolic", "hyperbolic-plane"):
        return HyperbolicPlane()
    if kind in ("tree", "metric-tree"):
        return MetricTree(obj["vertices"], obj["edges"])
    if kind in ("maxnorm", "max-norm-seq"):
        return MaxNormSeq(int(obj["dim"]))
    raise InvalidParameter(f"unknown space kind {kind!r}")


def point_from_json(space: Space, obj):
    """Parse a point literal: a tagged object, or a bare coordinate list."""
    if isinstance(space, MetricTree):
        if isinstance(obj, dict):
            if "vertex" in obj:
                return space.vertex_point(obj["vertex"])
            return TreePoint(obj["edge"], obj["offset"])
        if isinstance(obj, (list, tuple)) and len(obj) == 2:
            return TreePoint(obj[0], obj[1])
        raise InvalidPoint(f"cannot read tree point from {obj!r}")
    if isinstance(obj, dict):
        if obj.get("kind", space.kind) != space.kind:
            raise InvalidPoint(f"point kind {obj.get('kind')!r} does not match space {space.kind!r}")
        obj = obj["coords"]
    p = space.point_type(tuple(obj))
    space.encode(p)
    return p


def point_to_json(space: Space, p) -> dict:
    return space.point_to_json(space.encode(p)[0])
