"""Closed convex sets with membership tests and metric projections.

Supported combinations for :func:`project`:

============  =======  ====  ========  =======  ===========
space         Segment  Ball  Polytope  Subtree  JamesSlice
============  =======  ====  ========  =======  ===========
euclidean     yes      yes   yes       --       --
hyperbolic    yes      yes   --        --       --
tree          yes      yes   --        yes      --
maxnorm       yes      --    --        --       yes
============  =======  ====  ========  =======  ===========

Everything operates on batches of encoded rows internally; the public
functions accept and return point values.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from . import kernels
from .errors import InvalidSet, UnsupportedSpace
from .spaces import (
    EuclideanSpace,
    HyperbolicPlane,
    MaxNormSeq,
    MaxNormVec,
    MetricTree,
    Space,
    minkowski,
    norm_maxl2,
    point_from_json,
)

SQRT2 = np.sqrt(2.0)
BLOCK = 256


@dataclass(frozen=True)
class Segment:
    a: object
    b: object


@dataclass(frozen=True)
class Ball:
    center: object
    radius: float


@dataclass(frozen=True)
class Polytope:
    vertices: tuple

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))


@dataclass(frozen=True)
class SubtreeHull:
    generators: tuple

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))


@dataclass(frozen=True)
class JamesSlice:
    """``{x : ||x|| <= radius, x_1 = first_coord, x_i >= 0}`` in :class:`MaxNormSeq`."""

    radius: float
    first_coord: float


ConvexSet = Union[Segment, Ball, Polytope, SubtreeHull, JamesSlice]


def singleton(p) -> Segment:
    return Segment(p, p)


def check_set(space: Space, S) -> None:
    """Raise :class:`InvalidSet` unless ``S`` is a valid nonempty set of ``space``."""
    try:
        if isinstance(S, Segment):
            space.encode([S.a, S.b])
        elif isinstance(S, Ball):
            if not float(S.radius) > 0.0:
                raise InvalidSet("ball radius must be positive")
            space.encode(S.center)
        elif isinstance(S, Polytope):
            if not isinstance(space, (EuclideanSpace, MaxNormSeq)):
                raise InvalidSet("polytopes live in euclidean or maxnorm spaces only")
            if not S.vertices:
                raise InvalidSet("polytope needs at least one vertex")
            space.encode(list(S.vertices))
        elif isinstance(S, SubtreeHull):
            if not isinstance(space, MetricTree):
                raise InvalidSet("subtree hulls live in metric trees only")
            if not S.generators:
                raise InvalidSet("subtree hull needs at least one generator")
            space.encode(list(S.generators))
        elif isinstance(S, JamesSlice):
            if not isinstance(space, MaxNormSeq):
                raise InvalidSet("james slices live in maxnorm spaces only")
            if not float(S.radius) > 0.0 or not 0.0 <= float(S.first_coord) <= float(S.radius):
                raise InvalidSet("james slice needs radius > 0 and 0 <= first_coord <= radius")
        else:
            raise InvalidSet(f"unknown set {S!r}")
    except InvalidSet:
        raise
    except Exception as exc:  # encoding errors
        raise InvalidSet(str(exc)) from exc


# ---------------------------------------------------------------------------
# projections (batch)


def _segment_rows(space, S):
    E = space.encode([S.a, S.b])
    return E[0:1], E[1:2]


def project_segment_rows(space, A, B, X):
    """Nearest points of X on the geodesic segment [A, B] (A, B single rows)."""
    X = np.atleast_2d(X)
    n = len(X)
    if isinstance(space, EuclideanSpace):
        D = B - A
        dd = float((D * D).sum())
        if dd == 0.0:
            return np.repeat(A, n, axis=0)
        t = np.clip(((X - A) @ D.ravel()) / dd, 0.0, 1.0)
        return space.combine(A, B, t)
    if isinstance(space, HyperbolicPlane):
        L = float(space.dist(A, B)[0])
        if L == 0.0:
            return np.repeat(A, n, axis=0)
        U = space.log_dir(A, B)
        alpha = minkowski(X, A)
        beta = minkowski(X, U)
        with np.errstate(divide="ignore"):
            s = np.clip(np.arctanh(np.clip(-beta / alpha, -1.0, 1.0)), 0.0, L)
        Z = space.normalize(np.cosh(s)[:, None] * A + np.sinh(s)[:, None] * U)
        Z[s == 0.0] = A
        Z[s == L] = B
        return Z
    if isinstance(space, MetricTree):
        L = float(space.dist(A, B)[0])
        if L == 0.0:
            return np.repeat(A, n, axis=0)
        # nearest point sits at the Gromov product (x|b)_a along [a, b]
        da = space.dist(X, A)
        db = space.dist(X, B)
        s = np.clip((da + L - db) / 2.0, 0.0, L)
        return space.combine(np.repeat(A, n, axis=0), np.repeat(B, n, axis=0), s / L)
    if isinstance(space, MaxNormSeq):
        return _golden_segment(space, A, B, X)
    raise UnsupportedSpace(f"segment projection not offered on {space.kind}")


def _golden_segment(space, A, B, X, iters=200):
    """Some minimizer of the convex map t -> d(x, (1-t)a + tb)."""
    n = len(X)
    lo = np.zeros(n)
    hi = np.ones(n)
    g = (np.sqrt(5.0) - 1.0) / 2.0

    def f(t):
        return space.dist(X, space.combine(A, B, t))

    c = hi - g * (hi - lo)
    d = lo + g * (hi - lo)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        left = fc <= fd
        hi = np.where(left, d, hi)
        lo = np.where(left, lo, c)
        c_new = hi - g * (hi - lo)
        d_new = lo + g * (hi - lo)
        c, d = c_new, d_new
        fc, fd = f(c), f(d)
        if np.all(hi - lo < 1e-15):
            break
    t = (lo + hi) / 2.0
    cand = np.stack([t, np.zeros(n), np.ones(n)], axis=1)
    vals = np.stack([f(cand[:, k]) for k in range(3)], axis=1)
    best = cand[np.arange(n), vals.argmin(axis=1)]
    return space.combine(A, B, best)


def project_ball_rows(space, C, r, X):
    X = np.atleast_2d(X)
    D = space.dist(C, X)
    out = X.copy()
    far = D > r
    if np.any(far):
        out[far] = space.combine(np.repeat(C, int(far.sum()), axis=0), X[far], r / D[far])
    return out


def project_polytope_rows(V, X):
    X = np.atleast_2d(X)
    out = np.empty_like(X)
    for i, x in enumerate(X):
        w = kernels.min_norm_point(V - x)
        out[i] = w @ V
    return out


def project_subtree_rows(space, G, X):
    X = np.atleast_2d(X)
    n = len(X)
    if len(G) == 1:
        return np.repeat(G[:1], n, axis=0)
    best = None
    best_d = None
    for i in range(1, len(G)):
        Z = project_segment_rows(space, G[0:1], G[i:i + 1], X)
        d = space.dist(X, Z)
        if best is None:
            best, best_d = Z, d
        else:
            better = d < best_d
            best[better] = Z[better]
            best_d = np.where(better, d, best_d)
    return best


def project_james_rows(X, radius, first, iters=64):
    """Nearest points of a james slice under the max-l2 norm.

    Bisection on the attained distance rho: the slice meets the closed ball
    B(x, rho) iff the box ``|z_i - x_i| <= rho`` intersected with the slice's
    box and the two Euclidean balls is nonempty, which is decided exactly by
    projecting x onto (box ∩ origin ball) through a scalar multiplier search.
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    n, dim = X.shape
    R, c = float(radius), float(first)
    R2 = SQRT2 * R
    tail = X[:, 1:]

    def nearest_in(rho):
        lo = np.empty_like(X)
        hi = np.empty_like(X)
        lo[:, 0] = hi[:, 0] = c
        lo[:, 1:] = np.maximum(0.0, tail - rho[:, None])
        hi[:, 1:] = np.minimum(R, tail + rho[:, None])
        z = np.clip(X, lo, hi)
        over = np.sqrt((z * z).sum(1)) > R2
        if np.any(over):
            m_lo = np.zeros(n)
            m_hi = np.ones(n)
            for _ in range(iters):
                mid = (m_lo + m_hi) / 2.0
                zz = np.clip(mid[:, None] * X, lo, hi)
                ok = np.sqrt((zz * zz).sum(1)) <= R2
                m_lo = np.where(ok, mid, m_lo)
                m_hi = np.where(ok, m_hi, mid)
            z_in = np.clip(m_lo[:, None] * X, lo, hi)
            z = np.where(over[:, None], z_in, z)
        return z

    start = np.zeros_like(X)
    start[:, 0] = c
    rho_hi = norm_maxl2(X - start)
    rho_lo = np.maximum.reduce([
        np.abs(X[:, 0] - c),
        np.max(tail - R, axis=1, initial=0.0),
        np.max(-tail, axis=1, initial=0.0),
        np.zeros(n),
    ])
    # box-active coordinates sit at rho up to one rounding step
    slack = 4e-16 * (1.0 + np.abs(X).max(axis=1) + R)
    best = start.copy()
    for _ in range(iters):
        mid = (rho_lo + rho_hi) / 2.0
        z = nearest_in(mid)
        feasible = (norm_maxl2(z - X) <= mid + slack) & _james_contains(z, R, c, 1e-15 * R)
        rho_hi = np.where(feasible, mid, rho_hi)
        rho_lo = np.where(feasible, rho_lo, mid)
        best = np.where(feasible[:, None], z, best)
    # tighten: keep whichever candidate is actually closer
    z = nearest_in(rho_hi)
    z_ok = _james_contains(z, R, c, 1e-12)
    closer = z_ok & (norm_maxl2(z - X) < norm_maxl2(best - X))
    return np.where(closer[:, None], z, best)


def _james_contains(X, R, c, tol):
    X = np.atleast_2d(X)
    return (np.abs(X[:, 0] - c) <= tol) & np.all(X[:, 1:] >= -tol, axis=1) & (norm_maxl2(X) <= R + tol)


def project_rows(space: Space, S, X) -> np.ndarray:
    """Batch metric projection of rows X onto S."""
    X = np.atleast_2d(X)
    if isinstance(S, Segment):
        A, B = _segment_rows(space, S)
        return project_segment_rows(space, A, B, X)
    if isinstance(space, MaxNormSeq):
        if isinstance(S, JamesSlice):
            return project_james_rows(X, S.radius, S.first_coord)
        raise UnsupportedSpace(f"{type(S).__name__} projection is not offered on maxnorm")
    if isinstance(S, Ball):
        return project_ball_rows(space, space.encode(S.center), float(S.radius), X)
    if isinstance(S, Polytope):
        if not isinstance(space, EuclideanSpace):
            raise UnsupportedSpace("polytope projection needs a euclidean space")
        return project_polytope_rows(space.encode(list(S.vertices)), X)
    if isinstance(S, SubtreeHull):
        if not isinstance(space, MetricTree):
            raise UnsupportedSpace("subtree hulls live in metric trees")
        return project_subtree_rows(space, space.encode(list(S.generators)), X)
    raise UnsupportedSpace(f"{type(S).__name__} projection not offered on {space.kind}")


def contains_rows(space: Space, S, X, tol=1e-9) -> np.ndarray:
    X = np.atleast_2d(X)
    if isinstance(S, JamesSlice):
        if not isinstance(space, MaxNormSeq):
            raise InvalidSet("james slices live in maxnorm spaces")
        return _james_contains(X, float(S.radius), float(S.first_coord), tol)
    if isinstance(S, Ball):
        return space.dist(space.encode(S.center), X) <= float(S.radius) + tol
    if isinstance(S, Polytope):
        V = space.encode(list(S.vertices))
        # convex-combination feasibility is a linear question: use the Euclidean hull
        return np.linalg.norm(project_polytope_rows(V, X) - X, axis=1) <= tol
    return space.dist(project_rows(space, S, X), X) <= tol


def project(space: Space, S, x, tol: float = 1e-9):
    """Metric projection of the point ``x`` onto ``S``.

    Returns a nearest point of ``S``; unique in the CAT(0)-flagged spaces, one
    of possibly many minimizers in :class:`MaxNormSeq`.

    Raises
    ------
    UnsupportedSpace
        If the set/space combination has no projection.
    """
    check_set(space, S)
    return space.decode(project_rows(space, S, space.encode(x))[0])


def contains(space: Space, S, p, tol: float = 1e-9) -> bool:
    check_set(space, S)
    return bool(contains_rows(space, S, space.encode(p), tol)[0])


# ---------------------------------------------------------------------------
# sampling


def candidates(space: Space, S) -> np.ndarray:
    """Structured points of S: extreme points where the structure provides them."""
    if isinstance(S, Segment):
        A, B = _segment_rows(space, S)
        return np.vstack([A, B])
    if isinstance(S, Ball):
        return space.encode(S.center)
    if isinstance(S, Polytope):
        return space.encode(list(S.vertices))
    if isinstance(S, SubtreeHull):
        return space.encode(list(S.generators))
    if isinstance(S, JamesSlice):
        return james_candidates(space.dim, float(S.radius), float(S.first_coord))
    raise InvalidSet(f"unknown set {S!r}")


def james_candidates(dim, R, c):
    rows = []
    base = np.zeros(dim)
    base[0] = c
    rows.append(base)
    for j in range(1, dim):
        z = base.copy()
        z[j] = R
        rows.append(z)
    if dim > 1:
        spread = base.copy()
        spread[1:] = _james_tail_scale(np.ones((1, dim - 1)), R, c)[0]
        rows.append(spread)
    return np.array(rows)


def _james_tail_scale(T, R, c):
    """Largest multiple of each nonnegative tail row that stays in the slice."""
    T = np.atleast_2d(T)
    mx = T.max(axis=1)
    l2 = np.sqrt((T * T).sum(axis=1))
    s_inf = np.where(mx > 0, R / np.where(mx > 0, mx, 1.0), np.inf)
    s_l2 = np.where(l2 > 0, np.sqrt(max(2 * R * R - c * c, 0.0)) / np.where(l2 > 0, l2, 1.0), np.inf)
    s = np.minimum(s_inf, s_l2)
    s = np.where(np.isfinite(s), s, 0.0)
    return T * s[:, None]


def random_rows(space, S, rng, n):
    if isinstance(S, Segment):
        A, B = _segment_rows(space, S)
        return space.combine(np.repeat(A, n, axis=0), np.repeat(B, n, axis=0), rng.uniform(0, 1, n))
    if isinstance(S, Ball):
        C = np.repeat(space.encode(S.center), n, axis=0)
        P = space.sample(rng, n)
        dim = getattr(space, "dim", 2)
        r = float(S.radius) * rng.uniform(0, 1, n) ** (1.0 / dim)
        return space.ray(C, P, r)
    if isinstance(S, Polytope):
        V = space.encode(list(S.vertices))
        W = rng.dirichlet(np.ones(len(V)), size=n)
        return W @ V
    if isinstance(S, SubtreeHull):
        G = space.encode(list(S.generators))
        i = rng.integers(0, len(G), n)
        j = rng.integers(0, len(G), n)
        return space.combine(G[i], G[j], rng.uniform(0, 1, n))
    if isinstance(S, JamesSlice):
        dim = space.dim
        R, c = float(S.radius), float(S.first_coord)
        T = rng.uniform(0, 1, (n, dim - 1))
        # vary support size so sparse and spread tails both occur
        keep = rng.uniform(0, 1, (n, 1)) ** 2
        T = np.where(rng.uniform(0, 1, T.shape) <= np.maximum(keep, 1.0 / max(dim - 1, 1)), T, 0.0)
        T = _james_tail_scale(T, R, c) * rng.uniform(0, 1, (n, 1)) ** (1.0 / max(dim - 1, 1))
        out = np.zeros((n, dim))
        out[:, 0] = c
        out[:, 1:] = T
        return out
    raise InvalidSet(f"unknown set {S!r}")


def sample_rows(space: Space, S, n: int, seed: int, with_candidates: bool = True) -> np.ndarray:
    """Deterministic sample of n points of S.

    Structured candidates come first, then seeded random points generated in
    fixed blocks, so a larger ``n`` extends (never reshuffles) a smaller one.
    """
    n = int(n)
    head = candidates(space, S) if with_candidates else np.empty((0, space.width))
    head = head[:n]
    rest = n - len(head)
    parts = [head]
    if rest > 0:
        children = np.random.SeedSequence(int(seed)).spawn((rest + BLOCK - 1) // BLOCK)
        for k, child in enumerate(children):
            m = min(BLOCK, rest - k * BLOCK)
            parts.append(random_rows(space, S, np.random.default_rng(child), BLOCK)[:m])
    return np.vstack(parts)


def sample(space: Space, S, n: int, seed: int = 0) -> list:
    return space.decode(sample_rows(space, S, n, seed))


# ---------------------------------------------------------------------------
# JSON


def set_from_json(space: Space, obj: dict):
    if not isinstance(obj, dict) or "type" not in obj:
        raise InvalidSet("set must be an object with a 'type'")
    kind = obj["type"]
    pt = lambda o: point_from_json(space, o)  # noqa: E731
    try:
        if kind == "segment":
            S = Segment(pt(obj["a"]), pt(obj["b"]))
        elif kind == "point":
            S = singleton(pt(obj["p"]))
        elif kind == "ball":
            S = Ball(pt(obj["center"]), float(obj["radius"]))
        elif kind == "polytope":
            S = Polytope(tuple(pt(v) for v in obj["vertices"]))
        elif kind == "subtree":
            S = SubtreeHull(tuple(pt(v) for v in obj["generators"]))
        elif kind == "james-slice":
            S = JamesSlice(float(obj["radius"]), float(obj["first_coord"]))
        else:
            raise InvalidSet(f"unknown set type {kind!r}")
    except KeyError as exc:
        raise InvalidSet(f"{kind}: missing field {exc}") from exc
    check_set(space, S)
    return S


def set_to_json(space: Space, S) -> dict:
    pj = lambda p: space.point_to_json(space.encode(p)[0])  # noqa: E731
    if isinstance(S, Segment):
        return {"type": "segment", "a": pj(S.a), "b": pj(S.b)}
    if isinstance(S, Ball):
        return {"type": "ball", "center": pj(S.center), "radius": float(S.radius)}
    if isinstance(S, Polytope):
        return {"type": "polytope", "vertices": [pj(v) for v in S.vertices]}
    if isinstance(S, SubtreeHull):
        return {"type": "subtree", "generators": [pj(g) for g in S.generators]}
    if isinstance(S, JamesSlice):
        return {"type": "james-slice", "radius": float(S.radius), "first_coord": float(S.first_coord)}
    raise InvalidSet(f"unknown set {S!r}")


def unit_vector(dim, i, scale=1.0) -> MaxNormVec:
    v = np.zeros(dim)
    v[i] = scale
    return MaxNormVec(tuple(v))
