"""Sampling-based checks of metric inequalities and geodesic laws.

Each law is a batch function drawing n random configurations and returning
left- and right-hand sides of the inequality it asserts. :func:`verify_law`
runs it in fixed-size seeded chunks and folds the chunk results into a
:class:`LawReport`; the fold is associative and keeps the first witness by
sample index, so reports do not depend on how chunks are scheduled.
"""
from __future__ import annotations

import enum
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import sets as cs
from .errors import InvalidParameter, UnsupportedSpace
from .spaces import (
    EuclideanSpace,
    HyperbolicPlane,
    MaxNormSeq,
    MetricTree,
    Space,
    point_to_json,
)

CHUNK = 500
ABS_FLOOR = 1e-12
STRICT_GAP = 1e-12
MIN_SEPARATION = 1e-6


class LawId(str, enum.Enum):
    GEODESIC_PARAM = "geodesic-param"
    CONVEX_METRIC = "convex-metric"
    BUSEMANN = "busemann"
    CAT0_FOUR_POINT = "cat0-four-point"
    COMPARISON_TRIANGLE = "comparison-triangle"
    PARALLEL_TRANSFER = "parallel-transfer"
    STRICT_CONVEXITY = "strict-convexity"
    PROJECTION_NONEXPANSIVE = "projection-nonexpansive"
    PROJECTION_RAY = "projection-ray"

    @classmethod
    def parse(cls, name) -> "LawId":
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).strip().lower().replace("_", "-"))
        except ValueError:
            raise InvalidParameter(f"unknown law {name!r}") from None


@dataclass
class LawReport:
    law: str
    space: str
    samples_run: int
    violations: int
    worst_margin: float
    witness: Optional[list]
    seed: int
    tolerance: float

    def to_json(self) -> dict:
        return {
            "law": self.law,
            "space": self.space,
            "samples_run": self.samples_run,
            "violations": self.violations,
            "worst_margin": self.worst_margin,
            "witness": None if self.witness is None else [point_to_json_any(p) for p in self.witness],
            "seed": self.seed,
            "tolerance": self.tolerance,
        }

    @property
    def passed(self) -> bool:
        return self.violations == 0


def point_to_json_any(p):
    from .spaces import TreePoint

    if isinstance(p, TreePoint):
        return {"kind": "tree", "edge": p.edge_id, "offset": p.offset}
    kinds = {"EuclideanVec": "euclidean", "HyperboloidVec": "hyperbolic", "MaxNormVec": "maxnorm"}
    return {"kind": kinds[type(p).__name__], "coords": list(p.coords)}


@dataclass
class _Partial:
    samples: int
    violations: int
    worst: float
    witness: Optional[list]


def _merge(a: _Partial, b: _Partial) -> _Partial:
    return _Partial(
        a.samples + b.samples,
        a.violations + b.violations,
        min(a.worst, b.worst),
        a.witness if a.witness is not None else b.witness,
    )


# ---------------------------------------------------------------------------
# law batches: each returns (lhs, rhs, kind, rows) where kind is "le", "eq" or
# "lt" and rows is the tuple of configuration arrays used for witnesses.


def _geodesic_param(space, rng, n, ctx):
    X, Y = space.sample(rng, n), space.sample(rng, n)
    t, s = rng.uniform(0, 1, n), rng.uniform(0, 1, n)
    lhs = space.dist(space.combine(X, Y, t), space.combine(X, Y, s))
    rhs = np.abs(t - s) * space.dist(X, Y)
    return lhs, rhs, "eq", (X, Y)


def _convex_metric(space, rng, n, ctx):
    X, Y, Z = space.sample(rng, n), space.sample(rng, n), space.sample(rng, n)
    t = rng.uniform(0, 1, n)
    lhs = space.dist(X, space.combine(Y, Z, t))
    rhs = (1 - t) * space.dist(X, Y) + t * space.dist(X, Z)
    return lhs, rhs, "le", (X, Y, Z)


def _busemann(space, rng, n, ctx):
    X, Y, Z, W = (space.sample(rng, n) for _ in range(4))
    t = rng.uniform(0, 1, n)
    lhs = space.dist(space.combine(X, Y, t), space.combine(Z, W, t))
    rhs = (1 - t) * space.dist(X, Z) + t * space.dist(Y, W)
    return lhs, rhs, "le", (X, Y, Z, W)


def four_point_sides(space, X, Y, Z, P):
    d = space.dist
    lhs = d(X, Z) ** 2 + d(Y, P) ** 2
    rhs = d(X, Y) ** 2 + d(Y, Z) ** 2 + d(Z, P) ** 2 + d(P, X) ** 2
    return lhs, rhs


def _four_point(space, rng, n, ctx):
    X, Y, Z, P = (space.sample(rng, n) for _ in range(4))
    lhs, rhs = four_point_sides(space, X, Y, Z, P)
    return lhs, rhs, "le", (X, Y, Z, P)


def comparison_vertices(a, b, c):
    """Planar vertices for side lengths a=|yz|, b=|xz|, c=|xy| with x at the origin, y on the axis."""
    n = len(a)
    xb = np.zeros((n, 2))
    yb = np.column_stack([c, np.zeros(n)])
    # Kahan's stable area formula, sides sorted descending
    s = np.sort(np.column_stack([a, b, c]), axis=1)[:, ::-1]
    p, q, r = s[:, 0], s[:, 1], s[:, 2]
    prod = (p + (q + r)) * (r - (p - q)) * (r + (p - q)) * (p + (q - r))
    area = 0.25 * np.sqrt(np.maximum(prod, 0.0))
    safe_c = np.where(c > 0, c, 1.0)
    zx = np.where(c > 0, (b * b + c * c - a * a) / (2 * safe_c), b)
    zy = np.where(c > 0, 2 * area / safe_c, 0.0)
    zb = np.column_stack([zx, zy])
    return xb, yb, zb


def _comparison_triangle(space, rng, n, ctx):
    X, Y, Z = (space.sample(rng, n) for _ in range(3))
    a, b, c = space.dist(Y, Z), space.dist(X, Z), space.dist(X, Y)
    xb, yb, zb = comparison_vertices(a, b, c)
    real = (X, Y, Z)
    flat = (xb, yb, zb)
    edges = np.array([(0, 1), (0, 2), (1, 2)])
    e1 = edges[rng.integers(0, 3, n)]
    e2 = edges[rng.integers(0, 3, n)]
    s, u = rng.uniform(0, 1, n), rng.uniform(0, 1, n)

    def on_edge(pts, e, t):
        out = np.empty_like(pts[0])
        for k in range(3):
            m = (e[:, 0] == edges[k, 0]) & (e[:, 1] == edges[k, 1])
            if np.any(m):
                i, j = edges[k]
                out[m] = space.combine(pts[i][m], pts[j][m], t[m]) if pts is real else \
                    (1 - t[m, None]) * pts[i][m] + t[m, None] * pts[j][m]
        return out

    P, Q = on_edge(real, e1, s), on_edge(real, e2, u)
    Pb, Qb = on_edge(flat, e1, s), on_edge(flat, e2, u)
    lhs = space.dist(P, Q)
    rhs = np.sqrt(((Pb - Qb) ** 2).sum(axis=1))
    return lhs, rhs, "le", (X, Y, Z, P, Q)


def _parallel_configs(space, rng, n):
    """Quadruples (x, z, y, w) with [x, z] parallel to [y, w] by construction."""
    if isinstance(space, EuclideanSpace):
        X, Z = space.sample(rng, n), space.sample(rng, n)
        V = space.sample(rng, n)
        Y, W = X + V, Z + V
    elif isinstance(space, (HyperbolicPlane, MetricTree)):
        A, B = space.sample(rng, n), space.sample(rng, n)
        L = space.dist(A, B)
        Ls = np.where(L > 0, L, 1.0)
        h = 0.5 * L * rng.uniform(0, 1, n)
        s1 = (L - h) * rng.uniform(0, 1, n)
        s2 = (L - h) * rng.uniform(0, 1, n)
        at = lambda s: space.combine(A, B, np.clip(s / Ls, 0.0, 1.0))  # noqa: E731
        X, Z, Y, W = at(s1), at(s2), at(s1 + h), at(s2 + h)
    else:
        raise UnsupportedSpace(f"parallel transfer needs a uniquely geodesic space, not {space.kind}")
    # a tenth of the samples use the degenerate hypothesis x = z, y = w
    deg = rng.uniform(0, 1, n) < 0.1
    Z = np.where(deg[:, None], X, Z)
    W = np.where(deg[:, None], Y, W)
    return X, Z, Y, W


def parallel_spread(space, X, Z, Y, W):
    """Largest pairwise gap among d(x,y), d(mid(x,z), mid(y,w)), d(z,w); and their scale."""
    q1 = space.dist(X, Y)
    q2 = space.dist(space.midpoint(X, Z), space.midpoint(Y, W))
    q3 = space.dist(Z, W)
    spread = np.maximum.reduce([np.abs(q1 - q2), np.abs(q1 - q3), np.abs(q2 - q3)])
    return spread, np.maximum.reduce([q1, q2, q3])


def _parallel_transfer(space, rng, n, ctx):
    X, Z, Y, W = _parallel_configs(space, rng, n)
    tol = ctx["tol"]
    hyp, hscale = parallel_spread(space, X, Z, Y, W)
    holds = hyp <= tol * np.maximum(1.0, hscale)
    concl, cscale = parallel_spread(space, X, Y, Z, W)
    lhs = np.where(holds, concl, 0.0)
    return lhs, np.zeros(n), "eq", (X, Z, Y, W)


def _strict_convexity(space, rng, n, ctx):
    A, X, Y = (space.sample(rng, n) for _ in range(3))
    rx, ry = space.dist(A, X), space.dist(A, Y)
    r = np.minimum(rx, ry)
    # move the farther point onto the sphere of radius r about a
    Y = np.where((ry > rx)[:, None], space.combine(A, Y, np.where(ry > 0, rx / np.where(ry > 0, ry, 1), 0)), Y)
    X = np.where((rx > ry)[:, None], space.combine(A, X, np.where(rx > 0, ry / np.where(rx > 0, rx, 1), 0)), X)
    sep = space.dist(X, Y) >= MIN_SEPARATION
    lhs = space.dist(space.midpoint(X, Y), A)
    rhs = r - STRICT_GAP
    lhs = np.where(sep, lhs, -np.inf)
    return lhs, rhs, "lt", (A, X, Y)


def random_set(space, rng):
    """A random closed convex set offered for projection on ``space``."""
    kinds = ["ball", "segment"]
    if isinstance(space, EuclideanSpace):
        kinds.append("polytope")
    if isinstance(space, MetricTree):
        kinds.append("subtree")
    if isinstance(space, MaxNormSeq):
        kinds = ["segment"]
    kind = kinds[rng.integers(0, len(kinds))]
    dec = space.decode
    if kind == "ball":
        return cs.Ball(dec(space.sample(rng, 1)[0]), float(rng.uniform(0.2, 2.0)))
    if kind == "segment":
        P = space.sample(rng, 2)
        return cs.Segment(dec(P[0]), dec(P[1]))
    if kind == "polytope":
        V = space.sample(rng, space.dim + 2)
        return cs.Polytope(tuple(dec(V)))
    G = space.sample(rng, int(rng.integers(1, 5)))
    return cs.SubtreeHull(tuple(dec(G)))


def _chunk_set(space, rng, ctx):
    fixed = ctx.get("sets")
    if fixed:
        return fixed[ctx["chunk"] % len(fixed)]
    return random_set(space, rng)


def _projection_nonexpansive(space, rng, n, ctx):
    S = _chunk_set(space, rng, ctx)
    X, Y = space.sample(rng, n), space.sample(rng, n)
    PX, PY = cs.project_rows(space, S, X), cs.project_rows(space, S, Y)
    return space.dist(PX, PY), space.dist(X, Y), "le", (X, Y)


def _projection_ray(space, rng, n, ctx):
    S = _chunk_set(space, rng, ctx)
    X = space.sample(rng, n)
    PX = cs.project_rows(space, S, X)
    Y = space.combine(X, PX, rng.uniform(0, 1, n))
    PY = cs.project_rows(space, S, Y)
    return space.dist(PX, PY), np.zeros(n), "eq", (X, Y)


LAWS: dict[LawId, Callable] = {
    LawId.GEODESIC_PARAM: _geodesic_param,
    LawId.CONVEX_METRIC: _convex_metric,
    LawId.BUSEMANN: _busemann,
    LawId.CAT0_FOUR_POINT: _four_point,
    LawId.COMPARISON_TRIANGLE: _comparison_triangle,
    LawId.PARALLEL_TRANSFER: _parallel_transfer,
    LawId.STRICT_CONVEXITY: _strict_convexity,
    LawId.PROJECTION_NONEXPANSIVE: _projection_nonexpansive,
    LawId.PROJECTION_RAY: _projection_ray,
}


def margins(lhs, rhs, kind):
    """Normalized slack: negative means the law is violated (before tolerance)."""
    scale = np.maximum.reduce([np.ones_like(lhs), np.abs(np.where(np.isfinite(lhs), lhs, 0)), np.abs(rhs)])
    if kind == "eq":
        return -np.abs(lhs - rhs) / scale
    return (rhs - lhs) / scale


def evaluate(space, lhs, rhs, kind, rows, tol):
    """Fold one batch of law sides into a partial report."""
    m = margins(lhs, rhs, kind)
    bad = m <= 0 if kind == "lt" else m < -max(tol, ABS_FLOOR)
    witness = None
    if np.any(bad):
        i = int(np.argmax(bad))
        witness = [space.decode(R[i]) for R in rows]
    return _Partial(len(lhs), int(bad.sum()), float(m.min()) if len(m) else np.inf, witness)


def _threads(threads):
    if threads is not None:
        return max(1, int(threads))
    try:
        return max(1, int(os.environ.get("GEOPROX_THREADS", "1")))
    except ValueError:
        return 1


def run_chunks(n_samples, seed, body, threads=None) -> _Partial:
    """Run ``body(chunk_index, rng, size)`` over seeded chunks and merge in index order."""
    n_samples = int(n_samples)
    if n_samples < 0:
        raise InvalidParameter("n_samples must be nonnegative")
    n_chunks = (n_samples + CHUNK - 1) // CHUNK
    seqs = np.random.SeedSequence(int(seed)).spawn(n_chunks)
    sizes = [min(CHUNK, n_samples - k * CHUNK) for k in range(n_chunks)]

    def job(k):
        return body(k, np.random.default_rng(seqs[k]), sizes[k])

    workers = _threads(threads)
    if workers > 1 and n_chunks > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(job, range(n_chunks)))
    else:
        parts = [job(k) for k in range(n_chunks)]
    total = _Partial(0, 0, np.inf, None)
    for p in parts:
        total = _merge(total, p)
    return total


def verify_law(space: Space, law, n_samples: int = 10_000, seed: int = 0, tol: float = 1e-9,
               sets=None, threads=None) -> LawReport:
    """Check ``law`` on ``n_samples`` random configurations of ``space``.

    Parameters
    ----------
    space : Space
    law : LawId or str
        Kebab-case names are accepted (``"cat0-four-point"``).
    n_samples : int
    seed : int
        Reports are bit-for-bit reproducible for a given seed.
    tol : float
        Relative tolerance; slack is divided by ``max(1, |lhs|, |rhs|)``.
    sets : list of convex sets, optional
        Sets used by the projection laws, one per chunk in rotation. Random
        sets are drawn when omitted.

    Returns
    -------
    LawReport
    """
    law = LawId.parse(law)
    fn = LAWS[law]
    if law is LawId.PARALLEL_TRANSFER and isinstance(space, MaxNormSeq):
        raise UnsupportedSpace("parallel transfer is undefined without unique geodesics")
    strict = law is LawId.STRICT_CONVEXITY

    def body(k, rng, size):
        ctx = {"tol": tol, "chunk": k, "sets": sets}
        lhs, rhs, kind, rows = fn(space, rng, size, ctx)
        return evaluate(space, lhs, rhs, kind, rows, tol)

    total = run_chunks(n_samples, seed, body, threads)
    worst = total.worst if total.samples else 0.0
    return LawReport(
        law=law.value,
        space=space.kind,
        samples_run=total.samples,
        violations=total.violations,
        worst_margin=float(min(worst, 0.0) if total.violations else worst),
        witness=total.witness,
        seed=int(seed),
        tolerance=0.0 if strict else max(float(tol), ABS_FLOOR),
    )


# ---------------------------------------------------------------------------
# scalar predicates


def four_point_holds(space: Space, x, y, z, p, tol: float = 1e-9) -> bool:
    """``d(x,z)^2 + d(y,p)^2 <= d(x,y)^2 + d(y,z)^2 + d(z,p)^2 + d(p,x)^2 + tol``."""
    X, Y, Z, P = (space.encode(q) for q in (x, y, z, p))
    lhs, rhs = four_point_sides(space, X, Y, Z, P)
    return bool(lhs[0] <= rhs[0] + tol)


def parallel_to(space: Space, x, z, y, w, tol: float = 1e-9) -> bool:
    """Whether ``[x, z]`` is parallel to ``[y, w]``.

    True iff ``d(x,y)``, ``d(midpoint(x,z), midpoint(y,w))`` and ``d(z,w)``
    agree pairwise within ``tol``.
    """
    if isinstance(space, MaxNormSeq):
        raise UnsupportedSpace("parallelism needs unique geodesics")
    X, Z, Y, W = (space.encode(q) for q in (x, z, y, w))
    spread, _ = parallel_spread(space, X, Z, Y, W)
    return bool(spread[0] <= tol)
